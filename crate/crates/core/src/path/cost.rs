//! Path costs: quadrature of the local rate along a trajectory, and the
//! closed form for optimal segments.
//!
//! ```text
//! H̃(x)      = Σ_{k≥1} x_k log x_k − ((x_0 + Σ k x_k)/2) log((x_0 + Σ k x_k)/2)
//! K̃(x1, x2) = ((z_0 + Σ k z_k)/2) log(1 − β²) − Σ z_k log(1 − β^k) + x2_0 log β
//! cost      = H̃(z) + H̃(x2) − H̃(x1) + K̃(x1, x2)
//! ```

use super::local_rate::{lagrangian_general, local_rate_l};
use super::segment::PathSegmentSpec;
use super::state::{LocalVelocity, StatePoint};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::quadrature::{gl16, gl64, graded_panels};
use crate::rates::{log1m, xlogx};

/// Tolerance on `|dr/dt + 2|` for the pace precondition.
pub const PACE_TOL: f64 = 1e-6;
/// Fraction of the interval handled by the endpoint-graded tail.
pub const TAIL_FRACTION: f64 = 0.05;
const MAIN_PANELS: usize = 16;
const TAIL_LEVELS: usize = 30;
const PACE_PROBES: usize = 256;

/// `max |dr/dt + 2|` over probe points of `[t1, t2]`, by central differences.
pub fn pace_residual(path: &dyn Trajectory, t1: f64, t2: f64) -> f64 {
    let len = t2 - t1;
    if len <= 0.0 {
        return 0.0;
    }
    let h = 1e-6 * len;
    let mut worst = 0.0f64;
    for i in 0..PACE_PROBES {
        let t = t1 + (i as f64 + 0.5) / PACE_PROBES as f64 * len;
        let (a, b) = ((t - h).max(t1), (t + h).min(t2));
        let slope = (path.sample(b).0.r() - path.sample(a).0.r()) / (b - a);
        worst = worst.max((slope + 2.0).abs());
    }
    worst
}

fn integrate(path: &dyn Trajectory, t1: f64, t2: f64, rate: fn(&StatePoint, &LocalVelocity) -> f64) -> f64 {
    let at = |t: f64| {
        let (x, v) = path.sample(t);
        rate(&x, &v)
    };
    let interior: Vec<f64> = path.breakpoints(t1, t2).into_iter().filter(|&b| b > t1 && b < t2).collect();
    if !interior.is_empty() {
        let mut edges = Vec::with_capacity(interior.len() + 2);
        edges.push(t1);
        edges.extend(interior);
        edges.push(t2);
        return edges.windows(2).map(|w| gl16().integrate(w[0], w[1], at)).sum();
    }

    let ta = t2 - TAIL_FRACTION * (t2 - t1);
    let h = (ta - t1) / MAIN_PANELS as f64;
    let mut total = 0.0;
    for i in 0..MAIN_PANELS {
        let a = t1 + h * i as f64;
        let b = if i + 1 == MAIN_PANELS { ta } else { a + h };
        total += gl64().integrate(a, b, at);
    }

    let chart = path.endpoint_chart().filter(|c| {
        let end = c.time_at(c.beta);
        c.t1 <= t1 && (end - t2).abs() <= 1e-12 * end.abs().max(1.0)
    });
    match chart {
        Some(c) => {
            // t = t1 + ς̃(1 − α²), dt = −2ς̃α dα; panels graded toward α = β.
            let alpha_a = c.alpha_at(ta);
            let w = alpha_a - c.beta;
            for (a, b) in graded_panels(0.0, w, TAIL_LEVELS) {
                total += gl64().integrate(a, b, |u| {
                    let alpha = alpha_a - u;
                    let (x, v) = path.sample_alpha(alpha);
                    rate(&x, &v) * 2.0 * c.varsigma_tilde * alpha
                });
            }
        }
        None => {
            for (a, b) in graded_panels(ta, t2, TAIL_LEVELS) {
                total += gl64().integrate(a, b, at);
            }
        }
    }
    total
}

/// `∫_{t1}^{t2} L(ζ, ζ') ds` for a path exploring at pace `dr/dt = −2`.
pub fn path_cost(path: &dyn Trajectory, t1: f64, t2: f64) -> Result<f64> {
    if !(t2 >= t1) {
        return Err(Error::Domain(format!("t2 ≥ t1 required, got [{t1}, {t2}]")));
    }
    if t2 == t1 {
        return Ok(0.0);
    }
    let residual = pace_residual(path, t1, t2);
    if residual > PACE_TOL {
        return Err(Error::Precondition(format!("dr/dt = −2 violated: max |dr/dt + 2| = {residual:.3e}")));
    }
    Ok(integrate(path, t1, t2, local_rate_l))
}

/// `∫_{t1}^{t2} Σ_k r_k ℓ(ρ_k) ds` for a path at any pace; the velocity's
/// `beta0` is read as `ψ'`.
pub fn lagrangian_cost(path: &dyn Trajectory, t1: f64, t2: f64) -> Result<f64> {
    if !(t2 >= t1) {
        return Err(Error::Domain(format!("t2 ≥ t1 required, got [{t1}, {t2}]")));
    }
    if t2 == t1 {
        return Ok(0.0);
    }
    Ok(integrate(path, t1, t2, lagrangian_general))
}

/// `H̃(x)` for `(x_0, x_k)` given as a row.
pub fn h_tilde(row: &[f64]) -> f64 {
    let s: f64 = row.iter().skip(1).map(|&v| xlogx(v)).sum();
    let e = 0.5 * (row[0] + row.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).sum::<f64>());
    s - xlogx(e)
}

/// `K̃(x1, x2)` at the given `β`.
pub fn k_tilde(x1: &StatePoint, x2: &StatePoint, beta: f64) -> Result<f64> {
    let n = x1.xk.len().max(x2.xk.len());
    let z: Vec<f64> = (0..n).map(|k| if k == 0 { x1.x0 - x2.x0 } else { x1.get(k) - x2.get(k) }).collect();
    let edges = 0.5 * (z[0] + z.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).sum::<f64>());
    let log_term = if x2.x0 == 0.0 {
        0.0
    } else if beta == 0.0 {
        return Err(Error::Infeasible("x2_0 log β is −∞: x2_0 > 0 with β = 0".into()));
    } else {
        x2.x0 * beta.ln()
    };
    if beta == 0.0 {
        return Ok(log_term);
    }
    let tail: f64 = z.iter().enumerate().skip(1).map(|(k, &v)| v * log1m(beta.powi(k as i32))).sum();
    Ok(edges * log1m(beta * beta) - tail + log_term)
}

/// Closed-form cost of the optimal segment from `x1` to `x2`.
pub fn cost_closed_form(x1: &StatePoint, x2: &StatePoint) -> Result<f64> {
    let n = x1.xk.len().max(x2.xk.len());
    if x1.x0 == x2.x0 && (1..n).all(|k| x1.get(k) == x2.get(k)) {
        return Ok(0.0);
    }
    let spec = PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0)?;
    let r1 = x1.to_row(n);
    let r2 = x2.to_row(n);
    let z: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| a - b).collect();
    Ok(h_tilde(&z) + h_tilde(&r2) - h_tilde(&r1) + k_tilde(x1, x2, spec.beta)?)
}
