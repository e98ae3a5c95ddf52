//! Optimal segments between two exploration states.
//!
//! With `z = x1 − x2`, `ς = ½(r(x1) − r(x2))` and `β` the root of
//!
//! ```text
//! B(α) = z_1 − Σ_{k≥3} k z_k B_k(α) + x2_0/α − α x1_0,   B_k(α) = (α − α^{k−1})/(1 − α^k)
//! ```
//!
//! (or `β = 0` when `x2_0 = 0` and `z_1 = 0`), the minimizer is, with
//! `α = √(1 − (t − t1)/ς̃)`, `ς̃ = ς/(1 − β²)`, `z̃_k = z_k/(1 − β^k)`:
//!
//! ```text
//! ζ_k(t) = x1_k − z̃_k (1 − α^k)
//! ζ_0(t) = α² x1_0 + Σ k z̃_k (α² − α^k)
//! ψ(t)   = ψ(t1) + ζ_0(t) − x1_0
//! ```

use serde::{Deserialize, Serialize};

use super::state::{LocalVelocity, StatePoint};
use super::trajectory::{EndpointChart, Trajectory};
use crate::error::{Error, Result};
use crate::fluid::{FluidPath, TauMarkers};
use crate::rates::{f_k, BETA_BRACKET, BETA_MAX_ITER, BETA_TOL};
use crate::roots::bisect;

/// Which branch of the construction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentCase {
    /// `x2_0 = 0` and `z_1 = 0`; `β = 0`.
    #[serde(rename = "case_i")]
    CaseI,
    /// Excess edges in `z` and (`x2_0 > 0` or `z_1 > 0`); `β ∈ (0, 1)`.
    #[serde(rename = "case_ii")]
    CaseII,
}

/// `ς = ½(r(x1) − r(x2))`.
pub fn varsigma(x1: &StatePoint, x2: &StatePoint) -> f64 {
    0.5 * (x1.r() - x2.r())
}

/// `z = x1 − x2` on degree coordinates.
fn z_degrees(x1: &StatePoint, x2: &StatePoint) -> Vec<f64> {
    let n = x1.xk.len().max(x2.xk.len());
    (0..n).map(|k| if k == 0 { 0.0 } else { x1.get(k) - x2.get(k) }).collect()
}

/// `B(α)`, strictly decreasing on (0, 1).
pub fn b_alpha(x1: &StatePoint, x2: &StatePoint, alpha: f64) -> f64 {
    let z = z_degrees(x1, x2);
    b_alpha_z(&z, x1.x0, x2.x0, alpha)
}

fn b_alpha_z(z: &[f64], x1_0: f64, x2_0: f64, alpha: f64) -> f64 {
    let tail: f64 = z.iter().enumerate().skip(3).map(|(k, &zk)| k as f64 * zk * f_k(alpha, k)).sum();
    z.get(1).copied().unwrap_or(0.0) - tail + x2_0 / alpha - alpha * x1_0
}

/// `β(x1, x2)` and the construction case. The case test uses exact zeros.
pub fn beta_general(x1: &StatePoint, x2: &StatePoint) -> Result<(f64, SegmentCase)> {
    let z = z_degrees(x1, x2);
    let z1 = z.get(1).copied().unwrap_or(0.0);
    if x2.x0 == 0.0 && z1 == 0.0 {
        return Ok((0.0, SegmentCase::CaseI));
    }
    let z0 = x1.x0 - x2.x0;
    let edges: f64 = z.iter().enumerate().map(|(k, &v)| k as f64 * v).sum::<f64>() + z0;
    let vertices: f64 = 2.0 * z.iter().sum::<f64>();
    if !(edges > vertices) {
        return Err(Error::Infeasible(format!(
            "Σ k z_k + z_0 > 2 Σ z_k fails ({edges} ≤ {vertices}) while x2_0 > 0 or z_1 > 0"
        )));
    }
    let (lo, hi) = BETA_BRACKET;
    let beta = bisect(|a| b_alpha_z(&z, x1.x0, x2.x0, a), lo, hi, BETA_TOL, BETA_MAX_ITER);
    Ok((beta, SegmentCase::CaseII))
}

/// Endpoints and derived constants of one optimal segment.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSegmentSpec {
    pub x1: StatePoint,
    pub x2: StatePoint,
    pub t1: f64,
    pub varsigma: f64,
    pub beta: f64,
    pub case: SegmentCase,
    /// `ψ(t1)`, carried over from any earlier part of the path.
    pub psi_start: f64,
}

impl PathSegmentSpec {
    pub fn new(x1: StatePoint, x2: StatePoint, t1: f64) -> Result<Self> {
        if x1.x0 < 0.0 || x2.x0 < 0.0 {
            return Err(Error::Domain("x0 must be ≥ 0 at both endpoints".into()));
        }
        let n = x1.xk.len().max(x2.xk.len());
        for k in 1..n {
            if x2.get(k) > x1.get(k) {
                return Err(Error::Infeasible(format!(
                    "x2 ≤ x1 violated at degree {k}: {} > {}",
                    x2.get(k),
                    x1.get(k)
                )));
            }
            if x2.get(k) < 0.0 {
                return Err(Error::Domain(format!("negative mass at degree {k}")));
            }
        }
        let vs = varsigma(&x1, &x2);
        if vs < 0.0 {
            return Err(Error::Infeasible(format!("ς ≥ 0 violated: ς = {vs}")));
        }
        let (beta, case) = beta_general(&x1, &x2)?;
        Ok(PathSegmentSpec { x1, x2, t1, varsigma: vs, beta, case, psi_start: 0.0 })
    }

    /// `ς̃ = ς/(1 − β²)`.
    pub fn varsigma_tilde(&self) -> f64 {
        self.varsigma / (1.0 - self.beta * self.beta)
    }

    pub fn t2(&self) -> f64 {
        self.t1 + self.varsigma
    }

    /// `z̃_k = z_k/(1 − β^k)`, indexed by degree.
    pub fn z_tilde(&self) -> Vec<f64> {
        let z = z_degrees(&self.x1, &self.x2);
        z.iter().enumerate().map(|(k, &v)| if k == 0 { 0.0 } else { v / (1.0 - self.beta.powi(k as i32)) }).collect()
    }
}

/// `(α^k − β^k)/(α − β)` without cancellation.
fn pow_diff_quotient(alpha: f64, beta: f64, k: usize) -> f64 {
    let mut sum = 0.0;
    let mut a = 1.0;
    for i in 0..k {
        sum += a * beta.powi((k - 1 - i) as i32);
        a *= alpha;
    }
    sum
}

/// The analytic minimizer of one segment.
#[derive(Debug, Clone)]
pub struct Minimizer {
    pub spec: PathSegmentSpec,
    z_tilde: Vec<f64>,
    varsigma_tilde: f64,
}

impl Minimizer {
    pub fn new(spec: PathSegmentSpec) -> Self {
        let z_tilde = spec.z_tilde();
        let varsigma_tilde = spec.varsigma_tilde();
        Minimizer { spec, z_tilde, varsigma_tilde }
    }

    pub fn varsigma_tilde(&self) -> f64 {
        self.varsigma_tilde
    }

    fn chart(&self) -> EndpointChart {
        EndpointChart { t1: self.spec.t1, varsigma_tilde: self.varsigma_tilde, beta: self.spec.beta }
    }

    /// `(ζ_0, ζ_1, …, ζ_K)` at chart coordinate `alpha`.
    pub fn row_alpha(&self, alpha: f64) -> Vec<f64> {
        // Written around the right endpoint so that vanishing coordinates
        // stay nonnegative to the last bit.
        let (x1, x2) = (&self.spec.x1, &self.spec.x2);
        let beta = self.spec.beta;
        let d = alpha - beta;
        let mut row = vec![0.0; self.z_tilde.len()];
        let s2 = alpha + beta;
        let mut bracket = s2 * x1.x0;
        for (k, &zt) in self.z_tilde.iter().enumerate().skip(1) {
            if zt == 0.0 {
                row[k] = x2.get(k);
                continue;
            }
            let sk = pow_diff_quotient(alpha, beta, k);
            row[k] = x2.get(k) + zt * d * sk;
            bracket += k as f64 * zt * (s2 - sk);
        }
        row[0] = x2.x0 + d * bracket;
        row
    }

    /// `(ζ_0', ζ_1', …)` at chart coordinate `alpha`:
    /// `ζ_k' = −k z̃_k α^{k−2}/(2ς̃)` and `ζ_0' = −2 − Σ k ζ_k'`.
    pub fn velocity_alpha(&self, alpha: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.z_tilde.len()];
        let scale = 2.0 * self.varsigma_tilde;
        let mut weighted = 0.0;
        for (k, &zt) in self.z_tilde.iter().enumerate().skip(1) {
            if zt != 0.0 {
                v[k] = -(k as f64) * zt * alpha.powi(k as i32 - 2) / scale;
                weighted += k as f64 * v[k];
            }
        }
        v[0] = -2.0 - weighted;
        v
    }

    /// State row at time `t`; exact at both endpoints.
    pub fn row_at(&self, t: f64) -> Vec<f64> {
        let len = self.z_tilde.len();
        if t <= self.spec.t1 {
            return self.spec.x1.to_row(len);
        }
        if t >= self.spec.t2() {
            return self.spec.x2.to_row(len);
        }
        self.row_alpha(self.chart().alpha_at(t))
    }

    pub fn psi_at(&self, t: f64) -> f64 {
        self.spec.psi_start + self.row_at(t)[0] - self.spec.x1.x0
    }
}

impl Trajectory for Minimizer {
    fn sample(&self, t: f64) -> (StatePoint, LocalVelocity) {
        let alpha = self.chart().alpha_at(t.clamp(self.spec.t1, self.spec.t2()));
        (StatePoint::from_row(&self.row_at(t)), LocalVelocity::from_row(&self.velocity_alpha(alpha)))
    }

    fn endpoint_chart(&self) -> Option<EndpointChart> {
        if self.varsigma_tilde > 0.0 {
            Some(self.chart())
        } else {
            None
        }
    }

    fn sample_alpha(&self, alpha: f64) -> (StatePoint, LocalVelocity) {
        (StatePoint::from_row(&self.row_alpha(alpha)), LocalVelocity::from_row(&self.velocity_alpha(alpha)))
    }
}

/// The minimizer sampled on `grid` (times in `[t1, t1 + ς]`).
pub fn minimizer_path(spec: &PathSegmentSpec, grid: &[f64]) -> Result<FluidPath> {
    let (t1, t2) = (spec.t1, spec.t2());
    if grid.iter().any(|&t| t < t1 - 1e-12 || t > t2 + 1e-12) {
        return Err(Error::Domain(format!("grid must lie within [{t1}, {t2}]")));
    }
    let m = Minimizer::new(spec.clone());
    let zeta: Vec<Vec<f64>> = grid.iter().map(|&t| m.row_at(t)).collect();
    let psi = grid.iter().map(|&t| m.psi_at(t)).collect();
    FluidPath::new(grid.to_vec(), zeta, psi, TauMarkers::default())
}
