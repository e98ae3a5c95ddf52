//! Local rates of fluid paths.
//!
//! ```text
//! L(x, β) = Σ_{k≥0} ν_k log(ν_k / μ_k),   ν_0 = 1 + Σ_{k≥1} β_k,  ν_k = −β_k,  μ_k = r_k(x)
//! ```
//!
//! `L` is the integrand for paths exploring at pace `dr/dt = −2`. The general
//! Lagrangian `Σ_{k≥0} r_k ℓ(ρ_k)` with `ρ_k r_k = −ζ_k'` and
//! `ρ_0 r_0 = −(ψ' + Σ (k − 2) ζ_k') / 2` covers paths at any pace and
//! reduces to `L` at pace −2.

use super::state::{LocalVelocity, StatePoint};

/// Rounding slack on velocity sign constraints. Velocities violating a
/// constraint by more than this give an infinite rate.
pub const VELOCITY_SLACK: f64 = 1e-12;

/// `ν log(ν/μ)` with `0 log(0/μ) = 0` and `ν log(ν/0) = ∞` for `ν > 0`.
fn kl_term(nu: f64, mu: f64) -> f64 {
    if nu <= 0.0 {
        0.0
    } else if mu <= 0.0 {
        f64::INFINITY
    } else {
        nu * (nu / mu).ln()
    }
}

/// `μ ℓ(ν/μ) = ν log(ν/μ) − ν + μ`, with the same conventions.
fn poisson_term(nu: f64, mu: f64) -> f64 {
    if mu <= 0.0 {
        if nu <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        kl_term(nu, mu) - nu + mu
    }
}

fn clamp_rate(nu: f64) -> Option<f64> {
    if nu < -VELOCITY_SLACK || nu.is_nan() {
        None
    } else {
        Some(nu.max(0.0))
    }
}

/// Natural jump distribution `μ(·|x)`: `r_k(x)`, or `δ_0` at `r(x) = 0`.
fn jump_distribution(x: &StatePoint, len: usize) -> Vec<f64> {
    let mut mu = x.rates();
    mu.resize(len.max(mu.len()), 0.0);
    if x.r() <= 0.0 {
        mu.iter_mut().for_each(|m| *m = 0.0);
        mu[0] = 1.0;
    }
    mu
}

/// `L(x, β)`; `+∞` when `Σ β_k < −1` or `ν` charges a degree with `μ_k = 0`.
pub fn local_rate_l(x: &StatePoint, v: &LocalVelocity) -> f64 {
    let len = v.betak.len().max(x.xk.len());
    let mu = jump_distribution(x, len);
    let mut sum_beta = 0.0;
    let mut total = 0.0;
    for k in 1..v.betak.len() {
        let Some(nu) = clamp_rate(-v.betak[k]) else {
            return f64::INFINITY;
        };
        sum_beta -= nu;
        total += kl_term(nu, mu[k]);
    }
    let Some(nu0) = clamp_rate(1.0 + sum_beta) else {
        return f64::INFINITY;
    };
    total + kl_term(nu0, mu[0])
}

/// General Lagrangian `Σ_{k≥0} r_k ℓ(ρ_k)`. Here `v.beta0` is `ψ'`, which
/// equals `ζ_0'` away from the reflecting boundary.
pub fn lagrangian_general(x: &StatePoint, v: &LocalVelocity) -> f64 {
    let rates = x.rates();
    let mut total = 0.0;
    let mut weighted = 0.0;
    for k in 1..v.betak.len() {
        let Some(nu) = clamp_rate(-v.betak[k]) else {
            return f64::INFINITY;
        };
        weighted += (k as f64 - 2.0) * v.betak[k];
        total += poisson_term(nu, rates.get(k).copied().unwrap_or(0.0));
    }
    let Some(nu0) = clamp_rate(-(v.beta0 + weighted) / 2.0) else {
        return f64::INFINITY;
    };
    total + poisson_term(nu0, rates[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_natural_velocity() {
        let x = StatePoint::from_row(&[0.3, 0.2, 0.1, 0.4]);
        let r = x.rates();
        let v = LocalVelocity { beta0: 0.0, betak: vec![0.0, -r[1], -r[2], -r[3]] };
        assert!(local_rate_l(&x, &v).abs() < 1e-15);
    }

    #[test]
    fn zero_state_delta_at_zero() {
        let x = StatePoint::from_row(&[0.0, 0.0, 0.0]);
        assert_eq!(local_rate_l(&x, &LocalVelocity::zero(3)), 0.0);
    }

    #[test]
    fn single_term() {
        let x = StatePoint::from_row(&[0.25, 0.0, 0.0, 0.25]);
        let c = x.rates()[0];
        let v = LocalVelocity::zero(4);
        assert!((local_rate_l(&x, &v) - (1.0 / c).ln()).abs() < 1e-15);
    }

    #[test]
    fn infinite_cases() {
        let x = StatePoint::from_row(&[0.5, 0.0, 0.0, 0.25]);
        let v = LocalVelocity { beta0: 0.0, betak: vec![0.0, 0.0, 0.0, -1.5] };
        assert_eq!(local_rate_l(&x, &v), f64::INFINITY);
        let v = LocalVelocity { beta0: 0.0, betak: vec![0.0, -0.1, 0.0, -0.5] };
        assert_eq!(local_rate_l(&x, &v), f64::INFINITY);
        let x0 = StatePoint::from_row(&[0.0, 0.0, 0.0, 0.25]);
        assert_eq!(local_rate_l(&x0, &LocalVelocity::zero(4)), f64::INFINITY);
    }

    #[test]
    fn lagrangian_reduces_to_l_at_pace_two() {
        let x = StatePoint::from_row(&[0.3, 0.2, 0.1, 0.4]);
        let betak = vec![0.0, -0.1, -0.2, -0.3];
        let weighted: f64 = betak.iter().enumerate().map(|(k, b)| k as f64 * b).sum();
        let v = LocalVelocity { beta0: -2.0 - weighted, betak };
        let a = local_rate_l(&x, &v);
        let b = lagrangian_general(&x, &v);
        assert!((a - b).abs() < 1e-14, "{a} {b}");
    }
}
