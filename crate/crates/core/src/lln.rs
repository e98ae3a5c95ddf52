//! Generating functions, criticality and the law-of-large-numbers fluid
//! trajectory of the exploration process.
//!
//! ```text
//! G0(z) = Σ p_k z^k          G1(z) = Σ k p_k z^{k−1} / μ
//! ν = Σ k(k−1) p_k / μ       G1(ρ) = ρ
//! F_s(u) = G0(s) − G0(su)    f_s = F_s^{-1}
//!
//! supercritical, s = √(1 − 2t/μ), τ = μ(1 − ρ²)/2:
//!   ζ_k(t) = p_k s^k                   t ≤ τ
//!   ζ_k(t) = p_k ρ^k f_ρ(t − τ)^k      t > τ
//!   ζ_0(t) = μ − 2t − μ s G1(s)        t ≤ τ, 0 afterwards
//! subcritical:
//!   ζ_0 = 0, ζ_k(t) = p_k f_1(t)^k
//! ψ(t) = −2∫_0^t r_0(ζ(s)) ds + Σ (k − 2)(p_k − ζ_k(t))
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid::{FluidPath, TauMarkers};
use crate::path::{LocalVelocity, StatePoint, Trajectory};
use crate::profile::DegreeDistribution;
use crate::roots::bisect;

fn check_unit(z: f64) -> Result<()> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(Error::Domain(format!("z must lie in [0, 1], got {z}")))
    }
}

fn g0(p: &DegreeDistribution, z: f64) -> f64 {
    p.iter().map(|(k, pk)| pk * z.powi(k as i32)).sum()
}

fn g1(p: &DegreeDistribution, z: f64) -> f64 {
    p.iter().map(|(k, pk)| k as f64 * pk * z.powi(k as i32 - 1)).sum::<f64>() / p.mean()
}

/// `G0(z) = Σ p_k z^k`.
pub fn gen_g0(p: &DegreeDistribution, z: f64) -> Result<f64> {
    check_unit(z)?;
    Ok(g0(p, z))
}

/// `G1(z) = Σ k p_k z^{k−1} / μ`.
pub fn gen_g1(p: &DegreeDistribution, z: f64) -> Result<f64> {
    check_unit(z)?;
    Ok(g1(p, z))
}

/// `ν = Σ k(k−1) p_k / μ`.
pub fn criticality_nu(p: &DegreeDistribution) -> Result<f64> {
    let mu = p.mean();
    if mu <= 0.0 {
        return Err(Error::Domain("mean degree must be positive".into()));
    }
    Ok(p.iter().map(|(k, pk)| (k * (k - 1)) as f64 * pk).sum::<f64>() / mu)
}

/// `Σ k(k−2) p_k > 0`.
pub fn is_supercritical(p: &DegreeDistribution) -> bool {
    p.iter().map(|(k, pk)| k as f64 * (k as f64 - 2.0) * pk).sum::<f64>() > 0.0
}

/// Fixed point of `G1` below 1. Returns 1 when there is no giant component
/// (`Σ k(k−2) p_k ≤ 0`) and 0 when `p_1 = 0`.
pub fn survival_rho(p: &DegreeDistribution) -> f64 {
    if !is_supercritical(p) {
        return 1.0;
    }
    if p.p(1) == 0.0 {
        return 0.0;
    }
    let h = |x: f64| g1(p, x) - x;
    // h(0) > 0 and h < 0 just below 1; walk the upper end toward 1 until the
    // sign flips.
    let mut hi = 0.5;
    let mut j = 1;
    while h(hi) >= 0.0 && j < 60 {
        j += 1;
        hi = 1.0 - 0.5f64.powi(j);
    }
    bisect(h, 0.0, hi, 1e-14, 200)
}

/// Largest-component vertex fraction `1 − G0(ρ)`, 0 without a giant.
pub fn giant_fraction(p: &DegreeDistribution) -> f64 {
    if !is_supercritical(p) {
        return 0.0;
    }
    1.0 - g0(p, survival_rho(p))
}

/// `f_s(t) = F_s^{-1}(t)` with `F_s(u) = G0(s) − G0(su)`; 0 once `t ≥ G0(s)`.
pub fn inverse_fs(p: &DegreeDistribution, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1], got {s}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be ≥ 0, got {t}")));
    }
    Ok(inverse_fs_unchecked(p, s, t))
}

fn inverse_fs_unchecked(p: &DegreeDistribution, s: f64, t: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let g0s = g0(p, s);
    if t >= g0s {
        return 0.0;
    }
    if t <= 0.0 {
        return 1.0;
    }
    bisect(|u| g0s - g0(p, s * u) - t, 0.0, 1.0, 1e-15, 200)
}

/// Scalar summary of the fluid limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlnSummary {
    pub mu: f64,
    pub nu: f64,
    /// 1 when there is no giant component.
    pub rho: f64,
    /// End of the giant excursion, `μ(1 − ρ²)/2`; absent when subcritical.
    pub tau: Option<f64>,
    /// Time at which `r(ζ)` reaches 0.
    pub tau_zeta: f64,
    pub giant_fraction: f64,
    pub supercritical: bool,
}

impl LlnSummary {
    pub fn new(p: &DegreeDistribution) -> Result<Self> {
        let mu = p.mean();
        let nu = criticality_nu(p)?;
        let supercritical = is_supercritical(p);
        let rho = survival_rho(p);
        let (tau, tau_zeta) = if supercritical {
            let tau = mu * (1.0 - rho * rho) / 2.0;
            (Some(tau), tau + g0(p, rho))
        } else {
            (None, 1.0)
        };
        let giant_fraction = if supercritical { 1.0 - g0(p, rho) } else { 0.0 };
        Ok(LlnSummary { mu, nu, rho, tau, tau_zeta, giant_fraction, supercritical })
    }
}

/// The fluid limit as an analytic trajectory.
#[derive(Debug, Clone)]
pub struct LlnTrajectory {
    p: DegreeDistribution,
    pub summary: LlnSummary,
}

impl LlnTrajectory {
    pub fn new(p: &DegreeDistribution) -> Result<Self> {
        Ok(LlnTrajectory { p: p.clone(), summary: LlnSummary::new(p)? })
    }

    /// `s = √(1 − 2t/μ)` on the giant excursion.
    fn s_at(&self, t: f64) -> f64 {
        (1.0 - 2.0 * t / self.summary.mu).max(0.0).sqrt()
    }

    fn in_giant(&self, t: f64) -> bool {
        self.summary.tau.is_some_and(|tau| t <= tau)
    }

    /// `(ζ_0, ζ_1, …, ζ_K)` at time `t ≥ 0`.
    pub fn zeta(&self, t: f64) -> Vec<f64> {
        let kmax = self.p.max_degree();
        let mut z = vec![0.0; kmax + 1];
        if self.in_giant(t) {
            let s = self.s_at(t);
            for (k, pk) in self.p.iter() {
                z[k] = pk * s.powi(k as i32);
            }
            // μ s² − μ s G1(s) = s Σ k p_k (s − s^{k−1})
            let z0: f64 = s * self
                .p
                .iter()
                .map(|(k, pk)| k as f64 * pk * (s - s.powi(k as i32 - 1)))
                .sum::<f64>();
            z[0] = z0.max(0.0);
        } else {
            let (base, scale) = match self.summary.tau {
                Some(tau) => (t - tau, self.summary.rho),
                None => (t, 1.0),
            };
            let f = inverse_fs_unchecked(&self.p, scale, base);
            let sf = scale * f;
            for (k, pk) in self.p.iter() {
                z[k] = pk * sf.powi(k as i32);
            }
        }
        z
    }

    /// `ψ(t)` by the closed form of `∫ r_0`; on the giant excursion
    /// `∫_0^t r_0 = t − 1 + G0(s)`, and `r_0 = 0` afterwards.
    pub fn psi_exact(&self, t: f64) -> f64 {
        let z = self.zeta(t);
        let tail: f64 = self.p.iter().map(|(k, pk)| (k as f64 - 2.0) * (pk - z[k])).sum();
        let integral = match self.summary.tau {
            Some(tau) => {
                let s = self.s_at(t.min(tau));
                t.min(tau) - 1.0 + g0(&self.p, s)
            }
            None => 0.0,
        };
        -2.0 * integral + tail
    }

    fn velocity(&self, t: f64, z: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; z.len()];
        let r: f64 = if self.in_giant(t) {
            self.summary.mu - 2.0 * t
        } else {
            z.iter().enumerate().skip(1).map(|(k, x)| k as f64 * x).sum()
        };
        if r > 0.0 {
            for k in 1..z.len() {
                v[k] = -(k as f64) * z[k] / r;
            }
        }
        if self.in_giant(t) {
            v[0] = -2.0 - v.iter().enumerate().skip(1).map(|(k, x)| k as f64 * x).sum::<f64>();
        }
        v
    }

    /// Samples the trajectory onto `grid`. `ψ` uses the trapezoid rule for
    /// `∫ r_0`, with every cell near `τ` split into four.
    pub fn sample(&self, grid: &[f64]) -> Result<FluidPath> {
        let mut grid = grid.to_vec();
        if let Some(tau) = self.summary.tau {
            if tau > grid[0] && tau < *grid.last().unwrap() && !grid.contains(&tau) {
                let pos = grid.partition_point(|&x| x < tau);
                grid.insert(pos, tau);
            }
        }
        let zeta: Vec<Vec<f64>> = grid.iter().map(|&t| self.zeta(t)).collect();
        let psi = grid.iter().map(|&t| self.psi_exact(t)).collect();
        let markers = TauMarkers { tau: self.summary.tau, tau_zeta: Some(self.summary.tau_zeta) };
        FluidPath::new(grid, zeta, psi, markers)
    }
}

impl Trajectory for LlnTrajectory {
    fn sample(&self, t: f64) -> (StatePoint, LocalVelocity) {
        let z = self.zeta(t);
        let v = self.velocity(t, &z);
        (StatePoint::from_row(&z), LocalVelocity::from_row(&v))
    }
}

/// Fluid limit sampled on `grid`, which must start at 0 and reach `μ/2`.
pub fn lln_path(p: &DegreeDistribution, grid: &[f64]) -> Result<FluidPath> {
    if grid.is_empty() || grid[0] != 0.0 {
        return Err(Error::Domain("grid must start at t = 0".into()));
    }
    let t_end = *grid.last().unwrap();
    if t_end < p.mean() / 2.0 {
        return Err(Error::Domain(format!("grid must reach T ≥ μ/2 = {}, got T = {t_end}", p.mean() / 2.0)));
    }
    LlnTrajectory::new(p)?.sample(grid)
}
