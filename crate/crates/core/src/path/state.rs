use crate::error::{Error, Result};
use crate::profile::Masses;

/// A fluid exploration state `(x_0, (x_k)_{k≥1})`.
///
/// `xk[k]` is the mass at degree `k`; `xk[0]` is unused and kept at zero so
/// that rows of a [`crate::fluid::FluidPath`] map onto states directly.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePoint {
    pub x0: f64,
    pub xk: Vec<f64>,
}

impl StatePoint {
    pub fn new(x0: f64, xk: &Masses) -> Result<Self> {
        if !(x0.is_finite() && x0 >= 0.0) {
            return Err(Error::Domain(format!("x0 must be finite and ≥ 0, got {x0}")));
        }
        Ok(StatePoint { x0, xk: xk.as_slice().to_vec() })
    }

    /// From a row `(ζ_0, ζ_1, …, ζ_K)`.
    pub fn from_row(row: &[f64]) -> Self {
        let mut xk = row.to_vec();
        let x0 = if xk.is_empty() { 0.0 } else { xk[0] };
        if xk.is_empty() {
            xk.push(0.0);
        }
        xk[0] = 0.0;
        StatePoint { x0, xk }
    }

    /// Row `(x_0, x_1, …, x_K)` padded to `len` entries.
    pub fn to_row(&self, len: usize) -> Vec<f64> {
        let mut row = vec![0.0; len.max(self.xk.len())];
        row[..self.xk.len()].copy_from_slice(&self.xk);
        row[0] = self.x0;
        row
    }

    pub fn get(&self, k: usize) -> f64 {
        self.xk.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> usize {
        self.xk.iter().rposition(|&v| v != 0.0).unwrap_or(0)
    }

    /// Degree masses as a [`Masses`] value.
    pub fn masses(&self) -> Result<Masses> {
        Masses::from_dense(self.xk.iter().map(|&v| v.max(0.0)).collect())
    }

    /// `Σ_k k x_k`.
    pub fn degree_weight(&self) -> f64 {
        self.xk.iter().enumerate().map(|(k, &v)| k as f64 * v).sum()
    }

    /// `r(x) = x_0⁺ + Σ k x_k`.
    pub fn r(&self) -> f64 {
        self.x0.max(0.0) + self.degree_weight()
    }

    /// `(r_0, r_1, …, r_K)`; all zero when `r(x) = 0`.
    pub fn rates(&self) -> Vec<f64> {
        let r = self.r();
        let mut out = vec![0.0; self.xk.len()];
        if r > 0.0 && r.is_finite() {
            out[0] = self.x0.max(0.0) / r;
            for k in 1..self.xk.len() {
                out[k] = k as f64 * self.xk[k] / r;
            }
        }
        out
    }
}

/// Velocity of a fluid path: `beta0 = ζ_0'` and `betak[k] = ζ_k'`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalVelocity {
    pub beta0: f64,
    pub betak: Vec<f64>,
}

impl LocalVelocity {
    pub fn from_row(row: &[f64]) -> Self {
        let s = StatePoint::from_row(row);
        LocalVelocity { beta0: s.x0, betak: s.xk }
    }

    pub fn zero(len: usize) -> Self {
        LocalVelocity { beta0: 0.0, betak: vec![0.0; len.max(1)] }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.betak.get(k).copied().unwrap_or(0.0)
    }
}
