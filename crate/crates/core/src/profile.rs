//! Degree-indexed mass vectors: degree distributions and sub-profiles.

use crate::error::{Error, Result};

/// Tolerance on `Σ p_k = 1` for a degree distribution.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Nonnegative masses indexed by degree `k ≥ 1`, stored densely.
///
/// Slot 0 exists so that `as_slice()[k]` is the mass at degree `k`; it is
/// always zero. Trailing zeros are trimmed, so `max_degree()` is the largest
/// degree carrying positive mass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Masses {
    values: Vec<f64>,
}

impl Masses {
    /// Empty (all-zero) profile.
    pub fn zeros() -> Self {
        Masses { values: vec![0.0] }
    }

    /// Build from a dense vector where `values[k]` is the mass at degree `k`.
    pub fn from_dense(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            values.push(0.0);
        }
        if values[0] != 0.0 {
            return Err(Error::Domain("degree 0 carries mass; degrees must be ≥ 1".into()));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!("mass at degree {k} is {v}; masses must be finite and ≥ 0")));
            }
        }
        let mut m = Masses { values };
        m.trim();
        Ok(m)
    }

    /// Build from `(degree, mass)` pairs. Repeated degrees accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        let mut values = vec![0.0];
        for (k, v) in pairs {
            if k == 0 {
                return Err(Error::Domain("degree 0 is not allowed; degrees must be ≥ 1".into()));
            }
            if values.len() <= k {
                values.resize(k + 1, 0.0);
            }
            values[k] += v;
        }
        Self::from_dense(values)
    }

    fn trim(&mut self) {
        while self.values.len() > 1 && *self.values.last().unwrap() == 0.0 {
            self.values.pop();
        }
    }

    /// Mass at degree `k` (zero outside the stored range).
    pub fn get(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// Largest degree with positive mass, 0 for the empty profile.
    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    /// Dense view, index = degree.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// `(k, mass)` for every degree with positive mass, in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().skip(1).filter(|(_, &v)| v > 0.0).map(|(k, &v)| (k, v))
    }

    /// `Σ_k x_k`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `Σ_k k x_k`.
    pub fn first_moment(&self) -> f64 {
        self.values.iter().enumerate().map(|(k, &v)| k as f64 * v).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.len() == 1
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Masses) -> bool {
        let n = self.values.len().max(other.values.len());
        (0..n).all(|k| self.get(k) <= other.get(k))
    }

    /// Componentwise `self − other`; fails if any coordinate goes negative.
    pub fn checked_sub(&self, other: &Masses) -> Result<Masses> {
        if !other.le(self) {
            return Err(Error::Infeasible("componentwise difference would be negative".into()));
        }
        let n = self.values.len();
        Masses::from_dense((0..n).map(|k| self.get(k) - other.get(k)).collect())
    }

    /// `Σ k x_k > 2 Σ x_k`: strictly more edges than vertices.
    pub fn has_excess_edges(&self) -> bool {
        self.first_moment() > 2.0 * self.total()
    }
}

/// A finitely supported probability distribution on degrees `k ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    masses: Masses,
}

impl DegreeDistribution {
    pub fn new(masses: Masses) -> Result<Self> {
        let total = masses.total();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!("degree probabilities sum to {total}, expected 1")));
        }
        Ok(DegreeDistribution { masses })
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        Self::new(Masses::from_pairs(pairs)?)
    }

    /// Point mass at degree `d`.
    pub fn regular(d: usize) -> Result<Self> {
        Self::from_pairs([(d, 1.0)])
    }

    pub fn masses(&self) -> &Masses {
        &self.masses
    }

    pub fn p(&self, k: usize) -> f64 {
        self.masses.get(k)
    }

    pub fn max_degree(&self) -> usize {
        self.masses.max_degree()
    }

    /// Mean degree `μ = Σ k p_k`.
    pub fn mean(&self) -> f64 {
        self.masses.first_moment()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.masses.iter()
    }
}

/// Masses `q` intended to sit below a degree distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SubProfile {
    masses: Masses,
}

impl SubProfile {
    pub fn new(masses: Masses) -> Self {
        SubProfile { masses }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        Ok(Self::new(Masses::from_pairs(pairs)?))
    }

    pub fn masses(&self) -> &Masses {
        &self.masses
    }

    pub fn q(&self, k: usize) -> f64 {
        self.masses.get(k)
    }

    /// `Σ k q_k > 2 Σ q_k`.
    pub fn is_feasible(&self) -> bool {
        self.masses.has_excess_edges()
    }

    /// Checks `0 ≤ q ≤ p` componentwise.
    pub fn check_within(&self, p: &DegreeDistribution) -> Result<()> {
        if self.masses.le(p.masses()) {
            Ok(())
        } else {
            let k = (1..=self.masses.max_degree()).find(|&k| self.q(k) > p.p(k)).unwrap_or(0);
            Err(Error::Infeasible(format!(
                "q ≤ p violated at degree {k}: q_{k} = {} > p_{k} = {}",
                self.q(k),
                p.p(k)
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_reports_support() {
        let m = Masses::from_dense(vec![0.0, 0.5, 0.0, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(m.max_degree(), 3);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(1, 0.5), (3, 0.5)]);
        assert_eq!(m.first_moment(), 2.0);
    }

    #[test]
    fn rejects_degree_zero_and_negative_mass() {
        assert!(Masses::from_pairs([(0, 0.1)]).is_err());
        assert!(Masses::from_pairs([(2, -0.1)]).is_err());
        assert!(Masses::from_pairs([(2, f64::NAN)]).is_err());
    }

    #[test]
    fn distribution_must_normalize() {
        assert!(DegreeDistribution::from_pairs([(1, 0.5), (3, 0.4)]).is_err());
        let p = DegreeDistribution::from_pairs([(1, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(p.mean(), 2.0);
    }

    #[test]
    fn within_names_condition() {
        let p = DegreeDistribution::regular(3).unwrap();
        let q = SubProfile::from_pairs([(3, 1.5)]).unwrap();
        let e = q.check_within(&p).unwrap_err().to_string();
        assert!(e.contains("q ≤ p"), "{e}");
        assert!(SubProfile::from_pairs([(3, 0.5)]).unwrap().check_within(&p).is_ok());
    }

    #[test]
    fn feasibility_flag() {
        assert!(SubProfile::from_pairs([(3, 0.5)]).unwrap().is_feasible());
        assert!(!SubProfile::from_pairs([(2, 0.5)]).unwrap().is_feasible());
        assert!(!SubProfile::from_pairs([(1, 0.5), (3, 0.1)]).unwrap().is_feasible());
    }
}
