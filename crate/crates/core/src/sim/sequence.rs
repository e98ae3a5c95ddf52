use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::DegreeDistribution;

/// Degrees `d_1, …, d_n` of a configuration-model graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct DegreeSequence {
    degrees: Vec<u32>,
}

/// How a rounded degree histogram was made to have an even half-edge total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityAdjustment {
    /// Degree bucket that lost one vertex.
    pub degree: u32,
    /// Count in that bucket before the adjustment.
    pub count_before: u64,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::Domain(format!("vertex {i} has degree 0; degrees must be ≥ 1")));
        }
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total % 2 == 1 {
            return Err(Error::Parity(total));
        }
        Ok(DegreeSequence { degrees })
    }

    /// Sequence with `counts[k]` vertices of degree `k` (`counts[0]` ignored),
    /// listed in increasing degree.
    pub fn from_histogram(counts: &[u64]) -> Result<Self> {
        let mut degrees = Vec::new();
        for (k, &c) in counts.iter().enumerate().skip(1) {
            degrees.extend(std::iter::repeat_n(k as u32, c as usize));
        }
        Self::new(degrees)
    }

    /// Rounds `n p_k` to counts. When the half-edge total comes out odd, one
    /// vertex is removed from the odd-degree bucket with the largest count
    /// (ties to the larger degree); the adjustment is returned.
    pub fn from_distribution(p: &DegreeDistribution, n: usize) -> Result<(Self, Option<ParityAdjustment>)> {
        if n == 0 {
            return Err(Error::Domain("n ≥ 1 required".into()));
        }
        let mut counts = vec![0u64; p.max_degree() + 1];
        for (k, pk) in p.iter() {
            counts[k] = (n as f64 * pk).round() as u64;
        }
        let total: u64 = counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        let mut adjustment = None;
        if total % 2 == 1 {
            let (k, &c) = counts
                .iter()
                .enumerate()
                .filter(|&(k, &c)| k % 2 == 1 && c > 0)
                .max_by_key(|&(k, &c)| (c, k))
                .expect("an odd total needs an occupied odd-degree bucket");
            adjustment = Some(ParityAdjustment { degree: k as u32, count_before: c });
            counts[k] -= 1;
        }
        let seq = Self::from_histogram(&counts)?;
        if seq.is_empty() {
            return Err(Error::Domain(format!("n = {n} rounds every degree count to zero")));
        }
        Ok((seq, adjustment))
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0) as usize
    }

    /// Half-edge total `2m`.
    pub fn half_edges(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    /// Edge count `m`.
    pub fn edges(&self) -> u64 {
        self.half_edges() / 2
    }

    /// `n_k`, indexed by degree.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.max_degree() + 1];
        for &d in &self.degrees {
            h[d as usize] += 1;
        }
        h
    }

    /// Empirical degree distribution `n_k / n`.
    pub fn empirical_distribution(&self) -> Result<DegreeDistribution> {
        let n = self.len() as f64;
        DegreeDistribution::from_pairs(
            self.histogram().iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c as f64 / n)),
        )
        .or_else(|_| {
            // renormalize in case rounding leaves the sum off by more than the tolerance
            let h = self.histogram();
            let total: u64 = h.iter().sum();
            DegreeDistribution::from_pairs(
                h.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (k, c as f64 / total as f64)),
            )
        })
    }
}

impl TryFrom<Vec<u32>> for DegreeSequence {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DegreeSequence> for Vec<u32> {
    fn from(d: DegreeSequence) -> Self {
        d.degrees
    }
}
