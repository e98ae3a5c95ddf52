//! Grid representation of fluid paths.

use crate::error::{Error, Result};
use crate::path::{skorokhod_map, LocalVelocity, StatePoint, Trajectory};

/// Distinguished times of a path, when they exist.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TauMarkers {
    /// End of the giant excursion, where `ζ_0` returns to 0.
    pub tau: Option<f64>,
    /// Time at which `r(ζ)` reaches 0.
    pub tau_zeta: Option<f64>,
}

/// A path sampled on a strictly increasing time grid. Row `i` of `zeta` is
/// `(ζ_0, ζ_1, …, ζ_K)` at `grid[i]`. Between grid points the path is
/// linear.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidPath {
    pub grid: Vec<f64>,
    pub zeta: Vec<Vec<f64>>,
    pub psi: Vec<f64>,
    pub tau_markers: TauMarkers,
}

/// `n ≥ 2` equally spaced points from `a` to `b`, hitting both exactly.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
}

impl FluidPath {
    /// Validates shapes and pads rows to a common width.
    pub fn new(grid: Vec<f64>, mut zeta: Vec<Vec<f64>>, psi: Vec<f64>, tau_markers: TauMarkers) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Domain("empty grid".into()));
        }
        if zeta.len() != grid.len() || psi.len() != grid.len() {
            return Err(Error::Domain(format!(
                "grid has {} points but zeta has {} rows and psi {} values",
                grid.len(),
                zeta.len(),
                psi.len()
            )));
        }
        if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!("grid must be strictly increasing ({} then {})", w[0], w[1])));
        }
        let width = zeta.iter().map(Vec::len).max().unwrap_or(1).max(1);
        for row in &mut zeta {
            row.resize(width, 0.0);
        }
        Ok(FluidPath { grid, zeta, psi, tau_markers })
    }

    /// Largest degree column `K`.
    pub fn max_degree(&self) -> usize {
        self.zeta[0].len() - 1
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn state(&self, i: usize) -> StatePoint {
        StatePoint::from_row(&self.zeta[i])
    }

    /// `r(ζ)` at grid point `i`.
    pub fn r_at(&self, i: usize) -> f64 {
        self.state(i).r()
    }

    /// Cell index `i` with `grid[i] ≤ t ≤ grid[i + 1]`, clamped to the grid.
    fn cell(&self, t: f64) -> usize {
        let n = self.grid.len();
        if n < 2 {
            return 0;
        }
        self.grid.partition_point(|&g| g <= t).clamp(1, n - 1) - 1
    }

    /// Linear interpolation weight of `t` in cell `i`.
    fn weight(&self, i: usize, t: f64) -> f64 {
        if self.grid.len() < 2 {
            return 0.0;
        }
        ((t - self.grid[i]) / (self.grid[i + 1] - self.grid[i])).clamp(0.0, 1.0)
    }

    /// Row `(ζ_0, …, ζ_K)` at time `t`, by linear interpolation.
    pub fn row_at(&self, t: f64) -> Vec<f64> {
        let i = self.cell(t);
        let w = self.weight(i, t);
        if w == 0.0 || self.grid.len() < 2 {
            return self.zeta[i].clone();
        }
        let (a, b) = (&self.zeta[i], &self.zeta[i + 1]);
        a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect()
    }

    pub fn psi_at(&self, t: f64) -> f64 {
        let i = self.cell(t);
        let w = self.weight(i, t);
        if self.grid.len() < 2 {
            return self.psi[0];
        }
        self.psi[i] + w * (self.psi[i + 1] - self.psi[i])
    }

    /// `(ψ', ζ_1', …, ζ_K')` at node `i`: central differences inside the
    /// grid, one-sided at its ends.
    pub fn node_velocity(&self, i: usize) -> Vec<f64> {
        let n = self.grid.len();
        if n < 2 {
            return vec![0.0; self.zeta[0].len()];
        }
        let (a, b) = if i == 0 {
            (0, 1)
        } else if i + 1 == n {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let dt = self.grid[b] - self.grid[a];
        let mut v: Vec<f64> = self.zeta[a].iter().zip(&self.zeta[b]).map(|(x, y)| (y - x) / dt).collect();
        v[0] = (self.psi[b] - self.psi[a]) / dt;
        v
    }

    /// Checks the path-space invariants up to `tol`: nonnegative state,
    /// non-increasing `ζ_k` and `r(ζ)`, and `ζ_0 = Γ(ψ)`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let n = self.grid.len();
        for i in 0..n {
            if let Some(k) = self.zeta[i].iter().position(|&v| v < -tol) {
                return Err(Error::State(format!("ζ_{k} < 0 at t = {}", self.grid[i])));
            }
        }
        for i in 1..n {
            for k in 1..self.zeta[i].len() {
                if self.zeta[i][k] > self.zeta[i - 1][k] + tol {
                    return Err(Error::State(format!("ζ_{k} increases at t = {}", self.grid[i])));
                }
            }
            if self.r_at(i) > self.r_at(i - 1) + tol {
                return Err(Error::State(format!("r(ζ) increases at t = {}", self.grid[i])));
            }
        }
        let gamma = skorokhod_map(&self.psi)?;
        for i in 0..n {
            if (gamma[i] - self.zeta[i][0]).abs() > tol {
                return Err(Error::State(format!(
                    "ζ_0 = {} differs from Γ(ψ) = {} at t = {}",
                    self.zeta[i][0], gamma[i], self.grid[i]
                )));
            }
        }
        Ok(())
    }
}

/// Piecewise-linear path with interpolated central-difference velocities.
///
/// Discretization noise can push a velocity slightly outside the set where
/// the local rate is finite even though the sampled path is admissible, so
/// velocities are projected back: `ζ_k' ∈ [−1, 0]`, `ζ_k' = 0` where
/// `ζ_k = 0`, and `Σ ζ_k' ≥ −1`.
impl Trajectory for FluidPath {
    fn sample(&self, t: f64) -> (StatePoint, LocalVelocity) {
        let row = self.row_at(t);
        let i = self.cell(t);
        let mut v = self.node_velocity(i);
        if self.grid.len() >= 2 {
            let w = self.weight(i, t);
            let vb = self.node_velocity(i + 1);
            for (a, b) in v.iter_mut().zip(&vb) {
                *a += w * (b - *a);
            }
        }
        let mut sum = 0.0;
        for k in 1..v.len() {
            v[k] = if row[k] <= 0.0 { 0.0 } else { v[k].clamp(-1.0, 0.0) };
            sum += v[k];
        }
        if sum < -1.0 {
            for x in v.iter_mut().skip(1) {
                *x /= -sum;
            }
        }
        (StatePoint::from_row(&row), LocalVelocity::from_row(&v))
    }

    fn breakpoints(&self, t1: f64, t2: f64) -> Vec<f64> {
        self.grid.iter().copied().filter(|&g| g > t1 && g < t2).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> FluidPath {
        let grid = uniform_grid(0.0, 1.0, 11);
        let zeta = grid.iter().map(|&t| vec![0.0, 0.0, 0.0, 1.0 - 0.5 * t]).collect();
        let psi = grid.iter().map(|&t| 0.5 * t).collect();
        FluidPath::new(grid, zeta, psi, TauMarkers::default()).unwrap()
    }

    #[test]
    fn uniform_grid_hits_ends() {
        let g = uniform_grid(0.1, 0.7, 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 0.7);
    }

    #[test]
    fn interpolation_and_velocity() {
        let p = line();
        let row = p.row_at(0.35);
        assert!((row[3] - 0.825).abs() < 1e-15);
        let (_, v) = p.sample(0.35);
        assert!((v.get(3) + 0.5).abs() < 1e-12);
        assert!((p.psi_at(0.35) - 0.175).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(FluidPath::new(vec![0.0, 0.0], vec![vec![0.0]; 2], vec![0.0; 2], TauMarkers::default()).is_err());
        assert!(FluidPath::new(vec![0.0, 1.0], vec![vec![0.0]; 1], vec![0.0; 2], TauMarkers::default()).is_err());
    }

    #[test]
    fn invariants_detect_increase() {
        let mut p = line();
        assert!(p.check_invariants(1e-12).is_err()); // ζ_0 = 0 but ψ > 0
        for i in 0..p.len() {
            p.zeta[i][0] = p.psi[i];
        }
        p.check_invariants(1e-12).unwrap();
        p.zeta[5][3] = 2.0;
        assert!(p.check_invariants(1e-12).is_err());
    }
}
