use super::eea::ExplorationRecord;
use crate::error::{Error, Result};
use crate::fluid::{FluidPath, TauMarkers};

/// Scaled exploration path: step `j` sits at time `j/n`, with
/// `ζ_k(t) = V_k(⌊nt⌋)/n`, `ζ_0(t) = A(⌊nt⌋)/n` and
/// `ψ(t) = (A − 2C)(⌊nt⌋)/n`, `C` counting wakes from `A = 0`. Times past
/// the end of the run see the final (empty) state.
pub fn empirical_path(rec: &ExplorationRecord, n: u64, grid: &[f64]) -> Result<FluidPath> {
    let active = rec
        .active
        .as_ref()
        .ok_or_else(|| Error::State("exploration record has no trajectory; rerun with recording on".into()))?;
    if n == 0 {
        return Err(Error::Domain("n ≥ 1 required".into()));
    }
    let steps = active.len() - 1;
    let mut wakes_from_zero = vec![0u64; active.len()];
    for j in 1..active.len() {
        wakes_from_zero[j] = wakes_from_zero[j - 1] + u64::from(active[j - 1] == 0 && j <= rec.total_steps as usize);
    }
    let scale = 1.0 / n as f64;
    let mut zeta = Vec::with_capacity(grid.len());
    let mut psi = Vec::with_capacity(grid.len());
    for &t in grid {
        if t < 0.0 {
            return Err(Error::Domain(format!("grid time {t} is negative")));
        }
        let j = ((n as f64 * t).floor() as usize).min(steps);
        let (a, v) = rec.step(j).expect("recorded step");
        let mut row: Vec<f64> = v.iter().map(|&c| c as f64 * scale).collect();
        row[0] = a as f64 * scale;
        zeta.push(row);
        psi.push((a as f64 - 2.0 * wakes_from_zero[j] as f64) * scale);
    }
    FluidPath::new(grid.to_vec(), zeta, psi, TauMarkers::default())
}
