use crate::error::{Error, Result};
use crate::fluid::FluidPath;

/// Relative tolerance below which consecutive values of `r` count as a plateau.
const PLATEAU_TOL: f64 = 1e-14;

/// Reparameterizes `[t1, t2]` so that `r(ζ)` falls at rate exactly 2.
///
/// Each grid node `t` in the segment moves to `t1 + (r(t1) − r(t))/2`.
/// Plateaus of `r`, where the state cannot move, are excised first. Nodes
/// before `t1` are unchanged and nodes after `t2` shift by the time saved.
pub fn normalize_time_change(path: &FluidPath, t1: f64, t2: f64) -> Result<FluidPath> {
    let (g0, gn) = (path.grid[0], *path.grid.last().unwrap());
    if !(t1 >= g0 && t2 <= gn && t1 < t2) {
        return Err(Error::Domain(format!("[{t1}, {t2}] must be a nonempty subinterval of [{g0}, {gn}]")));
    }
    let mut seg_t = vec![t1];
    let mut seg_rows = vec![path.row_at(t1)];
    let mut seg_psi = vec![path.psi_at(t1)];
    for (i, &t) in path.grid.iter().enumerate() {
        if t > t1 && t < t2 {
            seg_t.push(t);
            seg_rows.push(path.zeta[i].clone());
            seg_psi.push(path.psi[i]);
        }
    }
    seg_t.push(t2);
    seg_rows.push(path.row_at(t2));
    seg_psi.push(path.psi_at(t2));

    let r = |row: &Vec<f64>| crate::path::StatePoint::from_row(row).r();
    let rs: Vec<f64> = seg_rows.iter().map(r).collect();
    for j in 1..rs.len() {
        if rs[j] > rs[j - 1] + PLATEAU_TOL * rs[j - 1].abs().max(1.0) {
            return Err(Error::Precondition(format!("r(ζ) increases at t = {}", seg_t[j])));
        }
    }

    let r1 = rs[0];
    let mut new_t = vec![t1];
    let mut rows = vec![seg_rows[0].clone()];
    let mut psi = vec![seg_psi[0]];
    let mut last_r = r1;
    for j in 1..rs.len() {
        let plateau = rs[j] >= last_r - PLATEAU_TOL * last_r.abs().max(1.0);
        if plateau {
            if j + 1 == rs.len() {
                // keep the right endpoint's state
                *rows.last_mut().unwrap() = seg_rows[j].clone();
                *psi.last_mut().unwrap() = seg_psi[j];
            }
            continue;
        }
        new_t.push(t1 + 0.5 * (r1 - rs[j]));
        rows.push(seg_rows[j].clone());
        psi.push(seg_psi[j]);
        last_r = rs[j];
    }
    let end = *new_t.last().unwrap();

    let mut grid = Vec::new();
    let mut zeta = Vec::new();
    let mut out_psi = Vec::new();
    for (i, &t) in path.grid.iter().enumerate() {
        if t < t1 {
            grid.push(t);
            zeta.push(path.zeta[i].clone());
            out_psi.push(path.psi[i]);
        }
    }
    grid.extend(new_t);
    zeta.extend(rows);
    out_psi.extend(psi);
    for (i, &t) in path.grid.iter().enumerate() {
        if t > t2 {
            grid.push(t - t2 + end);
            zeta.push(path.zeta[i].clone());
            out_psi.push(path.psi[i]);
        }
    }
    FluidPath::new(grid, zeta, out_psi, path.tau_markers)
}
