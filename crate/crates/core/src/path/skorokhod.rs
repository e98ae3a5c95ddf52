use crate::error::{Error, Result};

/// One-dimensional Skorokhod map `Γψ(t) = ψ(t) − min(0, inf_{s≤t} ψ(s))`
/// on grid samples, by a running minimum.
pub fn skorokhod_map(psi: &[f64]) -> Result<Vec<f64>> {
    match psi.first() {
        None => return Ok(Vec::new()),
        Some(&v) if v.abs() > 1e-12 => {
            return Err(Error::Precondition(format!("psi(0) must be 0, got {v}")));
        }
        _ => {}
    }
    let mut running = 0.0f64;
    Ok(psi
        .iter()
        .map(|&v| {
            running = running.min(v);
            v - running
        })
        .collect())
}
