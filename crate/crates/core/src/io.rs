//! File formats.
//!
//! * Degree files: `{"degrees": {"1": 0.5, "3": 0.5}}`.
//! * State files: `{"x0": 0.0, "xk": {"3": 1.0}}`.
//! * Degree sequences: a JSON array of positive integers.
//! * Fluid paths: CSV with columns `t, zeta_0, …, zeta_K, psi`, every value
//!   written with 17 significant digits.
//! * Fluid paths as JSON: `{"grid": […], "zeta": [[…]], "psi": […], "tau": t|null, "tau_zeta": t|null}`.
//! * Estimates: CSV with columns `n, eps, reps, hits, seed, p_hat, ci_low,
//!   ci_high, per_n_rate`.
//! * Components: CSV with columns `n_vertices, n_edges, n_1, …, n_K`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::EstimateResult;
use crate::fluid::{FluidPath, TauMarkers};
use crate::path::StatePoint;
use crate::profile::{DegreeDistribution, Masses, SubProfile};
use crate::sim::{ComponentRecord, DegreeSequence};

#[derive(Debug, Serialize, Deserialize)]
struct DegreesFile {
    degrees: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    x0: f64,
    xk: BTreeMap<String, f64>,
}

fn parse_map(map: &BTreeMap<String, f64>) -> Result<Masses> {
    let mut pairs = Vec::with_capacity(map.len());
    for (key, &v) in map {
        let k: usize = key.trim().parse().map_err(|_| Error::Parse(format!("degree key {key:?} is not a positive integer")))?;
        pairs.push((k, v));
    }
    Masses::from_pairs(pairs)
}

fn to_map(m: &Masses) -> BTreeMap<String, f64> {
    m.iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Parses a degree file into raw masses.
pub fn parse_masses(json: &str) -> Result<Masses> {
    let f: DegreesFile = serde_json::from_str(json)?;
    parse_map(&f.degrees)
}

pub fn parse_distribution(json: &str) -> Result<DegreeDistribution> {
    DegreeDistribution::new(parse_masses(json)?)
}

pub fn parse_subprofile(json: &str) -> Result<SubProfile> {
    Ok(SubProfile::new(parse_masses(json)?))
}

/// Degree-file JSON for `m`.
pub fn masses_to_json(m: &Masses) -> String {
    serde_json::to_string(&DegreesFile { degrees: to_map(m) }).expect("maps of floats serialize")
}

pub fn parse_state(json: &str) -> Result<StatePoint> {
    let f: StateFile = serde_json::from_str(json)?;
    StatePoint::new(f.x0, &parse_map(&f.xk)?)
}

pub fn state_to_json(x: &StatePoint) -> Result<String> {
    let f = StateFile { x0: x.x0, xk: to_map(&x.masses()?) };
    Ok(serde_json::to_string(&f)?)
}

/// Graph input: an explicit degree sequence or a distribution to be rounded.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeInput {
    Sequence(DegreeSequence),
    Distribution(DegreeDistribution),
}

pub fn parse_degree_input(json: &str) -> Result<DegreeInput> {
    let v: serde_json::Value = serde_json::from_str(json)?;
    if v.is_array() {
        Ok(DegreeInput::Sequence(serde_json::from_value(v)?))
    } else {
        Ok(DegreeInput::Distribution(parse_distribution(json)?))
    }
}

pub fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `path` as CSV.
pub fn write_fluid_csv<W: Write>(path: &FluidPath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = path.max_degree();
    let mut header = vec!["t".to_string()];
    header.extend((0..=k).map(|j| format!("zeta_{j}")));
    header.push("psi".into());
    w.write_record(&header)?;
    for i in 0..path.len() {
        let mut rec = vec![fmt17(path.grid[i])];
        rec.extend(path.zeta[i].iter().map(|&v| fmt17(v)));
        rec.push(fmt17(path.psi[i]));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a path written by [`write_fluid_csv`]. Markers are not stored in
/// the CSV and come back empty.
pub fn read_fluid_csv<R: Read>(input: R) -> Result<FluidPath> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let width = header.len();
    if width < 3 || &header[0] != "t" || &header[width - 1] != "psi" {
        return Err(Error::Parse("expected columns t, zeta_0, …, zeta_K, psi".into()));
    }
    let (mut grid, mut zeta, mut psi) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}"))))
            .collect::<Result<_>>()?;
        grid.push(vals[0]);
        zeta.push(vals[1..width - 1].to_vec());
        psi.push(vals[width - 1]);
    }
    FluidPath::new(grid, zeta, psi, TauMarkers::default())
}

#[derive(Debug, Serialize, Deserialize)]
struct FluidFile {
    grid: Vec<f64>,
    zeta: Vec<Vec<f64>>,
    psi: Vec<f64>,
    tau: Option<f64>,
    tau_zeta: Option<f64>,
}

/// JSON form of `path`, markers included.
pub fn fluid_to_json(path: &FluidPath) -> Result<String> {
    let f = FluidFile {
        grid: path.grid.clone(),
        zeta: path.zeta.clone(),
        psi: path.psi.clone(),
        tau: path.tau_markers.tau,
        tau_zeta: path.tau_markers.tau_zeta,
    };
    Ok(serde_json::to_string(&f)?)
}

pub fn parse_fluid_json(json: &str) -> Result<FluidPath> {
    let f: FluidFile = serde_json::from_str(json)?;
    FluidPath::new(f.grid, f.zeta, f.psi, TauMarkers { tau: f.tau, tau_zeta: f.tau_zeta })
}

fn parse_field<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {name} {s:?}")))
}

/// Writes estimates as CSV; a missing rate is left empty.
pub fn write_estimates_csv<W: Write>(results: &[EstimateResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "eps", "reps", "hits", "seed", "p_hat", "ci_low", "ci_high", "per_n_rate"])?;
    for r in results {
        w.write_record([
            r.n.to_string(),
            fmt17(r.eps),
            r.reps.to_string(),
            r.hits.to_string(),
            r.seed.to_string(),
            fmt17(r.p_hat),
            fmt17(r.ci_low),
            fmt17(r.ci_high),
            r.per_n_rate.map(fmt17).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_estimates_csv<R: Read>(input: R) -> Result<Vec<EstimateResult>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 9 {
            return Err(Error::Parse(format!("expected 9 columns, got {}", rec.len())));
        }
        out.push(EstimateResult {
            n: parse_field(&rec[0], "n")?,
            eps: parse_field(&rec[1], "eps")?,
            reps: parse_field(&rec[2], "reps")?,
            hits: parse_field(&rec[3], "hits")?,
            seed: parse_field(&rec[4], "seed")?,
            p_hat: parse_field(&rec[5], "p_hat")?,
            ci_low: parse_field(&rec[6], "ci_low")?,
            ci_high: parse_field(&rec[7], "ci_high")?,
            per_n_rate: if rec[8].trim().is_empty() { None } else { Some(parse_field(&rec[8], "per_n_rate")?) },
        });
    }
    Ok(out)
}

/// Writes one row per component; degree columns run to the largest degree.
pub fn write_components_csv<W: Write>(components: &[ComponentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let kmax = components.iter().map(|c| c.degree_config.len().saturating_sub(1)).max().unwrap_or(0);
    let mut header = vec!["n_vertices".to_string(), "n_edges".to_string()];
    header.extend((1..=kmax).map(|k| format!("n_{k}")));
    w.write_record(&header)?;
    for c in components {
        let mut rec = vec![c.n_vertices.to_string(), c.n_edges.to_string()];
        rec.extend((1..=kmax).map(|k| c.degree_config.get(k).copied().unwrap_or(0).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads components written by [`write_components_csv`]; every
/// `degree_config` comes back with width `K + 1`.
pub fn read_components_csv<R: Read>(input: R) -> Result<Vec<ComponentRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let width = r.headers()?.len();
    if width < 2 {
        return Err(Error::Parse("expected columns n_vertices, n_edges, n_1, …".into()));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut degree_config = vec![0];
        for field in rec.iter().skip(2) {
            degree_config.push(parse_field(field, "count")?);
        }
        out.push(ComponentRecord {
            degree_config,
            n_vertices: parse_field(&rec[0], "n_vertices")?,
            n_edges: parse_field(&rec[1], "n_edges")?,
        });
    }
    Ok(out)
}
