//! Monte Carlo estimation of component events and law-of-large-numbers checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::fluid::uniform_grid;
use crate::lln::lln_path;
use crate::profile::{DegreeDistribution, SubProfile};
use crate::roots::bisect;
use crate::sim::{eea_run, empirical_path, extract_components, replication_rng, DegreeSequence, Explorer};

/// Slack on the window edges `n(q_k ± ε)` so that exact integer endpoints
/// are not lost to rounding.
pub const WINDOW_SLACK: f64 = 1e-9;

/// Event "some component has `m_k ∈ [n(q_k − ε), n(q_k + ε)]` for every `k`".
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentEvent {
    lo: Vec<u64>,
    hi: Vec<u64>,
    /// `q_k > ε` for a degree absent from the graph.
    impossible: bool,
}

impl ComponentEvent {
    /// Integer windows for a graph with degree histogram `histogram` on `n`
    /// vertices.
    pub fn new(histogram: &[u64], q: &SubProfile, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Domain(format!("eps > 0 required, got {eps}")));
        }
        let n = histogram.iter().sum::<u64>() as f64;
        let width = histogram.len();
        let mut lo = vec![0u64; width];
        let mut hi = vec![0u64; width];
        for k in 1..width {
            let qk = q.q(k);
            lo[k] = (n * (qk - eps) - WINDOW_SLACK).ceil().max(0.0) as u64;
            hi[k] = (n * (qk + eps) + WINDOW_SLACK).floor() as u64;
        }
        let impossible = (width..=q.masses().max_degree()).any(|k| q.q(k) > eps);
        Ok(ComponentEvent { lo, hi, impossible })
    }

    pub fn matches(&self, config: &[u64]) -> bool {
        !self.impossible
            && config.iter().enumerate().skip(1).all(|(k, &m)| m >= self.lo[k] && m <= self.hi[k])
    }
}

/// Outcome of a Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub reps: u64,
    pub hits: u64,
    pub n: u64,
    pub eps: f64,
    pub seed: u64,
    /// `−log(p_hat)/n`; absent when there were no hits.
    pub per_n_rate: Option<f64>,
}

/// Inverse of `p ↦ I_p(a, b)` by bisection.
fn beta_quantile(a: f64, b: f64, level: f64) -> f64 {
    bisect(|p| beta_reg(a, b, p) - level, 0.0, 1.0, 1e-15, 200)
}

/// Exact (Clopper–Pearson) two-sided interval at confidence `1 − alpha`.
pub fn clopper_pearson(hits: u64, reps: u64, alpha: f64) -> (f64, f64) {
    let (x, n) = (hits as f64, reps as f64);
    let lo = if hits == 0 { 0.0 } else { beta_quantile(x, n - x + 1.0, alpha / 2.0) };
    let hi = if hits == reps { 1.0 } else { beta_quantile(x + 1.0, n - x, 1.0 - alpha / 2.0) };
    (lo, hi)
}

/// Whether one EEA run produces a component matching `event`. Stops at the
/// first match.
fn replication_hits(ex: &mut Explorer, histogram: &[u64], event: &ComponentEvent, seed: u64, rep: u64) -> bool {
    let mut rng = replication_rng(seed, rep);
    ex.reset(histogram);
    while ex.step(&mut rng).is_some() {
        if ex.active() == 0 && event.matches(ex.current_config()) {
            return true;
        }
    }
    false
}

/// Fraction of `reps` EEA runs on `d` with a component matching the event
/// for `(q, eps)`. Replication `i` uses stream `i` of `seed`, and hits are
/// summed as integers, so the result does not depend on `workers`.
pub fn estimate_event_prob(
    d: &DegreeSequence,
    q: &SubProfile,
    eps: f64,
    reps: u64,
    seed: u64,
    workers: usize,
) -> Result<EstimateResult> {
    if reps == 0 {
        return Err(Error::Domain("reps ≥ 1 required".into()));
    }
    let histogram = d.histogram();
    let event = ComponentEvent::new(&histogram, q, eps)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::State(format!("cannot start worker pool: {e}")))?;
    let hits: u64 = pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map_init(|| Explorer::new(&histogram), |ex, rep| u64::from(replication_hits(ex, &histogram, &event, seed, rep)))
            .sum()
    });
    let n = d.len() as u64;
    let p_hat = hits as f64 / reps as f64;
    let (ci_low, ci_high) = clopper_pearson(hits, reps, 0.05);
    Ok(EstimateResult {
        p_hat,
        ci_low: ci_low.min(p_hat),
        ci_high: ci_high.max(p_hat),
        reps,
        hits,
        n,
        eps,
        seed,
        per_n_rate: (hits > 0).then(|| -p_hat.ln() / n as f64),
    })
}

/// Same as [`estimate_event_prob`], building the graph from `p` and `n`.
/// Checks `q ≤ p` first.
pub fn estimate_from_distribution(
    p: &DegreeDistribution,
    n: usize,
    q: &SubProfile,
    eps: f64,
    reps: u64,
    seed: u64,
    workers: usize,
) -> Result<EstimateResult> {
    q.check_within(p)?;
    let (d, _) = DegreeSequence::from_distribution(p, n)?;
    estimate_event_prob(&d, q, eps, reps, seed, workers)
}

/// Least-squares line through `(n, −log p_hat)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub used: usize,
    /// Indices of results dropped because `p_hat = 0`.
    pub excluded: Vec<usize>,
}

pub fn rate_fit(results: &[EstimateResult]) -> Result<RateFit> {
    let mut excluded = Vec::new();
    let mut pts = Vec::new();
    for (i, r) in results.iter().enumerate() {
        if r.hits == 0 || r.p_hat <= 0.0 {
            excluded.push(i);
        } else {
            pts.push((r.n as f64, -r.p_hat.ln()));
        }
    }
    if pts.len() < 3 {
        return Err(Error::Fit(format!("{} usable points, at least 3 needed", pts.len())));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all points share the same n".into()));
    }
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, used: pts.len(), excluded })
}

/// Largest-component fraction and sup-distance to the fluid limit from one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlnCheck {
    pub largest_fraction: f64,
    pub sup_distance: f64,
}

/// Grid resolution of [`lln_check`].
pub const LLN_CHECK_GRID: usize = 2001;

/// One recorded EEA run on `n` vertices drawn from `p`, compared with the
/// fluid limit over `k = 0..=K` on a uniform grid.
pub fn lln_check(p: &DegreeDistribution, n: usize, seed: u64) -> Result<LlnCheck> {
    let (d, _) = DegreeSequence::from_distribution(p, n)?;
    let rec = eea_run(&d, &mut replication_rng(seed, 0), true);
    let summary = extract_components(&rec)?;
    let nv = d.len() as u64;
    let t_end = (rec.total_steps as f64 / nv as f64).max(p.mean() / 2.0);
    let grid = uniform_grid(0.0, t_end, LLN_CHECK_GRID);
    let emp = empirical_path(&rec, nv, &grid)?;
    let fluid = lln_path(p, &grid)?;
    let mut sup = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        let row = fluid.row_at(t);
        for (k, &e) in emp.zeta[i].iter().enumerate() {
            sup = sup.max((e - row.get(k).copied().unwrap_or(0.0)).abs());
        }
    }
    Ok(LlnCheck { largest_fraction: summary.largest_fraction, sup_distance: sup })
}
