//! Cross-consistency battery run by `cmld verify`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::estimate::estimate_event_prob;
use crate::fluid::uniform_grid;
use crate::lln::{lln_path, LlnSummary};
use crate::error::Result;
use crate::path::{
    cost_closed_form, path_cost, EndpointChart, LocalVelocity, Minimizer, PathSegmentSpec, SegmentCase, StatePoint,
    Trajectory,
};
use crate::profile::{DegreeDistribution, Masses, SubProfile};
use crate::rates::{beta_of_q, k_of_q, rate_component_degree, rate_d_regular};
use crate::sim::{check_record, component_sizes, eea_run, replication_rng, DegreeSequence};

/// One row of the pass/fail table.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

const HALF_LN2: f64 = 0.346_573_590_279_972_654_71;

fn state(x0: f64, pairs: &[(usize, f64)]) -> StatePoint {
    StatePoint::new(x0, &Masses::from_pairs(pairs.iter().copied()).expect("valid masses")).expect("valid state")
}

/// Random valid segment endpoints, alternating between the two cases.
/// The list starts with the D-regular segment and the segment with active
/// mass at both ends.
pub fn random_segment_specs(seed: u64, count: usize) -> Vec<(StatePoint, StatePoint)> {
    let mut out = vec![
        (state(0.0, &[(3, 1.0)]), state(0.0, &[(3, 0.5)])),
        (state(1.0, &[(3, 1.0)]), state(0.5, &[(3, 0.5)])),
    ];
    let mut rng = replication_rng(seed, 0);
    let mut want = SegmentCase::CaseI;
    while out.len() < count {
        let (x1, x2) = random_segment(&mut rng, want);
        match PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0) {
            Ok(spec) if spec.case == want && spec.beta < 0.9 && spec.varsigma > 1e-3 => {
                out.push((x1, x2));
                want = if want == SegmentCase::CaseI { SegmentCase::CaseII } else { SegmentCase::CaseI };
            }
            _ => {}
        }
    }
    out.truncate(count);
    out
}

fn random_segment(rng: &mut ChaCha8Rng, case: SegmentCase) -> (StatePoint, StatePoint) {
    let mut x1 = vec![0.0; 6];
    let mut x2 = vec![0.0; 6];
    for k in 1..6 {
        if rng.random_bool(0.6) {
            x1[k] = rng.random_range(0.05..0.5);
            let keep: f64 = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.0) };
            x2[k] = keep * x1[k];
        }
    }
    x1[3] = x1[3].max(0.2);
    let x1_0 = if rng.random_bool(0.4) { rng.random_range(0.0..1.0) } else { 0.0 };
    let x2_0 = match case {
        SegmentCase::CaseI => {
            x2[1] = x1[1];
            0.0
        }
        SegmentCase::CaseII => {
            if x1[1] > 0.0 && rng.random_bool(0.5) {
                0.0
            } else {
                rng.random_range(0.01..0.6)
            }
        }
    };
    (state(x1_0, &dense_pairs(&x1)), state(x2_0, &dense_pairs(&x2)))
}

fn dense_pairs(v: &[f64]) -> Vec<(usize, f64)> {
    v.iter().enumerate().skip(1).map(|(k, &x)| (k, x)).collect()
}

/// Random `(p, q)` with `q ≤ p` and excess edges in `q`.
pub fn random_degree_pair(rng: &mut ChaCha8Rng, allow_leaves: bool) -> (DegreeDistribution, SubProfile) {
    loop {
        let mut w = [0.0; 7];
        for (k, slot) in w.iter_mut().enumerate().skip(1) {
            if (k != 1 || allow_leaves) && rng.random_bool(0.7) {
                *slot = rng.random_range(0.05..1.0);
            }
        }
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            continue;
        }
        let p = Masses::from_dense(w.iter().map(|x| x / total).collect()).expect("nonnegative");
        let Ok(p) = DegreeDistribution::new(p) else { continue };
        let q: Vec<f64> = p.masses().as_slice().iter().map(|&x| x * rng.random_range(0.0..1.0)).collect();
        let q = SubProfile::new(Masses::from_dense(q).expect("nonnegative"));
        if q.is_feasible() && q.masses().total() > 1e-3 {
            return (p, q);
        }
    }
}

/// Exact component-size distribution over all perfect matchings of the
/// half-edges of `d`. Keys are vertex counts in decreasing order.
pub fn matching_enumeration(d: &DegreeSequence) -> BTreeMap<Vec<usize>, f64> {
    let mut half = Vec::new();
    for (v, &deg) in d.degrees().iter().enumerate() {
        half.extend(std::iter::repeat_n(v as u32, deg as usize));
    }
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut edges = Vec::new();
    fn rec(rest: &mut Vec<u32>, edges: &mut Vec<(u32, u32)>, n: usize, counts: &mut BTreeMap<Vec<usize>, u64>) {
        if rest.is_empty() {
            *counts.entry(component_sizes(n, edges)).or_default() += 1;
            return;
        }
        let a = rest.remove(0);
        for i in 0..rest.len() {
            let b = rest.remove(i);
            edges.push((a, b));
            rec(rest, edges, n, counts);
            edges.pop();
            rest.insert(i, b);
        }
        rest.insert(0, a);
    }
    rec(&mut half, &mut edges, d.len(), &mut counts);
    let total: u64 = counts.values().sum();
    counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect()
}

/// Component-size distribution of `runs` EEA runs.
pub fn eea_size_distribution(d: &DegreeSequence, runs: u64, seed: u64) -> BTreeMap<Vec<usize>, f64> {
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for rep in 0..runs {
        let rec = eea_run(d, &mut replication_rng(seed, rep), false);
        let mut sizes: Vec<usize> = rec.components.iter().map(|c| c.n_vertices as usize).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        *counts.entry(sizes).or_default() += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / runs as f64)).collect()
}

/// Total-variation distance between two finite distributions.
pub fn total_variation(a: &BTreeMap<Vec<usize>, f64>, b: &BTreeMap<Vec<usize>, f64>) -> f64 {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    0.5 * keys.into_iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

/// Random valid degree sequence with `n ∈ [1, max_n]` vertices.
pub fn random_degree_sequence(rng: &mut ChaCha8Rng, max_n: usize, max_degree: u32) -> DegreeSequence {
    loop {
        let n = rng.random_range(1..=max_n);
        let mut d: Vec<u32> = (0..n).map(|_| rng.random_range(1..=max_degree)).collect();
        if d.iter().map(|&x| x as u64).sum::<u64>() % 2 == 1 {
            if let Some(x) = d.iter_mut().find(|x| **x < max_degree) {
                *x += 1;
            } else {
                d[0] -= 1;
                if d[0] == 0 {
                    continue;
                }
            }
        }
        if let Ok(seq) = DegreeSequence::new(d) {
            return seq;
        }
    }
}

/// `ζ̃ + εθ` around the cubic minimizer from `(0, {3: 1})` to `(0, {3: 1/2})`,
/// with `θ_3 = u²(1−u)² Σ c_j sin(jπu)` and `θ_0 = −3θ_3` so that `r` and
/// the pace are unchanged.
pub struct Perturbed<'a> {
    base: &'a Minimizer,
    c: Vec<f64>,
    eps: f64,
    len: f64,
}

impl<'a> Perturbed<'a> {
    pub fn new(base: &'a Minimizer, c: Vec<f64>, eps: f64) -> Self {
        let len = base.spec.t2();
        Perturbed { base, c, eps, len }
    }

    /// `(θ, dθ/du)`; `v = 1 − u` is passed separately for accuracy near `u = 1`.
    fn theta(&self, u: f64, v: f64) -> (f64, f64) {
        let (mut s, mut ds) = (0.0, 0.0);
        for (i, c) in self.c.iter().enumerate() {
            let j = (i + 1) as f64;
            let (sin, cos) = if u <= 0.5 {
                ((j * PI * u).sin(), (j * PI * u).cos())
            } else {
                let sign = if (i + 1) % 2 == 0 { -1.0 } else { 1.0 };
                (sign * (j * PI * v).sin(), -sign * (j * PI * v).cos())
            };
            s += c * sin;
            ds += c * j * PI * cos;
        }
        let w = u * u * v * v;
        let dw = 2.0 * u * v * v - 2.0 * u * u * v;
        (w * s, dw * s + w * ds)
    }

    fn apply(&self, mut x: StatePoint, mut vel: LocalVelocity, u: f64, v: f64) -> (StatePoint, LocalVelocity) {
        let (th, dth) = self.theta(u, v);
        x.xk[3] += self.eps * th;
        x.x0 -= 3.0 * self.eps * th;
        vel.betak[3] += self.eps * dth / self.len;
        vel.beta0 -= 3.0 * self.eps * dth / self.len;
        (x, vel)
    }

    /// Sign constraints checked on a fine grid.
    pub fn is_feasible(&self) -> bool {
        (1..20_000).all(|i| {
            let u = i as f64 / 20_000.0;
            let (x, v) = self.sample(u * self.len);
            x.xk[3] >= 0.0 && x.x0 >= 0.0 && v.betak[3] <= 0.0 && 1.0 + v.betak[3] >= 0.0
        })
    }
}

impl Trajectory for Perturbed<'_> {
    fn sample(&self, t: f64) -> (StatePoint, LocalVelocity) {
        let (x, v) = self.base.sample(t);
        let u = t / self.len;
        self.apply(x, v, u, 1.0 - u)
    }

    fn endpoint_chart(&self) -> Option<EndpointChart> {
        self.base.endpoint_chart()
    }

    fn sample_alpha(&self, alpha: f64) -> (StatePoint, LocalVelocity) {
        // β = 0 and ς̃ = ς for this segment, so 1 − u = α²
        let (x, v) = self.base.sample_alpha(alpha);
        let v2 = alpha * alpha;
        self.apply(x, v, 1.0 - v2, v2)
    }
}

/// Outcome of [`perturbation_suite`].
#[derive(Debug, Clone, Copy)]
pub struct PerturbationReport {
    pub tested: usize,
    /// Smallest `cost(ζ̃ + εθ) − cost(ζ̃)` seen.
    pub worst_gain: f64,
    /// Smallest factor applied to reach feasibility.
    pub min_scale: f64,
}

/// The cubic minimizer against `count` random perturbations at each `ε` in
/// `eps`. Infeasible perturbations are halved until they fit.
pub fn perturbation_suite(count: usize, eps: &[f64], seed: u64) -> Result<PerturbationReport> {
    let spec = PathSegmentSpec::new(state(0.0, &[(3, 1.0)]), state(0.0, &[(3, 0.5)]), 0.0)?;
    let base = Minimizer::new(spec);
    let len = base.spec.t2();
    let c0 = path_cost(&base, 0.0, len)?;
    let mut rng = replication_rng(seed, 0);
    let mut report = PerturbationReport { tested: 0, worst_gain: f64::INFINITY, min_scale: 1.0 };
    for _ in 0..count {
        let c: Vec<f64> = (1..=4).map(|j| rng.random_range(-1.0..1.0) / (j * j) as f64).collect();
        for &e in eps {
            let mut scale = 1.0;
            let mut pert = Perturbed::new(&base, c.clone(), e);
            while !pert.is_feasible() {
                scale *= 0.5;
                pert.c = c.iter().map(|x| x * scale).collect();
            }
            report.min_scale = report.min_scale.min(scale);
            report.worst_gain = report.worst_gain.min(path_cost(&pert, 0.0, len)? - c0);
        }
        report.tested += 1;
    }
    Ok(report)
}

/// Largest `|cost(p → p−q̄ → p−q̄−q) − cost(p → p−q → p−q−q̄)|` over `count`
/// random pairs with `p_1 = 0`.
pub fn additivity_suite(count: usize, seed: u64) -> Result<f64> {
    let mut rng = replication_rng(seed, 0);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < count {
        let (p, q) = random_degree_pair(&mut rng, false);
        let rest = p.masses().checked_sub(q.masses())?;
        let fractions: Vec<f64> = rest.as_slice().iter().map(|&x| x * rng.random_range(0.0..1.0)).collect();
        let qbar = Masses::from_dense(fractions)?;
        if !qbar.has_excess_edges() {
            continue;
        }
        let full = StatePoint::new(0.0, p.masses())?;
        let without_q = StatePoint::new(0.0, &rest)?;
        let without_qbar = StatePoint::new(0.0, &p.masses().checked_sub(&qbar)?)?;
        let without_both = StatePoint::new(0.0, &rest.checked_sub(&qbar)?)?;
        let a = cost_closed_form(&full, &without_qbar)? + cost_closed_form(&without_qbar, &without_both)?;
        let b = cost_closed_form(&full, &without_q)? + cost_closed_form(&without_q, &without_both)?;
        worst = worst.max((a - b).abs());
        checked += 1;
    }
    Ok(worst)
}

fn run<F: FnOnce() -> (bool, String)>(name: &str, f: F) -> CheckOutcome {
    let start = Instant::now();
    let (passed, detail) = f();
    CheckOutcome { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Runs every check. `fast` shrinks the randomized and Monte Carlo parts.
pub fn run_battery(fast: bool) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    out.push(run("d-regular triple agreement", || {
        let a = rate_d_regular(3, 0.5).unwrap_or(f64::NAN);
        let p = DegreeDistribution::regular(3).expect("valid");
        let q = SubProfile::from_pairs([(3, 0.5)]).expect("valid");
        let b = rate_component_degree(&p, &q).map(|r| r.i1).unwrap_or(f64::NAN);
        let c = cost_closed_form(&state(0.0, &[(3, 1.0)]), &state(0.0, &[(3, 0.5)])).unwrap_or(f64::NAN);
        let err = [a, b, c].iter().map(|v| (v - HALF_LN2).abs()).fold(0.0, f64::max);
        (err <= 1e-9, format!("max |rate − ½ log 2| = {err:.2e}"))
    }));

    out.push(run("beta exactness", || {
        let b1 = beta_of_q(&SubProfile::from_pairs([(1, 0.1), (3, 0.3)]).expect("valid")).unwrap_or(f64::NAN);
        let b2 = beta_of_q(&SubProfile::from_pairs([(1, 0.2), (4, 0.2)]).expect("valid")).unwrap_or(f64::NAN);
        let k = k_of_q(&SubProfile::from_pairs([(1, 0.1), (3, 0.3)]).expect("valid")).unwrap_or(f64::NAN);
        let e1 = (b1 - (4.0 - 15f64.sqrt())).abs();
        let e2 = (b2 - (2.0 - 3f64.sqrt())).abs();
        let e3 = (k - 0.006_066_873_509_048_356_208).abs();
        (e1 <= 1e-9 && e2 <= 1e-9 && e3 <= 1e-6, format!("errors {e1:.1e}, {e2:.1e}, K {e3:.1e}"))
    }));

    out.push(run("quadrature vs closed form", || {
        let specs = random_segment_specs(11, if fast { 8 } else { 25 });
        let mut worst = 0.0f64;
        for (x1, x2) in &specs {
            let m = match PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0) {
                Ok(s) => Minimizer::new(s),
                Err(e) => return (false, e.to_string()),
            };
            let q = path_cost(&m, 0.0, m.spec.t2());
            let c = cost_closed_form(x1, x2);
            match (q, c) {
                (Ok(q), Ok(c)) => worst = worst.max((q - c).abs()),
                (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
            }
        }
        (worst <= 1e-6, format!("{} segments, max difference {worst:.2e}", specs.len()))
    }));

    out.push(run("rate I1 vs closed-form segment cost", || {
        let mut rng = replication_rng(12, 0);
        let mut worst = 0.0f64;
        let count = if fast { 20 } else { 100 };
        for _ in 0..count {
            let (p, q) = random_degree_pair(&mut rng, true);
            let i1 = rate_component_degree(&p, &q).map(|r| r.i1);
            let x1 = StatePoint::new(0.0, p.masses()).expect("valid");
            let rest = p.masses().checked_sub(q.masses()).expect("q ≤ p");
            let x2 = StatePoint::new(0.0, &rest).expect("valid");
            match (i1, cost_closed_form(&x1, &x2)) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
                (Err(e), _) | (_, Err(e)) => return (false, e.to_string()),
            }
        }
        (worst <= 1e-12, format!("{count} pairs, max difference {worst:.2e}"))
    }));

    out.push(run("fluid limit has zero cost", || {
        let mut worst = 0.0f64;
        for pairs in [vec![(1, 0.5), (3, 0.5)], vec![(1, 0.2), (2, 0.3), (4, 0.5)]] {
            let p = DegreeDistribution::from_pairs(pairs).expect("valid");
            let s = LlnSummary::new(&p).expect("valid");
            let tau = s.tau.expect("supercritical");
            let path = match lln_path(&p, &uniform_grid(0.0, s.mu / 2.0, 2001)) {
                Ok(x) => x,
                Err(e) => return (false, e.to_string()),
            };
            match path_cost(&path, 0.0, tau) {
                Ok(c) => worst = worst.max(c),
                Err(e) => return (false, e.to_string()),
            }
        }
        (worst <= 1e-5, format!("max cost {worst:.2e}"))
    }));

    out.push(run("fluid limit path invariants", || {
        for pairs in [vec![(1, 0.5), (3, 0.5)], vec![(3, 1.0)], vec![(1, 1.0)], vec![(1, 0.3), (2, 0.4), (5, 0.3)]] {
            let p = DegreeDistribution::from_pairs(pairs).expect("valid");
            let t_end = p.mean().max(2.0);
            let res = lln_path(&p, &uniform_grid(0.0, t_end, 2001)).and_then(|x| x.check_invariants(1e-5));
            if let Err(e) = res {
                return (false, e.to_string());
            }
        }
        (true, "4 distributions".into())
    }));

    out.push(run("exploration conservation", || {
        let mut rng = replication_rng(13, 0);
        let count = if fast { 100 } else { 1000 };
        for rep in 0..count {
            let d = random_degree_sequence(&mut rng, 60, 6);
            let rec = eea_run(&d, &mut replication_rng(14, rep), true);
            if let Err(e) = check_record(&rec) {
                return (false, format!("sequence {rep}: {e}"));
            }
        }
        (true, format!("{count} random degree sequences"))
    }));

    out.push(run("exploration vs matching enumeration", || {
        let d = DegreeSequence::new(vec![1, 1, 1, 1, 2]).expect("valid");
        let exact = matching_enumeration(&d);
        let runs = if fast { 20_000 } else { 100_000 };
        let tol = if fast { 0.03 } else { 0.02 };
        let tv = total_variation(&exact, &eea_size_distribution(&d, runs, 15));
        (tv <= tol, format!("TV = {tv:.4} over {runs} runs"))
    }));

    out.push(run("perturbations of the minimizer", || {
        let count = if fast { 10 } else { 50 };
        match perturbation_suite(count, &[0.01, 0.05], 16) {
            Ok(r) => (r.worst_gain >= -1e-9, format!("{} perturbations, smallest gain {:.2e}", r.tested, r.worst_gain)),
            Err(e) => (false, e.to_string()),
        }
    }));

    out.push(run("component order additivity", || match additivity_suite(20, 17) {
        Ok(w) => (w <= 1e-10, format!("20 pairs, max difference {w:.2e}")),
        Err(e) => (false, e.to_string()),
    }));

    out.push(run("d-regular symmetry", || {
        for d in 3..8 {
            for i in 1..100 {
                let q = i as f64 / 100.0;
                if rate_d_regular(d, q).ok() != rate_d_regular(d, 1.0 - q).ok() {
                    return (false, format!("D = {d}, q = {q}"));
                }
            }
        }
        (true, "D = 3..7".into())
    }));

    out.push(run("estimate independent of workers", || {
        let d = DegreeSequence::new(vec![3; 12]).expect("valid");
        let q = SubProfile::from_pairs([(3, 0.5)]).expect("valid");
        let reps = if fast { 2_000 } else { 20_000 };
        let a = estimate_event_prob(&d, &q, 1.0 / 12.0, reps, 99, 1);
        let b = estimate_event_prob(&d, &q, 1.0 / 12.0, reps, 99, 4);
        match (a, b) {
            (Ok(a), Ok(b)) => (a == b, format!("hits {} vs {}", a.hits, b.hits)),
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        }
    }));

    out
}
