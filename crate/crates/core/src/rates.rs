//! Static rate-function formulas.
//!
//! All rates are nonnegative decay rates in nats per vertex: the probability
//! of the corresponding event behaves like `exp(-n * rate)`.
//!
//! ```text
//! ℓ(x)   = x log x − x + 1
//! H(r)   = Σ r_k log r_k − (½Σ k r_k) log(½Σ k r_k)
//! F(α)   = Σ_{k≥3} k q_k F_k(α) − q_1,    F_k(α) = (α − α^{k−1}) / (1 − α^k)
//! K(q)   = (½Σ k q_k) log(1 − β²) − Σ q_k log(1 − β^k),   F(β) = 0
//! I1     = H(q) + H(p − q) − H(p) + K(q)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{DegreeDistribution, Masses, SubProfile};
use crate::roots::bisect;

pub const BETA_BRACKET: (f64, f64) = (1e-15, 1.0 - 1e-15);
pub const BETA_MAX_ITER: usize = 200;
pub const BETA_TOL: f64 = 1e-12;

/// Sign convention note carried by JSON outputs.
pub const SIGN_CONVENTION: &str = "rate >= 0 is the decay rate; the limit of (1/n) log P is -rate";

/// `x log x` with `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ℓ(x) = x log x − x + 1`.
pub fn ell(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("ell requires x ≥ 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(xlogx(x) - x + 1.0)
}

/// Entropy-like functional `H` on a nonnegative degree profile.
pub fn entropy_h(r: &Masses) -> f64 {
    let s: f64 = r.iter().map(|(_, v)| xlogx(v)).sum();
    s - xlogx(0.5 * r.first_moment())
}

/// `F_k(α) = (α − α^{k−1})/(1 − α^k)` for `k ≥ 2`, written as
/// `α (Σ_{j<k−2} α^j) / (Σ_{j<k} α^j)` so that it stays accurate near 1.
pub fn f_k(alpha: f64, k: usize) -> f64 {
    if k <= 2 {
        return 0.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut pw = 1.0;
    for j in 0..k {
        if j < k - 2 {
            num += pw;
        }
        den += pw;
        pw *= alpha;
    }
    alpha * num / den
}

/// `F(α) = Σ_{k≥3} k q_k F_k(α) − q_1`.
pub fn beta_residual(q: &Masses, alpha: f64) -> f64 {
    q.iter().filter(|&(k, _)| k >= 3).map(|(k, v)| k as f64 * v * f_k(alpha, k)).sum::<f64>() - q.get(1)
}

/// The root `β(q) ∈ [0, 1)` of `F`.
pub fn beta_of_q(q: &SubProfile) -> Result<f64> {
    let m = q.masses();
    if m.get(1) == 0.0 {
        return Ok(0.0);
    }
    if !q.is_feasible() {
        return Err(Error::Infeasible(format!(
            "Σ k q_k > 2 Σ q_k fails ({} ≤ {}) while q_1 > 0",
            m.first_moment(),
            2.0 * m.total()
        )));
    }
    let (lo, hi) = BETA_BRACKET;
    Ok(bisect(|a| beta_residual(m, a), lo, hi, BETA_TOL, BETA_MAX_ITER))
}

/// `log(1 − x)` accurate for small `x`.
pub(crate) fn log1m(x: f64) -> f64 {
    (-x).ln_1p()
}

/// `K(q)`, exactly zero when `q_1 = 0`.
pub fn k_of_q(q: &SubProfile) -> Result<f64> {
    let beta = beta_of_q(q)?;
    Ok(k_at_beta(q.masses(), beta))
}

fn k_at_beta(q: &Masses, beta: f64) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let a = 0.5 * q.first_moment() * log1m(beta * beta);
    let b: f64 = q.iter().map(|(k, v)| v * log1m(beta.powi(k as i32))).sum();
    a - b
}

/// Whether the rate is a two-sided limit or only a lower bound on the decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `p_1 = 0`: matching upper and lower bounds.
    TwoSided,
    /// `p_1 > 0`: only the lower bound on the probability is established.
    LowerOnly,
}

/// Terms of the degree-configuration rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub beta: f64,
    #[serde(rename = "H_q")]
    pub h_q: f64,
    #[serde(rename = "H_pq")]
    pub h_pq: f64,
    #[serde(rename = "H_p")]
    pub h_p: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    pub feasible: bool,
    pub bound_kind: BoundKind,
}

/// Decay rate of the event "some component has degree configuration ≈ nq".
pub fn rate_component_degree(p: &DegreeDistribution, q: &SubProfile) -> Result<RateBreakdown> {
    q.check_within(p)?;
    if !q.is_feasible() {
        return Err(Error::Infeasible(format!(
            "Σ k q_k > 2 Σ q_k fails ({} ≤ {})",
            q.masses().first_moment(),
            2.0 * q.masses().total()
        )));
    }
    let beta = beta_of_q(q)?;
    let pq = p.masses().checked_sub(q.masses())?;
    let h_q = entropy_h(q.masses());
    let h_pq = entropy_h(&pq);
    let h_p = entropy_h(p.masses());
    let k = k_at_beta(q.masses(), beta);
    Ok(RateBreakdown {
        beta,
        h_q,
        h_pq,
        h_p,
        k,
        i1: h_q + h_pq - h_p + k,
        feasible: true,
        bound_kind: if p.p(1) == 0.0 { BoundKind::TwoSided } else { BoundKind::LowerOnly },
    })
}

fn check_regular_degree(d: u32) -> Result<()> {
    if d < 3 {
        Err(Error::Domain(format!("D ≥ 3 required, got {d}")))
    } else {
        Ok(())
    }
}

/// Rate for a component with a fraction `qd` of the vertices of a
/// `D`-regular graph: `(1 − D/2)(q log q + (1 − q) log(1 − q))`.
pub fn rate_d_regular(d: u32, qd: f64) -> Result<f64> {
    check_regular_degree(d)?;
    if !(qd > 0.0 && qd <= 1.0) {
        return Err(Error::Domain(format!("qD must lie in (0, 1], got {qd}")));
    }
    // q and fl(1 − q) share the same larger member, and 1 − hi is exact,
    // so the value is bitwise symmetric.
    let hi = qd.max(1.0 - qd);
    let lo = 1.0 - hi;
    Ok((1.0 - d as f64 / 2.0) * (xlogx(lo) + xlogx(hi)))
}

/// Rate for a `D`-regular component holding a fraction `qd` of all vertices
/// in a graph with degree distribution `p` (requires `p_1 = 0`).
pub fn rate_d_regular_subgraph(p: &DegreeDistribution, d: u32, qd: f64) -> Result<f64> {
    if p.p(1) > 0.0 {
        return Err(Error::Precondition(format!("p_1 = 0 required, got p_1 = {}", p.p(1))));
    }
    check_regular_degree(d)?;
    let pd = p.p(d as usize);
    if pd <= 0.0 {
        return Err(Error::Domain(format!("p_{d} > 0 required")));
    }
    if !(qd > 0.0 && qd <= pd) {
        return Err(Error::Infeasible(format!("0 < qD ≤ p_D violated: qD = {qd}, p_D = {pd}")));
    }
    let mu = p.mean();
    let df = d as f64;
    let vertices = xlogx(qd) + xlogx(pd - qd) - xlogx(pd);
    let edges = xlogx(df * qd / 2.0) + xlogx((mu - df * qd) / 2.0) - xlogx(mu / 2.0);
    Ok(vertices - edges)
}

/// Largest `k` with `x k ≤ 1`.
fn floor_recip(x: f64) -> u64 {
    let mut k = (1.0 / x).floor() as u64;
    while x * (k + 1) as f64 <= 1.0 {
        k += 1;
    }
    while k > 0 && x * k as f64 > 1.0 {
        k -= 1;
    }
    k
}

/// Conjectured rate for the largest component of a `D`-regular graph to
/// hold a fraction `x` of the vertices. Conjectural.
pub fn rate_conjectured_largest(d: u32, x: f64) -> Result<f64> {
    check_regular_degree(d)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let xk = (x * floor_recip(x) as f64).min(1.0);
    Ok((1.0 - d as f64 / 2.0) * (xk * x.ln() + xlogx(1.0 - xk)))
}

/// Conjectured rate for a `D`-regular graph to split into components with
/// vertex fractions `qs` plus a remainder `1 − Σ qs`. Conjectural.
pub fn rate_conjectured_multi(d: u32, qs: &[f64]) -> Result<f64> {
    check_regular_degree(d)?;
    if qs.iter().any(|&q| !(q > 0.0 && q <= 1.0)) {
        return Err(Error::Domain("every component fraction must lie in (0, 1]".into()));
    }
    let rest = 1.0 - qs.iter().sum::<f64>();
    if rest < -1e-12 {
        return Err(Error::Infeasible(format!("Σ q_i ≤ 1 violated: Σ q_i = {}", 1.0 - rest)));
    }
    let s: f64 = qs.iter().map(|&q| xlogx(q)).sum::<f64>() + xlogx(rest.max(0.0));
    Ok((1.0 - d as f64 / 2.0) * s)
}

/// Result of the component-size minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeOptimum {
    pub rate: f64,
    pub argmin: SubProfile,
}

/// `H(q) + H(p − q) − H(p)` on dense vectors over the same support.
fn size_objective(p: &[f64], q: &[f64], h_p: f64) -> f64 {
    let mut s = 0.0;
    let mut mq = 0.0;
    let mut mr = 0.0;
    for k in 1..p.len() {
        let r = p[k] - q[k];
        s += xlogx(q[k]) + xlogx(r);
        mq += k as f64 * q[k];
        mr += k as f64 * r;
    }
    s - xlogx(0.5 * mq) - xlogx(0.5 * mr) - h_p
}

/// Partial derivative of the size objective in `q_k`, up to a constant
/// common to all `k`.
fn size_gradient(k: usize, p: &[f64], q: &[f64], mq: f64, mr: f64) -> f64 {
    (q[k] / (p[k] - q[k])).ln() - 0.5 * k as f64 * (mq / mr).ln()
}

/// Minimizes the objective along `q_i += δ, q_j −= δ`.
fn pair_step(p: &[f64], q: &mut [f64], i: usize, j: usize, h_p: f64) -> f64 {
    let lo = (-q[i]).max(q[j] - p[j]);
    let hi = (p[i] - q[i]).min(q[j]);
    if hi - lo <= 0.0 {
        return 0.0;
    }
    let (qi, qj) = (q[i], q[j]);
    let base = size_objective(p, q, h_p);
    let mut trial = q.to_vec();
    let mut dir = |d: f64| {
        trial[i] = qi + d;
        trial[j] = qj - d;
        let (mut mq, mut mr) = (0.0, 0.0);
        for k in 1..p.len() {
            mq += k as f64 * trial[k];
            mr += k as f64 * (p[k] - trial[k]);
        }
        size_gradient(i, p, &trial, mq, mr) - size_gradient(j, p, &trial, mq, mr)
    };
    let d = bisect(&mut dir, lo, hi, 0.0, 200);
    q[i] = qi + d;
    q[j] = qj - d;
    let new = size_objective(p, q, h_p);
    if new <= base {
        base - new
    } else {
        q[i] = qi;
        q[j] = qj;
        0.0
    }
}

fn coordinate_descent(p: &[f64], support: &[usize], q: &mut [f64], h_p: f64) {
    for _ in 0..5000 {
        let mut gain = 0.0;
        for a in 0..support.len() {
            for b in a + 1..support.len() {
                gain += pair_step(p, q, support[a], support[b], h_p);
            }
        }
        if gain <= 1e-16 {
            break;
        }
    }
}

/// Feasible point of `{0 ≤ q ≤ p, Σ q = r}` from uniform fractions of `p`.
fn random_feasible(p: &[f64], support: &[usize], r: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut q = vec![0.0; p.len()];
    for &k in support {
        q[k] = rng.random::<f64>() * p[k];
    }
    let s: f64 = q.iter().sum();
    let total: f64 = p.iter().sum();
    if s < r {
        let theta = (r - s) / (total - s);
        for &k in support {
            q[k] += theta * (p[k] - q[k]);
        }
    } else if s > 0.0 {
        for &k in support {
            q[k] *= r / s;
        }
    }
    q
}

/// Grid search with step `h` over supports of size 2 or 3.
fn grid_minimum(p: &[f64], support: &[usize], r: f64, h: f64, h_p: f64) -> Option<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut q = vec![0.0; p.len()];
    let mut consider = |q: &Vec<f64>| {
        let v = size_objective(p, q, h_p);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, q.clone()));
        }
    };
    match support {
        [a, b] => {
            let (a, b) = (*a, *b);
            let lo = (r - p[b]).max(0.0);
            let hi = p[a].min(r);
            let steps = ((hi - lo) / h).floor() as usize;
            for i in 0..=steps {
                q[a] = (lo + i as f64 * h).min(hi);
                q[b] = (r - q[a]).clamp(0.0, p[b]);
                consider(&q);
            }
        }
        [a, b, c] => {
            let (a, b, c) = (*a, *b, *c);
            let na = (p[a].min(r) / h).floor() as usize;
            for i in 0..=na {
                q[a] = i as f64 * h;
                let lo = (r - q[a] - p[c]).max(0.0);
                let hi = p[b].min(r - q[a]);
                if hi < lo {
                    continue;
                }
                let j0 = (lo / h).ceil() as usize;
                let j1 = (hi / h).floor() as usize;
                for j in j0..=j1 {
                    q[b] = j as f64 * h;
                    q[c] = r - q[a] - q[b];
                    if q[c] < 0.0 || q[c] > p[c] {
                        continue;
                    }
                    consider(&q);
                }
            }
        }
        _ => {}
    }
    best
}

/// Grid step used to validate the optimizer on small supports.
pub const SIZE_GRID_STEP: f64 = 1e-4;

/// Decay rate of the event "some component holds a fraction `r` of the
/// vertices", minimizing `H(q) + H(p−q) − H(p)` over `0 ≤ q ≤ p, Σ q = r`.
/// Requires `p_1 = p_2 = 0`, which makes `K = 0` on the whole feasible set.
pub fn rate_component_size(p: &DegreeDistribution, r: f64) -> Result<SizeOptimum> {
    if p.p(1) > 0.0 || p.p(2) > 0.0 {
        return Err(Error::Precondition("p_1 = p_2 = 0 required".into()));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("r must lie in (0, 1], got {r}")));
    }
    let pv = p.masses().as_slice().to_vec();
    let total: f64 = pv.iter().sum();
    if r > total {
        return Err(Error::Infeasible(format!("Σ q_k = r ≤ Σ p_k violated: r = {r}")));
    }
    let support: Vec<usize> = p.iter().map(|(k, _)| k).collect();
    let h_p = entropy_h(p.masses());
    let finish = |q: Vec<f64>| -> Result<SizeOptimum> {
        let rate = size_objective(&pv, &q, h_p).max(0.0);
        Ok(SizeOptimum { rate, argmin: SubProfile::new(Masses::from_dense(q)?) })
    };
    if r == total {
        return finish(pv.clone());
    }
    if support.len() == 1 {
        let mut q = vec![0.0; pv.len()];
        q[support[0]] = r;
        return finish(q);
    }

    let mut starts = vec![pv.iter().map(|&x| r * x / total).collect::<Vec<_>>()];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..5 {
        starts.push(random_feasible(&pv, &support, r, &mut rng));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mut q in starts {
        coordinate_descent(&pv, &support, &mut q, h_p);
        let v = size_objective(&pv, &q, h_p);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, q));
        }
    }
    let (mut best_v, mut best_q) = best.unwrap();
    if support.len() <= 3 {
        if let Some((gv, mut gq)) = grid_minimum(&pv, &support, r, SIZE_GRID_STEP, h_p) {
            if gv < best_v {
                coordinate_descent(&pv, &support, &mut gq, h_p);
                best_v = size_objective(&pv, &gq, h_p);
                best_q = gq;
            }
        }
    }
    let _ = best_v;
    finish(best_q)
}
