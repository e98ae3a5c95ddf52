//! The edge-exploration algorithm (EEA).
//!
//! State `(A, V)`: `A` active half-edges, `V_k` sleeping vertices of degree
//! `k`, `S = Σ k V_k`. One step:
//!
//! ```text
//! A = 0:  wake degree k w.p. k V_k / S                    A ← k
//! A = a:  kill a pair w.p. (a − 1)/(S + a − 1)            A ← a − 2
//!         wake degree k w.p. k V_k/(S + a − 1)            A ← a + k − 2
//! ```
//!
//! Every step from `A > 0` forms one edge; a wake from `A = 0` starts a new
//! component. The component's edge count is the length of the excursion of
//! `A` away from 0.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sequence::DegreeSequence;
use crate::error::{Error, Result};

/// One finished component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    /// Vertex count by degree, indexed by degree.
    pub degree_config: Vec<u64>,
    pub n_vertices: u64,
    pub n_edges: u64,
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// A fresh component was started at a vertex of this degree.
    WakeFromZero(usize),
    /// A sleeping vertex of this degree joined the current component.
    Wake(usize),
    /// Two active half-edges were paired.
    Kill,
}

/// Incremental EEA state. Reusable across runs via [`Explorer::reset`].
#[derive(Debug, Clone)]
pub struct Explorer {
    sleeping: Vec<u64>,
    sleeping_half_edges: u64,
    active: u64,
    steps: u64,
    components: u64,
    current: Vec<u64>,
    current_vertices: u64,
    current_edges: u64,
}

impl Explorer {
    /// Starts from `histogram[k]` sleeping vertices of degree `k`.
    pub fn new(histogram: &[u64]) -> Self {
        let mut e = Explorer {
            sleeping: Vec::new(),
            sleeping_half_edges: 0,
            active: 0,
            steps: 0,
            components: 0,
            current: vec![0; histogram.len().max(1)],
            current_vertices: 0,
            current_edges: 0,
        };
        e.reset(histogram);
        e
    }

    pub fn reset(&mut self, histogram: &[u64]) {
        self.sleeping.clear();
        self.sleeping.extend_from_slice(histogram);
        if !self.sleeping.is_empty() {
            self.sleeping[0] = 0;
        }
        self.sleeping_half_edges = self.sleeping.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        self.active = 0;
        self.steps = 0;
        self.components = 0;
        self.current.clear();
        self.current.resize(histogram.len().max(1), 0);
        self.current_vertices = 0;
        self.current_edges = 0;
    }

    pub fn active(&self) -> u64 {
        self.active
    }

    pub fn sleeping(&self) -> &[u64] {
        &self.sleeping
    }

    pub fn sleeping_half_edges(&self) -> u64 {
        self.sleeping_half_edges
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Components started so far.
    pub fn components_started(&self) -> u64 {
        self.components
    }

    pub fn is_finished(&self) -> bool {
        self.active == 0 && self.sleeping_half_edges == 0
    }

    /// Degree configuration of the component being explored.
    pub fn current_config(&self) -> &[u64] {
        &self.current
    }

    pub fn current_vertices(&self) -> u64 {
        self.current_vertices
    }

    pub fn current_edges(&self) -> u64 {
        self.current_edges
    }

    /// Degree class of the sleeping half-edge with index `u < S`.
    fn bucket(&self, mut u: u64) -> usize {
        for (k, &c) in self.sleeping.iter().enumerate().skip(1) {
            let w = k as u64 * c;
            if u < w {
                return k;
            }
            u -= w;
        }
        unreachable!("index beyond the sleeping half-edges")
    }

    fn wake(&mut self, k: usize) {
        self.sleeping[k] -= 1;
        self.sleeping_half_edges -= k as u64;
        self.current[k] += 1;
        self.current_vertices += 1;
    }

    /// Performs one step; `None` once the exploration is finished.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<StepKind> {
        if self.is_finished() {
            return None;
        }
        self.steps += 1;
        if self.active == 0 {
            self.current.iter_mut().for_each(|c| *c = 0);
            self.current_vertices = 0;
            self.current_edges = 0;
            let k = self.bucket(rng.random_range(0..self.sleeping_half_edges));
            self.wake(k);
            self.active = k as u64;
            self.components += 1;
            return Some(StepKind::WakeFromZero(k));
        }
        let others = self.active - 1;
        let u = rng.random_range(0..self.sleeping_half_edges + others);
        self.current_edges += 1;
        if u < others {
            self.active -= 2;
            Some(StepKind::Kill)
        } else {
            let k = self.bucket(u - others);
            self.wake(k);
            self.active = self.active + k as u64 - 2;
            Some(StepKind::Wake(k))
        }
    }

    /// Snapshot of the component just closed (valid right after a step
    /// that returned `A` to 0).
    pub fn current_record(&self) -> ComponentRecord {
        ComponentRecord {
            degree_config: self.current.clone(),
            n_vertices: self.current_vertices,
            n_edges: self.current_edges,
        }
    }
}

/// One complete EEA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationRecord {
    pub n_vertices: u64,
    pub n_edges: u64,
    /// Initial degree histogram.
    pub histogram: Vec<u64>,
    /// `A(j)` for `j = 0..=steps` when recorded.
    pub active: Option<Vec<u64>>,
    /// `V(j)` rows of width `histogram.len()` when recorded, flattened.
    pub sleeping: Option<Vec<u64>>,
    /// `(start, end)` steps of each excursion: `A(start − 1) = 0`, `A > 0` on
    /// `[start, end)`, `A(end) = 0`.
    pub excursions: Vec<(u64, u64)>,
    pub components: Vec<ComponentRecord>,
    /// Wakes from `A = 0`.
    pub eta_increments: u64,
    pub total_steps: u64,
    pub complete: bool,
}

impl ExplorationRecord {
    pub fn has_trajectory(&self) -> bool {
        self.active.is_some()
    }

    /// `(A(j), V(j))` when the trajectory was recorded.
    pub fn step(&self, j: usize) -> Option<(u64, &[u64])> {
        let w = self.histogram.len();
        let a = self.active.as_ref()?.get(j).copied()?;
        let v = self.sleeping.as_ref()?.get(j * w..(j + 1) * w)?;
        Some((a, v))
    }
}

/// Runs the EEA to completion. With `record_trajectory` every state
/// `(A(j), V(j))` is kept; components and excursions are always kept.
pub fn eea_run<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R, record_trajectory: bool) -> ExplorationRecord {
    let histogram = d.histogram();
    let mut ex = Explorer::new(&histogram);
    let mut active = record_trajectory.then(Vec::new);
    let mut sleeping = record_trajectory.then(Vec::new);
    let push = |ex: &Explorer, a: &mut Option<Vec<u64>>, s: &mut Option<Vec<u64>>| {
        if let (Some(a), Some(s)) = (a.as_mut(), s.as_mut()) {
            a.push(ex.active());
            s.extend_from_slice(ex.sleeping());
        }
    };
    push(&ex, &mut active, &mut sleeping);
    let mut excursions = Vec::new();
    let mut components = Vec::new();
    let mut start = 0;
    while let Some(kind) = ex.step(rng) {
        push(&ex, &mut active, &mut sleeping);
        if let StepKind::WakeFromZero(_) = kind {
            start = ex.steps();
        }
        if ex.active() == 0 {
            excursions.push((start, ex.steps()));
            components.push(ex.current_record());
        }
    }
    ExplorationRecord {
        n_vertices: d.len() as u64,
        n_edges: d.edges(),
        histogram,
        active,
        sleeping,
        excursions,
        components,
        eta_increments: ex.components_started(),
        total_steps: ex.steps(),
        complete: ex.is_finished(),
    }
}

/// Summary of the component structure of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub largest_fraction: f64,
    pub n_components: u64,
    /// Components in decreasing vertex count.
    pub components: Vec<ComponentRecord>,
}

/// Components of a finished run, largest first.
pub fn extract_components(rec: &ExplorationRecord) -> Result<ComponentSummary> {
    if !rec.complete {
        return Err(Error::State("exploration record is incomplete".into()));
    }
    if rec.components.len() as u64 != rec.eta_increments || rec.excursions.len() != rec.components.len() {
        return Err(Error::State("components, excursions and wakes from zero disagree".into()));
    }
    let mut components = rec.components.clone();
    components.sort_by(|a, b| b.n_vertices.cmp(&a.n_vertices).then(b.n_edges.cmp(&a.n_edges)));
    let largest = components.first().map_or(0, |c| c.n_vertices);
    Ok(ComponentSummary {
        largest_fraction: if rec.n_vertices == 0 { 0.0 } else { largest as f64 / rec.n_vertices as f64 },
        n_components: components.len() as u64,
        components,
    })
}

/// Checks the bookkeeping identities of a finished run. With a recorded
/// trajectory, also checks every step: one vertex woken or two half-edges
/// removed, and `(A − 1)⁺ + Σ k V_k` non-increasing.
pub fn check_record(rec: &ExplorationRecord) -> Result<()> {
    let fail = |m: String| Err(Error::State(m));
    let kmax = rec.histogram.len();
    let mut totals = vec![0u64; kmax];
    let mut edges = 0;
    for c in &rec.components {
        for (k, &v) in c.degree_config.iter().enumerate() {
            totals[k] += v;
        }
        edges += c.n_edges;
        if c.degree_config.iter().sum::<u64>() != c.n_vertices {
            return fail("component vertex count disagrees with its configuration".into());
        }
    }
    if totals != rec.histogram {
        return fail(format!("component configurations sum to {totals:?}, expected {:?}", rec.histogram));
    }
    if edges != rec.n_edges {
        return fail(format!("component edges sum to {edges}, expected {}", rec.n_edges));
    }
    if rec.total_steps > rec.n_edges + rec.n_vertices {
        return fail(format!("{} steps exceed m + n = {}", rec.total_steps, rec.n_edges + rec.n_vertices));
    }
    if rec.total_steps != rec.n_edges + rec.eta_increments {
        return fail("steps ≠ edges + components".into());
    }
    for (c, &(s, e)) in rec.components.iter().zip(&rec.excursions) {
        if e - s != c.n_edges {
            return fail(format!("excursion [{s}, {e}] has length ≠ {} edges", c.n_edges));
        }
    }
    if !rec.has_trajectory() {
        return Ok(());
    }
    let r = |a: u64, v: &[u64]| a.saturating_sub(1) + v.iter().enumerate().map(|(k, &c)| k as u64 * c).sum::<u64>();
    let half = |a: u64, v: &[u64]| a + v.iter().enumerate().map(|(k, &c)| k as u64 * c).sum::<u64>();
    let (mut a0, v0) = rec.step(0).unwrap();
    let mut v0 = v0.to_vec();
    for j in 1..=rec.total_steps as usize {
        let (a1, v1) = rec.step(j).unwrap();
        let woken: u64 = v0.iter().zip(v1).map(|(x, y)| x - y).sum();
        let dh = half(a0, &v0) - half(a1, v1);
        let ok = (woken == 1 && (dh == 0 || (a0 > 0 && dh == 2))) || (woken == 0 && dh == 2);
        if !ok {
            return fail(format!("step {j} neither wakes one vertex nor removes two half-edges"));
        }
        if r(a1, v1) > r(a0, &v0) {
            return fail(format!("(A − 1)⁺ + Σ k V_k increases at step {j}"));
        }
        if a1 == 0 && !rec.excursions.iter().any(|&(_, e)| e == j as u64) {
            return fail(format!("A returns to 0 at step {j} outside an excursion end"));
        }
        a0 = a1;
        v0 = v1.to_vec();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::replication_rng;

    #[test]
    fn two_leaves() {
        let d = DegreeSequence::new(vec![1, 1]).unwrap();
        let rec = eea_run(&d, &mut replication_rng(0, 0), true);
        assert_eq!(rec.total_steps, 2);
        assert_eq!(rec.active.as_ref().unwrap(), &vec![0, 1, 0]);
        assert_eq!(rec.components.len(), 1);
        assert_eq!(rec.components[0].n_vertices, 2);
        assert_eq!(rec.components[0].n_edges, 1);
        check_record(&rec).unwrap();
        let s = extract_components(&rec).unwrap();
        assert_eq!(s.largest_fraction, 1.0);
    }

    #[test]
    fn self_loop() {
        let d = DegreeSequence::new(vec![2]).unwrap();
        let rec = eea_run(&d, &mut replication_rng(0, 0), true);
        assert_eq!(rec.components.len(), 1);
        assert_eq!(rec.components[0].n_vertices, 1);
        assert_eq!(rec.components[0].n_edges, 1);
        check_record(&rec).unwrap();
    }

    #[test]
    fn four_leaves_two_components() {
        let d = DegreeSequence::new(vec![1, 1, 1, 1]).unwrap();
        for rep in 0..50 {
            let rec = eea_run(&d, &mut replication_rng(3, rep), false);
            let s = extract_components(&rec).unwrap();
            assert_eq!(s.n_components, 2);
            assert_eq!(s.n_components as usize, rec.excursions.len());
            check_record(&rec).unwrap();
        }
    }

    #[test]
    fn incomplete_record_rejected() {
        let d = DegreeSequence::new(vec![1, 1]).unwrap();
        let mut rec = eea_run(&d, &mut replication_rng(0, 0), false);
        rec.complete = false;
        assert!(matches!(extract_components(&rec), Err(Error::State(_))));
    }
}
