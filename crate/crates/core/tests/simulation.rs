use std::collections::BTreeMap;

use cmld_core::estimate::{clopper_pearson, estimate_event_prob, estimate_from_distribution, lln_check};
use cmld_core::sim::{check_record, eea_run, replication_rng, sample_multigraph, component_sizes};
use cmld_core::verify::{
    eea_size_distribution, matching_enumeration, random_degree_sequence, total_variation,
};
use cmld_core::{DegreeDistribution, DegreeSequence, Error, SubProfile};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn pairings_of_four_leaves_are_uniform() {
    let d = DegreeSequence::new(vec![1, 1, 1, 1]).unwrap();
    let draws = 30_000u64;
    let mut counts = [0u64; 3];
    for rep in 0..draws {
        let edges = sample_multigraph(&d, &mut replication_rng(3, rep));
        let partner = edges.iter().find_map(|&(a, b)| match (a, b) {
            (0, x) | (x, 0) => Some(x),
            _ => None,
        });
        counts[partner.unwrap() as usize - 1] += 1;
    }
    let expected = draws as f64 / 3.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(2.0).unwrap().cdf(stat);
    assert!(p_value > 0.001, "χ² = {stat}, p = {p_value}, counts {counts:?}");
}

#[test]
fn exploration_conserves_on_random_sequences() {
    let mut rng = replication_rng(21, 0);
    for rep in 0..1000 {
        let d = random_degree_sequence(&mut rng, 80, 7);
        let rec = eea_run(&d, &mut replication_rng(22, rep), true);
        check_record(&rec).unwrap_or_else(|e| panic!("sequence {:?}: {e}", d.degrees()));
        assert!(rec.total_steps <= d.edges() + d.len() as u64);
        assert_eq!(rec.total_steps, d.edges() + rec.components.len() as u64);
        let vertices: u64 = rec.components.iter().map(|c| c.n_vertices).sum();
        assert_eq!(vertices, d.len() as u64);
    }
}

#[test]
fn exploration_matches_enumeration() {
    let d = DegreeSequence::new(vec![1, 1, 1, 1, 2]).unwrap();
    let exact = matching_enumeration(&d);
    let tv = total_variation(&exact, &eea_size_distribution(&d, 100_000, 23));
    assert!(tv <= 0.02, "TV = {tv}");
}

#[test]
fn exploration_matches_explicit_matching() {
    let d = DegreeSequence::new(vec![1, 1, 2, 2, 3, 3, 1, 1]).unwrap();
    let runs = 40_000;
    let mut counts: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for rep in 0..runs {
        let edges = sample_multigraph(&d, &mut replication_rng(24, rep));
        *counts.entry(component_sizes(d.len(), &edges)).or_default() += 1.0 / runs as f64;
    }
    let tv = total_variation(&counts, &eea_size_distribution(&d, runs, 25));
    assert!(tv <= 0.03, "TV = {tv}");
}

#[test]
fn estimate_is_monotone_in_eps() {
    let d = DegreeSequence::new(vec![3; 16]).unwrap();
    let q = SubProfile::from_pairs([(3, 0.5)]).unwrap();
    let mut last = 0.0;
    for eps in [0.01, 0.05, 0.1, 0.2, 0.3, 0.5] {
        let r = estimate_event_prob(&d, &q, eps, 5_000, 5, 4).unwrap();
        assert!(r.p_hat >= last, "eps {eps}: {} < {last}", r.p_hat);
        assert!(r.ci_low <= r.p_hat && r.p_hat <= r.ci_high && r.hits <= r.reps);
        last = r.p_hat;
    }
}

#[test]
fn estimate_is_independent_of_workers() {
    let d = DegreeSequence::new(vec![3; 20]).unwrap();
    let q = SubProfile::from_pairs([(3, 0.5)]).unwrap();
    let base = estimate_event_prob(&d, &q, 0.05, 20_000, 77, 1).unwrap();
    for workers in [4, 16] {
        assert_eq!(estimate_event_prob(&d, &q, 0.05, 20_000, 77, workers).unwrap(), base);
    }
}

#[test]
fn clopper_pearson_covers() {
    let mut rng = replication_rng(26, 0);
    for p in [0.01, 0.1, 0.5] {
        let trials = 1000;
        let reps = 200;
        let mut covered = 0;
        for _ in 0..trials {
            let hits = (0..reps).filter(|_| rng.random_bool(p)).count() as u64;
            let (lo, hi) = clopper_pearson(hits, reps, 0.05);
            if lo <= p && p <= hi {
                covered += 1;
            }
        }
        assert!(covered >= 930, "p = {p}: coverage {covered}/1000");
    }
}

#[test]
fn estimate_rejects_q_outside_p() {
    let p = DegreeDistribution::from_pairs([(3, 1.0)]).unwrap();
    let q = SubProfile::from_pairs([(4, 0.1)]).unwrap();
    let err = estimate_from_distribution(&p, 100, &q, 0.01, 10, 1, 1).unwrap_err();
    assert!(matches!(err, Error::Infeasible(_)));
    assert!(err.to_string().contains("q ≤ p"));
}

#[test]
fn lln_check_examples() {
    let cubic = DegreeDistribution::from_pairs([(3, 1.0)]).unwrap();
    let c = lln_check(&cubic, 10_000, 1).unwrap();
    assert!(c.largest_fraction > 0.98, "{c:?}");
    let leaves = DegreeDistribution::from_pairs([(1, 1.0)]).unwrap();
    let c = lln_check(&leaves, 1000, 1).unwrap();
    assert_eq!(c.largest_fraction, 2.0 / 1000.0);
}

#[test]
fn odd_sums_are_rejected() {
    assert!(matches!(DegreeSequence::new(vec![1, 2]), Err(Error::Parity(_))));
    // counts 3 and 8 give an odd half-edge total
    let p = DegreeDistribution::from_pairs([(1, 0.3), (3, 0.7)]).unwrap();
    let (d, fix) = DegreeSequence::from_distribution(&p, 11).unwrap();
    assert_eq!(d.half_edges() % 2, 0);
    assert!(fix.is_some());
}
