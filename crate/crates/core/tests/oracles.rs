//! Reference values computed independently at 30-digit precision.

use cmld_core::lln::{giant_fraction, survival_rho};
use cmld_core::path::{beta_general, cost_closed_form, Minimizer};
use cmld_core::rates::{
    beta_of_q, entropy_h, k_of_q, rate_component_degree, rate_component_size, rate_d_regular,
    rate_d_regular_subgraph,
};
use cmld_core::{DegreeDistribution, Masses, PathSegmentSpec, StatePoint, SubProfile};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn masses(pairs: &[(usize, f64)]) -> Masses {
    Masses::from_pairs(pairs.iter().copied()).unwrap()
}

fn state(x0: f64, pairs: &[(usize, f64)]) -> StatePoint {
    StatePoint::new(x0, &masses(pairs)).unwrap()
}

#[test]
fn entropy_values() {
    close(entropy_h(&masses(&[(1, 0.5), (3, 0.5)])), -std::f64::consts::LN_2, 1e-14);
    close(entropy_h(&masses(&[(3, 1.0)])), -0.608_197_662_162_246_572_97, 1e-14);
}

#[test]
fn beta_and_k() {
    let q = SubProfile::from_pairs([(1, 0.1), (3, 0.3)]).unwrap();
    close(beta_of_q(&q).unwrap(), 4.0 - 15f64.sqrt(), 1e-14);
    close(k_of_q(&q).unwrap(), 0.006_066_873_509_048_356_208, 1e-14);
    let q2 = SubProfile::from_pairs([(1, 0.2), (4, 0.2)]).unwrap();
    close(beta_of_q(&q2).unwrap(), 2.0 - 3f64.sqrt(), 1e-14);
}

#[test]
fn component_degree_rate() {
    let p = DegreeDistribution::from_pairs([(1, 0.5), (3, 0.5)]).unwrap();
    let q = SubProfile::from_pairs([(1, 0.1), (3, 0.3)]).unwrap();
    let r = rate_component_degree(&p, &q).unwrap();
    close(r.i1, 0.112_507_008_795_271_507_86, 1e-13);
    close(r.h_q, -0.244_876_760_317_212_711_48, 1e-14);
    close(r.h_pq, -0.341_830_284_956_509_446_28, 1e-14);
}

#[test]
fn regular_rates() {
    close(rate_d_regular(3, 0.5).unwrap(), 0.346_573_590_279_972_654_71, 1e-15);
    close(rate_d_regular(4, 0.25).unwrap(), 0.562_335_144_618_808_350_29, 1e-15);
    let p = DegreeDistribution::from_pairs([(3, 0.5), (4, 0.5)]).unwrap();
    close(rate_d_regular_subgraph(&p, 3, 0.25).unwrap(), 0.562_691_128_198_429_288_35, 1e-14);
}

#[test]
fn component_size_rate() {
    let p = DegreeDistribution::from_pairs([(3, 0.5), (4, 0.5)]).unwrap();
    let opt = rate_component_size(&p, 0.9).unwrap();
    close(opt.rate, 0.230_266_393_347_600_486_19, 1e-12);
    close(opt.argmin.q(3), 0.426_271_433_458_604_291_71, 1e-6);
}

#[test]
fn segment_values() {
    let (x1, x2) = (state(1.0, &[(3, 1.0)]), state(0.5, &[(3, 0.5)]));
    close(beta_general(&x1, &x2).unwrap().0, 0.521_847_936_147_824_572_96, 1e-13);
    close(cost_closed_form(&x1, &x2).unwrap(), 0.126_697_613_936_499_714_21, 1e-13);
    let (y1, y2) = (state(0.0, &[(3, 1.0)]), state(0.0, &[(3, 0.5)]));
    let m = Minimizer::new(PathSegmentSpec::new(y1, y2, 0.0).unwrap());
    let row = m.row_at(0.375);
    close(row[3], 0.676_776_695_296_636_881_10, 1e-14);
    close(row[0], 0.219_669_914_110_089_356_70, 1e-14);
}

#[test]
fn giant_component() {
    let p = DegreeDistribution::from_pairs([(1, 0.5), (3, 0.5)]).unwrap();
    close(survival_rho(&p), 1.0 / 3.0, 1e-12);
    close(giant_fraction(&p), 22.0 / 27.0, 1e-12);
    assert_eq!(giant_fraction(&DegreeDistribution::regular(3).unwrap()), 1.0);
    assert_eq!(giant_fraction(&DegreeDistribution::regular(1).unwrap()), 0.0);
}
