//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cmld_core::estimate::{estimate_event_prob, lln_check, rate_fit};
use cmld_core::lln::{giant_fraction, lln_path, survival_rho, LlnSummary};
use cmld_core::path::{cost_closed_form, path_cost, Minimizer};
use cmld_core::rates::{beta_of_q, k_of_q, rate_component_degree, rate_d_regular};
use cmld_core::sim::{check_record, eea_run, replication_rng};
use cmld_core::verify::{
    additivity_suite, eea_size_distribution, matching_enumeration, perturbation_suite, random_degree_sequence,
    random_segment_specs, total_variation,
};
use cmld_core::{uniform_grid, DegreeDistribution, DegreeSequence, Masses, PathSegmentSpec, StatePoint, SubProfile};

const HALF_LN2: f64 = 0.346_573_590_279_972_654_71;
const K_ORACLE: f64 = 0.006_066_873_509_048_356_208;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn state(x0: f64, pairs: &[(usize, f64)]) -> StatePoint {
    StatePoint::new(x0, &Masses::from_pairs(pairs.iter().copied()).unwrap()).unwrap()
}

fn triple_agreement() -> Outcome {
    let p = DegreeDistribution::regular(3).unwrap();
    let q = SubProfile::from_pairs([(3, 0.5)]).unwrap();
    let (x1, x2) = (state(0.0, &[(3, 1.0)]), state(0.0, &[(3, 0.5)]));
    let start = Instant::now();
    let values = [
        rate_d_regular(3, 0.5).unwrap(),
        rate_component_degree(&p, &q).unwrap().i1,
        cost_closed_form(&x1, &x2).unwrap(),
    ];
    let elapsed = start.elapsed();
    let err = values.iter().map(|v| (v - HALF_LN2).abs()).fold(0.0, f64::max);
    check(
        err <= 1e-9 && elapsed < Duration::from_millis(1),
        format!("values {values:.10?}, max error {err:.1e} (tol 1e-9), {:.3} ms (limit 1 ms)", elapsed.as_secs_f64() * 1e3),
    )
}

fn quadrature_battery() -> Outcome {
    let specs = random_segment_specs(2024, 25);
    let mut worst = 0.0f64;
    let (mut case_i, mut case_ii, mut both_x0) = (0, 0, false);
    for (x1, x2) in &specs {
        let spec = PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0).unwrap();
        match spec.case {
            cmld_core::path::SegmentCase::CaseI => case_i += 1,
            cmld_core::path::SegmentCase::CaseII => case_ii += 1,
        }
        both_x0 |= x1.x0 > 0.0 && x2.x0 > 0.0;
        let m = Minimizer::new(spec);
        let q = path_cost(&m, 0.0, m.spec.t2()).unwrap();
        worst = worst.max((q - cost_closed_form(x1, x2).unwrap()).abs());
    }
    check(
        worst <= 1e-6 && case_i > 0 && case_ii > 0 && both_x0,
        format!("{} specs ({case_i} case i, {case_ii} case ii), max |quadrature − closed form| {worst:.1e} (tol 1e-6)", specs.len()),
    )
}

fn beta_exactness() -> Outcome {
    let q1 = SubProfile::from_pairs([(1, 0.1), (3, 0.3)]).unwrap();
    let q2 = SubProfile::from_pairs([(1, 0.2), (4, 0.2)]).unwrap();
    let e1 = (beta_of_q(&q1).unwrap() - (4.0 - 15f64.sqrt())).abs();
    let e2 = (beta_of_q(&q2).unwrap() - (2.0 - 3f64.sqrt())).abs();
    let ek = (k_of_q(&q1).unwrap() - K_ORACLE).abs();
    check(
        e1 <= 1e-9 && e2 <= 1e-9 && ek <= 1e-6,
        format!("|β − (4 − √15)| {e1:.1e}, |β − (2 − √3)| {e2:.1e} (tol 1e-9), |K − oracle| {ek:.1e} (tol 1e-6)"),
    )
}

fn lln_quantitative() -> Outcome {
    let p = DegreeDistribution::from_pairs([(1, 0.5), (3, 0.5)]).unwrap();
    let e_rho = (survival_rho(&p) - 1.0 / 3.0).abs();
    let e_giant = (giant_fraction(&p) - 22.0 / 27.0).abs();
    let c = lln_check(&p, 100_000, 7).unwrap();
    let e_frac = (c.largest_fraction - 22.0 / 27.0).abs();
    check(
        e_rho <= 1e-10 && e_giant <= 1e-12 && e_frac <= 0.01 && c.sup_distance <= 0.02,
        format!(
            "|ρ − 1/3| {e_rho:.1e} (tol 1e-10), |giant − 22/27| {e_giant:.1e} (tol 1e-12), \
             largest fraction {:.4} (±0.01 of {:.4}), sup distance {:.4} (tol 0.02)",
            c.largest_fraction,
            22.0 / 27.0,
            c.sup_distance
        ),
    )
}

fn zero_cost_lln() -> Outcome {
    let p = DegreeDistribution::from_pairs([(1, 0.5), (3, 0.5)]).unwrap();
    let s = LlnSummary::new(&p).unwrap();
    let tau = s.tau.unwrap();
    let path = lln_path(&p, &uniform_grid(0.0, s.mu / 2.0, 2001)).unwrap();
    let cost = path_cost(&path, 0.0, tau).unwrap();
    check(cost.abs() <= 1e-5, format!("cost on [0, τ = {tau:.6}] is {cost:.2e} (tol 1e-5)"))
}

fn rare_event_decay() -> Outcome {
    let q = SubProfile::from_pairs([(3, 0.5)]).unwrap();
    let mut results = Vec::new();
    let mut lines = Vec::new();
    for n in [12usize, 16, 20, 24] {
        let d = DegreeSequence::new(vec![3; n]).unwrap();
        let r = estimate_event_prob(&d, &q, 1.0 / n as f64, 1_000_000, 2024, 8).unwrap();
        lines.push(format!("n={n}: {:.3e}", r.p_hat));
        results.push(r);
    }
    match rate_fit(&results) {
        Ok(fit) => check(
            (0.24..=0.48).contains(&fit.slope),
            format!("slope {:.4} (window [0.24, 0.48], theory {HALF_LN2:.4}); {}", fit.slope, lines.join(", ")),
        ),
        Err(e) => check(false, format!("fit failed: {e}; {}", lines.join(", "))),
    }
}

fn property_suites() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut rng = replication_rng(41, 0);
    let mut bad = 0;
    for rep in 0..1000 {
        let d = random_degree_sequence(&mut rng, 80, 7);
        let rec = eea_run(&d, &mut replication_rng(42, rep), true);
        if check_record(&rec).is_err() || rec.total_steps > d.edges() + d.len() as u64 {
            bad += 1;
        }
    }
    ok &= bad == 0;
    notes.push(format!("conservation failures {bad}/1000"));

    let d = DegreeSequence::new(vec![1, 1, 1, 1, 2]).unwrap();
    let tv = total_variation(&matching_enumeration(&d), &eea_size_distribution(&d, 100_000, 43));
    ok &= tv <= 0.02;
    notes.push(format!("TV {tv:.4} (tol 0.02)"));

    let pert = perturbation_suite(50, &[0.01, 0.05], 44).unwrap();
    ok &= pert.worst_gain >= -1e-9 && pert.tested == 50;
    notes.push(format!("perturbation smallest gain {:.2e} (tol −1e-9)", pert.worst_gain));

    let add = additivity_suite(20, 45).unwrap();
    ok &= add <= 1e-10;
    notes.push(format!("additivity {add:.1e} (tol 1e-10)"));

    let symmetric = (3..10).all(|d| {
        (1..1000).all(|i| {
            let q = i as f64 / 1000.0;
            rate_d_regular(d, q).unwrap() == rate_d_regular(d, 1.0 - q).unwrap()
        })
    });
    ok &= symmetric;
    notes.push(format!("symmetry exact: {symmetric}"));
    check(ok, notes.join(", "))
}

fn determinism() -> Outcome {
    let d = DegreeSequence::new(vec![3; 20]).unwrap();
    let q = SubProfile::from_pairs([(3, 0.5)]).unwrap();
    let runs: Vec<_> = [1, 4, 16].iter().map(|&w| estimate_event_prob(&d, &q, 0.2, 100_000, 8, w).unwrap()).collect();
    let same = runs.windows(2).all(|w| w[0] == w[1] && w[0].p_hat.to_bits() == w[1].p_hat.to_bits());
    check(same, format!("hits {:?} for workers 1, 4, 16", runs.iter().map(|r| r.hits).collect::<Vec<_>>()))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("d-regular triple agreement", triple_agreement, Duration::from_secs(1)),
        ("quadrature vs closed form", quadrature_battery, Duration::from_secs(5)),
        ("beta exactness", beta_exactness, Duration::from_secs(1)),
        ("fluid limit quantitative", lln_quantitative, Duration::from_secs(10)),
        ("fluid limit zero cost", zero_cost_lln, Duration::from_secs(1)),
        ("rare-event decay", rare_event_decay, Duration::from_secs(600)),
        ("property suites", property_suites, Duration::from_secs(120)),
        ("determinism across workers", determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let passed = outcome.passed && elapsed <= *budget;
        if !passed {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {} [{:.2} s, budget {} s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
