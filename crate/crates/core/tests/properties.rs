use cmld_core::lln::{gen_g0, gen_g1, inverse_fs, lln_path, survival_rho, LlnSummary, LlnTrajectory};
use cmld_core::path::{
    beta_general, local_rate_l, minimizer_path, skorokhod_map, varsigma, LocalVelocity, PathSegmentSpec, SegmentCase,
    StatePoint,
};
use cmld_core::rates::{
    beta_of_q, beta_residual, entropy_h, k_of_q, rate_component_degree, rate_component_size, rate_d_regular,
};
use cmld_core::{uniform_grid, DegreeDistribution, Masses, SubProfile};
use proptest::prelude::*;

fn distribution(weights: Vec<f64>) -> Option<DegreeDistribution> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut dense = vec![0.0];
    dense.extend(weights.iter().map(|w| w / total));
    DegreeDistribution::new(Masses::from_dense(dense).ok()?).ok()
}

/// Weights for degrees 1..=6, each present with positive mass or absent.
fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.05f64..1.0], 6)
}

fn pair() -> impl Strategy<Value = (DegreeDistribution, SubProfile)> {
    (weights(), prop::collection::vec(0.0f64..1.0, 6)).prop_filter_map("needs a valid pair", |(w, u)| {
        let p = distribution(w)?;
        let q: Vec<f64> = p.masses().as_slice().iter().enumerate().map(|(k, &x)| if k == 0 { 0.0 } else { x * u[k - 1] }).collect();
        let q = SubProfile::new(Masses::from_dense(q).ok()?);
        (q.is_feasible() && q.masses().total() > 1e-3).then_some((p, q))
    })
}

fn supercritical() -> impl Strategy<Value = DegreeDistribution> {
    weights().prop_filter_map("needs a giant", |w| distribution(w).filter(cmld_core::lln::is_supercritical))
}

fn state(x0: f64, xk: &[f64]) -> StatePoint {
    let mut dense = vec![0.0];
    dense.extend_from_slice(xk);
    StatePoint::new(x0, &Masses::from_dense(dense).unwrap()).unwrap()
}

/// Endpoints `x1 → x2` drawn as masses and kept fractions.
fn segment() -> impl Strategy<Value = (StatePoint, StatePoint)> {
    (
        prop_oneof![Just(0.0), 0.0f64..1.0],
        prop_oneof![Just(0.0), 0.0f64..0.6],
        prop::collection::vec(prop_oneof![Just(0.0), 0.05f64..0.5], 5),
        prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..1.0], 5),
    )
        .prop_filter_map("needs a valid segment", |(x10, x20, m, keep)| {
            let mut m = m;
            m[2] = m[2].max(0.2);
            let kept: Vec<f64> = m.iter().zip(&keep).map(|(a, b)| a * b).collect();
            let (x1, x2) = (state(x10, &m), state(x20, &kept));
            let spec = PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0).ok()?;
            (spec.beta < 0.95 && spec.varsigma > 1e-3).then_some((x1, x2))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn beta_is_a_root((_, q) in pair()) {
        prop_assume!(q.q(1) > 0.0);
        let b = beta_of_q(&q).unwrap();
        prop_assert!(b > 0.0 && b < 1.0);
        prop_assert!(beta_residual(q.masses(), b).abs() <= 1e-10);
    }

    #[test]
    fn beta_residual_is_increasing((_, q) in pair(), a in 0.001f64..0.998, gap in 1e-3f64..1.0) {
        let b = (a + gap).min(0.999);
        prop_assume!(b > a + 1e-4);
        prop_assert!(beta_residual(q.masses(), a) < beta_residual(q.masses(), b));
    }

    #[test]
    fn rates_are_finite_and_nonnegative((p, q) in pair()) {
        let r = rate_component_degree(&p, &q).unwrap();
        prop_assert!(r.h_q.is_finite() && r.h_pq.is_finite() && r.h_p.is_finite() && r.k.is_finite());
        prop_assert!(k_of_q(&q).unwrap().is_finite());
        prop_assert!(r.i1 >= -1e-12, "I1 = {}", r.i1);
    }

    #[test]
    fn d_regular_is_symmetric(d in 3u32..12, q in 1e-9f64..1.0) {
        prop_assert_eq!(rate_d_regular(d, q).unwrap(), rate_d_regular(d, 1.0 - q).unwrap());
    }

    #[test]
    fn regular_component_rate_matches(d in 3usize..9, q in 0.001f64..1.0) {
        let p = DegreeDistribution::regular(d).unwrap();
        let sub = SubProfile::from_pairs([(d, q)]).unwrap();
        let i1 = rate_component_degree(&p, &sub).unwrap().i1;
        prop_assert!((i1 - rate_d_regular(d as u32, q).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn lln_ode_residual(p in supercritical(), frac in 0.02f64..0.98) {
        let s = LlnSummary::new(&p).unwrap();
        let tau = s.tau.unwrap();
        let traj = LlnTrajectory::new(&p).unwrap();
        let t = frac * tau;
        let h = 1e-6 * tau;
        let (za, zb, z) = (traj.zeta(t - h), traj.zeta(t + h), traj.zeta(t));
        for k in 1..z.len() {
            let d = (zb[k] - za[k]) / (2.0 * h);
            prop_assert!((d + k as f64 * z[k] / (s.mu - 2.0 * t)).abs() <= 1e-6);
        }
        let r = StatePoint::from_row(&z).r();
        prop_assert!((r - (s.mu - 2.0 * t)).abs() <= 1e-9);
    }

    #[test]
    fn inverse_fs_round_trip(p in supercritical(), s in 0.05f64..1.0, u in 0.0f64..1.0) {
        let g0s = gen_g0(&p, s).unwrap();
        let t = u * g0s;
        let f = inverse_fs(&p, s, t).unwrap();
        let back = g0s - gen_g0(&p, s * f).unwrap();
        prop_assert!((back - t).abs() <= 1e-10, "{back} vs {t}");
    }

    #[test]
    fn rho_is_a_fixed_point(p in supercritical()) {
        let rho = survival_rho(&p);
        prop_assert!((gen_g1(&p, rho).unwrap() - rho).abs() <= 1e-10);
    }

    #[test]
    fn local_rate_is_nonnegative(row in prop::collection::vec(0.0f64..1.0, 5), v in prop::collection::vec(0.0f64..1.0, 4)) {
        let x = StatePoint::from_row(&row);
        prop_assume!(x.r() > 0.0);
        let total: f64 = v.iter().sum::<f64>() + 1e-3;
        let mut beta = vec![0.0];
        beta.extend(v.iter().enumerate().map(|(i, b)| if row[i + 1] > 0.0 { -b / total } else { 0.0 }));
        let l = local_rate_l(&x, &LocalVelocity { beta0: 0.0, betak: beta });
        prop_assert!(l >= -1e-15);
        let rates = x.rates();
        let natural = LocalVelocity { beta0: 0.0, betak: (0..5).map(|k| if k == 0 { 0.0 } else { -rates[k] }).collect() };
        prop_assert!(local_rate_l(&x, &natural).abs() <= 1e-14);
    }

    #[test]
    fn skorokhod_properties(steps in prop::collection::vec(-1.0f64..1.0, 1..60), noise in prop::collection::vec(-0.1f64..0.1, 60)) {
        let mut a = vec![0.0];
        for s in &steps {
            a.push(a.last().unwrap() + s);
        }
        let b: Vec<f64> = a.iter().enumerate().map(|(i, x)| if i == 0 { 0.0 } else { x + noise[i % noise.len()] }).collect();
        let (ga, gb) = (skorokhod_map(&a).unwrap(), skorokhod_map(&b).unwrap());
        prop_assert!(ga.iter().all(|&x| x >= 0.0));
        let da = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let dg = ga.iter().zip(&gb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(dg <= 2.0 * da + 1e-12);
        let pos: Vec<f64> = a.iter().map(|x| x.abs()).collect();
        prop_assert_eq!(skorokhod_map(&pos).unwrap(), pos);
    }

    #[test]
    fn varsigma_bounded_by_tilde((x1, x2) in segment()) {
        let spec = PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0).unwrap();
        prop_assert!(varsigma(&x1, &x2) <= spec.varsigma_tilde() * (1.0 + 1e-12));
    }

    #[test]
    fn beta_is_continuous((x1, x2) in segment(), dir in prop::collection::vec(0.0f64..1.0, 5)) {
        let (b, case) = beta_general(&x1, &x2).unwrap();
        // shrink the kept masses toward x2 along a direction that keeps the case
        let mut last = f64::INFINITY;
        for delta in [1e-3, 1e-5, 1e-7, 1e-9] {
            let xk: Vec<f64> = (1..=5).map(|k| {
                let keep = x2.get(k);
                if keep > 0.0 && keep < x1.get(k) { keep * (1.0 - delta * dir[k - 1]) } else { keep }
            }).collect();
            let x0 = if x2.x0 > 0.0 { x2.x0 * (1.0 - delta) } else { 0.0 };
            let y2 = state(x0, &xk);
            let (bd, cd) = beta_general(&x1, &y2).unwrap();
            prop_assert_eq!(cd, case);
            last = (bd - b).abs();
        }
        prop_assert!(last <= 1e-6, "β drift {last}");
    }

    #[test]
    fn minimizer_is_positive_and_paced((x1, x2) in segment()) {
        let spec = PathSegmentSpec::new(x1, x2, 0.0).unwrap();
        let grid = uniform_grid(0.0, spec.t2(), 1001);
        let path = minimizer_path(&spec, &grid).unwrap();
        for i in 1..path.len() {
            let slope = (path.r_at(i) - path.r_at(i - 1)) / (grid[i] - grid[i - 1]);
            prop_assert!((slope + 2.0).abs() <= 1e-8, "slope {slope}");
        }
        if spec.case == SegmentCase::CaseII {
            let interior = path.zeta[1..path.len() - 1].iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
            prop_assert!(interior > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lln_path_satisfies_invariants(p in supercritical()) {
        let t_end = p.mean().max(2.0);
        let path = lln_path(&p, &uniform_grid(0.0, t_end, 1001)).unwrap();
        prop_assert!(path.check_invariants(1e-6).is_ok(), "{:?}", path.check_invariants(1e-6));
    }

    #[test]
    fn size_rate_beats_grid(w3 in 0.05f64..1.0, w4 in 0.05f64..1.0, r in 0.05f64..0.95) {
        let p = distribution(vec![0.0, 0.0, w3, w4, 0.0, 0.0]).unwrap();
        let opt = rate_component_size(&p, r).unwrap();
        let (p3, p4) = (p.p(3), p.p(4));
        let h_p = entropy_h(p.masses());
        let step = 1e-3;
        let mut q3 = (r - p4).max(0.0);
        while q3 <= p3.min(r) {
            let q4 = r - q3;
            if let (Ok(q), Ok(rest)) = (
                Masses::from_pairs([(3, q3), (4, q4)]),
                Masses::from_pairs([(3, p3 - q3), (4, p4 - q4)]),
            ) {
                let g = entropy_h(&q) + entropy_h(&rest) - h_p;
                prop_assert!(opt.rate <= g + 1e-12, "grid {g} beats {}", opt.rate);
            }
            q3 += step;
        }
    }
}
