use csmetric::fixed_point::{
    check_banach, check_m1, check_m1_with, check_m2, check_mf_contraction,
    estimate_contraction_factor, geometric_bound, picard, verify_fixed_point, M1Guard,
    DEFAULT_MAX_ITER, DEGENERATE_BELOW,
};
use csmetric::poly::poly_map;
use csmetric::sampling::stream;
use csmetric::{make_builtin_space, CsError, MfFunction, SampleConfig, SelfMap, Strategy};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decay_follows_verified_contraction(k in 0.05..0.9f64, x0 in 0.0..=1.0f64) {
        let space = make_builtin_space("app_metric", &[]).unwrap();
        let map = SelfMap::builtin("scale", &[k], space.domain.clone()).unwrap();
        let run = picard(&space, &map, x0, 1e-12, DEFAULT_MAX_ITER).unwrap();
        let orbit: Vec<Vec<f64>> = run.orbit.iterates.windows(2).map(|w| vec![w[0], w[0], w[1]]).collect();
        let banach = check_banach(&space, &map, k, &SampleConfig::explicit(orbit)).unwrap();
        prop_assert!(banach.passed);
        let d0 = run.orbit.step_distances[0];
        for (n, d) in run.orbit.step_distances.iter().enumerate() {
            prop_assert!(*d <= geometric_bound(k, n, d0), "n {} d {} bound {}", n, d, geometric_bound(k, n, d0));
        }
    }

    #[test]
    fn residual_is_recomputable(m in 3..=10u32, x0 in 0.0..=1.0f64) {
        let p = poly_map(m).unwrap();
        let s = picard(&p.space, &p.map, x0, 1e-12, DEFAULT_MAX_ITER).unwrap();
        let x = s.fixed_point;
        let again = p.space.eval_metric(x, x, p.map.apply(x).unwrap()).unwrap();
        prop_assert!((s.residual - again).abs() <= 1e-12);
    }

    #[test]
    fn banach_reduction_agrees(seed in any::<u64>(), r in 1e-7..0.5f64) {
        let p = poly_map(3).unwrap();
        let pairs: Vec<Vec<f64>> = stream(&p.space.domain, 2, Strategy::GridPlusRandom, seed).take(300).collect();
        let triples = pairs.iter().map(|t| vec![t[0], t[0], t[1]]).collect();
        let b = check_banach(&p.space, &p.map, r, &SampleConfig::explicit(triples)).unwrap();
        let g = check_mf_contraction(&p.space, &p.map, &MfFunction::banach(r).unwrap(), &SampleConfig::explicit(pairs)).unwrap();
        prop_assert_eq!(b.passed, g.passed);
        prop_assert_eq!(b.worst_margin, g.worst_margin);
    }

    #[test]
    fn sup_ratio_is_the_sample_maximum(seed in any::<u64>(), m in 3..=6u32) {
        let p = poly_map(m).unwrap();
        let cfg = SampleConfig::new(seed, 500, Strategy::GridPlusRandom);
        let est = estimate_contraction_factor(&p.space, &p.map, &cfg).unwrap();
        let mut max = f64::NEG_INFINITY;
        for t in cfg.tuples(&p.space.domain, 3).unwrap() {
            let d = p.space.eval_metric(t[0], t[1], t[2]).unwrap();
            if d < DEGENERATE_BELOW {
                continue;
            }
            let f = |x: f64| p.map.apply(x).unwrap();
            let ratio = p.space.eval_metric(f(t[0]), f(t[1]), f(t[2])).unwrap() / d;
            prop_assert!(ratio <= est.sup_ratio);
            max = max.max(ratio);
        }
        prop_assert_eq!(max, est.sup_ratio);
    }

    #[test]
    fn builtin_mf_members(seed in any::<u64>(), which in 0..3usize, frac in 0.0..1.0f64) {
        let mf = match which {
            0 => MfFunction::banach(frac).unwrap(),
            1 => MfFunction::kannan(0.5 * frac).unwrap(),
            _ => MfFunction::bianchini(frac).unwrap(),
        };
        let cfg = SampleConfig::new(seed, 500, Strategy::GridPlusRandom);
        prop_assert!(check_m1(&mf, mf.m1_factor().unwrap(), &cfg).unwrap().passed);
        prop_assert!(check_m2(&mf, &cfg).unwrap().passed);
    }
}

#[test]
fn kannan_on_polynomial_map() {
    let p = poly_map(3).unwrap();
    let mut pairs = Vec::new();
    for i in 0..=100 {
        for j in 0..=100 {
            pairs.push(vec![i as f64 / 100.0, j as f64 / 100.0]);
        }
    }
    let v = check_mf_contraction(
        &p.space,
        &p.map,
        &MfFunction::kannan(0.4).unwrap(),
        &SampleConfig::explicit(pairs),
    )
    .unwrap();
    assert!(v.passed);
    assert!(
        (v.worst_margin - 0.001_876_543).abs() < 1e-8,
        "{}",
        v.worst_margin
    );
}

#[test]
fn mf_contraction_needs_symmetric_space() {
    let p = poly_map(3).unwrap();
    let mut space = p.space.clone();
    space.symmetric_claim = false;
    let e = check_mf_contraction(
        &space,
        &p.map,
        &MfFunction::banach(0.5).unwrap(),
        &SampleConfig::default(),
    );
    assert!(matches!(e, Err(CsError::Precondition(_))));
}

#[test]
fn mf_parameter_ranges() {
    assert!(MfFunction::kannan(0.5).is_err());
    assert!(MfFunction::bianchini(1.0).is_err());
    assert!(MfFunction::banach(-0.1).is_err());
    assert!(check_m1(
        &MfFunction::banach(0.5).unwrap(),
        1.0,
        &SampleConfig::default()
    )
    .is_err());
}

#[test]
fn swapped_guard_is_selectable() {
    let mf = MfFunction::bianchini(0.9).unwrap();
    let cfg = SampleConfig::default();
    assert!(
        check_m1_with(&mf, 0.9, &cfg, M1Guard::Swapped)
            .unwrap()
            .passed
    );
    assert_eq!(
        check_m1(&mf, 0.9, &cfg).unwrap(),
        check_m1_with(&mf, 0.9, &cfg, M1Guard::Definition).unwrap()
    );
}

#[test]
fn halving_orbit_on_app_metric() {
    let space = make_builtin_space("app_metric", &[]).unwrap();
    let map = SelfMap::builtin("scale", &[0.5], space.domain.clone()).unwrap();
    let run = picard(&space, &map, 1.0, 1e-9, DEFAULT_MAX_ITER).unwrap();
    for (n, d) in run.orbit.step_distances.iter().enumerate() {
        assert_eq!(*d, 0.5f64.powi(n as i32 + 1));
    }
    let v = verify_fixed_point(&space, &map, 0.5, 1e-9).unwrap();
    assert!(!v.passed);
    let ok = verify_fixed_point(&space, &map, 0.0, 1e-9).unwrap();
    assert!(ok.passed);
}

#[test]
fn escaping_map_reports_iteration() {
    let space = make_builtin_space("app_metric", &[]).unwrap();
    let map = SelfMap::new("double", space.domain.clone(), |x| 2.0 * x);
    match picard(&space, &map, 0.3, 1e-12, 100) {
        Err(CsError::Escaped { iteration, point }) => {
            assert_eq!(iteration, 2);
            assert!((point - 1.2).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
}
