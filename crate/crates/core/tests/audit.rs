use csmetric::audit::{
    check_alpha_subhomogeneity, check_alpha_zero, check_classic_triangle, check_composed_triangle,
    check_identity_axiom, check_series_vanishing, series_tail, series_tail_with, tolerance,
    DEFAULT_K_SET,
};
use csmetric::{
    make_builtin_space, AlphaFunction, ComposedSpace, SampleConfig, Strategy, TailVariant, Verdict,
};
use proptest::prelude::*;

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop_oneof![
        Just(Strategy::UniformRandom),
        Just(Strategy::StratifiedGrid),
        Just(Strategy::GridPlusRandom)
    ]
}

fn alpha(id: &str) -> AlphaFunction {
    AlphaFunction::builtin(id, &[]).unwrap()
}

/// squared_diff with α = identity fails the triangle somewhere on [1, 100].
fn failing_space() -> ComposedSpace {
    make_builtin_space("squared_diff", &[])
        .unwrap()
        .with_alpha(alpha("identity"))
}

fn replay_triangle(space: &ComposedSpace, v: &Verdict, composed: bool) -> f64 {
    let t = v.witness.as_ref().unwrap();
    let wrap = |d: f64| {
        if composed {
            space.eval_alpha(d).unwrap()
        } else {
            d
        }
    };
    let lhs = space.eval_metric(t[0], t[1], t[2]).unwrap();
    let rhs = wrap(space.eval_metric(t[0], t[0], t[3]).unwrap())
        + wrap(space.eval_metric(t[1], t[1], t[3]).unwrap())
        + wrap(space.eval_metric(t[2], t[2], t[3]).unwrap());
    assert!(rhs - lhs < -tolerance(rhs));
    rhs - lhs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identical_configs_give_identical_verdicts(seed in any::<u64>(), count in 1..400usize, s in strategy()) {
        let cfg = SampleConfig::new(seed, count, s);
        let space = failing_space();
        prop_assert_eq!(check_composed_triangle(&space, &cfg).unwrap(), check_composed_triangle(&space, &cfg).unwrap());
        prop_assert_eq!(check_identity_axiom(&space, &cfg).unwrap(), check_identity_axiom(&space, &cfg).unwrap());
    }

    #[test]
    fn witnesses_replay(seed in any::<u64>(), count in 50..400usize, s in strategy()) {
        let cfg = SampleConfig::new(seed, count, s);
        let space = failing_space();
        for composed in [true, false] {
            let v = if composed { check_composed_triangle(&space, &cfg) } else { check_classic_triangle(&space, &cfg) }.unwrap();
            if !v.passed {
                let margin = replay_triangle(&space, &v, composed);
                prop_assert!((margin - v.worst_margin).abs() <= 1e-12 * (1.0 + margin.abs()));
            }
        }
    }

    #[test]
    fn doubling_the_count_extends_the_sample(seed in any::<u64>(), n in 1..300usize, s in strategy(), arity in 1..=4usize) {
        let space = make_builtin_space("abs_sum", &[]).unwrap();
        let small: Vec<_> = SampleConfig::new(seed, n, s).tuples(&space.domain, arity).unwrap().collect();
        let large: Vec<_> = SampleConfig::new(seed, 2 * n, s).tuples(&space.domain, arity).unwrap().collect();
        prop_assert_eq!(&large[..small.len()], &small[..]);
    }

    #[test]
    fn identity_tail_closed_form(r in 0.001..0.45f64, c0 in 0.0..10.0f64, n in 0..60usize, gap in 2..30usize) {
        let m = n + gap;
        let got = series_tail(&alpha("identity"), r, c0, n, m).unwrap();
        let mut want = 2f64.powi(gap as i32 - 2) * r.powi(m as i32) * c0;
        if gap >= 5 {
            want += 4.0 * c0 * r.powi(n as i32 + 3) * (1.0 - (2.0 * r).powi(gap as i32 - 4)) / (1.0 - 2.0 * r);
        }
        prop_assert!((got - want).abs() <= 1e-12 * want.abs() + f64::MIN_POSITIVE, "{} vs {}", got, want);
    }
}

#[test]
fn alpha_conditions() {
    let cfg = SampleConfig::default();
    assert!(check_alpha_zero(&alpha("two_sqrt")).unwrap().passed);
    assert!(check_alpha_zero(&alpha("identity")).unwrap().passed);
    let v = check_alpha_zero(&alpha("exp")).unwrap();
    assert!(!v.passed);
    assert_eq!(v.witness, Some(vec![0.0, 1.0]));
    assert!(
        check_alpha_subhomogeneity(&alpha("two_sqrt"), &cfg, &DEFAULT_K_SET)
            .unwrap()
            .passed
    );
    assert!(
        check_alpha_subhomogeneity(&alpha("identity"), &cfg, &DEFAULT_K_SET)
            .unwrap()
            .passed
    );
    let e = check_alpha_subhomogeneity(&alpha("exp"), &cfg, &DEFAULT_K_SET).unwrap();
    assert!(!e.passed);
    // 2√t fails for k < 1: α(0.01·1) = 0.2 > 0.01·α(1) = 0.02
    let v = check_alpha_subhomogeneity(
        &alpha("two_sqrt"),
        &SampleConfig::explicit(vec![vec![1.0, 0.0]]),
        &[0.01],
    )
    .unwrap();
    assert!(!v.passed);
    assert_eq!(v.witness, Some(vec![0.01, 1.0, 0.0]));
    assert!((v.worst_margin - (0.02 - 0.2)).abs() < 1e-15);
}

#[test]
fn pinned_tail_value() {
    let got = series_tail(&alpha("two_sqrt"), 1.0 / 81.0, 2.0, 10, 14).unwrap();
    let want = 0.006_708_763_004_698_098;
    assert!((got - want).abs() <= 1e-12 * want, "{got}");
    let proof = series_tail_with(
        &alpha("two_sqrt"),
        1.0 / 81.0,
        2.0,
        10,
        14,
        TailVariant::ProofChain,
    )
    .unwrap();
    assert!(proof != got && proof > 0.0);
}

#[test]
fn series_values_match_reference() {
    let report = check_series_vanishing(
        &alpha("two_sqrt"),
        1.0 / 81.0,
        2.0,
        &[5, 8],
        &[5, 10, 20, 40, 80],
        1e-6,
    )
    .unwrap();
    let gap5 = [3.66817, 0.92907, 0.0595999, 0.000245267, 4.15362e-9];
    let gap8 = [292.881, 238.364, 162.072, 78.1988, 19.2426];
    let got: Vec<f64> = report.values.iter().map(|v| v.value).collect();
    for (g, w) in got.iter().zip(gap5.iter().chain(&gap8)) {
        assert!((g - w).abs() <= 1e-5 * w, "{g} vs {w}");
    }
    // gap 8 is still far from zero at n = 80
    assert!(!report.verdict.passed);
    assert_eq!(report.verdict.witness.as_ref().unwrap()[..2], [8.0, 80.0]);
}

#[test]
fn discrete_nat_classic_violations() {
    let space = make_builtin_space("discrete_nat", &[5.0]).unwrap();
    let all = SampleConfig::new(0, 6usize.pow(4), Strategy::StratifiedGrid);
    let mut violations = 0;
    for t in all.tuples(&space.domain, 4).unwrap() {
        let v = check_classic_triangle(&space, &SampleConfig::explicit(vec![t])).unwrap();
        violations += usize::from(!v.passed);
    }
    assert_eq!(violations, 534);
    let pinned = check_classic_triangle(
        &space,
        &SampleConfig::explicit(vec![vec![1.0, 2.0, 3.0, 1.0]]),
    )
    .unwrap();
    assert_eq!(pinned.worst_margin, -5.0);
    let first = check_classic_triangle(
        &space,
        &SampleConfig::explicit(vec![vec![0.0, 1.0, 2.0, 0.0]]),
    )
    .unwrap();
    assert!(!first.passed);
}

#[test]
fn broken_identity_fixture() {
    use csmetric::{PointDomain, TripleMetric};
    let broken = ComposedSpace::new(
        PointDomain::interval(0.0, 10.0).unwrap(),
        TripleMetric::new("first_gap", |q, h, _| (q - h).abs()),
        alpha("identity"),
        false,
    )
    .unwrap();
    let v = check_identity_axiom(
        &broken,
        &SampleConfig::default().with_pinned(vec![1.0, 1.0, 5.0]),
    )
    .unwrap();
    assert!(!v.passed);
    let w = v.witness.unwrap();
    assert_eq!(broken.eval_metric(w[0], w[1], w[2]).unwrap(), 0.0);
}
