use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use zopt_core::objectives::{registry, Counted, EvalCounter, FunctionKind, SearchBox};
use zopt_core::sampler::{sample_batch, SamplerParams};
use zopt_core::stats::ks_two_sample;
use zopt_core::trace::is_non_increasing;
use zopt_core::zoom::*;
use zopt_core::SeedStream;

fn shifted_parabola(x: &[f64]) -> f64 {
    (x[0] - 3.0).powi(2)
}

#[test]
fn one_dimensional_parabola() {
    let bx = SearchBox::cube(1, -10.0, 10.0).unwrap();
    let params = ZoomParams { max_iters: 50, ..Default::default() };
    let hits = (0..10)
        .filter(|&seed| {
            let out = optimize(&shifted_parabola, &bx, &params, &SeedStream::new(seed)).unwrap();
            assert!(is_non_increasing(&out.trace));
            (out.best_point[0] - 3.0).abs() < 0.1
        })
        .count();
    assert!(hits >= 9, "{hits}/10");
}

/// Sampler settings for the pushforward check: the decoded law has standard deviation
/// 0.1, i.e. 1/3 in sampler coordinates, so the Brownian part must stay small.
fn pushforward_sampler() -> SamplerParams {
    SamplerParams { step_count: 50, ..SamplerParams::with_gamma(1.0) }
}

#[test]
fn pushforward_matches_gibbs_law() {
    let u = |x: &[f64]| x[0] * x[0];
    let bx = SearchBox::cube(1, -5.0, 5.0).unwrap();
    let (theta, alpha, x0) = (50.0, 0.3, 1.0);
    let target = scaled_log_target(&u, theta, &[alpha], &[x0], &bx).unwrap();
    let xs = sample_batch(&target, &pushforward_sampler(), 5000, &SeedStream::new(1)).unwrap();
    let decoded: Vec<f64> = xs.iter().map(|x| alpha * x[0] + x0).collect();
    // exp(-50 x^2) is N(0, 1/100)
    let mut rng = SeedStream::new(2).rng();
    let exact: Vec<f64> = (0..5000).map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal)).collect();
    let ks = ks_two_sample(&decoded, &exact);
    assert!(ks < 0.05, "KS {ks}");
}

#[test]
fn zero_budget_returns_the_start() {
    let bx = SearchBox::cube(2, -10.0, 10.0).unwrap();
    let params = ZoomParams { max_iters: 0, initial_center: Some(vec![1.0, 2.0]), ..Default::default() };
    let f = |x: &[f64]| x[0] * x[0] + x[1];
    let out = optimize(&f, &bx, &params, &SeedStream::new(0)).unwrap();
    assert_eq!(out.best_point, vec![1.0, 2.0]);
    assert_eq!(out.best_value, 3.0);
    assert!(out.trace.is_empty());
    assert_eq!(out.fevals, 1);
}

#[test]
fn runs_are_deterministic() {
    let s = registry("ackley", 5).unwrap();
    let params = ZoomParams { max_iters: 30, ..Default::default() };
    let st = SeedStream::new(3);
    let a = optimize(&s, &s.search_box, &params, &st).unwrap();
    let b = optimize(&s, &s.search_box, &params, &st).unwrap();
    assert_eq!(a.best_point, b.best_point);
    let strip = |o: &zopt_core::trace::RunOutcome| o.trace.iter().map(|r| (r.best_value, r.fevals)).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn scale_and_temperature_commute() {
    for name in ["sphere", "rastrigin", "griewank"] {
        let s = registry(name, 4).unwrap();
        let st = SeedStream::new(4);
        let base = ZoomParams { max_iters: 40, ..Default::default() };
        let reference = optimize(&s, &s.search_box, &base, &st).unwrap();
        for c in [1e-3, 1e3] {
            let scaled = move |x: &[f64]| c * s.kind.eval(x);
            let p = ZoomParams { theta: base.theta / c, ..base.clone() };
            let out = optimize(&scaled, &s.search_box, &p, &st).unwrap();
            assert_eq!(out.best_point, reference.best_point, "{name}, c = {c}");
            for (a, b) in out.trace.iter().zip(&reference.trace) {
                let (x, y) = (a.best_value / c, b.best_value);
                assert!(x == y || (x - y).abs() <= 1e-12 * y.abs(), "{name}: {x} vs {y}");
                assert_eq!(a.fevals, b.fevals);
            }
        }
    }
}

#[test]
fn incumbents_are_consistent_under_both_strategies() {
    for strategy in [ZoomStrategy::Edu, ZoomStrategy::Svu] {
        for kind in FunctionKind::ALL {
            let s = registry(kind.name(), 3).unwrap();
            let params = ZoomParams { strategy, samples_per_iter: 5, ..Default::default() };
            let mut state = ZoomState::initial(vec![0.0; 3]);
            let st = SeedStream::new(5);
            let mut last = f64::INFINITY;
            for k in 0..25 {
                let counter = EvalCounter::new();
                let counted = Counted::new(&s, &counter);
                let (next, rec) = zoom_step(&state, &counted, &s.search_box, &params, &st.index(k)).unwrap();
                assert_eq!(next.fevals - state.fevals, counter.get());
                assert_eq!(rec.fevals, next.fevals);
                assert!(rec.best_value <= last);
                last = rec.best_value;
                assert!(next.alpha.iter().all(|a| *a > 0.0 && *a <= 1.0), "{:?}", next.alpha);
                if let Some(p) = &next.incumbent_point {
                    assert!(s.search_box.contains(p));
                    assert_eq!(s.kind.eval(p), next.incumbent_value);
                    assert_eq!(&next.center, p);
                } else {
                    assert_eq!(next.center, state.center);
                }
                state = next;
            }
        }
    }
}

#[test]
fn degenerate_iterations_are_skipped() {
    // the box lies far from the origin and the sampler starts with a tiny spread
    let bx = SearchBox::cube(1, 50.0, 60.0).unwrap();
    let params = ZoomParams { sampler: Some(SamplerParams::with_gamma(1e-4)), ..Default::default() };
    let f = |x: &[f64]| x[0];
    let state = ZoomState::initial(vec![0.0]);
    let (next, rec) = zoom_step(&state, &f, &bx, &params, &SeedStream::new(6)).unwrap();
    assert_eq!(next.degenerate_iterations, 1);
    assert_eq!(next.center, vec![0.0]);
    assert_eq!(rec.best_value, f64::INFINITY);
    assert_eq!(next.iteration, 1);
}

#[test]
fn rejected_iterations_keep_center_but_update_alpha() {
    let bx = SearchBox::cube(2, -10.0, 10.0).unwrap();
    let f = |x: &[f64]| x[0] * x[0] + x[1] * x[1];
    let mut state = ZoomState::initial(vec![0.5, 0.5]);
    // an incumbent no sample can beat
    state.incumbent_value = -1.0;
    state.incumbent_point = Some(vec![0.5, 0.5]);
    let params = ZoomParams::default();
    let (next, _) = zoom_step(&state, &f, &bx, &params, &SeedStream::new(7)).unwrap();
    assert_eq!(next.center, state.center);
    assert_eq!(next.incumbent_value, -1.0);
    assert_ne!(next.alpha, state.alpha);
}

#[test]
fn parameter_validation() {
    let bx = SearchBox::cube(2, -1.0, 1.0).unwrap();
    let f = |x: &[f64]| x[0];
    let bad = [
        ZoomParams { theta: 0.0, ..Default::default() },
        ZoomParams { samples_per_iter: 0, ..Default::default() },
        ZoomParams { alpha_min: 0.5, alpha_max: 0.4, ..Default::default() },
        ZoomParams { initial_center: Some(vec![0.0]), ..Default::default() },
    ];
    for p in bad {
        assert!(optimize(&f, &bx, &p, &SeedStream::new(0)).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edu_stays_in_unit_interval(k in 0usize..2000, lo in 0.01f64..1.0, seed in 0u64..1000) {
        let mut rng = SeedStream::new(seed).rng();
        let a = edu_update(k, 4, lo, 1.0, &mut rng);
        prop_assert!(a.iter().all(|v| *v >= ALPHA_FLOOR && *v <= 1.0));
    }

    #[test]
    fn svu_stays_in_unit_interval(
        alpha in prop::collection::vec(1e-100f64..1.0, 3),
        samples in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..12),
    ) {
        let a = svu_update(&alpha, &samples);
        prop_assert!(a.iter().all(|v| *v > 0.0 && *v <= 1.0));
        prop_assert!(a.iter().zip(&alpha).all(|(n, o)| n <= o || *n == ALPHA_FLOOR));
    }
}
