use proptest::prelude::*;
use rand::Rng;
use zopt_core::objectives::SearchBox;
use zopt_core::sampler::*;
use zopt_core::stats::median;
use zopt_core::theory::{coordinatewise_ks, GaussianMixture};
use zopt_core::{Error, SeedStream};

fn gaussian_target(dim: usize, s: f64) -> LogTarget<'static> {
    let bx = SearchBox::cube(dim, -40.0 * s.max(1.0), 40.0 * s.max(1.0)).unwrap();
    LogTarget::new(bx, move |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>() / (2.0 * s * s))
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    num / b.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// 20 `(x, t)` pairs with `x` in `[-2, 2]^2` and `t` in `[0.1, 0.9]`.
fn random_points(seed: u64) -> Vec<(Vec<f64>, f64)> {
    let mut rng = SeedStream::new(seed).rng();
    (0..20)
        .map(|_| {
            let x = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            (x, rng.random_range(0.1..0.9))
        })
        .collect()
}

#[test]
fn monte_carlo_drift_matches_gaussian_closed_form() {
    let target = gaussian_target(2, 1.0);
    let params = SamplerParams::default();
    let mut rng = SeedStream::new(1).rng();
    let particles = Particles::draw(100_000, 2, &mut rng);
    let errs: Vec<f64> = random_points(2)
        .iter()
        .map(|(x, t)| {
            let (mc, _) = drift_mc(x, *t, &particles, &target, &params).unwrap();
            rel_err(&mc, &exact_drift_gaussian(x, *t, 1.0, &params).unwrap())
        })
        .collect();
    assert!(median(&errs) < 0.05, "median relative error {}", median(&errs));
}

#[test]
fn drift_error_shrinks_with_particle_count() {
    let target = gaussian_target(2, 1.0);
    let params = SamplerParams::default();
    let (x, t) = (vec![0.7, -1.1], 0.5);
    let exact = exact_drift_gaussian(&x, t, 1.0, &params).unwrap();
    let medians: Vec<f64> = [100, 1000, 10_000, 100_000]
        .iter()
        .map(|&np| {
            let errs: Vec<f64> = (0..20)
                .map(|seed| {
                    let mut rng = SeedStream::new(seed).split("particles").rng();
                    let p = Particles::draw(np, 2, &mut rng);
                    rel_err(&drift_mc(&x, t, &p, &target, &params).unwrap().0, &exact)
                })
                .collect();
            median(&errs)
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
}

#[test]
fn marginal_density_estimates() {
    let params = SamplerParams::with_gamma(1.5);
    // the estimate is linear in f, so the target must be normalized here
    let bx = SearchBox::cube(2, -40.0, 40.0).unwrap();
    let log_norm = (2.0 * std::f64::consts::PI).ln();
    let target = LogTarget::new(bx, move |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>() / 2.0 - log_norm);
    let mut rng = SeedStream::new(3).rng();
    let p = Particles::draw(100_000, 2, &mut rng);
    // t = 0: the N(0, gamma I) density
    let x = [0.4, -0.3];
    let at0 = marginal_density_mc(&x, 0.0, &p, &target, &params).unwrap();
    let g: f64 = 1.5;
    let exact0 = (-(0.16 + 0.09) / (2.0 * g)).exp() / (2.0 * std::f64::consts::PI * g);
    assert!((at0 / exact0 - 1.0).abs() < 0.05, "{at0} vs {exact0}");
    for t in [0.3, 0.6, 0.85] {
        let est = marginal_density_mc(&x, t, &p, &target, &params).unwrap();
        let exact = exact_marginal_gaussian(&x, t, 1.0, &params).unwrap();
        assert!((est / exact - 1.0).abs() < 0.10, "t={t}: {est} vs {exact}");
    }
}

#[test]
fn shift_invariance_is_exact_for_representable_shifts() {
    let mut rng = SeedStream::new(4).rng();
    let p = Particles::draw(64, 3, &mut rng);
    // eighths in [-8, 8] plus 1024 stay exactly representable
    let lw: Vec<f64> = (0..64).map(|_| f64::from(rng.random_range(-64i32..64)) / 8.0).collect();
    let shifted: Vec<f64> = lw.iter().map(|v| v + 1024.0).collect();
    let sv = schedule_eval(0.4, &SamplerParams::default()).unwrap();
    let (a, _) = drift_from_log_weights(&lw, &p, &sv).unwrap();
    let (b, _) = drift_from_log_weights(&shifted, &p, &sv).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rescaled_target_gives_the_same_drift() {
    let params = SamplerParams::default();
    let plain = gaussian_target(2, 0.8);
    let bx = plain.support().clone();
    let scaled = LogTarget::new(bx, |x: &[f64]| 37.25 - x.iter().map(|v| v * v).sum::<f64>() / (2.0 * 0.64));
    let mut rng = SeedStream::new(5).rng();
    let p = Particles::draw(2000, 2, &mut rng);
    for (x, t) in random_points(6) {
        let a = drift_mc(&x, t, &p, &plain, &params).unwrap().0;
        let b = drift_mc(&x, t, &p, &scaled, &params).unwrap().0;
        assert!(rel_err(&b, &a) < 1e-12);
    }
}

#[test]
fn chain_contracts_onto_a_point_mass() {
    // Gaussian of width 1e-4 at a; the last Euler step lands on the nearest particle
    // and then adds noise of variance eps * dt, so E|X_M - a|^2 = d * eps / M.
    let a = [1.0, -0.5];
    let bx = SearchBox::cube(2, -5.0, 5.0).unwrap();
    let s2 = 1e-8;
    let target = LogTarget::new(bx, move |x: &[f64]| {
        -((x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2)) / (2.0 * s2)
    });
    let params = SamplerParams::default();
    let xs = sample_batch(&target, &params, 400, &SeedStream::new(7)).unwrap();
    let sq: Vec<f64> = xs.iter().map(|x| (x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2)).collect();
    let msd = sq.iter().sum::<f64>() / sq.len() as f64;
    assert!((msd / 0.2 - 1.0).abs() < 0.15, "mean squared distance {msd}");

    // with little Brownian noise the chain ends at the mass
    let quiet = SamplerParams { epsilon: 1e-4, ..params };
    let close = (0..10)
        .filter(|&seed| {
            let x = run_chain(&target, &quiet, &SeedStream::new(100 + seed)).unwrap();
            ((x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2)).sqrt() < 0.05
        })
        .count();
    assert!(close >= 9, "{close}/10");
}

#[test]
fn far_target_with_narrow_start_degenerates() {
    let bx = SearchBox::cube(1, 50.0, 60.0).unwrap();
    let target = LogTarget::new(bx, |_: &[f64]| 0.0);
    let params = SamplerParams::with_gamma(1e-4);
    let err = sample_batch(&target, &params, 3, &SeedStream::new(8)).unwrap_err();
    match &err {
        Error::Chain { index, source } => {
            assert_eq!(*index, 0);
            assert!(matches!(**source, Error::DegenerateWeights { .. }), "{source}");
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn batches_are_deterministic_and_schedule_independent() {
    let target = gaussian_target(3, 0.5);
    let params = SamplerParams { particle_count: 200, ..Default::default() };
    let st = SeedStream::new(9);
    assert!(sample_batch(&target, &params, 0, &st).unwrap().is_empty());
    let a = sample_batch(&target, &params, 3, &st).unwrap();
    assert_eq!(a, sample_batch(&target, &params, 3, &st).unwrap());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| sample_batch(&target, &params, 3, &st).unwrap());
    assert_eq!(a, b);
    // chain i is a function of stream.index(i) alone
    assert_eq!(a[2], run_chain(&target, &params, &st.index(2)).unwrap());
}

#[test]
fn mixture_fidelity_improves_with_particles() {
    let mix = GaussianMixture::default();
    let target = LogTarget::new(mix.support().unwrap(), |x: &[f64]| mix.log_density(x));
    let oracle = mix.draw(5000, &SeedStream::new(10));
    // a single particle often leaves the support; those chains fail and are skipped
    let ks = |np: usize| {
        let params = SamplerParams { particle_count: np, step_count: 20, ..Default::default() };
        let st = SeedStream::new(11);
        let xs: Vec<Vec<f64>> = (0..1000).filter_map(|i| run_chain(&target, &params, &st.index(i)).ok()).collect();
        assert!(xs.len() >= 200, "only {} chains finished", xs.len());
        coordinatewise_ks(&xs, &oracle)
    };
    let (one, many) = (ks(1), ks(2000));
    assert!(many < 0.08, "{many}");
    assert!(one > 3.0 * many, "N_p=1: {one}, N_p=2000: {many}");
}

#[test]
fn lambda_below_theory_range_warns() {
    let p = SamplerParams { lambda: 4.0, ..Default::default() };
    assert_eq!(p.check().unwrap().len(), 1);
    assert!(SamplerParams::default().check().unwrap().is_empty());
    assert!(SamplerParams { epsilon: 2.0, ..Default::default() }.check().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn drift_forms_agree(x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, t in 0.01f64..0.99, s in 0.2f64..3.0, seed in 0u64..1000) {
        let target = gaussian_target(2, s);
        let params = SamplerParams::default();
        let mut rng = SeedStream::new(seed).rng();
        let p = Particles::draw(300, 2, &mut rng);
        let x = [x0, x1];
        let a = drift_mc(&x, t, &p, &target, &params).unwrap().0;
        let b = drift_mc_shifted_form(&x, t, &p, &target, &params).unwrap();
        let scale = a.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn marginal_is_nonnegative_and_ess_in_range(x0 in -5.0f64..5.0, t in 0.0f64..0.99, seed in 0u64..1000) {
        let target = gaussian_target(1, 0.3);
        let params = SamplerParams::default();
        let mut rng = SeedStream::new(seed).rng();
        let p = Particles::draw(100, 1, &mut rng);
        prop_assert!(marginal_density_mc(&[x0], t, &p, &target, &params).unwrap() >= 0.0);
        if t > 0.0 {
            let (_, diag) = drift_mc(&[x0], t, &p, &target, &params).unwrap();
            prop_assert!(diag.effective_sample_size >= 1.0 - 1e-12 && diag.effective_sample_size <= 100.0 + 1e-9);
        }
    }
}
