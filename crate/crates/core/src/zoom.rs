//! Adaptive-zooming global minimization.
//!
//! Each iteration samples the tilted, rescaled density `exp(-theta U(alpha * x + x_k))`
//! with the SDE sampler, decodes every sample back to the original coordinates and
//! moves the center to the best decoded point when it improves the incumbent. The zoom
//! vector `alpha` then shrinks, either by exponential decay with a random base (EDU) or
//! by the normalized per-coordinate sample variance (SVU).
//!
//! `theta` defaults to `1e100`. It only ever multiplies `U` inside the log-density, so
//! the sampler's softmax over particles turns into an argmax: the drift steers each
//! chain toward its best candidate point. This is the intended large-`theta` limit.

use std::cell::RefCell;
use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::objectives::{Counted, EvalCounter, Objective, SearchBox};
use crate::rng::SeedStream;
use crate::sampler::{self, LogTarget, SamplerParams};
use crate::trace::{IterationRecord, RunOutcome};

/// Lower limit applied to every zoom component. `alpha_min^(k+1)` underflows after a
/// few hundred iterations; the floor keeps `alpha` in `(0, 1]` and the rescaled box
/// finite.
pub const ALPHA_FLOOR: f64 = 1e-150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZoomStrategy {
    /// `alpha_{k+1} = a^(k+1)` with `a ~ U[alpha_min, alpha_max]^d`.
    #[default]
    Edu,
    /// `alpha_{k+1} = alpha_k * v / |v|` with `v` the per-coordinate sample variances.
    Svu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoomParams {
    pub theta: f64,
    pub samples_per_iter: usize,
    pub max_iters: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub strategy: ZoomStrategy,
    /// Draw the EDU base once per run instead of at every iteration.
    pub fixed_edu_base: bool,
    /// Inner sampler settings. `None` uses the defaults with
    /// `gamma = epsilon = (largest box half-width)^2`.
    pub sampler: Option<SamplerParams>,
    /// Starting center; `None` means the origin.
    pub initial_center: Option<Vec<f64>>,
}

impl Default for ZoomParams {
    fn default() -> Self {
        Self {
            theta: 1e100,
            samples_per_iter: 10,
            max_iters: 200,
            alpha_min: 0.1,
            alpha_max: 1.0,
            strategy: ZoomStrategy::Edu,
            fixed_edu_base: false,
            sampler: None,
            initial_center: None,
        }
    }
}

impl ZoomParams {
    pub fn check(&self, dim: usize) -> Result<()> {
        if !(self.theta > 0.0) {
            return Err(Error::InvalidParameter(format!("theta = {} must be positive", self.theta)));
        }
        if self.samples_per_iter == 0 {
            return Err(Error::InvalidParameter("samples_per_iter must be positive".into()));
        }
        if !(0.0 < self.alpha_min && self.alpha_min <= self.alpha_max && self.alpha_max <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < alpha_min ({}) <= alpha_max ({}) <= 1",
                self.alpha_min, self.alpha_max
            )));
        }
        if let Some(c) = &self.initial_center {
            if c.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "initial center has {} coordinates, objective has {dim}",
                    c.len()
                )));
            }
        }
        Ok(())
    }

    /// Sampler settings actually used on `search_box`.
    pub fn sampler_for(&self, search_box: &SearchBox) -> SamplerParams {
        self.sampler
            .clone()
            .unwrap_or_else(|| SamplerParams::with_gamma(search_box.max_half_width().powi(2)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoomState {
    pub center: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `+inf` until a sample has been accepted.
    pub incumbent_value: f64,
    pub incumbent_point: Option<Vec<f64>>,
    pub iteration: usize,
    /// Objective evaluations so far, including those made inside the sampler.
    pub fevals: u64,
    pub elapsed_ms: f64,
    /// Iterations skipped because every importance weight vanished.
    pub degenerate_iterations: usize,
    edu_base: Option<Vec<f64>>,
}

impl ZoomState {
    pub fn initial(center: Vec<f64>) -> Self {
        let d = center.len();
        Self {
            center,
            alpha: vec![1.0; d],
            incumbent_value: f64::INFINITY,
            incumbent_point: None,
            iteration: 0,
            fevals: 0,
            elapsed_ms: 0.0,
            degenerate_iterations: 0,
            edu_base: None,
        }
    }
}

thread_local! {
    static DECODE: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

/// `alpha * x + center`, componentwise.
pub fn decode(alpha: &[f64], center: &[f64], x: &[f64]) -> Vec<f64> {
    alpha.iter().zip(center).zip(x).map(|((a, c), v)| a * v + c).collect()
}

/// Log-density `-theta U(alpha * x + center)`, `-inf` when the decoded point leaves the box.
pub fn scaled_log_target<'a, O: Objective + ?Sized>(
    objective: &'a O,
    theta: f64,
    alpha: &[f64],
    center: &[f64],
    search_box: &SearchBox,
) -> Result<LogTarget<'a>> {
    let lower = search_box
        .lower()
        .iter()
        .zip(center)
        .zip(alpha)
        .map(|((l, c), a)| (l - c) / a)
        .collect();
    let upper = search_box
        .upper()
        .iter()
        .zip(center)
        .zip(alpha)
        .map(|((u, c), a)| (u - c) / a)
        .collect();
    let support = SearchBox::new(lower, upper)?;
    let (alpha, center) = (alpha.to_vec(), center.to_vec());
    // The support check on the rescaled box stands in for the box check on the
    // decoded point; the two can differ only by rounding at the boundary.
    Ok(LogTarget::new(support, move |x| {
        DECODE.with(|buf| {
            let mut z = buf.borrow_mut();
            z.clear();
            z.extend(alpha.iter().zip(&center).zip(x).map(|((a, c), v)| a * v + c));
            let u = objective.value(&z);
            if u.is_nan() {
                f64::NEG_INFINITY
            } else {
                -theta * u
            }
        })
    }))
}

/// Fresh EDU base `a ~ U[alpha_min, alpha_max]^d`.
pub fn edu_base<R: Rng + ?Sized>(dim: usize, alpha_min: f64, alpha_max: f64, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(alpha_min..=alpha_max)).collect()
}

/// `a^(k+1)` componentwise, floored at [`ALPHA_FLOOR`].
pub fn edu_from_base(base: &[f64], k: usize) -> Vec<f64> {
    let e = (k + 1).min(i32::MAX as usize) as i32;
    base.iter().map(|a| a.powi(e).max(ALPHA_FLOOR)).collect()
}

/// EDU update at iteration `k` with a freshly drawn base.
pub fn edu_update<R: Rng + ?Sized>(k: usize, dim: usize, alpha_min: f64, alpha_max: f64, rng: &mut R) -> Vec<f64> {
    edu_from_base(&edu_base(dim, alpha_min, alpha_max, rng), k)
}

/// SVU update: `alpha * v / |v|` with `v` the per-coordinate variances of `samples`.
/// A zero variance vector leaves `alpha` unchanged.
pub fn svu_update(alpha: &[f64], samples: &[Vec<f64>]) -> Vec<f64> {
    assert!(!samples.is_empty(), "SVU needs at least one sample");
    let n = samples.len() as f64;
    let var: Vec<f64> = (0..alpha.len())
        .map(|i| {
            let m = samples.iter().map(|s| s[i]).sum::<f64>() / n;
            samples.iter().map(|s| (s[i] - m).powi(2)).sum::<f64>() / n
        })
        .collect();
    let norm = var.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return alpha.to_vec();
    }
    alpha
        .iter()
        .zip(&var)
        .map(|(a, v)| (a * v / norm).clamp(ALPHA_FLOOR, 1.0))
        .collect()
}

/// One iteration. Randomness comes from `stream` only, so iteration `k` of a run
/// should be given `run_stream.index(k)`.
pub fn zoom_step<O: Objective + ?Sized>(
    state: &ZoomState,
    objective: &O,
    search_box: &SearchBox,
    params: &ZoomParams,
    stream: &SeedStream,
) -> Result<(ZoomState, IterationRecord)> {
    let started = Instant::now();
    let counter = EvalCounter::new();
    let counted = Counted::new(objective, &counter);
    let sampler_params = params.sampler_for(search_box);
    let mut next = state.clone();
    let k = state.iteration;

    let target = scaled_log_target(&counted, params.theta, &state.alpha, &state.center, search_box)?;
    let samples = match sampler::batch(&target, &sampler_params, params.samples_per_iter, &stream.split("samples")) {
        Ok(s) => Some(s),
        Err(e) if matches!(e.root(), Error::DegenerateWeights { .. }) => {
            log::debug!("iteration {k}: {e}");
            next.degenerate_iterations += 1;
            None
        }
        Err(e) => return Err(e),
    };

    if let Some(samples) = &samples {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for y in samples {
            let z = decode(&state.alpha, &state.center, y);
            let u = if search_box.contains(&z) {
                counted.value(&z)
            } else {
                f64::INFINITY
            };
            let u = if u.is_nan() { f64::INFINITY } else { u };
            if best.as_ref().is_none_or(|(b, _)| u < *b) {
                best = Some((u, z));
            }
        }
        if let Some((u, z)) = best {
            if u < state.incumbent_value {
                next.incumbent_value = u;
                next.center = z.clone();
                next.incumbent_point = Some(z);
            }
        }
    }

    let d = state.alpha.len();
    next.alpha = match params.strategy {
        ZoomStrategy::Edu => {
            let mut rng = stream.split("alpha").rng();
            if params.fixed_edu_base {
                let base = next
                    .edu_base
                    .get_or_insert_with(|| edu_base(d, params.alpha_min, params.alpha_max, &mut rng));
                edu_from_base(base, k)
            } else {
                edu_update(k, d, params.alpha_min, params.alpha_max, &mut rng)
            }
        }
        ZoomStrategy::Svu => match &samples {
            Some(s) => svu_update(&state.alpha, s),
            None => state.alpha.clone(),
        },
    };

    next.iteration = k + 1;
    next.fevals += counter.get();
    next.elapsed_ms += started.elapsed().as_secs_f64() * 1e3;
    let record = IterationRecord {
        iteration: k,
        best_value: next.incumbent_value,
        fevals: next.fevals,
        elapsed_ms: next.elapsed_ms,
    };
    Ok((next, record))
}

/// Runs `max_iters` iterations from `initial_center` with `alpha_0 = 1`.
///
/// The trace has one record per iteration. The returned point is the incumbent, or the
/// initial center (with its objective value) if no sample was ever accepted.
pub fn optimize<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    params: &ZoomParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    let d = search_box.dim();
    params.check(d)?;
    for w in params.sampler_for(search_box).check()? {
        log::warn!("{w}");
    }
    let center = params.initial_center.clone().unwrap_or_else(|| vec![0.0; d]);
    let mut state = ZoomState::initial(center);
    let mut trace = Vec::with_capacity(params.max_iters);
    for k in 0..params.max_iters {
        let (next, record) = zoom_step(&state, objective, search_box, params, &stream.index(k as u64))?;
        state = next;
        trace.push(record);
    }
    let (best_point, best_value, extra) = match state.incumbent_point {
        Some(p) => (p, state.incumbent_value, 0),
        None => {
            let v = objective.value(&state.center);
            (state.center, v, 1)
        }
    };
    Ok(RunOutcome {
        best_point,
        best_value,
        trace,
        fevals: state.fevals + extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn scaled_target_hand_values() {
        let bx = SearchBox::cube(1, -10.0, 10.0).unwrap();
        let u = |x: &[f64]| x[0] * x[0];
        let t = scaled_log_target(&u, 2.0, &[0.5], &[1.0], &bx).unwrap();
        assert_eq!(t.log_density(&[2.0]), -8.0);
        let t = scaled_log_target(&u, 3.0, &[1.0], &[0.0], &bx).unwrap();
        assert_eq!(t.log_density(&[1.5]), -6.75);
        // decodes to 0.5 * 25 + 1 = 13.5, outside the box
        let t = scaled_log_target(&u, 2.0, &[0.5], &[1.0], &bx).unwrap();
        assert_eq!(t.log_density(&[25.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn edu_values() {
        assert_eq!(edu_from_base(&[0.5, 0.5], 0), vec![0.5, 0.5]);
        assert_eq!(edu_from_base(&[0.5], 3), vec![0.0625]);
        assert_eq!(edu_from_base(&[1.0], 400), vec![1.0]);
        assert_eq!(edu_from_base(&[0.1], 400), vec![ALPHA_FLOOR]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for k in 0..50 {
            let a = edu_update(k, 5, 0.1, 1.0, &mut rng);
            assert!(a.iter().all(|v| *v > 0.0 && *v <= 1.0));
        }
    }

    #[test]
    fn svu_values() {
        let samples = vec![vec![0.0, 0.0, 0.0, 0.0], vec![2.0, 2.0, 2.0, 2.0]];
        assert_eq!(svu_update(&[1.0, 0.5, 0.25, 1.0], &samples), vec![0.5, 0.25, 0.125, 0.5]);
        let one_d = vec![vec![1.0], vec![4.0], vec![-2.0]];
        assert_eq!(svu_update(&[0.3], &one_d), vec![0.3]);
        let same = vec![vec![1.0, 2.0]; 3];
        assert_eq!(svu_update(&[0.3, 0.7], &same), vec![0.3, 0.7]);
    }

    #[test]
    fn zero_budget_returns_start() {
        let bx = SearchBox::cube(2, -5.0, 5.0).unwrap();
        let u = |x: &[f64]| (x[0] - 1.0).powi(2) + x[1].powi(2);
        let p = ZoomParams {
            max_iters: 0,
            initial_center: Some(vec![2.0, 1.0]),
            ..Default::default()
        };
        let out = optimize(&u, &bx, &p, &SeedStream::new(0)).unwrap();
        assert_eq!(out.best_point, vec![2.0, 1.0]);
        assert_eq!(out.best_value, 2.0);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn invalid_params_rejected() {
        let bx = SearchBox::cube(1, -1.0, 1.0).unwrap();
        let u = |x: &[f64]| x[0];
        let bad = ZoomParams { alpha_min: 0.0, ..Default::default() };
        assert!(optimize(&u, &bx, &bad, &SeedStream::new(0)).is_err());
        let bad = ZoomParams { alpha_max: 1.5, ..Default::default() };
        assert!(optimize(&u, &bx, &bad, &SeedStream::new(0)).is_err());
        let bad = ZoomParams { initial_center: Some(vec![0.0, 0.0]), ..Default::default() };
        assert!(optimize(&u, &bx, &bad, &SeedStream::new(0)).is_err());
    }

    #[test]
    fn rejection_keeps_center_but_updates_alpha() {
        let bx = SearchBox::cube(1, -10.0, 10.0).unwrap();
        let u = |x: &[f64]| (x[0] - 3.0).powi(2);
        let p = ZoomParams {
            sampler: Some(SamplerParams { particle_count: 100, ..SamplerParams::default() }),
            ..Default::default()
        };
        let mut state = ZoomState::initial(vec![0.0]);
        state.incumbent_value = -1.0;
        state.incumbent_point = Some(vec![0.0]);
        let (next, rec) = zoom_step(&state, &u, &bx, &p, &SeedStream::new(2)).unwrap();
        assert_eq!(next.center, state.center);
        assert_eq!(next.incumbent_value, -1.0);
        assert_eq!(rec.best_value, -1.0);
        assert_ne!(next.alpha, state.alpha);
        assert_eq!(next.iteration, 1);
        assert!(next.fevals > 0);
    }

    #[test]
    fn first_step_accepts() {
        let bx = SearchBox::cube(1, -10.0, 10.0).unwrap();
        let u = |x: &[f64]| (x[0] - 3.0).powi(2);
        let p = ZoomParams::default();
        let state = ZoomState::initial(vec![0.0]);
        let (next, _) = zoom_step(&state, &u, &bx, &p, &SeedStream::new(2)).unwrap();
        let z = next.incumbent_point.clone().unwrap();
        assert_eq!(next.incumbent_value, u(&z));
        assert_eq!(next.center, z);
    }
}
