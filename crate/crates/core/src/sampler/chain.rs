use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::SeedStream;

use super::drift::{DriftWorkspace, Particles};
use super::schedule::schedule_eval;
use super::{LogTarget, SamplerParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub position: Vec<f64>,
    pub step_index: usize,
}

/// One Euler-Maruyama step `X + b dt + sqrt(eps beta'_t dt) zeta`.
pub fn euler_step(
    state: &ChainState,
    t: f64,
    dt: f64,
    drift: &[f64],
    params: &SamplerParams,
    noise: &[f64],
) -> Result<ChainState> {
    let mut next = state.clone();
    advance(&mut next, t, dt, drift, params, noise)?;
    Ok(next)
}

fn advance(
    state: &mut ChainState,
    t: f64,
    dt: f64,
    drift: &[f64],
    params: &SamplerParams,
    noise: &[f64],
) -> Result<()> {
    let diffusion = (params.epsilon * params.schedule.dbeta(t) * dt).sqrt();
    for ((x, b), z) in state.position.iter_mut().zip(drift).zip(noise) {
        *x += b * dt + diffusion * z;
    }
    state.step_index += 1;
    if let Some(i) = state.position.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            step: state.step_index - 1,
            t,
            detail: format!(
                "coordinate {i} became {} (drift {}, noise {})",
                state.position[i], drift[i], noise[i]
            ),
        });
    }
    Ok(())
}

/// Runs one chain from `X_0 ~ N(0, gamma I)` and returns `X_M`.
///
/// Randomness is consumed in a fixed order: `X_0`, the particle set, then one noise
/// vector per step (preceded by a fresh particle set when `redraw_particles` is on).
pub fn run_chain(target: &LogTarget<'_>, params: &SamplerParams, stream: &SeedStream) -> Result<Vec<f64>> {
    params.check()?;
    let d = target.dim();
    let m = params.step_count;
    let dt = 1.0 / m as f64;
    let mut rng = stream.rng();
    let sd = params.gamma.sqrt();
    let mut state = ChainState {
        position: (0..d).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect(),
        step_index: 0,
    };
    let mut particles = Particles::draw(params.particle_count, d, &mut rng);
    let mut ws = DriftWorkspace::default();
    let mut drift = vec![0.0; d];
    let mut noise = vec![0.0; d];
    for k in 0..m {
        let t = k as f64 * dt;
        if params.redraw_particles && k > 0 {
            particles.redraw(&mut rng);
        }
        let sv = schedule_eval(t, params)?;
        ws.drift_into(&state.position, &sv, &particles, target, &mut drift)
            .map_err(|e| match e {
                Error::DegenerateWeights { t, particles, .. } => Error::DegenerateWeights { step: k, t, particles },
                other => other,
            })?;
        for z in &mut noise {
            *z = rng.sample(StandardNormal);
        }
        advance(&mut state, t, dt, &drift, params, &noise)?;
    }
    Ok(state.position)
}

/// `count` independent chains on streams `stream.index(0..count)`, in index order.
///
/// Chains may run on the rayon pool; the result does not depend on scheduling. On
/// failure the error of the lowest-indexed failing chain is returned.
pub fn sample_batch(
    target: &LogTarget<'_>,
    params: &SamplerParams,
    count: usize,
    stream: &SeedStream,
) -> Result<Vec<Vec<f64>>> {
    for w in params.check()? {
        log::warn!("{w}");
    }
    batch(target, params, count, stream)
}

/// [`sample_batch`] without the parameter warnings, for callers that already issued them.
pub(crate) fn batch(
    target: &LogTarget<'_>,
    params: &SamplerParams,
    count: usize,
    stream: &SeedStream,
) -> Result<Vec<Vec<f64>>> {
    let results: Vec<Result<Vec<f64>>> = (0..count)
        .into_par_iter()
        .map(|i| run_chain(target, params, &stream.index(i as u64)))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Chain {
                index: i,
                source: Box::new(e),
            })
        })
        .collect()
}
