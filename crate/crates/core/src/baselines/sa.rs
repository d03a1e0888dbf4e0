use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::objectives::{Objective, SearchBox};
use crate::rng::SeedStream;
use crate::trace::RunOutcome;

use super::{check_iters, project, Recorder};

/// Simulated annealing with Gaussian proposals and geometric cooling.
#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    /// Initial temperature; `None` uses the value range over `probe_count` uniform probes.
    pub initial_temperature: Option<f64>,
    pub probe_count: usize,
    /// Geometric cooling ratio in `(0, 1)`.
    pub cooling: f64,
    /// Proposal standard deviation as a fraction of each half-width.
    pub step_fraction: f64,
    /// Metropolis moves at each temperature level; one level per iteration.
    pub moves_per_temperature: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            initial_temperature: None,
            probe_count: 100,
            cooling: 0.95,
            step_fraction: 0.1,
            moves_per_temperature: 10,
        }
    }
}

/// Metropolis acceptance probability `min(1, exp(-delta / T))`.
pub fn acceptance_probability(delta: f64, temperature: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else if temperature > 0.0 {
        (-delta / temperature).exp()
    } else {
        0.0
    }
}

/// Evaluations: `probe_count + 1 + moves_per_temperature * iters` (no probes when the
/// temperature is given).
pub fn sa_run<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    iters: usize,
    params: &SaParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    check_iters(iters)?;
    if !(params.cooling > 0.0 && params.cooling < 1.0) {
        return Err(Error::InvalidParameter(format!("cooling ratio {} outside (0, 1)", params.cooling)));
    }
    if params.moves_per_temperature == 0 {
        return Err(Error::InvalidParameter("SA needs at least one move per temperature".into()));
    }
    let mut rng = stream.rng();
    let mut rec = Recorder::new(objective, iters);

    let mut temperature = match params.initial_temperature {
        Some(t) => t,
        None => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..params.probe_count {
                let v = rec.eval(&search_box.sample_uniform(&mut rng));
                if v.is_finite() {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            if hi > lo {
                hi - lo
            } else {
                1.0
            }
        }
    };
    let sd: Vec<f64> = search_box.half_widths().iter().map(|h| params.step_fraction * h).collect();
    let mut x = search_box.sample_uniform(&mut rng);
    let mut fx = rec.eval(&x);
    let mut y = x.clone();

    for _ in 0..iters {
        for _ in 0..params.moves_per_temperature {
            for ((yj, xj), s) in y.iter_mut().zip(&x).zip(&sd) {
                *yj = xj + s * rng.sample::<f64, _>(StandardNormal);
            }
            project(search_box, &mut y);
            let fy = rec.eval(&y);
            let u: f64 = rng.random();
            if u < acceptance_probability(fy - fx, temperature) {
                x.copy_from_slice(&y);
                fx = fy;
            }
        }
        temperature *= params.cooling;
        rec.record();
    }
    Ok(rec.finish())
}
