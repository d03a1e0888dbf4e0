use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::objectives::{Objective, SearchBox};
use crate::rng::SeedStream;
use crate::trace::RunOutcome;

use super::{check_iters, project, Recorder};

/// Stochastic hill climbing: one Gaussian neighbor per iteration, kept only if better.
#[derive(Debug, Clone, PartialEq)]
pub struct ShcParams {
    /// Initial neighborhood standard deviation as a fraction of each half-width.
    pub radius_fraction: f64,
    /// Per-iteration multiplicative decay of the radius.
    pub decay: f64,
}

impl Default for ShcParams {
    fn default() -> Self {
        Self {
            radius_fraction: 0.1,
            decay: 0.99,
        }
    }
}

/// Evaluations: `1 + iters`.
pub fn shc_run<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    iters: usize,
    params: &ShcParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    check_iters(iters)?;
    if params.radius_fraction < 0.0 || !(params.decay > 0.0 && params.decay <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "SHC needs radius >= 0 and decay in (0, 1], got {} and {}",
            params.radius_fraction, params.decay
        )));
    }
    let mut rng = stream.rng();
    let mut rec = Recorder::new(objective, iters);
    let mut sd: Vec<f64> = search_box.half_widths().iter().map(|h| params.radius_fraction * h).collect();
    let mut x = search_box.sample_uniform(&mut rng);
    let mut fx = rec.eval(&x);
    let mut y = x.clone();

    for _ in 0..iters {
        for ((yj, xj), s) in y.iter_mut().zip(&x).zip(&sd) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *yj = xj + s * z;
        }
        project(search_box, &mut y);
        let fy = rec.eval(&y);
        if fy < fx {
            x.copy_from_slice(&y);
            fx = fy;
        }
        sd.iter_mut().for_each(|s| *s *= params.decay);
        rec.record();
    }
    Ok(rec.finish())
}
