use crate::error::{Error, Result};
use crate::objectives::{Objective, SearchBox};
use crate::rng::SeedStream;
use crate::trace::RunOutcome;

use super::{check_iters, project, GradientOracle, Recorder};

#[derive(Debug, Clone, PartialEq)]
pub struct AdamParams {
    /// Step size; `None` uses `0.01` times each coordinate's half-width.
    pub learning_rate: Option<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub gradient: GradientOracle,
    /// Start point; `None` draws one uniformly in the box.
    pub start: Option<Vec<f64>>,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            learning_rate: None,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            gradient: GradientOracle::default(),
            start: None,
        }
    }
}

/// Bias-corrected Adam with projection onto the box after every step.
///
/// Evaluations: `1 + iters * (1 + g)` where `g` is `0` with a registered gradient and
/// `2d` with central differences.
pub fn adam_run<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    iters: usize,
    params: &AdamParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    check_iters(iters)?;
    if params.learning_rate.is_some_and(|lr| !(lr > 0.0)) {
        return Err(Error::InvalidParameter("Adam learning rate must be positive".into()));
    }
    let mut rng = stream.rng();
    let mut rec = Recorder::new(objective, iters);
    let lr: Vec<f64> = match params.learning_rate {
        Some(lr) => vec![lr; search_box.dim()],
        None => search_box.half_widths().iter().map(|h| 0.01 * h).collect(),
    };
    let mut x = match &params.start {
        Some(s) => {
            let mut s = s.clone();
            project(search_box, &mut s);
            s
        }
        None => search_box.sample_uniform(&mut rng),
    };
    rec.eval(&x);
    let mut m = vec![0.0; x.len()];
    let mut v = vec![0.0; x.len()];

    for k in 1..=iters {
        let g = params.gradient.gradient(&rec.aux(), &x);
        let c1 = 1.0 - params.beta1.powi(k as i32);
        let c2 = 1.0 - params.beta2.powi(k as i32);
        for j in 0..x.len() {
            m[j] = params.beta1 * m[j] + (1.0 - params.beta1) * g[j];
            v[j] = params.beta2 * v[j] + (1.0 - params.beta2) * g[j] * g[j];
            let step = lr[j] * (m[j] / c1) / ((v[j] / c2).sqrt() + params.epsilon);
            if step.is_finite() {
                x[j] -= step;
            }
        }
        project(search_box, &mut x);
        rec.eval(&x);
        rec.record();
    }
    Ok(rec.finish())
}
