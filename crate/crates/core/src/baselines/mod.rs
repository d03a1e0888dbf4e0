//! Comparison optimizers sharing one budget and trace convention.
//!
//! Every `*_run` function performs exactly `iters` outer iterations and returns a trace
//! with one [`IterationRecord`] per iteration holding the best value seen so far. Runs
//! that stop early (BFGS after a failed line search) repeat their last record up to
//! `iters`. Iterates are clamped or projected onto the search box, so reported
//! incumbents always lie inside it. Evaluations used only for finite-difference
//! gradients are counted but never become incumbents.

mod adam;
mod bfgs;
mod de;
mod pso;
mod sa;
mod shc;

pub use adam::{adam_run, AdamParams};
pub use bfgs::{bfgs_run, BfgsParams};
pub use de::{de_run, DeParams};
pub use pso::{pso_run, PsoParams};
pub use sa::{acceptance_probability, sa_run, SaParams};
pub use shc::{shc_run, ShcParams};

use std::time::Instant;

use crate::error::{Error, Result};
use crate::objectives::{Counted, EvalCounter, Objective, SearchBox};
use crate::trace::{IterationRecord, RunOutcome};

/// Hyperparameters for every baseline.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BaselineParams {
    pub pso: PsoParams,
    pub de: DeParams,
    pub bfgs: BfgsParams,
    pub sa: SaParams,
    pub shc: ShcParams,
    pub adam: AdamParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMode {
    /// Use the objective's hand-written gradient, falling back to central differences
    /// when none is registered.
    #[default]
    Analytic,
    CentralDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientOracle {
    pub mode: GradientMode,
    /// Relative step: coordinate `i` uses `h * max(1, |x_i|)`.
    pub h: f64,
}

impl Default for GradientOracle {
    fn default() -> Self {
        Self {
            mode: GradientMode::Analytic,
            h: 1e-6,
        }
    }
}

impl GradientOracle {
    pub fn gradient<O: Objective + ?Sized>(&self, objective: &O, x: &[f64]) -> Vec<f64> {
        if self.mode == GradientMode::Analytic {
            if let Some(g) = objective.gradient(x) {
                return g;
            }
        }
        fd_gradient(objective, x, self)
    }
}

/// Central differences `(U(x + h e_i) - U(x - h e_i)) / 2h`; costs `2d` evaluations.
pub fn fd_gradient<O: Objective + ?Sized>(objective: &O, x: &[f64], oracle: &GradientOracle) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = oracle.h * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = objective.value(&probe);
            probe[i] = x[i] - h;
            let down = objective.value(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn check_iters(iters: usize) -> Result<()> {
    if iters == 0 {
        return Err(Error::InvalidParameter("iteration budget must be at least 1".into()));
    }
    Ok(())
}

/// Tracks evaluations, the best point so far and the per-iteration trace.
struct Recorder<'a, O: ?Sized> {
    objective: &'a O,
    counter: EvalCounter,
    best_value: f64,
    best_point: Vec<f64>,
    trace: Vec<IterationRecord>,
    started: Instant,
}

impl<'a, O: Objective + ?Sized> Recorder<'a, O> {
    fn new(objective: &'a O, iters: usize) -> Self {
        Self {
            objective,
            counter: EvalCounter::new(),
            best_value: f64::INFINITY,
            best_point: Vec::new(),
            trace: Vec::with_capacity(iters),
            started: Instant::now(),
        }
    }

    /// Evaluates a candidate that may become the incumbent. NaN counts as `+inf`.
    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = Counted::new(self.objective, &self.counter).value(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < self.best_value || self.best_point.is_empty() {
            self.best_value = v;
            self.best_point = x.to_vec();
        }
        v
    }

    /// Counted objective for auxiliary evaluations such as finite differences.
    fn aux(&self) -> Counted<'_, O> {
        Counted::new(self.objective, &self.counter)
    }

    fn record(&mut self) {
        self.trace.push(IterationRecord {
            iteration: self.trace.len(),
            best_value: self.best_value,
            fevals: self.counter.get(),
            elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
        });
    }

    fn pad_to(&mut self, iters: usize) {
        while self.trace.len() < iters {
            self.record();
        }
    }

    fn finish(self) -> RunOutcome {
        RunOutcome {
            best_point: self.best_point,
            best_value: self.best_value,
            fevals: self.counter.get(),
            trace: self.trace,
        }
    }
}

/// Projects `x` onto the box in place.
fn project(search_box: &SearchBox, x: &mut [f64]) {
    search_box.clamp(x);
}
