use rayon::prelude::*;
use zopt_core::baselines::{self, BaselineParams};
use zopt_core::objectives::registry;
use zopt_core::trace::RunOutcome;
use zopt_core::zoom::{self, ZoomParams};
use zopt_core::{IterationRecord, ObjectiveSpec, SeedStream};

use crate::plan::{Algorithm, ExperimentPlan};

/// Optimizer settings shared by every run of a plan; the iteration budget comes from
/// the plan.
#[derive(Debug, Clone, Default)]
pub struct RunSettings {
    pub zoom: ZoomParams,
    pub baselines: BaselineParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algo: Algorithm,
    pub function: String,
    pub dim: usize,
    pub trial: usize,
    pub trace: Vec<IterationRecord>,
    pub best_point: Vec<f64>,
    /// Set when the run failed; the trace is then empty.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn final_best(&self) -> Option<f64> {
        self.trace.last().map(|r| r.best_value)
    }

    pub fn elapsed_ms(&self) -> Option<f64> {
        self.trace.last().map(|r| r.elapsed_ms)
    }
}

/// Stream for one trial. Every coordinate of the run enters the key, so removing or
/// adding runs never changes another run's randomness.
pub fn trial_stream(master: u64, function: &str, dim: usize, algo: Algorithm, trial: usize) -> SeedStream {
    SeedStream::new(master)
        .split(function)
        .index(dim as u64)
        .split(algo.id())
        .index(trial as u64)
}

/// Runs one optimizer on `spec` for `iters` iterations.
pub fn run_algorithm(
    algo: Algorithm,
    spec: &ObjectiveSpec,
    iters: usize,
    settings: &RunSettings,
    stream: &SeedStream,
) -> zopt_core::Result<RunOutcome> {
    let bx = &spec.search_box;
    let b = &settings.baselines;
    match algo {
        Algorithm::So => {
            let params = ZoomParams { max_iters: iters, ..settings.zoom.clone() };
            zoom::optimize(spec, bx, &params, stream)
        }
        Algorithm::Pso => baselines::pso_run(spec, bx, iters, &b.pso, stream),
        Algorithm::De => baselines::de_run(spec, bx, iters, &b.de, stream),
        Algorithm::Bfgs => baselines::bfgs_run(spec, bx, iters, &b.bfgs, stream),
        Algorithm::Sa => baselines::sa_run(spec, bx, iters, &b.sa, stream),
        Algorithm::Shc => baselines::shc_run(spec, bx, iters, &b.shc, stream),
        Algorithm::Adam => baselines::adam_run(spec, bx, iters, &b.adam, stream),
    }
}

/// The runs of a plan in output order: function, dimension, algorithm, trial.
pub fn plan_jobs(plan: &ExperimentPlan) -> Vec<(String, usize, Algorithm, usize)> {
    let mut jobs = Vec::with_capacity(plan.run_count());
    for f in &plan.functions {
        for &d in &plan.dims {
            for &a in &plan.algos {
                for t in 0..plan.trials {
                    jobs.push((f.clone(), d, a, t));
                }
            }
        }
    }
    jobs
}

/// Executes every run of the plan on the rayon pool. A failing run is recorded with
/// its error and does not stop the others. Output order follows [`plan_jobs`].
pub fn run_plan(plan: &ExperimentPlan, settings: &RunSettings) -> Vec<RunRecord> {
    plan_jobs(plan)
        .into_par_iter()
        .map(|(function, dim, algo, trial)| {
            let stream = trial_stream(plan.seed, &function, dim, algo, trial);
            let outcome = registry(&function, dim).and_then(|spec| run_algorithm(algo, &spec, plan.iters, settings, &stream));
            let (trace, best_point, error) = match outcome {
                Ok(o) => (o.trace, o.best_point, None),
                Err(e) => {
                    log::error!("{algo} on {function} (d = {dim}), trial {trial}: {e}");
                    (Vec::new(), Vec::new(), Some(e.to_string()))
                }
            };
            RunRecord { algo, function, dim, trial, trace, best_point, error }
        })
        .collect()
}
