use rand::Rng;

use crate::error::{Error, Result};
use crate::objectives::{Objective, SearchBox};
use crate::rng::SeedStream;
use crate::trace::RunOutcome;

use super::{check_iters, project, Recorder};

/// Global-best particle swarm.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
        }
    }
}

/// Evaluations: `swarm_size * (iters + 1)`.
pub fn pso_run<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    iters: usize,
    params: &PsoParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    check_iters(iters)?;
    if params.swarm_size == 0 {
        return Err(Error::InvalidParameter("PSO swarm size must be positive".into()));
    }
    let mut rng = stream.rng();
    let mut rec = Recorder::new(objective, iters);
    let d = search_box.dim();
    let width: Vec<f64> = search_box.half_widths().iter().map(|h| 2.0 * h).collect();

    let mut pos: Vec<Vec<f64>> = (0..params.swarm_size).map(|_| search_box.sample_uniform(&mut rng)).collect();
    let mut vel: Vec<Vec<f64>> = (0..params.swarm_size)
        .map(|_| width.iter().map(|w| 0.1 * w * rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let mut pbest_val: Vec<f64> = pos.iter().map(|x| rec.eval(x)).collect();
    let mut pbest = pos.clone();
    let (mut gbest_val, mut gbest) = best_of(&pbest_val, &pbest);

    for _ in 0..iters {
        for i in 0..params.swarm_size {
            for j in 0..d {
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                let v = params.inertia * vel[i][j]
                    + params.cognitive * r1 * (pbest[i][j] - pos[i][j])
                    + params.social * r2 * (gbest[j] - pos[i][j]);
                vel[i][j] = v.clamp(-width[j], width[j]);
                pos[i][j] += vel[i][j];
            }
            project(search_box, &mut pos[i]);
            let v = rec.eval(&pos[i]);
            if v < pbest_val[i] {
                pbest_val[i] = v;
                pbest[i].clone_from(&pos[i]);
            }
        }
        let (v, x) = best_of(&pbest_val, &pbest);
        if v < gbest_val {
            gbest_val = v;
            gbest = x;
        }
        rec.record();
    }
    Ok(rec.finish())
}

fn best_of(values: &[f64], points: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let mut k = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[k] {
            k = i;
        }
    }
    (values[k], points[k].clone())
}
