use rand::Rng;

use crate::error::{Error, Result};
use crate::objectives::{Objective, SearchBox};
use crate::rng::SeedStream;
use crate::trace::RunOutcome;

use super::{check_iters, project, Recorder};

/// DE/rand/1/bin.
#[derive(Debug, Clone, PartialEq)]
pub struct DeParams {
    pub population: usize,
    /// Differential weight `F`.
    pub weight: f64,
    /// Crossover rate `CR`.
    pub crossover: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            population: 30,
            weight: 0.5,
            crossover: 0.9,
        }
    }
}

/// Evaluations: `population * (iters + 1)`.
pub fn de_run<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    iters: usize,
    params: &DeParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    check_iters(iters)?;
    let np = params.population;
    if np < 4 {
        return Err(Error::InvalidParameter(format!(
            "DE/rand/1 needs a population of at least 4, got {np}"
        )));
    }
    if !(0.0..=1.0).contains(&params.crossover) {
        return Err(Error::InvalidParameter(format!("crossover rate {} outside [0, 1]", params.crossover)));
    }
    let mut rng = stream.rng();
    let mut rec = Recorder::new(objective, iters);
    let d = search_box.dim();

    let mut pop: Vec<Vec<f64>> = (0..np).map(|_| search_box.sample_uniform(&mut rng)).collect();
    let mut fit: Vec<f64> = pop.iter().map(|x| rec.eval(x)).collect();
    let mut trial = vec![0.0; d];

    for _ in 0..iters {
        for i in 0..np {
            let [r1, r2, r3] = distinct_others(i, np, &mut rng);
            let jrand = rng.random_range(0..d);
            for j in 0..d {
                trial[j] = if j == jrand || rng.random::<f64>() < params.crossover {
                    pop[r1][j] + params.weight * (pop[r2][j] - pop[r3][j])
                } else {
                    pop[i][j]
                };
            }
            project(search_box, &mut trial);
            let v = rec.eval(&trial);
            if v <= fit[i] {
                fit[i] = v;
                pop[i].copy_from_slice(&trial);
            }
        }
        rec.record();
    }
    Ok(rec.finish())
}

fn distinct_others<R: Rng + ?Sized>(i: usize, n: usize, rng: &mut R) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let r = rng.random_range(0..n);
            if r != i && !picked[..k].contains(&r) {
                picked[k] = r;
                break;
            }
        }
    }
    picked
}
