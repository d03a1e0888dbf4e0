use crate::error::Result;
use crate::objectives::{Objective, SearchBox};
use crate::rng::SeedStream;
use crate::trace::RunOutcome;

use super::{check_iters, project, GradientOracle, Recorder};

/// Full-matrix BFGS with projected Armijo backtracking.
#[derive(Debug, Clone, PartialEq)]
pub struct BfgsParams {
    /// Sufficient-decrease constant `c` of the Armijo condition.
    pub armijo: f64,
    /// Backtracking factor `rho`.
    pub backtrack: f64,
    pub max_backtracks: usize,
    pub gradient: GradientOracle,
    /// Start point; `None` draws one uniformly in the box.
    pub start: Option<Vec<f64>>,
}

impl Default for BfgsParams {
    fn default() -> Self {
        Self {
            armijo: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            gradient: GradientOracle::default(),
            start: None,
        }
    }
}

/// Stops early, keeping the incumbent, at a zero gradient or when the line search
/// finds no decrease.
pub fn bfgs_run<O: Objective + ?Sized>(
    objective: &O,
    search_box: &SearchBox,
    iters: usize,
    params: &BfgsParams,
    stream: &SeedStream,
) -> Result<RunOutcome> {
    check_iters(iters)?;
    let mut rng = stream.rng();
    let mut rec = Recorder::new(objective, iters);
    let d = search_box.dim();

    let mut x = match &params.start {
        Some(s) => {
            let mut s = s.clone();
            project(search_box, &mut s);
            s
        }
        None => search_box.sample_uniform(&mut rng),
    };
    let mut fx = rec.eval(&x);
    let mut g = params.gradient.gradient(&rec.aux(), &x);
    let mut h = identity(d);
    let mut first = true;

    for _ in 0..iters {
        if !g.iter().all(|v| v.is_finite()) || g.iter().all(|v| *v == 0.0) {
            break;
        }
        let mut p = mat_vec(&h, &g);
        p.iter_mut().for_each(|v| *v = -*v);
        if dot(&p, &g) >= 0.0 {
            h = identity(d);
            p = g.iter().map(|v| -v).collect();
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..params.max_backtracks {
            let mut xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            project(search_box, &mut xn);
            let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            let fn_ = rec.eval(&xn);
            if fn_ <= fx + params.armijo * dot(&g, &s) && s.iter().any(|v| *v != 0.0) {
                accepted = Some((xn, s, fn_));
                break;
            }
            step *= params.backtrack;
        }
        let Some((xn, s, fn_)) = accepted else {
            rec.record();
            break;
        };

        let gn = params.gradient.gradient(&rec.aux(), &xn);
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let ys = dot(&y, &s);
        if ys > 1e-12 * norm(&y) * norm(&s) {
            if first {
                let scale = ys / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
                first = false;
            }
            bfgs_update(&mut h, &s, &y, ys);
        }
        x = xn;
        fx = fn_;
        g = gn;
        rec.record();
    }
    rec.pad_to(iters);
    Ok(rec.finish())
}

/// `H <- (I - r s y^T) H (I - r y s^T) + r s s^T` with `r = 1 / (y^T s)`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], ys: f64) {
    let d = s.len();
    let r = 1.0 / ys;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..d {
        for j in 0..d {
            h[i * d + j] += (1.0 + r * yhy) * r * s[i] * s[j] - r * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    m.chunks_exact(v.len()).map(|row| dot(row, v)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
