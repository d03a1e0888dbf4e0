//! Radial potentials `U(x) = kappa |x|^m` and exact draws from their Gibbs measures.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::special::{inverse_regularized_lower_gamma, regularized_lower_gamma};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Draws per independent stream in [`gibbs_radial_sampler`].
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPotentialSpec {
    pub dim: usize,
    pub m: f64,
    pub kappa: f64,
    pub theta: f64,
}

impl RadialPotentialSpec {
    pub fn new(dim: usize, m: f64, kappa: f64, theta: f64) -> Result<Self> {
        let spec = Self { dim, m, kappa, theta };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidDimension {
                name: "radial potential".into(),
                dim: 0,
                reason: "dimension must be positive",
            });
        }
        for (name, v) in [("m", self.m), ("kappa", self.kappa), ("theta", self.theta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("radial potential needs {name} > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Shape `d / m` of the gamma law of `theta * U(X)`.
    pub fn shape(&self) -> f64 {
        self.dim as f64 / self.m
    }

    pub fn potential(&self, x: &[f64]) -> f64 {
        self.kappa * x.iter().map(|v| v * v).sum::<f64>().sqrt().powf(self.m)
    }
}

/// Gibbs mass of the sublevel set `{U < r}`: `gamma(d/m, r theta) / Gamma(d/m)`.
///
/// The scale `kappa` cancels. Returns `0` for `r <= 0`.
pub fn ell_theta_radial(spec: &RadialPotentialSpec, r: f64) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    regularized_lower_gamma(spec.shape(), r * spec.theta).unwrap_or(f64::NAN)
}

/// `n` independent draws from the density proportional to `exp(-theta kappa |x|^m)`.
///
/// Each draw is a uniform direction times the radius `(T / (theta kappa))^(1/m)` with
/// `T ~ Gamma(d/m, 1)` obtained by inverting the regularized incomplete gamma.
/// Blocks of draws use the streams `stream.index(block)`, so the output does not
/// depend on the thread count.
pub fn gibbs_radial_sampler(spec: &RadialPotentialSpec, n: usize, stream: &SeedStream) -> Result<Vec<Vec<f64>>> {
    spec.check()?;
    if n == 0 {
        return Err(Error::InvalidParameter("radial sampler needs n >= 1".into()));
    }
    let blocks: Vec<Result<Vec<Vec<f64>>>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.index(b as u64).rng();
            let len = CHUNK.min(n - b * CHUNK);
            (0..len).map(|_| draw_one(spec, &mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

fn draw_one<R: Rng + ?Sized>(spec: &RadialPotentialSpec, rng: &mut R) -> Result<Vec<f64>> {
    let mut dir: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
    let mut norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    while norm == 0.0 {
        dir.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    // 1 - u lies in (0, 1], keeping the probability strictly below one
    let u: f64 = 1.0 - rng.random::<f64>();
    let t = inverse_regularized_lower_gamma(spec.shape(), 1.0 - u)?;
    let radius = (t / (spec.theta * spec.kappa)).powf(1.0 / spec.m);
    dir.iter_mut().for_each(|v| *v *= radius / norm);
    Ok(dir)
}
