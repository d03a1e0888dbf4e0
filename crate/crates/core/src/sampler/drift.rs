use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::schedule::{schedule_eval, ScheduleValues};
use super::{LogTarget, SamplerParams};

/// A fixed set of standard-normal particles, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Particles {
    dim: usize,
    data: Vec<f64>,
    half_sq_norms: Vec<f64>,
}

impl Particles {
    pub fn draw<R: Rng + ?Sized>(count: usize, dim: usize, rng: &mut R) -> Self {
        let data: Vec<f64> = (0..count * dim).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_flat(dim, data)
    }

    pub fn from_vectors(vectors: &[Vec<f64>]) -> Self {
        let dim = vectors.first().map_or(0, Vec::len);
        assert!(vectors.iter().all(|v| v.len() == dim), "ragged particle set");
        Self::from_flat(dim, vectors.concat())
    }

    fn from_flat(dim: usize, data: Vec<f64>) -> Self {
        let half_sq_norms = if dim == 0 {
            Vec::new()
        } else {
            data.chunks_exact(dim)
                .map(|xi| 0.5 * xi.iter().map(|v| v * v).sum::<f64>())
                .collect()
        };
        Self {
            dim,
            data,
            half_sq_norms,
        }
    }

    pub(crate) fn redraw<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for v in &mut self.data {
            *v = rng.sample(StandardNormal);
        }
        for (h, xi) in self.half_sq_norms.iter_mut().zip(self.data.chunks_exact(self.dim)) {
            *h = 0.5 * xi.iter().map(|v| v * v).sum::<f64>();
        }
    }

    pub fn len(&self) -> usize {
        self.half_sq_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half_sq_norms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.data.chunks_exact(self.dim).zip(self.half_sq_norms.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDiagnostics {
    pub max_log_weight: f64,
    /// `(sum w)^2 / sum w^2`, in `[1, N_p]`.
    pub effective_sample_size: f64,
}

/// `log H_t(x, xi)`, writing `x - tau sigma xi` into `y`.
#[inline]
fn log_weight_into(
    x: &[f64],
    xi: &[f64],
    half_sq_norm: f64,
    sv: &ScheduleValues,
    target: &LogTarget<'_>,
    y: &mut [f64],
) -> f64 {
    let tb = sv.tau * sv.beta;
    let ts = sv.tau * sv.sigma;
    let mut sq = 0.0;
    for ((yj, &xj), &e) in y.iter_mut().zip(x).zip(xi) {
        let u = xj + tb * e;
        sq += u * u;
        *yj = xj - ts * e;
    }
    let log_f = target.log_density(y);
    if log_f == f64::NEG_INFINITY {
        return log_f;
    }
    -sv.sigma * sq / (2.0 * sv.ell) + half_sq_norm + log_f
}

/// Log importance weight `log H_t(x, xi)`; `-inf` where the target vanishes.
pub fn log_weight(
    x: &[f64],
    xi: &[f64],
    t: f64,
    target: &LogTarget<'_>,
    params: &SamplerParams,
) -> Result<f64> {
    let sv = schedule_eval(t, params)?;
    let mut y = vec![0.0; x.len()];
    let half = 0.5 * xi.iter().map(|v| v * v).sum::<f64>();
    Ok(log_weight_into(x, xi, half, &sv, target, &mut y))
}

/// Normalized softmax weights `exp(lw_i - max)` and their diagnostics.
fn shifted_weights(log_w: &[f64], weights: &mut Vec<f64>, sv: &ScheduleValues) -> Result<DriftDiagnostics> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights {
            step: 0,
            t: sv.t,
            particles: log_w.len(),
        });
    }
    weights.clear();
    weights.extend(log_w.iter().map(|lw| (lw - max).exp()));
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    Ok(DriftDiagnostics {
        max_log_weight: max,
        effective_sample_size: sum * sum / sum_sq,
    })
}

/// Drift `tau sigma' * sum_i w_i xi_i / sum_i w_i` from precomputed log-weights.
///
/// Only differences `lw_i - max_j lw_j` enter, so the normalizing constant of the
/// target drops out.
pub fn drift_from_log_weights(
    log_w: &[f64],
    particles: &Particles,
    sv: &ScheduleValues,
) -> Result<(Vec<f64>, DriftDiagnostics)> {
    let mut weights = Vec::with_capacity(log_w.len());
    let diag = shifted_weights(log_w, &mut weights, sv)?;
    let mut out = vec![0.0; particles.dim()];
    weighted_mean_into(&weights, particles, &mut out);
    let scale = sv.tau * sv.dsigma;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok((out, diag))
}

fn weighted_mean_into(weights: &[f64], particles: &Particles, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut sum = 0.0;
    for (w, (xi, _)) in weights.iter().zip(particles.iter()) {
        if *w == 0.0 {
            continue;
        }
        sum += w;
        for (o, e) in out.iter_mut().zip(xi) {
            *o += w * e;
        }
    }
    out.iter_mut().for_each(|v| *v /= sum);
}

/// Scratch buffers reused across the steps of one chain.
#[derive(Debug, Default)]
pub(crate) struct DriftWorkspace {
    log_w: Vec<f64>,
    weights: Vec<f64>,
    y: Vec<f64>,
}

impl DriftWorkspace {
    pub(crate) fn log_weights(
        &mut self,
        x: &[f64],
        sv: &ScheduleValues,
        particles: &Particles,
        target: &LogTarget<'_>,
    ) {
        self.y.resize(x.len(), 0.0);
        self.log_w.clear();
        for (xi, half) in particles.iter() {
            let lw = log_weight_into(x, xi, half, sv, target, &mut self.y);
            self.log_w.push(lw);
        }
    }

    pub(crate) fn drift_into(
        &mut self,
        x: &[f64],
        sv: &ScheduleValues,
        particles: &Particles,
        target: &LogTarget<'_>,
        out: &mut [f64],
    ) -> Result<DriftDiagnostics> {
        self.log_weights(x, sv, particles, target);
        let diag = shifted_weights(&self.log_w, &mut self.weights, sv)?;
        weighted_mean_into(&self.weights, particles, out);
        let scale = sv.tau * sv.dsigma;
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(diag)
    }
}

/// Monte-Carlo drift estimate at `(x, t)` over the given particles.
pub fn drift_mc(
    x: &[f64],
    t: f64,
    particles: &Particles,
    target: &LogTarget<'_>,
    params: &SamplerParams,
) -> Result<(Vec<f64>, DriftDiagnostics)> {
    let sv = schedule_eval(t, params)?;
    let mut ws = DriftWorkspace::default();
    let mut out = vec![0.0; x.len()];
    let diag = ws.drift_into(x, &sv, particles, target, &mut out)?;
    Ok((out, diag))
}

/// The same estimator written as `(sigma'/sigma) [x - sum_i w_i (x - tau sigma xi_i) / sum_i w_i]`.
pub fn drift_mc_shifted_form(
    x: &[f64],
    t: f64,
    particles: &Particles,
    target: &LogTarget<'_>,
    params: &SamplerParams,
) -> Result<Vec<f64>> {
    let sv = schedule_eval(t, params)?;
    let mut ws = DriftWorkspace::default();
    ws.log_weights(x, &sv, particles, target);
    shifted_weights(&ws.log_w, &mut ws.weights, &sv)?;
    let ts = sv.tau * sv.sigma;
    let mut num = vec![0.0; x.len()];
    let mut den = 0.0;
    for (w, (xi, _)) in ws.weights.iter().zip(particles.iter()) {
        den += w;
        for ((n, xj), e) in num.iter_mut().zip(x).zip(xi) {
            *n += w * (xj - ts * e);
        }
    }
    Ok(x
        .iter()
        .zip(&num)
        .map(|(xj, n)| sv.dsigma / sv.sigma * (xj - n / den))
        .collect())
}

/// Monte-Carlo estimate of the marginal density of `X_t` at `x`.
///
/// The target must be normalized for the result to be a density.
pub fn marginal_density_mc(
    x: &[f64],
    t: f64,
    particles: &Particles,
    target: &LogTarget<'_>,
    params: &SamplerParams,
) -> Result<f64> {
    let sv = schedule_eval(t, params)?;
    let mut ws = DriftWorkspace::default();
    ws.log_weights(x, &sv, particles, target);
    let max = ws.log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mean = ws.log_w.iter().map(|lw| (lw - max).exp()).sum::<f64>() / ws.log_w.len() as f64;
    let log_prefactor = x.len() as f64 * (sv.tau * (sv.sigma / sv.ell).sqrt()).ln();
    Ok((log_prefactor + max + mean.ln()).exp())
}

/// Closed-form drift for the target `N(0, s^2 I)`.
pub fn exact_drift_gaussian(x: &[f64], t: f64, s: f64, params: &SamplerParams) -> Result<Vec<f64>> {
    let sv = schedule_eval(t, params)?;
    let s2 = s * s;
    let factor = sv.dsigma / sv.sigma
        * (1.0 - sv.beta * s2 / (sv.ell * sv.sigma + sv.beta * sv.beta * s2));
    Ok(x.iter().map(|v| factor * v).collect())
}

/// Closed-form density of `X_t` for the target `N(0, s^2 I)`: `N(0, (beta^2 s^2 + l sigma) I)`.
pub fn exact_marginal_gaussian(x: &[f64], t: f64, s: f64, params: &SamplerParams) -> Result<f64> {
    let sv = schedule_eval(t, params)?;
    let var = sv.beta * sv.beta * s * s + sv.ell * sv.sigma;
    let d = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    Ok((-(sq / (2.0 * var)) - 0.5 * d * (2.0 * std::f64::consts::PI * var).ln()).exp())
}
