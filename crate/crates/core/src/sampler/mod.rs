//! Sampling from an unnormalized log-density by integrating a noise-to-target SDE.
//!
//! The chain starts at `X_0 ~ N(0, gamma I)` and follows
//!
//! ```text
//! dX_t = b_t(X_t) dt + sqrt(eps * beta'_t) dW_t,    t in [0, 1)
//! ```
//!
//! where the drift `b_t` is a ratio of Gaussian-weighted expectations over the target.
//! After a change of variables both expectations become averages over standard-normal
//! particles `xi_i` weighted by
//!
//! ```text
//! H_t(x, xi) = exp(-sigma_t |x + tau_t beta_t xi|^2 / (2 l_t) + |xi|^2 / 2) f(x - tau_t sigma_t xi)
//! ```
//!
//! with `l_t = eps beta_t + gamma sigma_t` and `tau_t = sqrt(lambda l_t / sigma_t)`.
//! Weights are handled in log space with a max shift, so targets such as
//! `exp(-1e100 * U)` are usable: the softmax then degenerates into an argmax.

mod chain;
mod drift;
mod schedule;

pub(crate) use chain::batch;
pub use chain::{euler_step, run_chain, sample_batch, ChainState};
pub use drift::{
    drift_from_log_weights, drift_mc, drift_mc_shifted_form, exact_drift_gaussian,
    exact_marginal_gaussian, log_weight, marginal_density_mc, DriftDiagnostics, Particles,
};
pub use schedule::{schedule_eval, Schedule, ScheduleValues};

use crate::error::{Error, Result};
use crate::objectives::SearchBox;

/// Smallest `lambda` covered by the fidelity bound.
pub const LAMBDA_THEORY_MIN: f64 = 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerParams {
    /// Number of standard-normal particles in the drift estimate.
    pub particle_count: usize,
    /// Euler steps on `[0, 1)`.
    pub step_count: usize,
    pub lambda: f64,
    /// Variance of the initial Gaussian.
    pub gamma: f64,
    /// Brownian coefficient, `0 < epsilon <= gamma`.
    pub epsilon: f64,
    /// Draw a fresh particle set at every step instead of once per chain.
    pub redraw_particles: bool,
    pub schedule: Schedule,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            particle_count: 1000,
            step_count: 10,
            lambda: LAMBDA_THEORY_MIN,
            gamma: 1.0,
            epsilon: 1.0,
            redraw_particles: false,
            schedule: Schedule::Linear,
        }
    }
}

impl SamplerParams {
    /// Defaults with `epsilon = gamma`.
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            epsilon: gamma,
            ..Self::default()
        }
    }

    /// Validates the parameters and returns non-fatal warnings.
    pub fn check(&self) -> Result<Vec<String>> {
        if self.particle_count == 0 {
            return Err(Error::InvalidParameter("particle_count must be positive".into()));
        }
        if self.step_count == 0 {
            return Err(Error::InvalidParameter("step_count must be positive".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {} must be positive", self.lambda)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {} must be positive", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {} must lie in (0, gamma = {}]",
                self.epsilon, self.gamma
            )));
        }
        let mut warnings = Vec::new();
        if self.lambda < LAMBDA_THEORY_MIN {
            warnings.push(format!(
                "lambda = {} is below {LAMBDA_THEORY_MIN}; the particle-error bound does not apply",
                self.lambda
            ));
        }
        Ok(warnings)
    }
}

type DensityFn<'a> = dyn Fn(&[f64]) -> f64 + Send + Sync + 'a;

/// Unnormalized log-density restricted to a box.
pub struct LogTarget<'a> {
    density: Box<DensityFn<'a>>,
    support: SearchBox,
    support_bound: f64,
}

impl<'a> LogTarget<'a> {
    /// `log_density` may return `-inf`; it is never called outside `support`.
    pub fn new<F>(support: SearchBox, log_density: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'a,
    {
        let support_bound = support.enclosing_radius();
        Self {
            density: Box::new(log_density),
            support,
            support_bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn support(&self) -> &SearchBox {
        &self.support
    }

    /// Radius `K` of a ball containing the support.
    pub fn support_bound(&self) -> f64 {
        self.support_bound
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        if self.support.contains(x) {
            (self.density)(x)
        } else {
            f64::NEG_INFINITY
        }
    }
}

impl std::fmt::Debug for LogTarget<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LogTarget")
            .field("support", &self.support)
            .field("support_bound", &self.support_bound)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(SamplerParams::default().check().unwrap().is_empty());
        let p = SamplerParams { lambda: 4.0, ..Default::default() };
        assert_eq!(p.check().unwrap().len(), 1);
        let p = SamplerParams { epsilon: 2.0, ..Default::default() };
        assert!(p.check().is_err());
        let p = SamplerParams { particle_count: 0, ..Default::default() };
        assert!(p.check().is_err());
        let p = SamplerParams::with_gamma(25.0);
        assert_eq!(p.epsilon, 25.0);
    }

    #[test]
    fn target_is_minus_infinity_off_support() {
        let t = LogTarget::new(SearchBox::cube(2, -1.0, 1.0).unwrap(), |_| 0.0);
        assert_eq!(t.log_density(&[0.5, 0.5]), 0.0);
        assert_eq!(t.log_density(&[1.5, 0.5]), f64::NEG_INFINITY);
        assert!((t.support_bound() - 2f64.sqrt()).abs() < 1e-15);
    }
}
