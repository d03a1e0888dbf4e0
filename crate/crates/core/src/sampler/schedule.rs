use crate::error::{Error, Result};

use super::SamplerParams;

/// Interpolation pair `(sigma_t, beta_t = 1 - sigma_t)` with `sigma_0 = 1`, `sigma_1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// `sigma_t = 1 - t`.
    #[default]
    Linear,
}

impl Schedule {
    pub fn sigma(self, t: f64) -> f64 {
        match self {
            Schedule::Linear => 1.0 - t,
        }
    }

    pub fn dsigma(self, _t: f64) -> f64 {
        match self {
            Schedule::Linear => -1.0,
        }
    }

    pub fn beta(self, t: f64) -> f64 {
        1.0 - self.sigma(t)
    }

    pub fn dbeta(self, t: f64) -> f64 {
        -self.dsigma(t)
    }
}

/// Schedule quantities at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleValues {
    pub t: f64,
    pub sigma: f64,
    pub beta: f64,
    pub dsigma: f64,
    pub dbeta: f64,
    /// `epsilon * beta + gamma * sigma`
    pub ell: f64,
    /// `sqrt(lambda * ell / sigma)`
    pub tau: f64,
}

pub fn schedule_eval(t: f64, params: &SamplerParams) -> Result<ScheduleValues> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::ScheduleDomain(t));
    }
    let s = params.schedule;
    let sigma = s.sigma(t);
    let beta = s.beta(t);
    let ell = params.epsilon * beta + params.gamma * sigma;
    let tau = (params.lambda * ell / sigma).sqrt();
    Ok(ScheduleValues {
        t,
        sigma,
        beta,
        dsigma: s.dsigma(t),
        dbeta: s.dbeta(t),
        ell,
        tau,
    })
}
