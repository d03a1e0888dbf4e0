//! Special functions and empirical checks of the convergence rates behind the method.
//!
//! The rate checks draw from exact Gibbs measures ([`gibbs_radial_sampler`]) or closed-form
//! targets and never call the SDE sampler. Only `th45` exercises the sampler.

mod checks;
mod radial;
mod special;

pub use checks::{
    check_concentration, check_lemma_tail_bound, check_min_gap, check_sampler_fidelity, check_sup_rate,
    coordinatewise_ks, min_gap_bound, run_check, sup_rate_constant, tail_bound_rhs, CheckId, ConcentrationConfig,
    FidelityConfig, GaussianMixture, Measurement, MinGapConfig, RateFitResult, SupRateConfig, TailBoundConfig,
    TailTarget, TheoryCheckReport, Triangular,
};
pub use radial::{ell_theta_radial, gibbs_radial_sampler, RadialPotentialSpec};
pub use special::{
    gamma_fn, inverse_regularized_lower_gamma, ln_gamma, lower_inc_gamma, normal_cdf, regularized_lower_gamma,
};
