//! Zeroth-order global optimization by sampling Gibbs-tilted objectives.
//!
//! The crate is organised around four pieces:
//!
//! - [`objectives`]: the benchmark functions, their search boxes and known optima.
//! - [`sampler`]: draws from an unnormalized log-density by integrating a
//!   noise-to-target SDE whose drift is estimated by self-normalized importance
//!   sampling over standard-normal particles.
//! - [`zoom`]: the adaptive-zooming minimizer built on top of the sampler.
//! - [`baselines`] and [`theory`]: comparison optimizers and empirical checks of the
//!   sampling-based convergence rates.
//!
//! Everything that consumes randomness takes a [`rng::SeedStream`], so a single master
//! seed fixes every output regardless of how work is scheduled.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod objectives;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod theory;
pub mod trace;
pub mod zoom;

pub use error::{Error, Result};
pub use objectives::{EvalCounter, FunctionKind, Objective, ObjectiveSpec, SearchBox};
pub use rng::SeedStream;
pub use trace::IterationRecord;
