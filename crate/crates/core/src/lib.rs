//! Objective-function-free optimization with adaptively scaled trust regions.
//!
//! The methods in this crate never use objective-function values to accept
//! steps or to adapt their trust regions. Each iteration computes the
//! gradient, turns it into per-coordinate radii `|g_i| / w_i` through a
//! scaling rule (deterministic Adagrad, Adam-style moving averages, or
//! divergent running-max scalings), and takes any step inside that region
//! which achieves a fraction of the generalized Cauchy decrease of a
//! quadratic model.
//!
//! Besides the optimizer the crate carries:
//!
//! * a library of smooth test problems with a multiplicative noise wrapper,
//! * the Hermite-interpolated worst-case functions on which the method's
//!   gradient decay is exactly prescribed,
//! * a benchmarking harness with performance profiles, reliability
//!   statistics and numerical checks of the complexity bounds.

pub mod bench;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod model;
pub mod problem;
pub mod scaling;
pub mod sharpness;
pub mod step;

pub use driver::{astr1, sdba, RunConfig, RunRecord, RunStatus, Variant};
pub use error::{Error, Result};
pub use model::{HessianModel, ModelKind};
pub use problem::{evaluate, load_suite, with_noise, NoisyProblem, Oracle, Problem, Want};
pub use scaling::{ScalingKind, ScalingState, ScalingStrategy};
pub use step::{cauchy_point, solve_tr_step, Norm, TrustRegion};
