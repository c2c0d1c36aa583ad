//! Stationary Fokker-Planck learning.
//!
//! Estimates the stationary marginal densities of the Langevin search
//! `dx_n/dt = -dV/dx_n + noise` over a box. Each coordinate's conditional
//! stationary CDF solves a linear second-order ODE, which is approximated by
//! sine-basis collocation; coordinates are redrawn by inversion in a
//! Gibbs-style sweep, and averaging the expansion coefficients over sweeps
//! converges to the marginal CDFs.
//!
//! ```no_run
//! use sfpl::problems::Michalewicz;
//! use sfpl::{run_sfp, SfpConfig};
//!
//! let cost = Michalewicz::new(10);
//! let config = SfpConfig::new(0.4, 20, 1, 7);
//! let result = run_sfp(&cost, &Michalewicz::space(), &config).unwrap();
//! println!("{:?}", result.last_record().unwrap().argmax);
//! ```

// `!(a > b)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accumulator;
pub mod collocation;
pub mod config;
pub mod cost;
pub mod diagnostics;
pub mod error;
pub mod expansion;
pub mod export;
pub mod inference;
pub mod inversion;
pub mod linalg;
pub mod problems;
pub mod sampler;
pub mod space;

pub use accumulator::{marginal_moments, MarginalAccumulator};
pub use collocation::{build_collocation_system, solve_conditional_cdf, CollocationSystem};
pub use config::{SfpConfig, SweepOrder};
pub use cost::{CostModel, FnCost, SeparableCost};
pub use diagnostics::{
    boltzmann_oracle_1d, convergence_measures, fit_power_law, trajectory_distance,
};
pub use error::{Result, SfpError};
pub use expansion::{eval_cdf, eval_pdf, CdfExpansion};
pub use inversion::{invert_cdf, InverseTable};
pub use linalg::{solve_dense, DenseMatrix};
pub use sampler::{
    run_sfp, run_sfp_with, sfp_sweep, RunFailure, SamplerState, SfpResult, SweepRecord,
};
pub use space::SearchSpace;
