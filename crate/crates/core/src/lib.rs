//! Numerical laboratory for viscous shock waves of the generalized Burgers
//! equation `u_t + Phi(u)_x = nu u_xx` with polynomial flux.

pub mod config;
pub mod error;
pub mod evolve;
pub mod flux;
pub mod linop;
pub mod ode;
pub mod picard;
pub mod pipeline;
pub mod poly;
pub mod quad;
pub mod strip;
pub mod wave;
pub mod weights;

pub use config::ExperimentConfig;
pub use error::{Result, ShockError};
pub use flux::{PolynomialFlux, ShockProblem};
