//! Numerical laboratory for the adhesive string
//! `u_tt = u_xx - Φ'(u)` on `[0, L]` with homogeneous Neumann ends,
//! where `Φ` is quadratic up to the debonding threshold `|u| = 1` and
//! constant beyond it.
//!
//! The library is generic over the scalar type (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, which is what the CLI and the
//! experiment harness use.

pub mod cli_io;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod initial_conditions;
pub mod potentials;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Potential = potentials::PotentialSpec<f64>;
pub type InitialData = initial_conditions::InitialCondition<f64>;
pub type Grid = solvers::Grid1D<f64>;
pub type State = solvers::WaveState<f64>;
pub type Record = solvers::SolutionRecord<f64>;
pub type SingularityMap = diagnostics::CharacteristicMap<f64>;
