//! Fourier spectral discretization of periodic semilinear stiff PDEs
//! `u_t = Lu + N(u)` in one to three dimensions, a catalog of exponential
//! integrators, and a benchmark harness measuring their accuracy, stability
//! and cost.

pub mod bench;
pub mod error;
pub mod par;
pub mod integrator;
pub mod phifun;
pub mod problems;
pub mod spectral;
pub mod tableau;

pub use error::{Error, Result};
pub use par::Execution;
