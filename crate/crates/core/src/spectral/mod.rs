//! Periodic Fourier discretization: tensor grids, wavenumbers, diagonal
//! differentiation symbols, transforms between values and coefficients,
//! and pseudospectral evaluation of nonlinear terms.
//!
//! The Nyquist coefficient (mode `−N/2`) stands for both `±N/2`. For the
//! real data used here the two coincide; complex data without that
//! symmetry is not treated specially.

mod grid;
mod symbol;
mod system;
mod transform;

pub use grid::{wavenumbers, Grid};
pub use symbol::{diff_symbol, laplacian, SpectralSymbol};
pub use system::{apply_nonlinear, NonlinearOp, Pointwise, SpectralSystem};
pub use transform::{to_coeffs, to_values, FftPlan};
