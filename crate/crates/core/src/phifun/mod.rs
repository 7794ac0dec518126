//! φ-, ψ- and γ-functions: cancellation-safe scalar kernels, contour
//! integrals over diagonal operators, and the symbolic expressions used for
//! tableau coefficients.

mod eval;
mod expr;
mod kernel;

pub use eval::{eval_gamma, eval_gamma_all, eval_phi_expr, eval_phi_expr_with, fingerprint, PhiCache};
pub use expr::{PhiExpr, PhiTerm};
pub use kernel::{
    gamma_contour, gamma_scalar, phi_contour, phi_scalar, series_radius, ContourNodes,
    ContourSpec, MAX_GAMMA_INDEX, MAX_PHI_INDEX,
};

pub(crate) use expr::{rat, rational_factorial, ratio_f64};
pub(crate) use kernel::phi_unchecked;
