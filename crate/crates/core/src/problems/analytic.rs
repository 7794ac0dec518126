use num_complex::Complex64;

use crate::error::{Error, Result};

/// KdV soliton `3c sech²(√c/2 (x − x₀ − ct))` of `u_t = −u_xxx − uu_x`.
pub fn kdv_soliton(c: f64, x0: f64, t: f64, x: f64) -> f64 {
    let s = 1.0 / (0.5 * c.sqrt() * (x - x0 - c * t)).cosh();
    3.0 * c * s * s
}

/// Phase shifts `(1/A²) log((A² + B²)/(A² − B²))²` for the stronger soliton
/// and minus `1/B²` times the same logarithm for the weaker one, with
/// `log(·)²` read as the squared logarithm.
///
/// This is the commonly quoted closed form. It does not agree with the
/// shifts observed in simulations; see
/// [`kdv_phase_shifts_inverse_scattering`].
pub fn kdv_phase_shifts(a: f64, b: f64) -> Result<(f64, f64)> {
    check_amplitudes(a, b)?;
    let (a2, b2) = (a * a, b * b);
    let l = ((a2 + b2) / (a2 - b2)).ln().powi(2);
    Ok((l / a2, -l / b2))
}

/// Phase shifts from the two-soliton solution: `(2/A) log((A + B)/(A − B))`
/// forward and `−(2/B) log((A + B)/(A − B))` backward, for solitons of
/// speeds `A²` and `B²`.
pub fn kdv_phase_shifts_inverse_scattering(a: f64, b: f64) -> Result<(f64, f64)> {
    check_amplitudes(a, b)?;
    let l = ((a + b) / (a - b)).ln();
    Ok((2.0 * l / a, -2.0 * l / b))
}

fn check_amplitudes(a: f64, b: f64) -> Result<()> {
    if !(a > b && b > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("phase shifts need A > B > 0, got A={a}, B={b}")));
    }
    Ok(())
}

/// Breather solution of `u_t = iu_xx + i|u|²u`:
///
/// `A((2B² cosh θ + 2iB√(2−B²) sinh θ)/(2 cosh θ − √2√(2−B²) cos(ABx)) − 1) e^{iA²t}`
/// with `θ = A²B√(2−B²)t`.
pub fn nls_breather(a: f64, b: f64, t: f64, x: f64) -> Result<Complex64> {
    if !(b > 0.0 && b <= 2f64.sqrt()) {
        return Err(Error::InvalidInput(format!("breather needs 0 < B <= sqrt 2, got {b}")));
    }
    let root = (2.0 - b * b).sqrt();
    let theta = a * a * b * root * t;
    let num = Complex64::new(2.0 * b * b * theta.cosh(), 2.0 * b * root * theta.sinh());
    let den = 2.0 * theta.cosh() - 2f64.sqrt() * root * (a * b * x).cos();
    Ok(a * (num / den - 1.0) * Complex64::new(0.0, a * a * t).exp())
}
