//! Scalar φ- and γ-functions and their contour-integral evaluation.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest φ index the kernel supports.
pub const MAX_PHI_INDEX: usize = 12;
/// Largest γ index the kernel supports.
pub const MAX_GAMMA_INDEX: usize = 8;

const SERIES_REL_TOL: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 400;

/// Radius below which φ_l is summed from its Taylor series.
///
/// Each step of the forward recurrence divides by `z`, so the rounding error
/// of `e^z` is amplified by roughly `l!/|z|^l`. The crossover grows with `l`
/// to keep that factor below ~10³; for l ≤ 1 it is the classic |z| = 1/2.
pub fn series_radius(l: usize) -> f64 {
    f64::max(0.5, (l as f64 + 1.0) / 2.0)
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite argument {z}")))
    }
}

/// φ_l(z) = Σ_{j≥0} z^j / (j+l)!
pub(crate) fn phi_series(l: usize, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(inv_factorial(l), 0.0);
    let mut sum = term;
    for j in 1..SERIES_MAX_TERMS {
        term = term * z / (j + l) as f64;
        sum += term;
        if term.norm() <= SERIES_REL_TOL * sum.norm() {
            break;
        }
    }
    sum
}

/// φ_{k+1}(z) = (φ_k(z) − 1/k!)/z seeded with φ_0 = e^z.
pub(crate) fn phi_recurrence(l: usize, z: Complex64) -> Complex64 {
    let mut phi = z.exp();
    let mut inv_fact = 1.0;
    for k in 0..l {
        phi = (phi - inv_fact) / z;
        inv_fact /= (k + 1) as f64;
    }
    phi
}

/// φ_l(c + w) with `e^{c+w}` formed as `e^c·e^w`.
///
/// Rounding `c + w` loses about `|c|·ε` of the offset, and φ_l can be badly
/// conditioned in its argument (φ_1(iy) near `y = 2πk`), so contour nodes
/// around a large centre keep the two parts apart.
pub(crate) fn phi_at_offset(l: usize, c: Complex64, w: Complex64) -> Complex64 {
    let z = c + w;
    if l > 0 && z.norm() < series_radius(l) {
        return phi_series(l, z);
    }
    let mut phi = c.exp() * w.exp();
    let mut inv_fact = 1.0;
    for k in 0..l {
        phi = (phi - inv_fact) / z;
        inv_fact /= (k + 1) as f64;
    }
    phi
}

pub(crate) fn phi_unchecked(l: usize, z: Complex64) -> Complex64 {
    if l == 0 {
        z.exp()
    } else if z.norm() < series_radius(l) {
        phi_series(l, z)
    } else {
        phi_recurrence(l, z)
    }
}

/// Evaluates φ_l(z) directly, choosing between the power series and the
/// recurrence by the size of `z`.
pub fn phi_scalar(l: usize, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if l > MAX_PHI_INDEX {
        return Err(Error::InvalidInput(format!(
            "phi index {l} exceeds {MAX_PHI_INDEX}"
        )));
    }
    Ok(phi_unchecked(l, z))
}

/// Quadrature settings for the circle contour around each eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub points: usize,
    pub radius: f64,
    pub use_real_symmetry: bool,
}

impl ContourSpec {
    pub fn new(points: usize) -> Result<Self> {
        let spec = ContourSpec {
            points,
            radius: 1.0,
            use_real_symmetry: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 64 points in 1D and 32 in 2D/3D.
    pub fn for_dims(dims: usize) -> Self {
        ContourSpec {
            points: if dims <= 1 { 64 } else { 32 },
            radius: 1.0,
            use_real_symmetry: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidInput(format!(
                "contour needs at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "contour radius must be positive, got {}",
                self.radius
            )));
        }
        Ok(())
    }

    pub fn nodes(&self) -> ContourNodes {
        let m = self.points as f64;
        let full = (1..=self.points)
            .map(|k| Complex64::from_polar(self.radius, 2.0 * PI * (k as f64 - 0.5) / m))
            .collect();
        let half = (1..=self.points)
            .map(|k| Complex64::from_polar(self.radius, PI * (k as f64 - 0.5) / m))
            .collect();
        ContourNodes {
            full,
            half,
            use_real_symmetry: self.use_real_symmetry,
        }
    }
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec::for_dims(1)
    }
}

/// Precomputed offsets `r·e^{iθ_k}` for one [`ContourSpec`].
#[derive(Clone, Debug)]
pub struct ContourNodes {
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    use_real_symmetry: bool,
}

impl ContourNodes {
    /// Trapezoidal mean of `f` over the circle about `center`.
    ///
    /// A real `center` uses the upper half circle and keeps the real part, so
    /// the result has an exactly zero imaginary part.
    pub fn mean(&self, center: Complex64, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.mean_split(center, |c, w| f(c + w))
    }

    /// Elementwise mean of an array-valued `f`.
    pub(crate) fn mean_array<const M: usize>(
        &self,
        center: Complex64,
        f: impl Fn(Complex64) -> [Complex64; M],
    ) -> [Complex64; M] {
        let mut acc = [Complex64::new(0.0, 0.0); M];
        if self.use_real_symmetry && center.im == 0.0 {
            for &w in &self.half {
                for (a, v) in acc.iter_mut().zip(f(center + w)) {
                    a.re += v.re;
                }
            }
            acc.iter_mut().for_each(|a| *a /= self.half.len() as f64);
        } else {
            for &w in &self.full {
                for (a, v) in acc.iter_mut().zip(f(center + w)) {
                    *a += v;
                }
            }
            acc.iter_mut().for_each(|a| *a /= self.full.len() as f64);
        }
        acc
    }

    /// As [`mean`](Self::mean), with `f` given the centre and the node
    /// offset separately.
    pub fn mean_split(&self, center: Complex64, f: impl Fn(Complex64, Complex64) -> Complex64) -> Complex64 {
        if self.use_real_symmetry && center.im == 0.0 {
            let sum: f64 = self.half.iter().map(|&w| f(center, w).re).sum();
            Complex64::new(sum / self.half.len() as f64, 0.0)
        } else {
            let sum: Complex64 = self.full.iter().map(|&w| f(center, w)).sum();
            sum / self.full.len() as f64
        }
    }
}

/// φ_l(λ) as the contour mean of [`phi_scalar`] around λ.
pub fn phi_contour(l: usize, lambda: Complex64, spec: &ContourSpec) -> Result<Complex64> {
    spec.validate()?;
    phi_scalar(l, lambda)?;
    Ok(spec.nodes().mean_split(lambda, |c, w| phi_at_offset(l, c, w)))
}

/// Coefficients of the Newton binomial `C(s, j)` as a polynomial in `s`.
fn binomial_poly(j: usize) -> [f64; MAX_GAMMA_INDEX + 1] {
    // C(s, j) = s (s-1) ... (s-j+1) / j!
    let mut poly = [0.0; MAX_GAMMA_INDEX + 1];
    poly[0] = 1.0;
    for i in 0..j {
        for d in (0..=i).rev() {
            poly[d + 1] += poly[d];
            poly[d] *= -(i as f64);
        }
    }
    let scale = inv_factorial(j);
    poly.iter_mut().for_each(|c| *c *= scale);
    poly
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// γ_j(k, z) through the φ-functions:
/// `∫_0^k e^{(k−s)z} C(s, j) ds = Σ_m a_m m! k^{m+1} φ_{m+1}(kz)`.
pub(crate) fn gamma_phi_form(j: usize, k: usize, z: Complex64) -> Complex64 {
    let kz = z * k as f64;
    gamma_from_phis(j, k, |m| phi_unchecked(m, kz))
}

/// The φ-form sum with `phi(m)` supplying φ_m(kz).
fn gamma_from_phis(j: usize, k: usize, phi: impl Fn(usize) -> Complex64) -> Complex64 {
    let kf = k as f64;
    binomial_poly(j)[..=j]
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0.0)
        .map(|(m, &a)| phi(m + 1) * (a * factorial(m) * kf.powi(m as i32 + 1)))
        .sum()
}

/// The forward recurrence for γ_0..=γ_j at fixed k.
fn gamma_recurrence_all(j: usize, k: usize, z: Complex64) -> [Complex64; MAX_GAMMA_INDEX + 1] {
    let mut g = [Complex64::new(0.0, 0.0); MAX_GAMMA_INDEX + 1];
    g[0] = ((z * k as f64).exp() - 1.0) / z;
    for i in 1..=j {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 1..=i {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            acc += g[i - m] * (sign / m as f64);
        }
        if i <= k {
            acc -= binomial(k, i);
        }
        g[i] = acc / z;
    }
    g
}

pub(crate) fn gamma_recurrence(j: usize, k: usize, z: Complex64) -> Complex64 {
    gamma_recurrence_all(j, k, z)[j]
}

fn gamma_radius(j: usize, k: usize) -> f64 {
    // γ_j(k, ·) behaves like k^{j+1}·φ_{j+1}(k·): the recurrence loses about
    // (j+1)!/|kz|^{j+1} relative digits.
    series_radius(j + 1) / k as f64 + 0.5
}

pub(crate) fn gamma_unchecked(j: usize, k: usize, z: Complex64) -> Complex64 {
    if z.norm() < gamma_radius(j, k) {
        gamma_phi_form(j, k, z)
    } else {
        gamma_recurrence(j, k, z)
    }
}

/// γ_0..=γ_jmax at step k, each by the same branch rule as
/// [`gamma_unchecked`] but sharing one recurrence pass and one set of φ-values.
pub(crate) fn gamma_all(jmax: usize, k: usize, z: Complex64) -> [Complex64; MAX_GAMMA_INDEX + 1] {
    let r = z.norm();
    // gamma_radius grows with j, so the series-form indices come last.
    let first_series = (0..=jmax).find(|&j| r < gamma_radius(j, k)).unwrap_or(jmax + 1);
    let mut out = if first_series > 0 {
        gamma_recurrence_all(first_series - 1, k, z)
    } else {
        [Complex64::new(0.0, 0.0); MAX_GAMMA_INDEX + 1]
    };
    if first_series <= jmax {
        let kz = z * k as f64;
        let mut phis = [Complex64::new(0.0, 0.0); MAX_GAMMA_INDEX + 2];
        for (m, p) in phis.iter_mut().enumerate().take(jmax + 2).skip(1) {
            *p = phi_unchecked(m, kz);
        }
        for (j, o) in out.iter_mut().enumerate().take(jmax + 1).skip(first_series) {
            *o = gamma_from_phis(j, k, |m| phis[m]);
        }
    }
    out
}

/// γ_j(k, z), the exponential Adams starting coefficients.
pub fn gamma_scalar(j: usize, k: usize, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if j > MAX_GAMMA_INDEX {
        return Err(Error::InvalidInput(format!(
            "gamma index {j} exceeds {MAX_GAMMA_INDEX}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("gamma step k must be positive".into()));
    }
    Ok(gamma_unchecked(j, k, z))
}

/// γ_j(k, λ) as the contour mean of [`gamma_scalar`] around λ.
pub fn gamma_contour(j: usize, k: usize, lambda: Complex64, spec: &ContourSpec) -> Result<Complex64> {
    spec.validate()?;
    gamma_scalar(j, k, lambda)?;
    Ok(spec.nodes().mean(lambda, |z| gamma_unchecked(j, k, z)))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

pub(crate) fn inv_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc / i as f64)
}
