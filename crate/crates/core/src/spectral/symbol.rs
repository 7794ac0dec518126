use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::grid::{wavenumbers, Grid};
use crate::error::{Error, Result};

/// Diagonal of a constant-coefficient operator in the Fourier basis of a
/// grid, in the same flat order as the coefficient arrays.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSymbol {
    sizes: Vec<usize>,
    values: Vec<Complex64>,
}

impl SpectralSymbol {
    pub fn constant(grid: &Grid, c: Complex64) -> Self {
        SpectralSymbol {
            sizes: grid.sizes().to_vec(),
            values: vec![c; grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "symbol has {} entries, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(SpectralSymbol {
            sizes: grid.sizes().to_vec(),
            values,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SpectralSymbol {
            sizes: self.sizes.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.sizes, other.sizes, "symbols live on different grids");
        SpectralSymbol {
            sizes: self.sizes.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Largest real part over all modes.
    pub fn max_real(&self) -> f64 {
        self.values.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Add for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn add(self, o: &SpectralSymbol) -> SpectralSymbol {
        self.zip(o, |a, b| a + b)
    }
}

impl Sub for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn sub(self, o: &SpectralSymbol) -> SpectralSymbol {
        self.zip(o, |a, b| a - b)
    }
}

impl Mul for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn mul(self, o: &SpectralSymbol) -> SpectralSymbol {
        self.zip(o, |a, b| a * b)
    }
}

impl Mul<Complex64> for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn mul(self, c: Complex64) -> SpectralSymbol {
        self.map(|a| a * c)
    }
}

impl Mul<f64> for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn mul(self, c: f64) -> SpectralSymbol {
        self.map(|a| a * c)
    }
}

impl Add<f64> for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn add(self, c: f64) -> SpectralSymbol {
        self.map(|a| a + c)
    }
}

impl Neg for &SpectralSymbol {
    type Output = SpectralSymbol;
    fn neg(self) -> SpectralSymbol {
        self.map(|a| -a)
    }
}

/// `(ik)^p` written out so that real and imaginary zeros are exact.
fn ik_pow(k: f64, p: u32) -> Complex64 {
    match p % 4 {
        0 => Complex64::new(k.powi(p as i32), 0.0),
        1 => Complex64::new(0.0, k.powi(p as i32)),
        2 => Complex64::new(-k.powi(p as i32), 0.0),
        _ => Complex64::new(0.0, -k.powi(p as i32)),
    }
}

/// Symbol of `∂^p/∂x_axis^p`, broadcast over the grid.
///
/// For odd `p` the Nyquist mode `−N/2` is set to zero: with the stored
/// Nyquist coefficient standing for both `±N/2`, the odd derivative has no
/// consistent sign, and zeroing it keeps real fields real.
pub fn diff_symbol(p: u32, axis: usize, grid: &Grid) -> Result<SpectralSymbol> {
    if !(1..=4).contains(&p) {
        return Err(Error::InvalidInput(format!("derivative order must be in 1..=4, got {p}")));
    }
    if axis >= grid.dims() {
        return Err(Error::InvalidInput(format!(
            "axis {axis} out of range for a {}-D grid",
            grid.dims()
        )));
    }
    let n = grid.sizes()[axis];
    let k = wavenumbers(n, grid.domain()[axis])?;
    let line: Vec<Complex64> = k
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            if p % 2 == 1 && j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                ik_pow(k, p)
            }
        })
        .collect();
    let stride = grid.stride(axis);
    let values = (0..grid.len()).map(|i| line[(i / stride) % n]).collect();
    Ok(SpectralSymbol {
        sizes: grid.sizes().to_vec(),
        values,
    })
}

/// `Σ_axis ∂²/∂x_axis²`: the Kronecker sum `I ⊗ D² + D² ⊗ I` in 2D.
pub fn laplacian(grid: &Grid) -> SpectralSymbol {
    (0..grid.dims())
        .map(|a| diff_symbol(2, a, grid).expect("valid axis"))
        .reduce(|acc, s| &acc + &s)
        .expect("grids have at least one axis")
}
