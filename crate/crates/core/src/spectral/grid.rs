use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic tensor grid on a box `[a_0, b_0) × … × [a_{d−1}, b_{d−1})`.
///
/// Flat arrays run over x fastest, then y, then z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    sizes: Vec<usize>,
    domain: Vec<(f64, f64)>,
}

impl Grid {
    pub fn new(sizes: &[usize], domain: &[(f64, f64)]) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 {
            return Err(Error::InvalidInput(format!(
                "grids have 1 to 3 axes, got {}",
                sizes.len()
            )));
        }
        if sizes.len() != domain.len() {
            return Err(Error::Dimension(format!(
                "{} sizes but {} intervals",
                sizes.len(),
                domain.len()
            )));
        }
        for (axis, (&n, &(a, b))) in sizes.iter().zip(domain).enumerate() {
            if n == 0 || n % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "axis {axis}: size must be even and positive, got {n}"
                )));
            }
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::InvalidInput(format!(
                    "axis {axis}: degenerate interval [{a}, {b})"
                )));
            }
        }
        Ok(Grid {
            sizes: sizes.to_vec(),
            domain: domain.to_vec(),
        })
    }

    /// `n` points per axis on the same interval in every direction.
    pub fn cube(dims: usize, n: usize, interval: (f64, f64)) -> Result<Self> {
        Grid::new(&vec![n; dims], &vec![interval; dims])
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Total number of points.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance between flat-index neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.sizes[..axis].iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (a, b) = self.domain[axis];
        (b - a) / self.sizes[axis] as f64
    }

    /// `x_j = a + j(b − a)/N`, `j = 0..N`.
    pub fn axis_points(&self, axis: usize) -> Vec<f64> {
        let (a, _) = self.domain[axis];
        let dx = self.spacing(axis);
        (0..self.sizes[axis]).map(|j| a + j as f64 * dx).collect()
    }

    /// Index along `axis` of flat index `i`.
    pub fn axis_index(&self, i: usize, axis: usize) -> usize {
        (i / self.stride(axis)) % self.sizes[axis]
    }

    /// Evaluates `f` at every grid point, in flat order.
    pub fn sample<T>(&self, f: impl Fn(&[f64]) -> T) -> Vec<T> {
        let pts: Vec<Vec<f64>> = (0..self.dims()).map(|a| self.axis_points(a)).collect();
        let mut x = vec![0.0; self.dims()];
        (0..self.len())
            .map(|i| {
                for (axis, xa) in x.iter_mut().enumerate() {
                    *xa = pts[axis][self.axis_index(i, axis)];
                }
                f(&x)
            })
            .collect()
    }

    /// Center of the box.
    pub fn center(&self) -> Vec<f64> {
        self.domain.iter().map(|&(a, b)| 0.5 * (a + b)).collect()
    }
}

/// Angular wavenumbers of an `n`-point periodic axis on `[a, b)`, in FFT
/// storage order: `0, 1, …, n/2 − 1, −n/2, …, −1`, times `2π/(b − a)`.
pub fn wavenumbers(n: usize, interval: (f64, f64)) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!("wavenumbers need an even size, got {n}")));
    }
    if !(b > a) {
        return Err(Error::InvalidInput(format!("degenerate interval [{a}, {b})")));
    }
    let scale = 2.0 * PI / (b - a);
    Ok((0..n)
        .map(|j| {
            let k = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            k * scale
        })
        .collect())
}
