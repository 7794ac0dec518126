use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::par::Execution;

/// Lines handed to one worker at a time.
const LINES_PER_TASK: usize = 16;

/// Multi-dimensional FFT plans for one grid.
///
/// Forward transforms are scaled by `1/Π sizes` and inverse transforms are
/// not, so `û_k = (1/N) Σ_j u_j e^{−2πi jk/N}` per axis. Coefficients are
/// relative to the left end of each interval. Every full transform of one
/// component increments [`FftPlan::count`].
pub struct FftPlan {
    grid: Grid,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    count: AtomicUsize,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan")
            .field("grid", &self.grid)
            .field("count", &self.count())
            .finish()
    }
}

impl Clone for FftPlan {
    fn clone(&self) -> Self {
        FftPlan {
            grid: self.grid.clone(),
            forward: self.forward.clone(),
            inverse: self.inverse.clone(),
            count: AtomicUsize::new(self.count()),
        }
    }
}

impl FftPlan {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            grid: grid.clone(),
            forward: grid.sizes().iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: grid.sizes().iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
            count: AtomicUsize::new(0),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Full transforms performed so far.
    pub fn count(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.count.store(0, Ordering::Relaxed);
    }

    pub(crate) fn set_count(&self, n: usize) {
        self.count.store(n, Ordering::Relaxed);
    }

    fn check(&self, data: &[Complex64]) -> Result<()> {
        if data.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "array has {} entries, grid has {}",
                data.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    /// Values to coefficients, in place.
    pub fn forward_in_place(&self, data: &mut [Complex64], exec: Execution) -> Result<()> {
        self.check(data)?;
        for axis in 0..self.grid.dims() {
            transform_axis(&self.grid, &self.forward[axis], axis, data, exec);
        }
        let scale = 1.0 / self.grid.len() as f64;
        exec.for_each_chunk(data, 1 << 14, |_, c| c.iter_mut().for_each(|x| *x *= scale));
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// Coefficients to values, in place.
    pub fn inverse_in_place(&self, data: &mut [Complex64], exec: Execution) -> Result<()> {
        self.check(data)?;
        for axis in 0..self.grid.dims() {
            transform_axis(&self.grid, &self.inverse[axis], axis, data, exec);
        }
        self.count.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    pub fn to_coeffs(&self, values: &[Complex64], exec: Execution) -> Result<Vec<Complex64>> {
        let mut out = values.to_vec();
        self.forward_in_place(&mut out, exec)?;
        Ok(out)
    }

    /// With `real`, imaginary parts are dropped after the transform.
    pub fn to_values(&self, coeffs: &[Complex64], real: bool, exec: Execution) -> Result<Vec<Complex64>> {
        let mut out = coeffs.to_vec();
        self.inverse_in_place(&mut out, exec)?;
        if real {
            out.iter_mut().for_each(|x| x.im = 0.0);
        }
        Ok(out)
    }
}

fn transform_axis(
    grid: &Grid,
    fft: &Arc<dyn Fft<f64>>,
    axis: usize,
    data: &mut [Complex64],
    exec: Execution,
) {
    let n = grid.sizes()[axis];
    let stride = grid.stride(axis);
    if stride == 1 {
        // Lines are contiguous.
        exec.for_each_chunk(data, n * LINES_PER_TASK, |_, chunk| {
            let mut scratch = vec![Complex64::zero(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
        return;
    }
    // Line (o, s) holds entries o·n·stride + s + k·stride, k = 0..n.
    let lines = grid.len() / n;
    let tasks = lines.div_ceil(LINES_PER_TASK);
    let shared: &[Complex64] = data;
    let done: Vec<Vec<Complex64>> = exec.map_range(tasks, |t| {
        let first = t * LINES_PER_TASK;
        let last = (first + LINES_PER_TASK).min(lines);
        let mut buf = Vec::with_capacity((last - first) * n);
        for line in first..last {
            let base = (line / stride) * n * stride + line % stride;
            buf.extend((0..n).map(|k| shared[base + k * stride]));
        }
        let mut scratch = vec![Complex64::zero(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(&mut buf, &mut scratch);
        buf
    });
    for (t, buf) in done.iter().enumerate() {
        for (j, line) in buf.chunks(n).enumerate() {
            let line_idx = t * LINES_PER_TASK + j;
            let base = (line_idx / stride) * n * stride + line_idx % stride;
            for (k, &v) in line.iter().enumerate() {
                data[base + k * stride] = v;
            }
        }
    }
}

/// One-off forward transform; see [`FftPlan`].
pub fn to_coeffs(values: &[Complex64], grid: &Grid) -> Result<Vec<Complex64>> {
    FftPlan::new(grid).to_coeffs(values, Execution::default())
}

/// One-off inverse transform; see [`FftPlan`].
pub fn to_values(coeffs: &[Complex64], grid: &Grid, real: bool) -> Result<Vec<Complex64>> {
    FftPlan::new(grid).to_values(coeffs, real, Execution::default())
}
