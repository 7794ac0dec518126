use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use super::grid::Grid;
use super::symbol::SpectralSymbol;
use super::transform::FftPlan;
use crate::error::{Error, Result};
use crate::integrator::SemilinearSystem;
use crate::par::Execution;

/// Pointwise map from the component values at one grid point to the
/// nonlinear term's components there.
pub type Pointwise = dyn Fn(&[Complex64], &mut [Complex64]) + Send + Sync;

/// Value-space nonlinearity, optionally followed by a diagonal operator
/// per component (KdV's `−∂_x/2`, Cahn–Hilliard's `α∂²_x`).
#[derive(Clone)]
pub struct NonlinearOp {
    components: usize,
    pointwise: Arc<Pointwise>,
    outer: Option<Vec<SpectralSymbol>>,
}

impl std::fmt::Debug for NonlinearOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearOp")
            .field("components", &self.components)
            .field("outer", &self.outer.is_some())
            .finish()
    }
}

impl NonlinearOp {
    pub fn new(
        components: usize,
        f: impl Fn(&[Complex64], &mut [Complex64]) + Send + Sync + 'static,
    ) -> Self {
        NonlinearOp {
            components,
            pointwise: Arc::new(f),
            outer: None,
        }
    }

    pub fn scalar(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        NonlinearOp::new(1, move |u, out| out[0] = f(u[0]))
    }

    pub fn with_outer(mut self, outer: Vec<SpectralSymbol>) -> Self {
        assert_eq!(outer.len(), self.components, "one outer symbol per component");
        self.outer = Some(outer);
        self
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn outer(&self) -> Option<&[SpectralSymbol]> {
        self.outer.as_deref()
    }

    /// Applies the pointwise map to component value arrays.
    pub fn eval_values(&self, values: &[Vec<Complex64>], exec: Execution) -> Vec<Vec<Complex64>> {
        let m = self.components;
        let n = values[0].len();
        const CHUNK: usize = 2048;
        let mut packed = vec![Complex64::zero(); n * m];
        exec.for_each_chunk(&mut packed, CHUNK * m, |ci, chunk| {
            let mut u = vec![Complex64::zero(); m];
            for (k, out) in chunk.chunks_mut(m).enumerate() {
                let i = ci * CHUNK + k;
                for c in 0..m {
                    u[c] = values[c][i];
                }
                (self.pointwise)(&u, out);
            }
        });
        (0..m)
            .map(|c| packed.iter().skip(c).step_by(m).copied().collect())
            .collect()
    }
}

fn nonlinear_into(
    plan: &FftPlan,
    op: &NonlinearOp,
    real: bool,
    exec: Execution,
    coeffs: &[Complex64],
    out: &mut [Complex64],
) {
    let n = plan.grid().len();
    let values: Vec<Vec<Complex64>> = coeffs
        .chunks(n)
        .map(|c| plan.to_values(c, real, exec).expect("shape checked by caller"))
        .collect();
    let nv = op.eval_values(&values, exec);
    for (c, (mut v, dst)) in nv.into_iter().zip(out.chunks_mut(n)).enumerate() {
        plan.forward_in_place(&mut v, exec).expect("shape checked by caller");
        match op.outer() {
            Some(outer) => {
                for ((d, x), s) in dst.iter_mut().zip(&v).zip(outer[c].values()) {
                    *d = x * s;
                }
            }
            None => dst.copy_from_slice(&v),
        }
    }
}

/// `F(N(F⁻¹ û))` for every component, times the outer symbol if any.
/// `coeffs` holds the components back to back.
pub fn apply_nonlinear(
    coeffs: &[Complex64],
    op: &NonlinearOp,
    plan: &FftPlan,
    real: bool,
    exec: Execution,
) -> Result<Vec<Complex64>> {
    let n = plan.grid().len();
    if coeffs.len() != n * op.components() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} components on {} points",
            coeffs.len(),
            op.components(),
            n
        )));
    }
    let mut out = vec![Complex64::zero(); coeffs.len()];
    nonlinear_into(plan, op, real, exec, coeffs, &mut out);
    if out.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(Error::NonFinite("nonlinear term".into()));
    }
    Ok(out)
}

/// A semidiscretized PDE: diagonal linear part over all components and a
/// pseudospectral nonlinear part.
#[derive(Debug)]
pub struct SpectralSystem {
    plan: FftPlan,
    linear: Vec<Complex64>,
    op: NonlinearOp,
    real: bool,
    exec: Execution,
}

impl SpectralSystem {
    pub fn new(
        grid: &Grid,
        linear: &[SpectralSymbol],
        op: NonlinearOp,
        real: bool,
        exec: Execution,
    ) -> Result<Self> {
        if linear.len() != op.components() {
            return Err(Error::Dimension(format!(
                "{} linear symbols for {} components",
                linear.len(),
                op.components()
            )));
        }
        let mut diag = Vec::with_capacity(grid.len() * linear.len());
        for s in linear {
            if s.len() != grid.len() {
                return Err(Error::Dimension("linear symbol does not match the grid".into()));
            }
            diag.extend_from_slice(s.values());
        }
        Ok(SpectralSystem {
            plan: FftPlan::new(grid),
            linear: diag,
            op,
            real,
            exec,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.plan.grid()
    }

    pub fn plan(&self) -> &FftPlan {
        &self.plan
    }

    pub fn components(&self) -> usize {
        self.op.components()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// FFTs performed by nonlinear evaluations so far.
    pub fn fft_count(&self) -> usize {
        self.plan.count()
    }

    /// Coefficients of all components from their value arrays. Not counted
    /// in [`SpectralSystem::fft_count`].
    pub fn coeffs_from_values(&self, values: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        let before = self.plan.count();
        let mut out = Vec::with_capacity(self.linear.len());
        for v in values {
            out.extend(self.plan.to_coeffs(v, self.exec)?);
        }
        self.plan.set_count(before);
        Ok(out)
    }

    /// Value arrays of all components. Not counted in
    /// [`SpectralSystem::fft_count`].
    pub fn values_from_coeffs(&self, coeffs: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let before = self.plan.count();
        let out = coeffs
            .chunks(self.grid().len())
            .map(|c| self.plan.to_values(c, self.real, self.exec))
            .collect::<Result<Vec<_>>>()?;
        self.plan.set_count(before);
        Ok(out)
    }
}

impl SemilinearSystem for SpectralSystem {
    fn linear(&self) -> &[Complex64] {
        &self.linear
    }

    fn nonlinear(&self, u: &[Complex64], out: &mut [Complex64]) {
        nonlinear_into(&self.plan, &self.op, self.real, self.exec, u, out);
    }
}
