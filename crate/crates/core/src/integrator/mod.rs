//! Time stepping: coefficient precomputation, the exponential GLM step,
//! the multistep starting procedure and the integration driver.

mod genlawson;
mod run;
mod snapshot;
mod starter;

use std::collections::VecDeque;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::phifun::{phi_unchecked, ratio_f64, ContourSpec, PhiCache, PhiExpr};
use crate::tableau::Tableau;

pub use genlawson::GenLawsonStepper;
pub use run::{integrate, snap_steps, IntegrateOptions, Method, Run};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SNAPSHOT_VERSION};
pub use starter::{start_multistep, Delta0, StarterOptions, StarterReport, StartingValues};

/// `u' = Lu + N(u)` with diagonal `L`, in coefficient space.
///
/// Multi-component systems concatenate their components in one vector.
pub trait SemilinearSystem: Sync {
    /// Diagonal of `L`.
    fn linear(&self) -> &[Complex64];

    /// Writes `N(u)` into `out`.
    fn nonlinear(&self, u: &[Complex64], out: &mut [Complex64]);

    fn len(&self) -> usize {
        self.linear().len()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn eval_n<S: SemilinearSystem + ?Sized>(sys: &S, u: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); u.len()];
    sys.nonlinear(u, &mut out);
    out
}

type Coeffs = Option<Vec<Complex64>>;

/// A tableau evaluated at `hL`, with every weight already multiplied by `h`.
#[derive(Clone, Debug)]
pub struct PrecomputedScheme {
    pub tableau: Tableau,
    pub h: f64,
    pub contour: ContourSpec,
    /// `e^{c_i hL}` per stage.
    pub stage_propagators: Vec<Propagator>,
    /// `e^{hL}`.
    pub propagator: Propagator,
    pub a: Vec<Vec<Coeffs>>,
    pub b: Vec<Coeffs>,
    pub u: Vec<Vec<Coeffs>>,
    pub v: Vec<Coeffs>,
}

/// Evaluates every slot of `t` over `h·diag`.
pub fn precompute(
    t: &Tableau,
    h: f64,
    diag: &[Complex64],
    contour: &ContourSpec,
    cache: Option<&PhiCache>,
    exec: Execution,
) -> Result<PrecomputedScheme> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {h}")));
    }
    if !t.summation_filled {
        return Err(Error::InvalidOperation(format!(
            "{}: summation properties not completed",
            t.name
        )));
    }
    t.validate()?;
    let z: Vec<Complex64> = diag.iter().map(|l| l * h).collect();
    let local;
    let cache = match cache {
        Some(c) => c,
        None => {
            local = PhiCache::new();
            &local
        }
    };
    let eval = |c: &Option<PhiExpr>| -> Result<Coeffs> {
        match c {
            Some(e) if !e.is_zero() => {
                let mut vals = cache.eval(e, &z, contour, exec)?;
                vals.iter_mut().for_each(|x| *x *= h);
                Ok(Some(vals))
            }
            _ => Ok(None),
        }
    };
    let row = |r: &[Option<PhiExpr>]| r.iter().map(&eval).collect::<Result<Vec<_>>>();
    let expo = |c: f64| Propagator::new(z.iter().map(|z| z * c));
    Ok(PrecomputedScheme {
        tableau: t.clone(),
        h,
        contour: *contour,
        stage_propagators: t.c.iter().map(|&c| expo(ratio_f64(c))).collect(),
        propagator: expo(1.0),
        a: t.a.iter().map(|r| row(r)).collect::<Result<_>>()?,
        b: row(&t.b)?,
        u: t.u.iter().map(|r| row(r)).collect::<Result<_>>()?,
        v: row(&t.v)?,
    })
}

/// Solution coefficients plus the `q−1` most recent nonlinear evaluations,
/// newest first.
#[derive(Clone, Debug)]
pub struct SimState {
    pub u: Vec<Complex64>,
    pub history: VecDeque<Vec<Complex64>>,
    pub step: usize,
    pub time: f64,
    blowup_limit: f64,
}

/// A state is declared unstable above this multiple of its initial max-norm.
pub const BLOWUP_FACTOR: f64 = 1e10;

pub(crate) fn max_norm(u: &[Complex64]) -> f64 {
    u.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

impl SimState {
    /// Fresh state at `t = 0`. A zero initial field measures blow-up
    /// against 1.
    pub fn new(u0: Vec<Complex64>) -> Self {
        let scale = max_norm(&u0);
        let scale = if scale > 0.0 { scale } else { 1.0 };
        SimState {
            u: u0,
            history: VecDeque::new(),
            step: 0,
            time: 0.0,
            blowup_limit: BLOWUP_FACTOR * scale,
        }
    }

    pub(crate) fn with_limit_of(mut self, other: &SimState) -> Self {
        self.blowup_limit = other.blowup_limit;
        self
    }

    pub fn blowup_limit(&self) -> f64 {
        self.blowup_limit
    }

    pub(crate) fn check(&self, v: &[Complex64], step: usize, time: f64) -> Result<()> {
        let ok = v
            .iter()
            .all(|x| x.re.is_finite() && x.im.is_finite() && x.norm() <= self.blowup_limit);
        if ok {
            Ok(())
        } else {
            Err(Error::Unstable { step, time })
        }
    }
}

const CHUNK: usize = 4096;

/// A diagonal exponential `e^z` held as `shift + shifted`.
///
/// Entries with `|z| < 1` keep `e^z − 1` and a unit shift, so the solution
/// is updated as `u + ((e^z − 1)u + …)`: the rounding error of `e^z` is then
/// relative to `z` rather than to 1 and does not pile up over many steps.
/// Strongly damped or growing entries keep `e^z` itself, where the shifted
/// form would cancel.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    pub shifted: Vec<Complex64>,
    pub shift: Vec<f64>,
}

impl Propagator {
    pub(crate) fn new(z: impl Iterator<Item = Complex64>) -> Self {
        let (shifted, shift) = z
            .map(|z| if z.norm() < 1.0 { (expm1(z), 1.0) } else { (z.exp(), 0.0) })
            .unzip();
        Propagator { shifted, shift }
    }

    pub fn len(&self) -> usize {
        self.shift.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shift.is_empty()
    }

    /// `e^z` at entry `i`.
    pub fn value(&self, i: usize) -> Complex64 {
        self.shifted[i] + self.shift[i]
    }
}

/// `e^z − 1` without cancellation near zero.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        z * phi_unchecked(1, z)
    } else {
        z.exp() - 1.0
    }
}

/// `out = prop ∘ base + Σ coef_k ∘ vec_k`, entrywise, adding the shifted
/// part of `base` last.
pub(crate) fn combine(
    exec: Execution,
    out: &mut [Complex64],
    prop: &Propagator,
    base: &[Complex64],
    terms: &[(&[Complex64], &[Complex64])],
) {
    exec.for_each_chunk(out, CHUNK, |ci, chunk| {
        let off = ci * CHUNK;
        for (k, o) in chunk.iter_mut().enumerate() {
            let i = off + k;
            let mut acc = prop.shifted[i] * base[i];
            for (c, v) in terms {
                acc += c[i] * v[i];
            }
            *o = base[i] * prop.shift[i] + acc;
        }
    });
}

impl PrecomputedScheme {
    pub fn stages(&self) -> usize {
        self.stage_propagators.len()
    }

    pub fn steps(&self) -> usize {
        self.v.len() + 1
    }

    /// One step of the exponential GLM. Evaluates `N` once per stage.
    pub fn step<S: SemilinearSystem + ?Sized>(
        &self,
        state: &mut SimState,
        sys: &S,
        exec: Execution,
    ) -> Result<()> {
        let n = state.u.len();
        if n != self.propagator.len() {
            return Err(Error::Dimension(format!(
                "state has {n} coefficients, scheme was precomputed for {}",
                self.propagator.len()
            )));
        }
        let q1 = self.steps() - 1;
        if state.history.len() < q1 {
            return Err(Error::InvalidOperation(format!(
                "{} needs {q1} past evaluations, have {}",
                self.tableau.name,
                state.history.len()
            )));
        }
        let next_step = state.step + 1;
        let next_time = next_step as f64 * self.h;
        let mut evals: Vec<Vec<Complex64>> = Vec::with_capacity(self.stages());
        evals.push(eval_n(sys, &state.u));
        state.check(&evals[0], next_step, next_time)?;
        let mut stage = vec![Complex64::zero(); n];
        for i in 1..self.stages() {
            let mut terms: Vec<(&[Complex64], &[Complex64])> = Vec::new();
            for (j, c) in self.a[i].iter().enumerate() {
                if let Some(c) = c {
                    terms.push((c, &evals[j]));
                }
            }
            for (j, c) in self.u[i].iter().enumerate() {
                if let Some(c) = c {
                    terms.push((c, &state.history[j]));
                }
            }
            combine(exec, &mut stage, &self.stage_propagators[i], &state.u, &terms);
            state.check(&stage, next_step, next_time)?;
            let ni = eval_n(sys, &stage);
            state.check(&ni, next_step, next_time)?;
            evals.push(ni);
        }
        let mut terms: Vec<(&[Complex64], &[Complex64])> = Vec::new();
        for (j, c) in self.b.iter().enumerate() {
            if let Some(c) = c {
                terms.push((c, &evals[j]));
            }
        }
        for (j, c) in self.v.iter().enumerate() {
            if let Some(c) = c {
                terms.push((c, &state.history[j]));
            }
        }
        combine(exec, &mut stage, &self.propagator, &state.u, &terms);
        state.check(&stage, next_step, next_time)?;
        if q1 > 0 {
            let first = evals.swap_remove(0);
            state.history.push_front(first);
            state.history.truncate(q1);
        }
        state.u = stage;
        state.step = next_step;
        state.time = next_time;
        Ok(())
    }
}

/// Scalar test equation `u' = λu + f(u)`.
pub struct ScalarSystem<F> {
    lambda: [Complex64; 1],
    f: F,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> ScalarSystem<F> {
    pub fn new(lambda: f64, f: F) -> Self {
        ScalarSystem {
            lambda: [Complex64::new(lambda, 0.0)],
            f,
        }
    }

    pub fn complex(lambda: Complex64, f: F) -> Self {
        ScalarSystem { lambda: [lambda], f }
    }
}

impl<F: Fn(Complex64) -> Complex64 + Sync> SemilinearSystem for ScalarSystem<F> {
    fn linear(&self) -> &[Complex64] {
        &self.lambda
    }

    fn nonlinear(&self, u: &[Complex64], out: &mut [Complex64]) {
        out[0] = (self.f)(u[0]);
    }
}

/// Diagonal linear system with `N ≡ 0`.
pub struct LinearSystem {
    pub diag: Vec<Complex64>,
}

impl SemilinearSystem for LinearSystem {
    fn linear(&self) -> &[Complex64] {
        &self.diag
    }

    fn nonlinear(&self, _u: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|x| *x = Complex64::zero());
    }
}
