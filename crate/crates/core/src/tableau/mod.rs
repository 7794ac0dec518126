//! Exponential general linear methods: the coefficient table, summation
//! completion, and the built-in scheme catalog.

mod catalog;
mod file;
mod order;

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phifun::PhiExpr;

pub use catalog::{
    ablawson4, abnorsett, build_abnorsett, build_pec, build_pecec, etd_ab_weights,
    etd_am_weights, etd_euler, etdrk2, etdrk4, gen_lawson, lawson4, lookup, registry, Scheme, SchemeInfo,
};
pub use file::{load_tableau_file, parse_tableau};
pub use order::{
    certification_ladder, certify_order, empirical_order, empirical_order_with, loglog_fit, OrderFit, ProbeKind,
    ScalarProbe, CERTIFY_ERROR_FLOOR,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    EtdRungeKutta,
    EtdAdamsBashforth,
    Lawson,
    GeneralizedLawson,
    ModifiedGeneralizedLawson,
    PredictorCorrector,
    External,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::EtdRungeKutta => "ETD Runge–Kutta",
            Family::EtdAdamsBashforth => "ETD Adams–Bashforth",
            Family::Lawson => "Lawson",
            Family::GeneralizedLawson => "Gen. Lawson",
            Family::ModifiedGeneralizedLawson => "Mod. Gen. Lawson",
            Family::PredictorCorrector => "Exp. Predictor-Corrector",
            Family::External => "External",
        }
    }
}

/// Optional coefficient; `None` is an absent (zero) entry, or a summation
/// placeholder before [`complete_summation`] runs.
pub type Coef = Option<PhiExpr>;

/// Coefficients (A, B, C, U, V) of an exponential general linear method
/// with `s` stages and `q` steps. Indices are zero-based: `a[i][j]` is the
/// weight of stage `j` in stage `i` (j < i), `u[i][j]` the weight of
/// `N(u^{n-1-j})` in stage `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tableau {
    pub name: String,
    pub family: Family,
    pub order: u32,
    pub c: Vec<Rational64>,
    pub a: Vec<Vec<Coef>>,
    pub b: Vec<Coef>,
    pub u: Vec<Vec<Coef>>,
    pub v: Vec<Coef>,
    pub summation_filled: bool,
    pub satisfies_summation: bool,
}

impl Tableau {
    /// An all-absent tableau of the given shape, first stage abscissa 0.
    pub fn empty(name: &str, family: Family, order: u32, stages: usize, steps: usize) -> Self {
        let mut c = vec![Rational64::zero(); stages];
        if let Some(first) = c.first_mut() {
            *first = Rational64::zero();
        }
        Tableau {
            name: name.to_string(),
            family,
            order,
            c,
            a: (0..stages).map(|i| vec![None; i]).collect(),
            b: vec![None; stages],
            u: (0..stages).map(|_| vec![None; steps.saturating_sub(1)]).collect(),
            v: vec![None; steps.saturating_sub(1)],
            summation_filled: false,
            satisfies_summation: true,
        }
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn steps(&self) -> usize {
        self.v.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        let q1 = self.v.len();
        let dim = |msg: String| Err(Error::Dimension(format!("{}: {msg}", self.name)));
        if s == 0 {
            return dim("no stages".into());
        }
        if !self.c[0].is_zero() {
            return dim(format!("first abscissa must be 0, got {}", self.c[0]));
        }
        if self.a.len() != s || self.b.len() != s || self.u.len() != s {
            return dim(format!("A, B, U must have {s} rows"));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != i {
                return dim(format!("row {} of A has {} entries, expected {i}", i + 1, row.len()));
            }
        }
        for (i, row) in self.u.iter().enumerate() {
            if row.len() != q1 {
                return dim(format!("row {} of U has {} entries, expected {q1}", i + 1, row.len()));
            }
        }
        if self.u[0].iter().any(Option::is_some) {
            return dim("the first stage cannot carry U coefficients".into());
        }
        let all = self
            .a
            .iter()
            .flatten()
            .chain(self.b.iter())
            .chain(self.u.iter().flatten())
            .chain(self.v.iter());
        for e in all.flatten() {
            e.validate()?;
        }
        Ok(())
    }

    /// Every present coefficient, for evaluation.
    pub fn coefficients(&self) -> impl Iterator<Item = &PhiExpr> {
        self.a
            .iter()
            .flatten()
            .chain(self.b.iter())
            .chain(self.u.iter().flatten())
            .chain(self.v.iter())
            .flatten()
    }

    /// `B_1 + Σ B_i + Σ V_i − φ_1` and, per stage i ≥ 2,
    /// `Σ_j A_ij + Σ_j U_ij − ψ_{1,i}`; all zero for a consistent scheme.
    pub fn summation_residuals(&self) -> Vec<PhiExpr> {
        let sum = |xs: &[Coef]| -> PhiExpr { xs.iter().flatten().cloned().sum() };
        let mut out = vec![sum(&self.b) + sum(&self.v) - PhiExpr::phi(1)];
        for i in 1..self.stages() {
            out.push(sum(&self.a[i]) + sum(&self.u[i]) - PhiExpr::psi(1, self.c[i]));
        }
        out
    }

    /// Exact `z = 0` values: (A, B, U, V) as rationals.
    pub fn at_zero(&self) -> ClassicalCoefficients {
        let z = |c: &Coef| c.as_ref().map_or(Rational64::zero(), PhiExpr::at_zero);
        ClassicalCoefficients {
            a: self.a.iter().map(|r| r.iter().map(z).collect()).collect(),
            b: self.b.iter().map(z).collect(),
            u: self.u.iter().map(|r| r.iter().map(z).collect()).collect(),
            v: self.v.iter().map(z).collect(),
        }
    }
}

/// A tableau evaluated at `L = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalCoefficients {
    pub a: Vec<Vec<Rational64>>,
    pub b: Vec<Rational64>,
    pub u: Vec<Vec<Rational64>>,
    pub v: Vec<Rational64>,
}

/// Fills `B_1` and each `A_{i,1}` from the summation properties.
///
/// Idempotent on filled tableaux; schemes that do not satisfy the
/// summation properties are rejected.
pub fn complete_summation(t: &Tableau) -> Result<Tableau> {
    if t.summation_filled {
        return Ok(t.clone());
    }
    if !t.satisfies_summation {
        return Err(Error::InvalidOperation(format!(
            "{} does not satisfy the summation properties",
            t.name
        )));
    }
    t.validate()?;
    let mut out = t.clone();
    let sum = |xs: &[Coef]| -> PhiExpr { xs.iter().flatten().cloned().sum() };
    out.b[0] = Some(PhiExpr::phi(1) - sum(&t.b[1..]) - sum(&t.v));
    for i in 1..t.stages() {
        out.a[i][0] = Some(PhiExpr::psi(1, t.c[i]) - sum(&t.a[i][1..]) - sum(&t.u[i]));
    }
    out.summation_filled = true;
    Ok(out)
}

fn fmt_coef(c: &Coef) -> String {
    match c {
        Some(e) => e.to_string(),
        None => "0".into(),
    }
}

/// Writes the tableau in the file grammar read by [`parse_tableau`].
impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "order = {}", self.order)?;
        writeln!(f, "stages = {}", self.stages())?;
        writeln!(f, "steps = {}", self.steps())?;
        writeln!(f, "summation = {}", self.satisfies_summation)?;
        let c: Vec<String> = self
            .c
            .iter()
            .map(|r| {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            })
            .collect();
        writeln!(f, "c = {}", c.join(" "))?;
        for (i, row) in self.a.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.is_some() {
                    writeln!(f, "A[{}][{}] = {}", i + 1, j + 1, fmt_coef(e))?;
                }
            }
        }
        for (i, e) in self.b.iter().enumerate() {
            if e.is_some() {
                writeln!(f, "B[{}] = {}", i + 1, fmt_coef(e))?;
            }
        }
        for (i, row) in self.u.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.is_some() {
                    writeln!(f, "U[{}][{}] = {}", i + 1, j + 1, fmt_coef(e))?;
                }
            }
        }
        for (i, e) in self.v.iter().enumerate() {
            if e.is_some() {
                writeln!(f, "V[{}] = {}", i + 1, fmt_coef(e))?;
            }
        }
        Ok(())
    }
}
