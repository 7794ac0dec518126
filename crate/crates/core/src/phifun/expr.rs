//! Symbolic linear combinations of scaled φ-functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::kernel::phi_unchecked;
use crate::error::{Error, Result};

/// `coeff · φ_index(scale · z)`.
///
/// A zero `scale` denotes the constant `coeff / index!`; such terms are
/// normalized to `(coeff / index!, 0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhiTerm {
    pub index: u32,
    pub scale: Rational64,
    pub coeff: Rational64,
}

impl PhiTerm {
    pub fn new(coeff: Rational64, index: u32, scale: Rational64) -> Self {
        PhiTerm {
            index,
            scale,
            coeff,
        }
    }

    /// The value at `z = 0`, exact.
    pub fn at_zero(&self) -> Rational64 {
        self.coeff / rational_factorial(self.index)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        phi_unchecked(self.index as usize, z * ratio_f64(self.scale)) * ratio_f64(self.coeff)
    }
}

/// A tableau coefficient as a function of `z = hλ`.
///
/// Always stored merged and sorted, so structural equality is equality of
/// the represented functions' term multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PhiExpr {
    terms: Vec<PhiTerm>,
}

pub(crate) fn ratio_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn rational_factorial(n: u32) -> Rational64 {
    (1..=n as i64).fold(Rational64::one(), |acc, i| acc * Rational64::from_integer(i))
}

pub(crate) fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl PhiExpr {
    pub fn zero() -> Self {
        PhiExpr { terms: Vec::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PhiTerm>) -> Self {
        let mut e = PhiExpr {
            terms: terms.into_iter().collect(),
        };
        e.normalize();
        e
    }

    pub fn term(coeff: Rational64, index: u32, scale: Rational64) -> Self {
        Self::from_terms([PhiTerm::new(coeff, index, scale)])
    }

    /// φ_l(z).
    pub fn phi(l: u32) -> Self {
        Self::term(Rational64::one(), l, Rational64::one())
    }

    /// ψ_{l}(z) for abscissa `c`: `c^l φ_l(c z)`.
    pub fn psi(l: u32, c: Rational64) -> Self {
        Self::term(pow(c, l), l, c)
    }

    /// e^{a z}.
    pub fn exp(a: Rational64) -> Self {
        Self::term(Rational64::one(), 0, a)
    }

    pub fn constant(c: Rational64) -> Self {
        Self::term(c, 0, Rational64::zero())
    }

    pub fn terms(&self) -> &[PhiTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest φ index appearing.
    pub fn max_index(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.index).max()
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if t.index as usize > super::kernel::MAX_PHI_INDEX {
                return Err(Error::InvalidInput(format!(
                    "phi index {} exceeds {}",
                    t.index,
                    super::kernel::MAX_PHI_INDEX
                )));
            }
        }
        Ok(())
    }

    /// Exact value at `z = 0`.
    pub fn at_zero(&self) -> Rational64 {
        self.terms.iter().map(PhiTerm::at_zero).sum()
    }

    /// Direct scalar evaluation (no contour).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn scaled(&self, k: Rational64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| PhiTerm {
            coeff: t.coeff * k,
            ..t.clone()
        }))
    }

    fn normalize(&mut self) {
        for t in &mut self.terms {
            if t.scale.is_zero() && !(t.index == 0) {
                t.coeff /= rational_factorial(t.index);
                t.index = 0;
            }
        }
        self.terms
            .sort_by(|a, b| (a.index, a.scale).cmp(&(b.index, b.scale)));
        let mut merged: Vec<PhiTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.index == t.index && last.scale == t.scale => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        self.terms = merged;
    }
}

fn pow(c: Rational64, l: u32) -> Rational64 {
    (0..l).fold(Rational64::one(), |acc, _| acc * c)
}

impl Add for PhiExpr {
    type Output = PhiExpr;
    fn add(mut self, rhs: PhiExpr) -> PhiExpr {
        self.terms.extend(rhs.terms);
        self.normalize();
        self
    }
}

impl<'a> Add<&'a PhiExpr> for PhiExpr {
    type Output = PhiExpr;
    fn add(self, rhs: &'a PhiExpr) -> PhiExpr {
        self + rhs.clone()
    }
}

impl Neg for PhiExpr {
    type Output = PhiExpr;
    fn neg(self) -> PhiExpr {
        self.scaled(-Rational64::one())
    }
}

impl Sub for PhiExpr {
    type Output = PhiExpr;
    fn sub(self, rhs: PhiExpr) -> PhiExpr {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a PhiExpr> for PhiExpr {
    type Output = PhiExpr;
    fn sub(self, rhs: &'a PhiExpr) -> PhiExpr {
        self - rhs.clone()
    }
}

impl Mul<Rational64> for PhiExpr {
    type Output = PhiExpr;
    fn mul(self, k: Rational64) -> PhiExpr {
        self.scaled(k)
    }
}

impl std::iter::Sum for PhiExpr {
    fn sum<I: Iterator<Item = PhiExpr>>(iter: I) -> PhiExpr {
        PhiExpr::from_terms(iter.flat_map(|e| e.terms))
    }
}

fn fmt_rational(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders in the tableau-file grammar, e.g. `2*phi2(z) - 4*phi3(z)`.
impl fmt::Display for PhiExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mag = t.coeff.abs();
            if i == 0 {
                if t.coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else if t.coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if t.scale.is_zero() {
                write!(f, "{}", fmt_rational(mag))?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{}*", fmt_rational(mag))?;
            }
            let arg = if t.scale.is_one() {
                "z".to_string()
            } else {
                format!("{}*z", fmt_rational(t.scale))
            };
            if t.index == 0 {
                write!(f, "exp({arg})")?;
            } else {
                write!(f, "phi{}({arg})", t.index)?;
            }
        }
        Ok(())
    }
}
