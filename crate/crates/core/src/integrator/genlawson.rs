//! Generalised Lawson methods stepped directly from the transformed
//! equation, without a tableau.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{eval_n, SemilinearSystem, SimState};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::phifun::{rat, rational_factorial, ratio_f64, ContourSpec, PhiCache, PhiExpr};

/// Classical RK4 on `v' = e^{−Lt}(N(e^{Lt}v + W(t)) − P(t))`, where `P`
/// interpolates `N(u^n), …, N(u^{n−q+1})` at `t_n, …, t_{n−q+1}` and
/// `W(t) = ∫₀ᵗ e^{(t−s)L}P(s)ds`. `q = 0` takes `P ≡ 0`, i.e. Lawson4.
#[derive(Clone, Debug)]
pub struct GenLawsonStepper {
    q: usize,
    h: f64,
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
    /// `ℓ_j(c)` for c = 0, 1/2, 1.
    lagrange: [Vec<f64>; 3],
    /// `h·(1/h)∫₀^{ch} e^{(ch−s)L} ℓ_j(s/h) ds` for c = 1/2, 1.
    w_half: Vec<Vec<Complex64>>,
    w_full: Vec<Vec<Complex64>>,
}

fn interp_basis(q: usize, j: usize) -> Vec<Rational64> {
    let mut poly = vec![Rational64::one()];
    for k in 0..q {
        if k == j {
            continue;
        }
        // (θ + k) / (k − j) on nodes θ_k = −k
        let d = Rational64::from_integer(k as i64 - j as i64);
        let mut next = vec![Rational64::zero(); poly.len() + 1];
        for (m, &p) in poly.iter().enumerate() {
            next[m + 1] += p / d;
            next[m] += p * Rational64::from_integer(k as i64) / d;
        }
        poly = next;
    }
    poly
}

impl GenLawsonStepper {
    pub fn new(
        q: usize,
        h: f64,
        diag: &[Complex64],
        contour: &ContourSpec,
        cache: Option<&PhiCache>,
        exec: Execution,
    ) -> Result<Self> {
        if q > 5 {
            return Err(Error::InvalidInput(format!("GenLawson steps must be at most 5, got {q}")));
        }
        let z: Vec<Complex64> = diag.iter().map(|l| l * h).collect();
        let local = PhiCache::new();
        let cache = cache.unwrap_or(&local);
        let basis: Vec<Vec<Rational64>> = (0..q).map(|j| interp_basis(q, j)).collect();
        let at = |p: &[Rational64], x: Rational64| {
            ratio_f64(p.iter().rev().fold(Rational64::zero(), |acc, &a| acc * x + a))
        };
        let lagrange = [rat(0, 1), rat(1, 2), rat(1, 1)]
            .map(|c| basis.iter().map(|p| at(p, c)).collect::<Vec<f64>>());
        let w = |c: Rational64| -> Result<Vec<Vec<Complex64>>> {
            basis
                .iter()
                .map(|p| {
                    let e: PhiExpr = p
                        .iter()
                        .enumerate()
                        .map(|(m, &a)| {
                            PhiExpr::psi(m as u32 + 1, c) * (a * rational_factorial(m as u32))
                        })
                        .sum();
                    let mut v = cache.eval(&e, &z, contour, exec)?;
                    v.iter_mut().for_each(|x| *x *= h);
                    Ok(v)
                })
                .collect()
        };
        Ok(GenLawsonStepper {
            q,
            h,
            e_half: z.iter().map(|z| (z * 0.5).exp()).collect(),
            e_full: z.iter().map(|z| z.exp()).collect(),
            lagrange,
            w_half: w(rat(1, 2))?,
            w_full: w(rat(1, 1))?,
        })
    }

    pub fn steps(&self) -> usize {
        self.q.max(1)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn step<S: SemilinearSystem + ?Sized>(
        &self,
        state: &mut SimState,
        sys: &S,
        _exec: Execution,
    ) -> Result<()> {
        let q1 = self.steps() - 1;
        if state.history.len() < q1 {
            return Err(Error::InvalidOperation(format!(
                "GenLawson4{} needs {q1} past evaluations, have {}",
                self.q,
                state.history.len()
            )));
        }
        let n = state.u.len();
        let h = self.h;
        let next_step = state.step + 1;
        let t_next = next_step as f64 * h;
        let n0 = eval_n(sys, &state.u);
        state.check(&n0, next_step, t_next)?;
        let hist = |j: usize| -> &[Complex64] {
            if j == 0 {
                &n0
            } else {
                &state.history[j - 1]
            }
        };
        let p_at = |ci: usize, k: usize| -> Complex64 {
            (0..self.q).map(|j| hist(j)[k] * self.lagrange[ci][j]).sum()
        };
        let w_at = |w: &[Vec<Complex64>], k: usize| -> Complex64 {
            (0..self.q).map(|j| w[j][k] * hist(j)[k]).sum()
        };
        let (e2, e1) = (&self.e_half, &self.e_full);
        let u = &state.u;

        let g1: Vec<Complex64> = (0..n).map(|k| n0[k] - p_at(0, k)).collect();
        let u2: Vec<Complex64> = (0..n)
            .map(|k| e2[k] * u[k] + e2[k] * g1[k] * (h / 2.0) + w_at(&self.w_half, k))
            .collect();
        state.check(&u2, next_step, t_next)?;
        let n2 = eval_n(sys, &u2);
        let g2: Vec<Complex64> = (0..n).map(|k| n2[k] - p_at(1, k)).collect();
        let u3: Vec<Complex64> = (0..n)
            .map(|k| e2[k] * u[k] + g2[k] * (h / 2.0) + w_at(&self.w_half, k))
            .collect();
        state.check(&u3, next_step, t_next)?;
        let n3 = eval_n(sys, &u3);
        let g3: Vec<Complex64> = (0..n).map(|k| n3[k] - p_at(1, k)).collect();
        let u4: Vec<Complex64> = (0..n)
            .map(|k| e1[k] * u[k] + e2[k] * g3[k] * h + w_at(&self.w_full, k))
            .collect();
        state.check(&u4, next_step, t_next)?;
        let n4 = eval_n(sys, &u4);
        let out: Vec<Complex64> = (0..n)
            .map(|k| {
                let g4 = n4[k] - p_at(2, k);
                e1[k] * u[k]
                    + (e1[k] * g1[k] + e2[k] * (g2[k] + g3[k]) * 2.0 + g4) * (h / 6.0)
                    + w_at(&self.w_full, k)
            })
            .collect();
        state.check(&out, next_step, t_next)?;
        if q1 > 0 {
            state.history.push_front(n0);
            state.history.truncate(q1);
        }
        state.u = out;
        state.step = next_step;
        state.time = t_next;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{precompute, ScalarSystem};
    use crate::tableau::lawson4;

    #[test]
    fn q0_is_lawson4() {
        let sys = ScalarSystem::new(-2.0, |u| u * u - u.sin());
        let spec = ContourSpec::default();
        let direct = GenLawsonStepper::new(0, 0.1, sys.linear(), &spec, None, Execution::Sequential).unwrap();
        let table = precompute(&lawson4(), 0.1, sys.linear(), &spec, None, Execution::Sequential).unwrap();
        let mut a = SimState::new(vec![Complex64::new(0.7, 0.0)]);
        let mut b = a.clone();
        for _ in 0..20 {
            direct.step(&mut a, &sys, Execution::Sequential).unwrap();
            table.step(&mut b, &sys, Execution::Sequential).unwrap();
        }
        assert!((a.u[0] - b.u[0]).norm() < 1e-14, "{} vs {}", a.u[0], b.u[0]);
    }

    #[test]
    fn interpolation_basis_is_cardinal() {
        for q in 1..=5 {
            for j in 0..q {
                let p = interp_basis(q, j);
                for k in 0..q {
                    let x = Rational64::from_integer(-(k as i64));
                    let v = p.iter().rev().fold(Rational64::zero(), |acc, &a| acc * x + a);
                    assert_eq!(v, if j == k { Rational64::one() } else { Rational64::zero() });
                }
            }
        }
    }
}
