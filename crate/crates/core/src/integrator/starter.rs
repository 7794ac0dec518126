//! Starting values for multistep schemes by fixed-point iteration on
//! `u^j = e^{jhL}u^0 + h Σ_l γ_l(j, hL) Δ^l N(u^0)`.

use num_complex::Complex64;
use num_traits::Zero;

use super::{eval_n, max_norm, precompute, SemilinearSystem, SimState};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::phifun::{eval_gamma_all, ContourSpec, PhiCache};
use crate::tableau::etdrk2;

/// Contour nodes used for the γ-functions regardless of the problem's own
/// contour size.
pub const GAMMA_MIN_POINTS: usize = 64;

/// What the zeroth forward difference stands for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Delta0 {
    /// `Δ⁰N(u⁰) = N(u⁰)`.
    #[default]
    Nonlinear,
    /// `Δ⁰N(u⁰) = u⁰`, as sometimes printed; kept for comparison runs only.
    State,
}

#[derive(Clone, Copy, Debug)]
pub struct StarterOptions {
    pub max_iterations: usize,
    /// Lower bound on the `h^q` stopping tolerance, so the iteration can
    /// terminate in floating point.
    pub tolerance_floor: f64,
    /// Replaces `h^q` as the stopping tolerance.
    pub tolerance: Option<f64>,
    pub delta0: Delta0,
}

impl Default for StarterOptions {
    fn default() -> Self {
        StarterOptions {
            max_iterations: 50,
            tolerance_floor: 1e-14,
            tolerance: None,
            delta0: Delta0::Nonlinear,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct StarterReport {
    pub iterations: usize,
    pub converged: bool,
    /// Last relative max-norm change between iterates.
    pub last_change: f64,
    pub tolerance: f64,
}

/// `u^0 … u^{q−1}` with `N` at each.
#[derive(Clone, Debug)]
pub struct StartingValues {
    pub values: Vec<Vec<Complex64>>,
    pub evaluations: Vec<Vec<Complex64>>,
    pub report: StarterReport,
}

impl StartingValues {
    /// State positioned at step `q−1` with a full history.
    pub fn into_state(self, h: f64, template: &SimState) -> SimState {
        let q = self.values.len();
        let mut values = self.values;
        let mut evals = self.evaluations;
        let u = values.pop().expect("at least one value");
        evals.pop();
        let mut s = SimState::new(u).with_limit_of(template);
        s.history = evals.into_iter().rev().collect();
        s.step = q - 1;
        s.time = (q - 1) as f64 * h;
        s
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Forward differences `Δ^l N(u^0)` for `l = 0..q`.
fn differences(evals: &[Vec<Complex64>], u0: &[Complex64], delta0: Delta0) -> Vec<Vec<Complex64>> {
    let q = evals.len();
    let n = u0.len();
    (0..q)
        .map(|l| {
            if l == 0 {
                return match delta0 {
                    Delta0::Nonlinear => evals[0].clone(),
                    Delta0::State => u0.to_vec(),
                };
            }
            let mut d = vec![Complex64::zero(); n];
            for i in 0..=l {
                let w = if i % 2 == 0 { 1.0 } else { -1.0 } * binomial(l, i);
                for (x, e) in d.iter_mut().zip(&evals[l - i]) {
                    *x += e * w;
                }
            }
            d
        })
        .collect()
}

/// Runs the starting procedure for a `q`-step scheme at step `h`.
///
/// The initial guess comes from ETDRK2; the iteration stops when the
/// relative max-norm change drops below `max(h^q, tolerance_floor)` or
/// after `max_iterations` sweeps, in which case the report says so.
pub fn start_multistep<S: SemilinearSystem + ?Sized>(
    sys: &S,
    q: usize,
    h: f64,
    u0: &[Complex64],
    contour: &ContourSpec,
    cache: Option<&PhiCache>,
    exec: Execution,
    opts: &StarterOptions,
) -> Result<StartingValues> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("starter needs q >= 2, got {q}")));
    }
    let diag = sys.linear();
    let z: Vec<Complex64> = diag.iter().map(|l| l * h).collect();
    let template = SimState::new(u0.to_vec());

    let guess = precompute(&etdrk2(), h, diag, contour, cache, exec)?;
    let mut values = vec![u0.to_vec()];
    let mut state = template.clone();
    for _ in 1..q {
        guess.step(&mut state, sys, exec)?;
        values.push(state.u.clone());
    }

    // γ_l(j, ·) contains e^{jz}, which varies by e^{±j} around the unit
    // circle; the trapezoidal error is about j^M/M!, so j = 6 needs more
    // than the 32 nodes used in 2D and 3D.
    let gamma_contour = ContourSpec {
        points: contour.points.max(GAMMA_MIN_POINTS),
        ..*contour
    };
    // gammas[j-1][l] = h·γ_l(j, hL); propagators[j-1] = e^{jhL}.
    let mut gammas = Vec::with_capacity(q - 1);
    let mut propagators = Vec::with_capacity(q - 1);
    for j in 1..q {
        let mut row = eval_gamma_all(q - 1, j, &z, &gamma_contour, exec)?;
        row.iter_mut().flatten().for_each(|x| *x *= h);
        gammas.push(row);
        propagators.push(z.iter().map(|z| (z * j as f64).exp()).collect::<Vec<_>>());
    }

    let tolerance = opts
        .tolerance
        .unwrap_or_else(|| h.powi(q as i32))
        .max(opts.tolerance_floor);
    let mut evals: Vec<Vec<Complex64>> = values.iter().map(|v| eval_n(sys, v)).collect();
    let mut report = StarterReport {
        iterations: 0,
        converged: false,
        last_change: f64::INFINITY,
        tolerance,
    };
    while report.iterations < opts.max_iterations {
        let diffs = differences(&evals, u0, opts.delta0);
        let mut change: f64 = 0.0;
        let mut scale: f64 = max_norm(u0);
        for j in 1..q {
            let mut next: Vec<Complex64> =
                propagators[j - 1].iter().zip(u0).map(|(e, u)| e * u).collect();
            for (g, d) in gammas[j - 1].iter().zip(&diffs) {
                for ((x, g), d) in next.iter_mut().zip(g).zip(d) {
                    *x += g * d;
                }
            }
            template.check(&next, j, j as f64 * h)?;
            let delta = next
                .iter()
                .zip(&values[j])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            change = change.max(delta);
            scale = scale.max(max_norm(&next));
            values[j] = next;
        }
        report.iterations += 1;
        report.last_change = if scale > 0.0 { change / scale } else { change };
        evals = values.iter().map(|v| eval_n(sys, v)).collect();
        if report.last_change <= tolerance {
            report.converged = true;
            break;
        }
    }
    Ok(StartingValues {
        values,
        evaluations: evals,
        report,
    })
}
