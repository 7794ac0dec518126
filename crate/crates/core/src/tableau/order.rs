//! Empirical convergence order on scalar probes.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegrateOptions, Method, ScalarSystem, StarterOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeKind {
    /// `u' = −u + u²`, exact solution `1/(1 + e^t)` from `u₀ = 1/2`.
    Logistic,
    /// `u' = −u + sin u`, reference by fine-step classical RK4.
    Sine,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarProbe {
    pub kind: ProbeKind,
    pub u0: f64,
    pub t_end: f64,
}

impl ScalarProbe {
    pub fn logistic() -> Self {
        ScalarProbe {
            kind: ProbeKind::Logistic,
            u0: 0.5,
            t_end: 1.0,
        }
    }

    pub fn sine() -> Self {
        ScalarProbe {
            kind: ProbeKind::Sine,
            u0: 0.5,
            t_end: 1.0,
        }
    }

    fn f(kind: ProbeKind) -> fn(Complex64) -> Complex64 {
        match kind {
            ProbeKind::Logistic => |u| u * u,
            ProbeKind::Sine => |u| u.sin(),
        }
    }

    pub fn system(&self) -> ScalarSystem<fn(Complex64) -> Complex64> {
        ScalarSystem::new(-1.0, Self::f(self.kind))
    }

    /// Solution at `t_end`.
    pub fn reference(&self) -> f64 {
        match self.kind {
            ProbeKind::Logistic => {
                let c = 1.0 / self.u0 - 1.0;
                1.0 / (1.0 + c * self.t_end.exp())
            }
            ProbeKind::Sine => {
                let rhs = |u: f64| -u + u.sin();
                let n = 1 << 14;
                let h = self.t_end / n as f64;
                let mut u = self.u0;
                for _ in 0..n {
                    let k1 = rhs(u);
                    let k2 = rhs(u + 0.5 * h * k1);
                    let k3 = rhs(u + 0.5 * h * k2);
                    let k4 = rhs(u + h * k3);
                    u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
                u
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(h, error)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares line through `(log h, log err)`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<OrderFit> {
    if points.len() < 2 {
        return Err(Error::NoData(format!(
            "need at least two points for a slope, have {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::NoData("all step sizes are equal".into()));
    }
    let slope = sxy / sxx;
    Ok(OrderFit {
        slope,
        intercept: my - slope * mx,
        points: points.to_vec(),
    })
}

/// Slope of log error against log h over `h_set`.
///
/// Unstable runs and errors at the roundoff level (below 1e-14) are left
/// out of the fit. Multistep schemes are started with the fixed-point
/// iteration run to convergence, so the starting error does not depend on
/// where the stopping rule happened to cut.
pub fn empirical_order(method: &Method, probe: &ScalarProbe, h_set: &[f64]) -> Result<OrderFit> {
    empirical_order_with(method, probe, h_set, &converged_start())
}

fn converged_start() -> IntegrateOptions<'static> {
    IntegrateOptions {
        starter: StarterOptions {
            tolerance: Some(0.0),
            max_iterations: 200,
            ..Default::default()
        },
        ..Default::default()
    }
}

/// Errors below this are treated as contaminated by roundoff when
/// certifying. The probes bottom out near 5e-15.
pub const CERTIFY_ERROR_FLOOR: f64 = 1e-13;

/// Steps `1/n` with `n` the distinct roundings of `2^(k/2)`, `k = 0..=24`.
/// Exact reciprocals keep the step count an integer on the unit horizon.
pub fn certification_ladder() -> Vec<f64> {
    let mut n: Vec<u64> = (0..=24).map(|k| 2f64.powf(k as f64 / 2.0).round() as u64).collect();
    n.dedup();
    n.into_iter().map(|n| 1.0 / n as f64).collect()
}

/// Order measured over the asymptotic end of [`certification_ladder`]:
/// the four finest steps before the error first reaches
/// [`CERTIFY_ERROR_FLOOR`]. Roundoff noise below that can climb back over
/// the floor at tiny steps, so later points are not used.
pub fn certify_order(method: &Method, probe: &ScalarProbe) -> Result<OrderFit> {
    let ladder = certification_ladder();
    let all = empirical_order(method, probe, &ladder)?;
    let rung = |h: f64| ladder.iter().position(|&l| (l - h).abs() <= 1e-12 * l);
    // Points below 1e-14 never reach `all`, so a gap in the ladder also
    // marks the floor.
    let mut usable: Vec<(f64, f64)> = Vec::new();
    let mut last: Option<usize> = None;
    for p in all.points {
        let i = rung(p.0);
        let contiguous = last.is_none() || i == last.map(|j| j + 1);
        if p.1 <= CERTIFY_ERROR_FLOOR || i.is_none() || !contiguous {
            break;
        }
        last = i;
        usable.push(p);
    }
    let tail = &usable[usable.len().saturating_sub(4)..];
    loglog_fit(tail)
}

pub fn empirical_order_with(
    method: &Method,
    probe: &ScalarProbe,
    h_set: &[f64],
    opts: &IntegrateOptions,
) -> Result<OrderFit> {
    let sys = probe.system();
    let reference = probe.reference();
    let u0 = [Complex64::new(probe.u0, 0.0)];
    let mut points = Vec::new();
    for &h in h_set {
        match integrate(&sys, method, h, probe.t_end, &u0, opts) {
            Ok(run) => {
                let err = (run.u[0].re - reference).abs() / reference.abs();
                if err.is_finite() && err > 1e-14 {
                    points.push((run.h, err));
                }
            }
            Err(Error::Unstable { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(Error::NoData(format!("{}: no usable points", method.name())));
    }
    loglog_fit(&points)
}
