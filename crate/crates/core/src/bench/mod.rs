//! Accuracy and cost comparisons: reference solutions, relative errors,
//! scheme-by-step sweeps, observed orders and result files.

mod export;
mod svg;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegrateOptions, Method, Run, SemilinearSystem, StarterOptions};
use crate::par::Execution;
use crate::phifun::{ContourSpec, PhiCache};
use crate::problems::Problem;
use crate::spectral::Grid;
use crate::tableau::{build_pecec, load_tableau_file, lookup, OrderFit};

pub use export::{read_csv, write_csv, CSV_HEADER};
pub use svg::render_svg;

/// Resolves a scheme name, a `genlawson4<q>-direct` stepper, or a path to
/// a tableau file.
pub fn resolve_method(spec: &str) -> Result<Method> {
    let key: String = spec
        .to_ascii_lowercase()
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .collect();
    if let Some(q) = key
        .strip_prefix("genlawson4")
        .and_then(|r| r.strip_suffix("direct"))
        .and_then(|q| q.parse::<usize>().ok())
    {
        if (1..=5).contains(&q) {
            return Ok(Method::GenLawson(q));
        }
    }
    match lookup(spec) {
        Ok(s) => Ok(Method::Tableau(s.tableau)),
        Err(e) => {
            let path = Path::new(spec);
            if path.is_file() {
                Ok(Method::Tableau(load_tableau_file(path)?))
            } else {
                Err(e)
            }
        }
    }
}

/// The scheme used for reference solutions.
pub fn reference_method() -> Method {
    Method::Tableau(build_pecec(7).expect("order 7 is in range"))
}

/// Integrates with [`reference_method`] at `h_min / 2`.
pub fn reference_solution<S: SemilinearSystem + ?Sized>(
    sys: &S,
    u0: &[Complex64],
    t_end: f64,
    h_min: f64,
    opts: &IntegrateOptions,
) -> Result<Run> {
    integrate(sys, &reference_method(), h_min / 2.0, t_end, u0, opts)
}

/// Reference fields shared between sweeps, keyed by problem, parameters,
/// grid, horizon, `h_min` and contour.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    map: Mutex<HashMap<String, Arc<Vec<Complex64>>>>,
}

impl ReferenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn key(problem: &Problem, grid: &Grid, t_end: f64, h_min: f64, contour: &ContourSpec) -> String {
        format!(
            "{}|{:?}|{:?}|{:?}|{:x}|{:x}|{}",
            problem.name,
            problem.params(),
            grid.sizes(),
            grid.domain(),
            t_end.to_bits(),
            h_min.to_bits(),
            contour.points
        )
    }

    pub fn get_or_compute(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<Vec<Complex64>>,
    ) -> Result<Arc<Vec<Complex64>>> {
        if let Some(v) = self.map.lock().ok().and_then(|m| m.get(key).cloned()) {
            return Ok(v);
        }
        let v = Arc::new(compute()?);
        if let Ok(mut m) = self.map.lock() {
            m.entry(key.to_string()).or_insert_with(|| v.clone());
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `‖u − u_ex‖₂ / ‖u_ex‖₂`. Applied to Fourier coefficients this equals the
/// grid-value ratio by Parseval; systems pass all components concatenated.
pub fn rel_l2_error(u: &[Complex64], u_ex: &[Complex64]) -> Result<f64> {
    if u.len() != u_ex.len() {
        return Err(Error::Dimension(format!("{} vs {} entries", u.len(), u_ex.len())));
    }
    let den: f64 = u_ex.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num: f64 = u.iter().zip(u_ex).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub scheme: String,
    pub h: f64,
    pub h_over_t: f64,
    /// Relative L² error at `T`; `None` for unstable runs.
    pub error: Option<f64>,
    /// Stepping time, minimum over repetitions.
    pub seconds: f64,
    pub stable: bool,
    pub starter_converged: bool,
}

/// Geometric ladder of step sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HLadder {
    pub count: usize,
    pub max: f64,
    pub min: f64,
}

impl HLadder {
    /// Steps from `max` down to `min`, equally spaced in `log h`.
    pub fn steps(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite() && self.count >= 1) {
            return Err(Error::InvalidInput(format!(
                "bad step ladder: {} steps from {} to {}",
                self.count, self.max, self.min
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.max]);
        }
        let r = (self.min / self.max).powf(1.0 / (self.count - 1) as f64);
        Ok((0..self.count)
            .map(|i| if i + 1 == self.count { self.min } else { self.max * r.powi(i as i32) })
            .collect())
    }
}

#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub problem: Problem,
    pub grid: Grid,
    pub t_end: f64,
    pub schemes: Vec<String>,
    pub ladder: HLadder,
    pub contour: ContourSpec,
    /// Timed runs per point; the minimum is reported.
    pub repetitions: usize,
    pub exec: Execution,
    pub starter: StarterOptions,
}

impl SweepPlan {
    /// Reduced grid and horizon with the problem's default step range.
    pub fn desk(problem: Problem, schemes: &[&str]) -> Self {
        let t = problem.desk_t_end;
        let grid = problem.desk_grid();
        Self::with(problem, grid, t, schemes)
    }

    /// Full grid and horizon.
    pub fn paper(problem: Problem, schemes: &[&str]) -> Self {
        let t = problem.t_end;
        let grid = problem.paper_grid();
        Self::with(problem, grid, t, schemes)
    }

    fn with(problem: Problem, grid: Grid, t_end: f64, schemes: &[&str]) -> Self {
        let (hi, lo) = problem.h_over_t;
        let count = ((hi / lo).log2().round() as usize) + 1;
        SweepPlan {
            contour: ContourSpec::for_dims(problem.dims),
            problem,
            grid,
            t_end,
            schemes: schemes.iter().map(|s| s.to_string()).collect(),
            ladder: HLadder {
                count,
                max: hi * t_end,
                min: lo * t_end,
            },
            repetitions: 3,
            exec: Execution::default(),
            starter: StarterOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<Vec<Method>> {
        self.ladder.steps()?;
        self.contour.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("horizon must be positive, got {}", self.t_end)));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidInput("need at least one repetition".into()));
        }
        self.schemes.iter().map(|s| resolve_method(s)).collect()
    }
}

/// A point that failed for a reason other than instability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointFailure {
    pub scheme: String,
    pub h: f64,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<PointFailure>,
    pub reference_steps: usize,
}

impl SweepOutcome {
    /// Observed order per scheme, with the error floor taken over the whole
    /// sweep.
    pub fn orders(&self) -> Vec<(String, Result<OrderFit>)> {
        let floor = sweep_floor(&self.records);
        let mut names: Vec<&str> = Vec::new();
        for r in &self.records {
            if !names.contains(&r.scheme.as_str()) {
                names.push(&r.scheme);
            }
        }
        names
            .into_iter()
            .map(|n| {
                let rs: Vec<SweepRecord> = self.records.iter().filter(|r| r.scheme == n).cloned().collect();
                (n.to_string(), estimate_order_above(&rs, floor))
            })
            .collect()
    }
}

fn is_unstable(e: &Error) -> bool {
    matches!(e, Error::Unstable { .. } | Error::NonFinite(_))
}

/// Runs every (scheme, h) point of `plan` against a [`reference_method`]
/// solution at half the smallest step. Unstable points are recorded with
/// `stable = false`; only a failing reference aborts the sweep.
pub fn run_sweep(plan: &SweepPlan, cache: Option<&ReferenceCache>) -> Result<SweepOutcome> {
    let methods = plan.validate()?;
    let steps = plan.ladder.steps()?;
    let sys = plan.problem.system(&plan.grid, plan.exec)?;
    let u0 = sys.coeffs_from_values(&plan.problem.initial_values(&plan.grid)?)?;
    let phi_cache = PhiCache::new();
    let opts = IntegrateOptions {
        contour: plan.contour,
        exec: plan.exec,
        starter: plan.starter,
        snapshot_times: Vec::new(),
        cache: Some(&phi_cache),
    };

    let h_min = plan.ladder.min;
    let mut reference_steps = 0;
    let mut compute = || -> Result<Vec<Complex64>> {
        let ref_opts = IntegrateOptions {
            starter: StarterOptions::default(),
            ..opts.clone()
        };
        let run = reference_solution(&sys, &u0, plan.t_end, h_min, &ref_opts).map_err(|e| {
            Error::InvalidOperation(format!("reference solution failed: {e}"))
        })?;
        reference_steps = run.steps;
        Ok(run.u)
    };
    let reference = match cache {
        Some(c) => {
            let key = ReferenceCache::key(&plan.problem, &plan.grid, plan.t_end, h_min, &plan.contour);
            c.get_or_compute(&key, compute)?
        }
        None => Arc::new(compute()?),
    };
    if reference_steps == 0 {
        reference_steps = crate::integrator::snap_steps(plan.t_end, h_min / 2.0)?.0;
    }

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (method, name) in methods.iter().zip(&plan.schemes) {
        for &h in &steps {
            let label = method.name();
            match integrate(&sys, method, h, plan.t_end, &u0, &opts) {
                Ok(run) => {
                    let error = Some(rel_l2_error(&run.u, &reference)?).filter(|e| e.is_finite());
                    let mut seconds = run.stepping_seconds;
                    for _ in 1..plan.repetitions {
                        if let Ok(again) = integrate(&sys, method, h, plan.t_end, &u0, &opts) {
                            seconds = seconds.min(again.stepping_seconds);
                        }
                    }
                    records.push(SweepRecord {
                        scheme: label,
                        h: run.h,
                        h_over_t: run.h / plan.t_end,
                        error,
                        seconds,
                        stable: error.is_some(),
                        starter_converged: run.starter.as_ref().map_or(true, |r| r.converged),
                    });
                }
                Err(e) => {
                    let (_, hs) = crate::integrator::snap_steps(plan.t_end, h)?;
                    if !is_unstable(&e) {
                        failures.push(PointFailure {
                            scheme: name.clone(),
                            h: hs,
                            message: e.to_string(),
                        });
                    }
                    records.push(SweepRecord {
                        scheme: label,
                        h: hs,
                        h_over_t: hs / plan.t_end,
                        error: None,
                        seconds: 0.0,
                        stable: false,
                        starter_converged: false,
                    });
                }
            }
        }
    }
    Ok(SweepOutcome {
        records,
        failures,
        reference_steps,
    })
}

fn sweep_floor(records: &[SweepRecord]) -> f64 {
    records
        .iter()
        .filter(|r| r.stable)
        .filter_map(|r| r.error)
        .filter(|&e| e > 0.0)
        .fold(f64::INFINITY, f64::min)
}

/// Observed order of one scheme's records: the log-log slope over stable
/// points with error above 100 times the smallest error among them.
pub fn estimate_order(records: &[SweepRecord]) -> Result<OrderFit> {
    estimate_order_above(records, sweep_floor(records))
}

/// As [`estimate_order`] with the smallest error supplied, usually taken
/// over a whole sweep.
pub fn estimate_order_above(records: &[SweepRecord], smallest_error: f64) -> Result<OrderFit> {
    let cut = 100.0 * smallest_error;
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.stable)
        .filter_map(|r| r.error.map(|e| (r.h, e)))
        .filter(|&(_, e)| e.is_finite() && e > cut)
        .collect();
    if points.len() < 3 {
        return Err(Error::NoData(format!(
            "need 3 stable points above the error floor, have {}",
            points.len()
        )));
    }
    crate::tableau::loglog_fit(&points)
}

/// Writes `results.csv` and `results.svg` into `dir`, creating it.
pub fn export(records: &[SweepRecord], dir: &Path, title: &str) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("results.csv");
    write_csv(records, &csv)?;
    let svg = dir.join("results.svg");
    std::fs::write(&svg, render_svg(records, title)).map_err(|e| Error::io(&svg, e))?;
    Ok(vec![csv, svg])
}
