//! The integration driver.

use std::time::Instant;

use num_complex::Complex64;

use super::{
    precompute, start_multistep, GenLawsonStepper, PrecomputedScheme, SemilinearSystem, SimState,
    StarterOptions, StarterReport,
};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::phifun::{ContourSpec, PhiCache};
use crate::tableau::Tableau;

/// How to advance the solution.
#[derive(Clone, Debug)]
pub enum Method {
    Tableau(Tableau),
    /// Generalised Lawson with `q` history values, stepped directly.
    GenLawson(usize),
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Tableau(t) => t.name.clone(),
            Method::GenLawson(q) => format!("GenLawson4{q}-direct"),
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            Method::Tableau(t) => t.steps(),
            Method::GenLawson(q) => (*q).max(1),
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            Method::Tableau(t) => t.order,
            Method::GenLawson(q) => match q {
                4 => 5,
                5 => 6,
                _ => 4,
            },
        }
    }

    /// Points used by the starting procedure: the step count, raised to
    /// `order − 1` so the start values never limit the global order.
    pub fn starter_points(&self) -> usize {
        self.steps().max(self.order() as usize)
    }
}

impl From<Tableau> for Method {
    fn from(t: Tableau) -> Self {
        Method::Tableau(t)
    }
}

#[derive(Clone, Debug, Default)]
pub struct IntegrateOptions<'a> {
    pub contour: ContourSpec,
    pub exec: Execution,
    pub starter: StarterOptions,
    /// Times at which to keep a copy of the solution; each is taken at the
    /// nearest completed step.
    pub snapshot_times: Vec<f64>,
    pub cache: Option<&'a PhiCache>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub u: Vec<Complex64>,
    /// The step actually used (`T / steps`).
    pub h: f64,
    pub steps: usize,
    pub time: f64,
    pub snapshots: Vec<(f64, Vec<Complex64>)>,
    pub precompute_seconds: f64,
    pub starter_seconds: f64,
    /// Wall time of the stepping loop alone.
    pub stepping_seconds: f64,
    pub starter: Option<StarterReport>,
}

/// Number of steps for horizon `t_end` at nominal step `h`: `T/h` rounded
/// when within 1e-9 relative of an integer, otherwise rounded up.
pub fn snap_steps(t_end: f64, h: f64) -> Result<(usize, f64)> {
    if !(t_end > 0.0 && t_end.is_finite() && h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("need T > 0 and h > 0, got T={t_end}, h={h}")));
    }
    let r = t_end / h;
    let near = r.round();
    let n = if (r - near).abs() <= 1e-9 * r.max(1.0) && near >= 1.0 {
        near
    } else {
        r.ceil()
    };
    if n > usize::MAX as f64 / 2.0 {
        return Err(Error::InvalidInput(format!("too many steps: {n}")));
    }
    let n = n as usize;
    Ok((n, t_end / n as f64))
}

enum Prepared {
    Tableau(PrecomputedScheme),
    GenLawson(GenLawsonStepper),
}

impl Prepared {
    fn step<S: SemilinearSystem + ?Sized>(&self, s: &mut SimState, sys: &S, exec: Execution) -> Result<()> {
        match self {
            Prepared::Tableau(p) => p.step(s, sys, exec),
            Prepared::GenLawson(g) => g.step(s, sys, exec),
        }
    }
}

/// Integrates `sys` from `u0` to `t_end`.
pub fn integrate<S: SemilinearSystem + ?Sized>(
    sys: &S,
    method: &Method,
    h: f64,
    t_end: f64,
    u0: &[Complex64],
    opts: &IntegrateOptions,
) -> Result<Run> {
    if u0.len() != sys.len() {
        return Err(Error::Dimension(format!(
            "initial state has {} coefficients, system has {}",
            u0.len(),
            sys.len()
        )));
    }
    let (steps, h) = snap_steps(t_end, h)?;
    let exec = opts.exec;
    let diag = sys.linear();

    let clock = Instant::now();
    let prepared = match method {
        Method::Tableau(t) => {
            Prepared::Tableau(precompute(t, h, diag, &opts.contour, opts.cache, exec)?)
        }
        Method::GenLawson(q) => {
            Prepared::GenLawson(GenLawsonStepper::new(*q, h, diag, &opts.contour, opts.cache, exec)?)
        }
    };
    let precompute_seconds = clock.elapsed().as_secs_f64();

    let mut snap_steps: Vec<(usize, f64)> = opts
        .snapshot_times
        .iter()
        .map(|&t| (((t / h).round().max(0.0) as usize).min(steps), t))
        .collect();
    snap_steps.sort_by_key(|s| s.0);
    let mut snapshots = Vec::with_capacity(snap_steps.len());
    let mut next_snap = 0;
    let mut take = |state: &SimState, snapshots: &mut Vec<(f64, Vec<Complex64>)>| {
        while next_snap < snap_steps.len() && snap_steps[next_snap].0 == state.step {
            snapshots.push((state.time, state.u.clone()));
            next_snap += 1;
        }
    };

    let q = method.steps();
    let template = SimState::new(u0.to_vec());
    let clock = Instant::now();
    let (mut state, report) = if q > 1 {
        let points = method.starter_points();
        let mut sv =
            start_multistep(sys, points, h, u0, &opts.contour, opts.cache, exec, &opts.starter)?;
        sv.values.truncate(q);
        sv.evaluations.truncate(q);
        let report = sv.report;
        if steps < q - 1 {
            let mut s = template.clone();
            for j in 0..=steps {
                s.u.clone_from(&sv.values[j]);
                s.step = j;
                s.time = j as f64 * h;
                take(&s, &mut snapshots);
            }
            let starter_seconds = clock.elapsed().as_secs_f64();
            return Ok(Run {
                u: s.u,
                h,
                steps,
                time: s.time,
                snapshots,
                precompute_seconds,
                starter_seconds,
                stepping_seconds: 0.0,
                starter: Some(report),
            });
        }
        let mut s0 = template.clone();
        for (j, v) in sv.values.iter().enumerate().take(q - 1) {
            s0.u.clone_from(v);
            s0.step = j;
            s0.time = j as f64 * h;
            take(&s0, &mut snapshots);
        }
        (sv.into_state(h, &template), Some(report))
    } else {
        (template.clone(), None)
    };
    let starter_seconds = clock.elapsed().as_secs_f64();

    take(&state, &mut snapshots);
    let clock = Instant::now();
    while state.step < steps {
        prepared.step(&mut state, sys, exec)?;
        take(&state, &mut snapshots);
    }
    let stepping_seconds = clock.elapsed().as_secs_f64();
    state.time = t_end;
    Ok(Run {
        u: state.u,
        h,
        steps,
        time: t_end,
        snapshots,
        precompute_seconds,
        starter_seconds,
        stepping_seconds,
        starter: report,
    })
}
