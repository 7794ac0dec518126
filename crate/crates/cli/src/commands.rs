use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use num_complex::Complex64;

use etdkit::bench::{export, resolve_method, run_sweep, SweepPlan};
use etdkit::integrator::{
    integrate, write_snapshot, Delta0, IntegrateOptions, Snapshot, StarterOptions,
};
use etdkit::phifun::PhiCache;
use etdkit::problems::{all_problems, nls_breather, Model};
use etdkit::tableau::{certify_order, registry, ScalarProbe};
use etdkit::Execution;

use crate::manifest::Resolved;

pub fn list() -> String {
    let mut out = String::from("Schemes (name, type, order, stages, steps):\n");
    for s in registry() {
        let i = s.info();
        let _ = writeln!(
            out,
            "{}  {}  {}  {}  {}{}",
            i.name,
            i.family.label(),
            i.order,
            i.stages,
            i.steps,
            if i.shipped { "" } else { "  (not certified)" }
        );
    }
    out.push_str("\nProblems (name, dimension, stiff linear part):\n");
    for p in all_problems() {
        let _ = writeln!(out, "{}  {}D  {}", p.name, p.dims, p.model.stiff_part());
    }
    out
}

fn snapshot_of(r: &Resolved, time: f64, values: Vec<Vec<Complex64>>) -> Snapshot {
    Snapshot {
        time,
        sizes: r.grid.sizes().to_vec(),
        domain: r.grid.domain().to_vec(),
        components: values.len(),
        data: values.into_iter().flatten().collect(),
    }
}

fn starter(r: &Resolved) -> StarterOptions {
    StarterOptions {
        delta0: if r.manifest.reproduce_printed_delta0 { Delta0::State } else { Delta0::Nonlinear },
        ..Default::default()
    }
}

pub fn run(r: &Resolved, exec: Execution, compare_analytic: bool) -> anyhow::Result<String> {
    if r.manifest.schemes.len() != 1 {
        bail!("run takes exactly one scheme, got {}", r.manifest.schemes.join(","));
    }
    if compare_analytic && r.problem.model != Model::Nls {
        bail!("no analytic solution is available for {}", r.problem.name);
    }
    let method = resolve_method(&r.manifest.schemes[0])?;
    let h = r.h();
    let sys = r.problem.system(&r.grid, exec)?;
    let u0 = sys.coeffs_from_values(&r.problem.initial_values(&r.grid)?)?;
    let cache = PhiCache::new();
    let opts = IntegrateOptions {
        contour: r.contour,
        exec,
        starter: starter(r),
        snapshot_times: r.manifest.snapshots.clone(),
        cache: Some(&cache),
    };
    let wall = Instant::now();
    let run = integrate(&sys, &method, h, r.t_end, &u0, &opts)?;
    let wall = wall.elapsed().as_secs_f64();

    r.echo()?;
    let mut files = Vec::new();
    for (t, u) in &run.snapshots {
        let path = r.output.join(format!("snapshot_t{t}.txt"));
        write_snapshot(&path, &snapshot_of(r, *t, sys.values_from_coeffs(u)?))?;
        files.push(path);
    }
    let final_values = sys.values_from_coeffs(&run.u)?;
    let path = r.output.join("final.txt");
    write_snapshot(&path, &snapshot_of(r, run.time, final_values.clone()))?;
    files.push(path);

    let mut out = String::new();
    let _ = writeln!(out, "problem {}  grid {:?}  scheme {}", r.problem.name, r.grid.sizes(), method.name());
    let _ = writeln!(out, "steps {}  h {}  T {}", run.steps, run.h, run.time);
    let _ = writeln!(out, "FFTs {}", sys.fft_count());
    let _ = writeln!(
        out,
        "seconds: precompute {:.3}  starter {:.3}  stepping {:.3}  total {:.3}",
        run.precompute_seconds, run.starter_seconds, run.stepping_seconds, wall
    );
    if let Some(rep) = &run.starter {
        let _ = writeln!(
            out,
            "starter: {} iterations, {}",
            rep.iterations,
            if rep.converged { "converged" } else { "NOT converged" }
        );
    }
    if compare_analytic {
        let (a, b) = (r.problem.param("A"), r.problem.param("B"));
        let exact = r
            .grid
            .axis_points(0)
            .iter()
            .map(|&x| nls_breather(a, b, run.time, x))
            .collect::<etdkit::Result<Vec<_>>>()?;
        let e = etdkit::bench::rel_l2_error(&final_values[0], &exact)?;
        let _ = writeln!(out, "relative L2 error vs analytic breather: {e:.6e}");
    }
    for f in files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(out)
}

pub fn bench(r: &Resolved, exec: Execution) -> anyhow::Result<String> {
    let mut plan = SweepPlan::desk(r.problem.clone(), &[]);
    plan.grid = r.grid.clone();
    plan.t_end = r.t_end;
    plan.schemes = r.manifest.schemes.clone();
    plan.ladder = r.ladder();
    plan.contour = r.contour;
    plan.repetitions = r.manifest.repetitions.unwrap_or(3);
    plan.exec = exec;
    plan.starter = starter(r);
    let outcome = run_sweep(&plan, None)?;

    let manifest_path = r.echo()?;
    let title = format!("{}  {:?}  T = {}", r.problem.model.title(), r.grid.sizes(), r.t_end);
    let mut files: Vec<PathBuf> = export(&outcome.records, &r.output, &title)?;
    files.push(manifest_path);

    let mut out = String::new();
    let _ = writeln!(out, "scheme  h/T  error  seconds");
    for rec in &outcome.records {
        let err = match rec.error {
            Some(e) => format!("{e:.3e}"),
            None => "unstable".into(),
        };
        let flag = if rec.stable && !rec.starter_converged { "  (starter not converged)" } else { "" };
        let _ = writeln!(out, "{}  {:.3e}  {}  {:.4}{}", rec.scheme, rec.h_over_t, err, rec.seconds, flag);
    }
    for f in &outcome.failures {
        let _ = writeln!(out, "failed: {} at h = {}: {}", f.scheme, f.h, f.message);
    }
    for (name, fit) in outcome.orders() {
        match fit {
            Ok(f) => {
                let _ = writeln!(out, "observed order {name}: {:.2}", f.slope);
            }
            Err(e) => {
                let _ = writeln!(out, "observed order {name}: n/a ({e})");
            }
        }
    }
    let _ = writeln!(out, "reference: PECEC736, {} steps", outcome.reference_steps);
    for f in files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(out)
}

pub fn order(schemes: &[String], probe: &str) -> anyhow::Result<String> {
    let probe = match probe {
        "logistic" => ScalarProbe::logistic(),
        "sine" => ScalarProbe::sine(),
        other => bail!("unknown probe {other:?}; expected logistic or sine"),
    };
    let names: Vec<String> = if schemes.is_empty() {
        registry().into_iter().filter(|s| s.shipped).map(|s| s.tableau.name).collect()
    } else {
        schemes.to_vec()
    };
    let mut out = String::from("scheme  declared  observed\n");
    for n in &names {
        let m = resolve_method(n).with_context(|| format!("scheme {n}"))?;
        let fit = certify_order(&m, &probe)?;
        let _ = writeln!(out, "{}  {}  {:.2}", m.name(), m.order(), fit.slope);
    }
    Ok(out)
}
