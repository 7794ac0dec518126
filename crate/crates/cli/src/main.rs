mod commands;
mod manifest;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use etdkit::Execution;
use manifest::RunManifest;

/// Exponential integrators for stiff periodic PDEs.
#[derive(Parser)]
#[command(name = "etdkit", version)]
struct Cli {
    /// Cap on worker threads (1 runs sequentially; 0 uses every core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the scheme and problem registries.
    List,
    /// Integrate one problem with one scheme and write snapshots.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scheme name or tableau file.
        #[arg(long)]
        scheme: Option<String>,
        /// Time step (default: middle of the problem's sweep range).
        #[arg(long)]
        h: Option<f64>,
        /// Comma-separated extra snapshot times.
        #[arg(long, value_delimiter = ',')]
        snapshots: Vec<f64>,
        /// Print the error against the analytic solution (NLS breather).
        #[arg(long)]
        compare_analytic: bool,
    },
    /// Sweep schemes over a ladder of time steps against a reference solution.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Comma-separated scheme names or tableau files.
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<String>,
        /// Reduced grid and horizon (the default).
        #[arg(long, conflicts_with = "paper_scale")]
        desk: bool,
        /// Number of step sizes in the ladder.
        #[arg(long)]
        count: Option<usize>,
        /// Largest step.
        #[arg(long)]
        h_max: Option<f64>,
        /// Smallest step.
        #[arg(long)]
        h_min: Option<f64>,
        /// Timed repetitions per point.
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Measure convergence orders on a scalar test equation.
    Order {
        /// Schemes to measure (default: every certified scheme).
        schemes: Vec<String>,
        /// logistic (u' = -u + u^2) or sine (u' = -u + sin u).
        #[arg(long, default_value = "logistic")]
        probe: String,
    },
    /// Check the φ-functions, tableaux and orders; exit 0 iff all pass.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// Problem name from `etdkit list`.
    problem: Option<String>,
    /// Manifest file (TOML, or the JSON echo of an earlier run).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Points per axis.
    #[arg(long)]
    n: Option<usize>,
    /// Final time.
    #[arg(long)]
    t_end: Option<f64>,
    /// Full grids and horizons.
    #[arg(long)]
    paper_scale: bool,
    /// Contour points.
    #[arg(long)]
    contour: Option<usize>,
    /// Output directory (default: <root>/<problem>-<command>, with the root
    /// taken from $ETDKIT_OUTPUT or else ./etdkit-out).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Problem parameter override, NAME=VALUE; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Start multistep schemes with Δ⁰N(u⁰) = u⁰.
    #[arg(long)]
    reproduce_printed_delta0: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad value in {s:?}"))?;
    Ok((k.trim().to_string(), v))
}

impl Common {
    fn manifest(self) -> anyhow::Result<RunManifest> {
        let mut m = match &self.manifest {
            Some(p) => manifest::load(p)?,
            None => RunManifest::default(),
        };
        match (self.problem, m.problem.is_empty()) {
            (Some(p), _) => m.problem = p,
            (None, true) => anyhow::bail!("no problem given; try `etdkit list`"),
            (None, false) => {}
        }
        m.n = self.n.or(m.n);
        m.t_end = self.t_end.or(m.t_end);
        m.paper_scale |= self.paper_scale;
        m.contour_points = self.contour.or(m.contour_points);
        m.output = self.output.or(m.output);
        m.reproduce_printed_delta0 |= self.reproduce_printed_delta0;
        m.params.extend(self.params);
        Ok(m)
    }
}

enum Failure {
    Invalid(anyhow::Error),
    Unstable(anyhow::Error),
    Other(anyhow::Error),
    /// Output to print before exiting with status 1.
    Failed(String),
}

fn classify(e: anyhow::Error) -> Failure {
    use etdkit::Error as E;
    match e.chain().find_map(|c| c.downcast_ref::<E>()) {
        Some(E::Unstable { .. } | E::NonFinite(_)) => Failure::Unstable(e),
        Some(E::Io { .. } | E::Csv { .. }) => Failure::Other(e),
        Some(E::InvalidOperation(_)) if e.to_string().contains("reference") => Failure::Unstable(e),
        _ => Failure::Invalid(e),
    }
}

fn execute(cli: Cli) -> Result<String, Failure> {
    let exec = if cli.jobs == 1 { Execution::Sequential } else { Execution::Parallel };
    let jobs = cli.jobs;
    match cli.command {
        Command::List => Ok(commands::list()),
        Command::Run {
            common,
            scheme,
            h,
            snapshots,
            compare_analytic,
        } => {
            let mut m = common.manifest().map_err(Failure::Invalid)?;
            if let Some(s) = scheme {
                m.schemes = vec![s];
            }
            m.h = h.or(m.h);
            if !snapshots.is_empty() {
                m.snapshots = snapshots;
            }
            let r = m.resolve("run").map_err(Failure::Invalid)?;
            exec.with_jobs(jobs, || commands::run(&r, exec, compare_analytic)).map_err(classify)
        }
        Command::Bench {
            common,
            schemes,
            desk: _,
            count,
            h_max,
            h_min,
            repetitions,
        } => {
            let mut m = common.manifest().map_err(Failure::Invalid)?;
            if !schemes.is_empty() {
                m.schemes = schemes;
            }
            m.repetitions = repetitions.or(m.repetitions);
            let r = m.resolve("bench").map_err(Failure::Invalid)?;
            let mut ladder = r.ladder();
            if count.is_some() || h_max.is_some() || h_min.is_some() {
                ladder.count = count.unwrap_or(ladder.count);
                ladder.max = h_max.unwrap_or(ladder.max);
                ladder.min = h_min.unwrap_or(ladder.min);
                ladder.steps().map_err(|e| Failure::Invalid(e.into()))?;
            }
            let mut r = r;
            r.manifest.ladder = Some(ladder);
            exec.with_jobs(jobs, || commands::bench(&r, exec)).map_err(classify)
        }
        Command::Order { schemes, probe } => {
            exec.with_jobs(jobs, || commands::order(&schemes, &probe)).map_err(classify)
        }
        Command::Selftest => {
            let checks = exec.with_jobs(jobs, selftest::run_all);
            let text = selftest::report(&checks);
            if checks.iter().all(|c| c.pass) {
                Ok(text)
            } else {
                Err(Failure::Failed(text))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Unstable(e)) => {
            eprintln!("unstable: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Failed(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn params_parse() {
        assert_eq!(parse_param("A=2.5").unwrap(), ("A".to_string(), 2.5));
        assert!(parse_param("A").is_err());
    }
}
