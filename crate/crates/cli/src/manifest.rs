//! Run manifests.
//!
//! A manifest is a TOML file (or the JSON echo written next to results)
//! holding everything needed to repeat a run or sweep:
//!
//! ```toml
//! # Problem name from `etdkit list`.
//! problem = "gl2"
//! # Scheme names from `etdkit list`, or paths to tableau files.
//! schemes = ["etdrk4", "abnorsett5"]
//! # Points per axis and final time. Omitted values come from the problem,
//! # at desk scale unless paper_scale = true.
//! n = 64
//! t_end = 30.0
//! # Either a single step (for `run`) ...
//! # h = 0.01
//! # ... or a geometric ladder, largest step first (for `bench`).
//! ladder = { count = 7, max = 1.875, min = 0.029296875 }
//! # Contour points; 64 in 1D and 32 in 2D/3D by default.
//! contour_points = 64
//! output = "results/gl2"
//! paper_scale = false
//! # Extra solution snapshots written by `run`.
//! snapshots = [10.0, 20.0]
//! # Start multistep schemes with the alternative zeroth difference.
//! reproduce_printed_delta0 = false
//! repetitions = 3
//! # Problem parameter overrides.
//! [params]
//! A = 0.0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use etdkit::bench::HLadder;
use etdkit::phifun::ContourSpec;
use etdkit::problems::{lookup_problem, Problem};
use etdkit::spectral::Grid;

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "ETDKIT_OUTPUT";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub problem: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<HLadder>,
    #[serde(default)]
    pub schemes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub paper_scale: bool,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub reproduce_printed_delta0: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// Reads TOML, or JSON when the file ends in `.json`.
pub fn load(path: &Path) -> anyhow::Result<RunManifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("invalid manifest {}", path.display()))
}

/// A manifest checked against the registries, with every default filled in.
pub struct Resolved {
    pub manifest: RunManifest,
    pub problem: Problem,
    pub grid: Grid,
    pub t_end: f64,
    pub contour: ContourSpec,
    pub output: PathBuf,
}

fn default_output(problem: &str, command: &str) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("etdkit-out"));
    root.join(format!("{problem}-{command}"))
}

impl RunManifest {
    pub fn resolve(mut self, command: &str) -> anyhow::Result<Resolved> {
        let mut problem = lookup_problem(&self.problem)?;
        for (k, v) in &self.params {
            problem = problem.with_param(k, *v)?;
        }
        let n = self.n.unwrap_or(if self.paper_scale { problem.paper_size } else { problem.desk_size });
        let grid = problem.grid(n)?;
        let t_end = self.t_end.unwrap_or(match command {
            // Single runs go to the problem's own horizon; sweeps use the
            // reduced one unless asked for the full setting.
            "run" => problem.t_end,
            _ if self.paper_scale => problem.t_end,
            _ => problem.desk_t_end,
        });
        if !(t_end > 0.0 && t_end.is_finite()) {
            bail!("t_end must be positive, got {t_end}");
        }
        let contour = match self.contour_points {
            Some(m) => ContourSpec::new(m)?,
            None => ContourSpec::for_dims(problem.dims),
        };
        if self.schemes.is_empty() {
            self.schemes.push("ETDRK4".into());
        }
        for s in &self.schemes {
            etdkit::bench::resolve_method(s)?;
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                bail!("h must be positive, got {h}");
            }
        }
        if let Some(l) = &self.ladder {
            l.steps()?;
        }
        if let Some(bad) = self.snapshots.iter().find(|&&t| !(0.0..=t_end).contains(&t)) {
            bail!("snapshot time {bad} is outside [0, {t_end}]");
        }
        if self.repetitions == Some(0) {
            bail!("repetitions must be at least 1");
        }
        let output = self.output.clone().unwrap_or_else(|| default_output(&problem.name, command));
        self.problem = problem.name.clone();
        self.n = Some(n);
        self.t_end = Some(t_end);
        self.contour_points = Some(contour.points);
        self.output = Some(output.clone());
        Ok(Resolved {
            manifest: self,
            problem,
            grid,
            t_end,
            contour,
            output,
        })
    }
}

impl Resolved {
    /// The ladder given, or the problem's default `h/T` range.
    pub fn ladder(&self) -> HLadder {
        self.manifest.ladder.unwrap_or_else(|| {
            let (hi, lo) = self.problem.h_over_t;
            HLadder {
                count: (hi / lo).log2().round() as usize + 1,
                max: hi * self.t_end,
                min: lo * self.t_end,
            }
        })
    }

    /// The step given, or the geometric middle of the default range.
    pub fn h(&self) -> f64 {
        self.manifest.h.unwrap_or_else(|| {
            let (hi, lo) = self.problem.h_over_t;
            (hi * lo).sqrt() * self.t_end
        })
    }

    /// Writes the resolved manifest as `manifest.json` in the output directory.
    pub fn echo(&self) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(&self.output).with_context(|| format!("creating {}", self.output.display()))?;
        let path = self.output.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
