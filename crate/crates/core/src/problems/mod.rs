//! The eleven benchmark problems: five in 1D, three each in 2D and 3D.
//!
//! Each [`Problem`] knows its splitting `u_t = Lu + N(u)` into a diagonal
//! stiff part and a pseudospectral nonlinear part, its initial condition,
//! domain, horizon and default grids. Parameters can be overridden by name.

mod analytic;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{diff_symbol, laplacian, Grid, NonlinearOp, SpectralSymbol, SpectralSystem};

pub use analytic::{kdv_phase_shifts, kdv_phase_shifts_inverse_scattering, kdv_soliton, nls_breather};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Model {
    AllenCahn,
    CahnHilliard,
    Kdv,
    KuramotoSivashinsky,
    Nls,
    GinzburgLandau,
    Schnakenberg,
    SwiftHohenberg,
}

impl Model {
    pub fn title(self) -> &'static str {
        match self {
            Model::AllenCahn => "Allen-Cahn",
            Model::CahnHilliard => "Cahn-Hilliard",
            Model::Kdv => "Korteweg-de Vries",
            Model::KuramotoSivashinsky => "Kuramoto-Sivashinsky",
            Model::Nls => "nonlinear Schrodinger",
            Model::GinzburgLandau => "Ginzburg-Landau",
            Model::Schnakenberg => "Schnakenberg",
            Model::SwiftHohenberg => "Swift-Hohenberg",
        }
    }

    /// Classification of the stiff linear part.
    pub fn stiff_part(self) -> &'static str {
        match self {
            Model::AllenCahn | Model::GinzburgLandau | Model::Schnakenberg => "second-order diffusive",
            Model::CahnHilliard | Model::KuramotoSivashinsky | Model::SwiftHohenberg => {
                "fourth-order diffusive"
            }
            Model::Kdv => "third-order dispersive",
            Model::Nls => "second-order dispersive",
        }
    }

    pub fn is_dispersive(self) -> bool {
        matches!(self, Model::Kdv | Model::Nls)
    }

    fn components(self) -> usize {
        if self == Model::Schnakenberg {
            2
        } else {
            1
        }
    }

    fn real(self) -> bool {
        !matches!(self, Model::Nls | Model::GinzburgLandau)
    }

    fn default_params(self) -> &'static [(&'static str, f64)] {
        match self {
            Model::AllenCahn => &[("epsilon", 5e-2)],
            Model::CahnHilliard => &[("alpha", 1e-2), ("gamma", 1e-3)],
            Model::Kdv => &[("A", 25.0), ("B", 16.0)],
            Model::KuramotoSivashinsky => &[],
            Model::Nls => &[("A", 2.0), ("B", 1.0)],
            Model::GinzburgLandau => &[("A", 0.0), ("B", 1.5)],
            Model::Schnakenberg => &[
                ("eps_u", 1.0),
                ("eps_v", 10.0),
                ("gamma", 3.0),
                ("a", 0.1),
                ("b", 0.9),
            ],
            Model::SwiftHohenberg => &[("r", 0.1), ("g", 1.0)],
        }
    }
}

/// Registry names in listing order.
pub const PROBLEM_NAMES: [&str; 11] =
    ["ac", "ch", "kdv", "ks", "nls", "gl2", "gl3", "schnak2", "schnak3", "sh2", "sh3"];

#[derive(Clone, Debug, Serialize)]
pub struct Problem {
    pub name: String,
    pub model: Model,
    pub dims: usize,
    /// Same interval on every axis.
    pub interval: (f64, f64),
    pub t_end: f64,
    /// Points per axis at full scale.
    pub paper_size: usize,
    /// Points per axis for quick runs.
    pub desk_size: usize,
    /// Horizon for quick runs.
    pub desk_t_end: f64,
    /// Default sweep range of `h/T`, largest first.
    pub h_over_t: (f64, f64),
    params: BTreeMap<String, f64>,
}

/// Looks up a registry name such as `"ks"` or `"schnak3"`.
pub fn lookup_problem(name: &str) -> Result<Problem> {
    let lower = name.to_ascii_lowercase();
    let (base, dims) = match lower.char_indices().last() {
        Some((i, c @ ('2' | '3'))) => (&lower[..i], c.to_digit(10).unwrap() as usize),
        _ => (lower.as_str(), 1),
    };
    get_problem(base, dims).map_err(|_| Error::Unknown {
        kind: "problem",
        name: name.to_string(),
    })
}

/// Looks up a problem by family name and dimension; accepts the registry
/// stems (`ac`, `gl`, `schnak`, …) and the long names (`allen-cahn`,
/// `schnakenberg`, …).
pub fn get_problem(name: &str, dims: usize) -> Result<Problem> {
    let model = match name.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
        "ac" | "allen-cahn" | "allencahn" => Model::AllenCahn,
        "ch" | "cahn-hilliard" | "cahnhilliard" => Model::CahnHilliard,
        "kdv" | "korteweg-de-vries" => Model::Kdv,
        "ks" | "kuramoto-sivashinsky" => Model::KuramotoSivashinsky,
        "nls" | "schrodinger" => Model::Nls,
        "gl" | "ginzburg-landau" => Model::GinzburgLandau,
        "schnak" | "schnakenberg" => Model::Schnakenberg,
        "sh" | "swift-hohenberg" => Model::SwiftHohenberg,
        _ => {
            return Err(Error::Unknown {
                kind: "problem",
                name: name.to_string(),
            })
        }
    };
    let one_d = matches!(
        model,
        Model::AllenCahn | Model::CahnHilliard | Model::Kdv | Model::KuramotoSivashinsky | Model::Nls
    );
    if one_d != (dims == 1) || !(1..=3).contains(&dims) {
        return Err(Error::Unknown {
            kind: "problem",
            name: format!("{name} in {dims}D"),
        });
    }
    let (reg, interval, t_end, desk_t_end) = match model {
        Model::AllenCahn => ("ac".to_string(), (0.0, 2.0 * PI), 60.0, 10.0),
        Model::CahnHilliard => ("ch".to_string(), (-1.0, 1.0), 12.0, 2.0),
        Model::Kdv => ("kdv".to_string(), (-PI, PI), 1e-2, 4e-3),
        Model::KuramotoSivashinsky => ("ks".to_string(), (0.0, 32.0 * PI), 100.0, 30.0),
        Model::Nls => ("nls".to_string(), (-PI, PI), 2.0, 2.0),
        Model::GinzburgLandau => (format!("gl{dims}"), (0.0, 100.0), 10.0, 2.0),
        Model::Schnakenberg => (format!("schnak{dims}"), (0.0, 30.0), 20.0, 5.0),
        Model::SwiftHohenberg => (format!("sh{dims}"), (0.0, 20.0), 20.0, 5.0),
    };
    let (paper_size, desk_size) = match (model, dims) {
        (Model::Kdv, _) => (512, 512),
        (Model::KuramotoSivashinsky, _) => (512, 64),
        (_, 1) => (512, 128),
        (_, 2) => (128, 64),
        _ => (128, 32),
    };
    let h_over_t = match model {
        // The soliton amplitudes make the nonlinear term stiff as well.
        Model::Kdv => (2f64.powi(-9), 2f64.powi(-14)),
        _ => (2f64.powi(-4), 2f64.powi(-10)),
    };
    Ok(Problem {
        name: reg,
        model,
        dims,
        interval,
        t_end,
        paper_size,
        desk_size,
        desk_t_end,
        h_over_t,
        params: model
            .default_params()
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect(),
    })
}

/// Every registered problem with its default settings.
pub fn all_problems() -> Vec<Problem> {
    PROBLEM_NAMES
        .iter()
        .map(|n| lookup_problem(n).expect("registry names resolve"))
        .collect()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sech2(x: f64) -> f64 {
    let s = 1.0 / x.cosh();
    s * s
}

impl Problem {
    pub fn components(&self) -> usize {
        self.model.components()
    }

    /// Whether the solution is real in value space.
    pub fn is_real(&self) -> bool {
        self.model.real()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self> {
        match self.params.get_mut(name) {
            Some(v) if value.is_finite() => {
                *v = value;
                Ok(self)
            }
            Some(_) => Err(Error::InvalidInput(format!("parameter {name} must be finite"))),
            None => Err(Error::Unknown {
                kind: "parameter",
                name: format!("{name} (for {})", self.name),
            }),
        }
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::cube(self.dims, n, self.interval)
    }

    pub fn paper_grid(&self) -> Grid {
        self.grid(self.paper_size).expect("valid default grid")
    }

    pub fn desk_grid(&self) -> Grid {
        self.grid(self.desk_size).expect("valid default grid")
    }

    /// Upper bound on the real parts of the linear symbol over all modes.
    pub fn growth_bound(&self) -> f64 {
        match self.model {
            Model::AllenCahn | Model::GinzburgLandau => 1.0,
            Model::CahnHilliard => self.param("alpha") / (4.0 * self.param("gamma")),
            Model::KuramotoSivashinsky => 0.25,
            Model::SwiftHohenberg => self.param("r"),
            Model::Schnakenberg | Model::Kdv | Model::Nls => 0.0,
        }
    }

    /// Diagonal of `L`, one symbol per component.
    pub fn linear(&self, grid: &Grid) -> Result<Vec<SpectralSymbol>> {
        self.check_grid(grid)?;
        let d = |p| diff_symbol(p, 0, grid);
        let i = Complex64::new(0.0, 1.0);
        Ok(match self.model {
            Model::AllenCahn => vec![&(&d(2)? * self.param("epsilon")) + 1.0],
            Model::CahnHilliard => {
                let inner = &(-&d(2)?) - &(&d(4)? * self.param("gamma"));
                vec![&inner * self.param("alpha")]
            }
            Model::Kdv => vec![-&d(3)?],
            Model::KuramotoSivashinsky => vec![&(-&d(2)?) - &d(4)?],
            Model::Nls => vec![&d(2)? * i],
            Model::GinzburgLandau => {
                vec![&(&laplacian(grid) * Complex64::new(1.0, self.param("A"))) + 1.0]
            }
            Model::Schnakenberg => {
                let lap = laplacian(grid);
                vec![
                    &(&lap * self.param("eps_u")) + (-self.param("gamma")),
                    &lap * self.param("eps_v"),
                ]
            }
            Model::SwiftHohenberg => {
                let lap = laplacian(grid);
                let sq = &lap * &lap;
                vec![&(&(&lap * -2.0) - &sq) + (self.param("r") - 1.0)]
            }
        })
    }

    /// Pseudospectral nonlinear part.
    pub fn nonlinear(&self, grid: &Grid) -> Result<NonlinearOp> {
        self.check_grid(grid)?;
        Ok(match self.model {
            Model::AllenCahn => NonlinearOp::scalar(|u| -u * u * u),
            Model::CahnHilliard => {
                let outer = &diff_symbol(2, 0, grid)? * self.param("alpha");
                NonlinearOp::scalar(|u| u * u * u).with_outer(vec![outer])
            }
            Model::Kdv | Model::KuramotoSivashinsky => {
                let outer = &diff_symbol(1, 0, grid)? * -0.5;
                NonlinearOp::scalar(|u| u * u).with_outer(vec![outer])
            }
            Model::Nls => NonlinearOp::scalar(|u| Complex64::new(0.0, u.norm_sqr()) * u),
            Model::GinzburgLandau => {
                let c = Complex64::new(1.0, self.param("B"));
                NonlinearOp::scalar(move |u| -c * u * u.norm_sqr())
            }
            Model::Schnakenberg => {
                let (g, a, b) = (self.param("gamma"), self.param("a"), self.param("b"));
                NonlinearOp::new(2, move |u, out| {
                    let uuv = u[0] * u[0] * u[1];
                    out[0] = g * (a + uuv);
                    out[1] = g * (b - uuv);
                })
            }
            Model::SwiftHohenberg => {
                let g = self.param("g");
                NonlinearOp::scalar(move |u| g * u * u - u * u * u)
            }
        })
    }

    /// Initial condition in value space, one array per component.
    pub fn initial_values(&self, grid: &Grid) -> Result<Vec<Vec<Complex64>>> {
        self.check_grid(grid)?;
        Ok(match self.model {
            Model::AllenCahn => vec![grid.sample(|x| {
                let x = x[0];
                re((2.0 * x.sin()).tanh() / 3.0 - (-23.5 * (x - PI / 2.0).powi(2)).exp()
                    + (-27.0 * (x - 4.2).powi(2)).exp()
                    + (-38.0 * (x - 5.4).powi(2)).exp())
            })],
            Model::CahnHilliard => vec![grid.sample(|x| {
                let x = x[0];
                re((4.0 * PI * x).sin().powi(5) / 5.0 - 0.8 * (PI * x).sin())
            })],
            Model::Kdv => {
                let (a, b) = (self.param("A"), self.param("B"));
                vec![grid.sample(|x| {
                    let x = x[0];
                    re(3.0 * a * a * sech2(a / 2.0 * (x + 2.0)) + 3.0 * b * b * sech2(b / 2.0 * (x + 1.0)))
                })]
            }
            Model::KuramotoSivashinsky => {
                vec![grid.sample(|x| re((x[0] / 16.0).cos() * (1.0 + (x[0] / 16.0).sin())))]
            }
            Model::Nls => {
                let (a, b) = (self.param("A"), self.param("B"));
                let root = 2.0f64.sqrt() * (2.0 - b * b).sqrt();
                vec![grid.sample(|x| re(2.0 * a * b * b / (2.0 - root * (a * b * x[0]).cos()) - a))]
            }
            Model::GinzburgLandau => vec![grid.sample(|x| {
                re((-0.1 * x.iter().map(|&xi| (xi - 50.0).powi(2)).sum::<f64>()).exp())
            })],
            Model::Schnakenberg => {
                let (a, b) = (self.param("a"), self.param("b"));
                let g = self.interval.1 - self.interval.0;
                let u = grid.sample(|x| {
                    let r2: f64 = x.iter().map(|&xi| (xi - g / 2.15).powi(2)).sum();
                    re(a + b - (-2.0 * r2).exp())
                });
                // Weight 1 on x and 2 on every later axis.
                let v = grid.sample(|x| {
                    let r2: f64 = x
                        .iter()
                        .enumerate()
                        .map(|(k, &xi)| if k == 0 { 1.0 } else { 2.0 } * (xi - g / 2.0).powi(2))
                        .sum();
                    re(b / (a + b).powi(2) + (-2.0 * r2).exp())
                });
                vec![u, v]
            }
            Model::SwiftHohenberg => vec![grid.sample(|x| {
                let slow: f64 = x.iter().map(|&xi| (PI * xi / 10.0).sin()).sum();
                let fast: Vec<f64> = x.iter().map(|&xi| (PI * xi / 2.0).sin()).collect();
                let mut pairs = 0.0;
                for i in 0..fast.len() {
                    for j in i + 1..fast.len() {
                        pairs += fast[i] * fast[j];
                    }
                }
                re(0.25 * (slow + pairs))
            })],
        })
    }

    /// The semidiscrete system on `grid`.
    pub fn system(&self, grid: &Grid, exec: Execution) -> Result<SpectralSystem> {
        SpectralSystem::new(grid, &self.linear(grid)?, self.nonlinear(grid)?, self.is_real(), exec)
    }

    /// Constant state `(a + b, b/(a + b)²)` of the Schnakenberg system.
    pub fn steady_state(&self) -> Option<Vec<f64>> {
        if self.model != Model::Schnakenberg {
            return None;
        }
        let (a, b) = (self.param("a"), self.param("b"));
        Some(vec![a + b, b / (a + b).powi(2)])
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dims() != self.dims {
            return Err(Error::Dimension(format!(
                "{} is {}-dimensional, grid has {} axes",
                self.name,
                self.dims,
                grid.dims()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip() {
        for p in all_problems() {
            assert_eq!(lookup_problem(&p.name).unwrap().name, p.name);
        }
        assert_eq!(get_problem("schnakenberg", 3).unwrap().name, "schnak3");
        assert!(lookup_problem("gs2").is_err());
        assert!(get_problem("ks", 2).is_err());
        assert!(get_problem("gl", 1).is_err());
    }

    #[test]
    fn overrides() {
        let p = lookup_problem("ac").unwrap().with_param("epsilon", 0.1).unwrap();
        assert_eq!(p.param("epsilon"), 0.1);
        assert!(lookup_problem("ac").unwrap().with_param("nu", 1.0).is_err());
    }
}
