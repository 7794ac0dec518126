//! Quick numerical self-checks, one table row each.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;

use etdkit::integrator::{integrate, IntegrateOptions, LinearSystem, Method};
use etdkit::phifun::{phi_contour, phi_scalar, ContourSpec};
use etdkit::tableau::{abnorsett, certify_order, etdrk4, lawson4, registry, ScalarProbe};

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(move |i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
}

/// Contour means against the direct series/recurrence evaluation.
fn phi_kernel() -> Check {
    let spec = ContourSpec::new(64).expect("64 points");
    let mut lambdas: Vec<Complex64> = log_grid(1e-6, 1e6, 49).map(|r| Complex64::new(-r, 0.0)).collect();
    for r in log_grid(1e-6, 1e4, 41) {
        lambdas.push(Complex64::new(0.0, r));
        lambdas.push(Complex64::new(0.0, -r));
    }
    let mut worst: f64 = 0.0;
    for l in 0..=9 {
        for &z in &lambdas {
            let (Ok(c), Ok(d)) = (phi_contour(l, z, &spec), phi_scalar(l, z)) else {
                return check("phi kernel", false, format!("evaluation failed at l={l}, z={z}"));
            };
            worst = worst.max((c - d).norm() / d.norm().max(1e-300));
        }
    }
    check("phi kernel", worst <= 1e-12, format!("max relative difference {worst:.2e}"))
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn show(w: &[Rational64]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn classical_reduction() -> Vec<Check> {
    let rk4 = vec![r(1, 6), r(1, 3), r(1, 3), r(1, 6)];
    let ab4 = vec![r(55, 24), r(-59, 24), r(37, 24), r(-9, 24)];
    let mut out = Vec::new();
    for t in [etdrk4(), lawson4()] {
        let z = t.at_zero();
        out.push(check(format!("{} at z=0 is RK4", t.name), z.b == rk4, show(&z.b)));
    }
    let ab = abnorsett(4).expect("q = 4");
    let z = ab.at_zero();
    let w: Vec<Rational64> = z.b.iter().chain(&z.v).copied().collect();
    out.push(check("ABNørsett4 at z=0 is AB4", w == ab4, show(&w)));
    let bad: Vec<String> = registry()
        .into_iter()
        .filter(|s| s.shipped)
        .map(|s| s.tableau)
        .filter(|t| {
            let z = t.at_zero();
            z.b.iter().chain(&z.v).copied().sum::<Rational64>() != Rational64::from_integer(1)
        })
        .map(|t| t.name)
        .collect();
    out.push(check("weights at z=0 sum to 1", bad.is_empty(), bad.join(",")));
    out
}

fn linear_exactness() -> Check {
    // Deterministic spread of eigenvalues with Re <= 0 and |λ| <= 1000.
    let diag: Vec<Complex64> = (0..64)
        .map(|k| {
            let radius = 10f64.powf(-2.0 + 5.0 * ((k * 37 % 64) as f64 / 63.0));
            let angle = std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (k * 11 % 64) as f64 / 63.0;
            Complex64::from_polar(radius.min(1e3), angle)
        })
        .collect();
    let sys = LinearSystem { diag: diag.clone() };
    let u0: Vec<Complex64> = (0..64).map(|k| Complex64::new(1.0, k as f64 / 64.0)).collect();
    let t_end = 0.01;
    let exact: Vec<Complex64> = diag.iter().zip(&u0).map(|(l, u)| (l * t_end).exp() * u).collect();
    let den = exact.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let mut worst: f64 = 0.0;
    let mut who = String::new();
    for s in registry().into_iter().filter(|s| s.shipped && s.tableau.satisfies_summation) {
        let m = Method::Tableau(s.tableau);
        let e = match integrate(&sys, &m, t_end / 100.0, t_end, &u0, &IntegrateOptions::default()) {
            Ok(run) => run.u.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt() / den,
            Err(_) => f64::INFINITY,
        };
        if e > worst {
            worst = e;
            who = m.name();
        }
    }
    check("linear exactness (100 steps)", worst <= 1e-12, format!("worst {worst:.2e} ({who})"))
}

fn orders() -> Vec<Check> {
    let probe = ScalarProbe::logistic();
    registry()
        .into_iter()
        .filter(|s| s.shipped)
        .map(|s| {
            let m = Method::Tableau(s.tableau);
            let p = m.order() as f64;
            let tol = if p >= 6.0 { 0.4 } else { 0.3 };
            match certify_order(&m, &probe) {
                Ok(f) => check(
                    format!("order of {}", m.name()),
                    (f.slope - p).abs() <= tol,
                    format!("{:.2} (declared {p})", f.slope),
                ),
                Err(e) => check(format!("order of {}", m.name()), false, e.to_string()),
            }
        })
        .collect()
}

pub fn run_all() -> Vec<Check> {
    let mut out = vec![phi_kernel()];
    out.extend(classical_reduction());
    out.push(linear_exactness());
    out.extend(orders());
    out
}

pub fn report(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(s, "{}  {}  {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(s, "{} checks, {} failed", checks.len(), failed);
    s
}
