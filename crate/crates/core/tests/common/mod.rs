//! Test-only oracles, independent of the library's evaluation paths.
#![allow(dead_code)]

pub mod dd;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::One;

use etdkit::spectral::Grid;

use dd::{Cdd, Dd};

/// φ_l(z) to ~30 digits: double-double Taylor series for |z| ≤ 4, else the
/// closed form `(e^z − Σ_{k<l} z^k/k!)/z^l` in double-double with `e^z`
/// from libm (its rounding is not amplified for |z| > 4).
pub fn phi_oracle(l: usize, z: Complex64) -> Complex64 {
    let zz = Cdd::from(z);
    if z.norm() <= 4.0 {
        let mut term = Cdd::real(Dd::one().div(Dd::factorial(l)));
        let mut sum = term;
        for j in 1..400 {
            term = term.mul(zz).scale(Dd::one().div(Dd::from((j + l) as f64)));
            sum = sum.add(term);
            if term.norm_f64() < 1e-34 * sum.norm_f64() {
                break;
            }
        }
        sum.to_c64()
    } else {
        let mut poly = Cdd::zero();
        let mut power = Cdd::real(Dd::one());
        for k in 0..l {
            poly = poly.add(power.scale(Dd::one().div(Dd::factorial(k))));
            power = power.mul(zz);
        }
        Cdd::from(z.exp()).sub(poly).div(power).to_c64()
    }
}

/// Coefficients of C(s, j) = s(s−1)…(s−j+1)/j! as exact integers over j!.
fn falling_factorial_coeffs(j: usize) -> Vec<i128> {
    let mut poly: Vec<i128> = vec![1];
    for i in 0..j {
        let mut next = vec![0i128; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= c * i as i128;
        }
        poly = next;
    }
    poly
}

/// γ_j(k, z) = ∫_0^k e^{(k−s)z} C(s, j) ds as a double-double power series
/// in z, using ∫_0^k (k−s)^n s^m ds = k^{n+m+1} n! m!/(n+m+1)!.
/// Valid while k|z| stays moderate (≲ 25).
pub fn gamma_oracle(j: usize, k: usize, z: Complex64) -> Complex64 {
    assert!(k as f64 * z.norm() <= 25.0, "gamma oracle out of range");
    let coeffs = falling_factorial_coeffs(j);
    let jfact = Dd::factorial(j);
    let kd = Dd::from(k as f64);
    let zz = Cdd::from(z);
    let mut sum = Cdd::zero();
    let mut zpow = Cdd::real(Dd::one());
    for n in 0..300 {
        // Σ_m a_m k^{n+m+1} m!/(n+m+1)!
        let mut inner = Dd::zero();
        // Same sum with |a_m|: the inner coefficient itself can vanish
        // (e.g. at n + 3 = 2k for j = 2), so it cannot drive the stop.
        let mut bound = 0.0;
        for (m, &a) in coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let v = Dd::from_i128(a)
                .mul(kd.powi(n + m + 1))
                .mul(Dd::factorial(m))
                .div(Dd::factorial(n + m + 1));
            bound += v.to_f64().abs();
            inner = inner.add(v);
        }
        let term = zpow.scale(inner.div(jfact));
        sum = sum.add(term);
        let term_bound = bound * zpow.norm_f64();
        if n > 5 && term_bound <= 1e-34 * sum.norm_f64().max(1e-300) {
            break;
        }
        zpow = zpow.mul(zz);
    }
    sum.to_c64()
}

/// Relative error with magnitudes below the smallest normal double
/// compared on an absolute floor of 1e-300.
pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Log-spaced values from 10^lo to 10^hi.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Classical RK4 for a scalar autonomous ODE.
pub fn rk4_scalar(f: impl Fn(f64) -> f64, u0: f64, h: f64, steps: usize) -> f64 {
    let mut u = u0;
    for _ in 0..steps {
        let k1 = f(u);
        let k2 = f(u + 0.5 * h * k1);
        let k3 = f(u + 0.5 * h * k2);
        let k4 = f(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    u
}

fn binom(n: usize, k: usize) -> Rational64 {
    (0..k).fold(Rational64::one(), |acc, i| acc * Rational64::new((n - i) as i64, (i + 1) as i64))
}

/// Classical k-step Adams–Bashforth weights for f_n, f_{n−1}, … from the
/// backward-difference coefficients γ_j = 1 − Σ_{i<j} γ_i/(j+1−i).
pub fn classical_ab(k: usize) -> Vec<Rational64> {
    let mut g = vec![Rational64::one()];
    for j in 1..k {
        let s: Rational64 = (0..j).map(|i| g[i] / Rational64::new((j + 1 - i) as i64, 1)).sum();
        g.push(Rational64::one() - s);
    }
    (0..k)
        .map(|i| {
            let s: Rational64 = (i..k).map(|j| g[j] * binom(j, i)).sum();
            if i % 2 == 0 { s } else { -s }
        })
        .collect()
}

/// Classical Adams–Moulton weights for f_{n+1}, f_n, …, f_{n+2−k} (order
/// k) from γ*_j = −Σ_{i<j} γ*_i/(j+1−i).
pub fn classical_am(k: usize) -> Vec<Rational64> {
    let mut g = vec![Rational64::one()];
    for j in 1..k {
        let s: Rational64 = (0..j).map(|i| g[i] / Rational64::new((j + 1 - i) as i64, 1)).sum();
        g.push(-s);
    }
    (0..k)
        .map(|i| {
            let s: Rational64 = (i..k).map(|j| g[j] * binom(j, i)).sum();
            if i % 2 == 0 { s } else { -s }
        })
        .collect()
}

/// Largest coefficient at the highest wavenumbers (|k| >= N/2 - 2 on some
/// axis), relative to the largest coefficient overall.
pub fn trailing_ratio(coeffs: &[Complex64], grid: &Grid) -> f64 {
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail = (0..grid.len())
        .filter(|&i| {
            (0..grid.dims()).any(|a| {
                let n = grid.sizes()[a] as i64;
                let j = grid.axis_index(i, a) as i64;
                let k = if j < n / 2 { j } else { j - n };
                k.abs() >= n / 2 - 2
            })
        })
        .map(|i| coeffs[i].norm())
        .fold(0.0, f64::max);
    tail / peak
}
