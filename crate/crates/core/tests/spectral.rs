use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use etdkit::integrator::{integrate, IntegrateOptions, Method, SemilinearSystem};
use etdkit::spectral::{
    apply_nonlinear, diff_symbol, laplacian, to_coeffs, to_values, wavenumbers, FftPlan, Grid,
    NonlinearOp, SpectralSymbol, SpectralSystem,
};
use etdkit::tableau::{abnorsett, etdrk4};
use etdkit::Execution;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn roundtrip_random_real_field() {
    let g = Grid::new(&[64], &[(0.0, 2.0 * PI)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v: Vec<Complex64> = (0..64).map(|_| re(rng.random_range(-1.0..1.0))).collect();
    let back = to_values(&to_coeffs(&v, &g).unwrap(), &g, true).unwrap();
    assert!(max_diff(&back, &v) <= 1e-13 * max_abs(&v));
}

#[test]
fn shape_mismatch_is_an_error() {
    let g = Grid::new(&[8], &[(0.0, 1.0)]).unwrap();
    assert!(to_coeffs(&[re(1.0); 6], &g).is_err());
    let plan = FftPlan::new(&g);
    let op = NonlinearOp::scalar(|u| u);
    assert!(apply_nonlinear(&[re(0.0); 7], &op, &plan, true, Execution::Sequential).is_err());
}

#[test]
fn cube_of_constant() {
    let g = Grid::cube(2, 8, (0.0, 1.0)).unwrap();
    let plan = FftPlan::new(&g);
    let c = to_coeffs(&vec![re(1.5); g.len()], &g).unwrap();
    let out = apply_nonlinear(&c, &NonlinearOp::scalar(|u| u * u * u), &plan, true, Execution::Sequential)
        .unwrap();
    assert!((out[0] - 3.375).norm() < 1e-14);
    assert!(out[1..].iter().all(|x| x.norm() < 1e-14));
}

#[test]
fn kdv_nonlinearity_on_sine() {
    let g = Grid::new(&[32], &[(-PI, PI)]).unwrap();
    let plan = FftPlan::new(&g);
    let d1 = diff_symbol(1, 0, &g).unwrap();
    let op = NonlinearOp::scalar(|u| u * u).with_outer(vec![&d1 * -0.5]);
    let c = to_coeffs(&g.sample(|x| re(x[0].sin())), &g).unwrap();
    let out = apply_nonlinear(&c, &op, &plan, true, Execution::Sequential).unwrap();
    let want = to_coeffs(&g.sample(|x| re(-x[0].sin() * x[0].cos())), &g).unwrap();
    assert!(max_diff(&out, &want) < 1e-15);
}

#[test]
fn schnakenberg_at_unit_state() {
    let g = Grid::cube(2, 4, (0.0, 30.0)).unwrap();
    let plan = FftPlan::new(&g);
    let (gamma, a, b) = (3.0, 0.1, 0.9);
    let op = NonlinearOp::new(2, move |u, out| {
        let uuv = u[0] * u[0] * u[1];
        out[0] = gamma * (a + uuv);
        out[1] = gamma * (b - uuv);
    });
    let mut c = to_coeffs(&vec![re(1.0); g.len()], &g).unwrap();
    c.extend(c.clone());
    let out = apply_nonlinear(&c, &op, &plan, true, Execution::Sequential).unwrap();
    assert!((out[0] - 3.3).norm() < 1e-14);
    assert!((out[g.len()] + 0.3).norm() < 1e-14);
}

#[test]
fn non_finite_nonlinearity_is_reported() {
    let g = Grid::new(&[8], &[(0.0, 1.0)]).unwrap();
    let plan = FftPlan::new(&g);
    let c = to_coeffs(&vec![re(0.0); 8], &g).unwrap();
    let op = NonlinearOp::scalar(|u| re(1.0) / u);
    let err = apply_nonlinear(&c, &op, &plan, true, Execution::Sequential).unwrap_err();
    assert!(err.to_string().contains("non-finite"));
}

#[test]
fn three_d_laplacian_of_product_mode() {
    let g = Grid::new(&[8, 8, 8], &[(0.0, 2.0 * PI), (0.0, PI), (0.0, 4.0 * PI)]).unwrap();
    // sin(x) cos(2·2y) sin(z/2·3): eigenvalue −(1 + 16 + 9/4).
    let f = |x: &[f64]| x[0].sin() * (4.0 * x[1]).cos() * (1.5 * x[2]).sin();
    let c = to_coeffs(&g.sample(|x| re(f(x))), &g).unwrap();
    let lap = laplacian(&g);
    let lc: Vec<Complex64> = c.iter().zip(lap.values()).map(|(a, b)| a * b).collect();
    let v = to_values(&lc, &g, true).unwrap();
    let want = g.sample(|x| re(-(1.0 + 16.0 + 2.25) * f(x)));
    assert!(max_diff(&v, &want) < 1e-12 * 19.25);
}

#[test]
fn fft_budget_is_two_per_stage() {
    let g = Grid::new(&[64], &[(0.0, 2.0 * PI)]).unwrap();
    let lin = &diff_symbol(2, 0, &g).unwrap() * 0.1;
    let sys = SpectralSystem::new(
        &g,
        &[lin],
        NonlinearOp::scalar(|u| -u * u * u),
        true,
        Execution::Sequential,
    )
    .unwrap();
    let u0 = sys.coeffs_from_values(&[g.sample(|x| re(0.5 * x[0].sin()))]).unwrap();
    assert_eq!(sys.fft_count(), 0);

    let run = integrate(&sys, &Method::from(etdrk4()), 0.01, 0.1, &u0, &IntegrateOptions::default())
        .unwrap();
    assert_eq!(run.steps, 10);
    assert_eq!(sys.fft_count(), 2 * 4 * 10);

    // A pure multistep scheme reuses N(u^n): ten more steps cost twenty FFTs.
    let ab = Method::from(abnorsett(4).unwrap());
    let count = |t_end: f64| {
        sys.plan().reset_count();
        integrate(&sys, &ab, 0.01, t_end, &u0, &IntegrateOptions::default()).unwrap();
        sys.fft_count()
    };
    assert_eq!(count(0.2) - count(0.1), 2 * 10);
    let before = sys.fft_count();
    let _ = sys.values_from_coeffs(&run.u).unwrap();
    assert_eq!(sys.fft_count(), before);
}

#[test]
fn real_field_stays_real_through_integration() {
    let g = Grid::new(&[64], &[(0.0, 32.0 * PI)]).unwrap();
    let d1 = diff_symbol(1, 0, &g).unwrap();
    let d2 = diff_symbol(2, 0, &g).unwrap();
    let d4 = diff_symbol(4, 0, &g).unwrap();
    let lin = &(-&d2) - &d4;
    let op = NonlinearOp::scalar(|u| u * u).with_outer(vec![&d1 * -0.5]);
    let sys = SpectralSystem::new(&g, &[lin], op, true, Execution::Parallel).unwrap();
    let u0 = sys
        .coeffs_from_values(&[g.sample(|x| re((x[0] / 16.0).cos() * (1.0 + (x[0] / 16.0).sin())))])
        .unwrap();
    let run = integrate(&sys, &Method::from(etdrk4()), 0.25, 5.0, &u0, &IntegrateOptions::default())
        .unwrap();
    // Conjugate symmetry of the coefficients: û_{−k} = conj(û_k).
    let n = g.len();
    for k in 1..n / 2 {
        assert!((run.u[n - k] - run.u[k].conj()).norm() <= 1e-12 * max_abs(&run.u));
    }
    let mut v = run.u.clone();
    sys.plan().inverse_in_place(&mut v, Execution::Sequential).unwrap();
    let imag = v.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
    assert!(imag <= 1e-12 * max_abs(&v));
}

#[test]
fn system_dimension_checks() {
    let g = Grid::new(&[8], &[(0.0, 1.0)]).unwrap();
    let s = SpectralSymbol::constant(&g, re(-1.0));
    let op = NonlinearOp::new(2, |_, out| out.fill(re(0.0)));
    assert!(SpectralSystem::new(&g, &[s.clone()], op.clone(), true, Execution::Sequential).is_err());
    let sys = SpectralSystem::new(&g, &[s.clone(), s], op, true, Execution::Sequential).unwrap();
    assert_eq!(sys.len(), 16);
    assert_eq!(sys.components(), 2);
}

fn trig_poly(g: &Grid, modes: &[(i64, f64, f64)]) -> (Vec<Complex64>, Vec<Complex64>) {
    let (a, b) = g.domain()[0];
    let s = 2.0 * PI / (b - a);
    let u = g.sample(|x| {
        re(modes
            .iter()
            .map(|&(k, c, d)| c * (k as f64 * s * (x[0] - a)).cos() + d * (k as f64 * s * (x[0] - a)).sin())
            .sum())
    });
    let du = g.sample(|x| {
        let t = x[0] - a;
        re(modes
            .iter()
            .map(|&(k, c, d)| {
                let w = k as f64 * s;
                -c * w * (w * t).sin() + d * w * (w * t).cos()
            })
            .sum())
    });
    (u, du)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differentiation_is_exact_below_nyquist(
        n_half in 2usize..17,
        a in -3.0f64..3.0,
        len in 0.5f64..40.0,
        raw in prop::collection::vec((0i64..100, -1.0f64..1.0, -1.0f64..1.0), 1..6),
    ) {
        let n = 2 * n_half;
        let g = Grid::new(&[n], &[(a, a + len)]).unwrap();
        let modes: Vec<_> = raw.iter().map(|&(k, c, d)| (k % n_half as i64, c, d)).collect();
        let (u, du) = trig_poly(&g, &modes);
        let d1 = diff_symbol(1, 0, &g).unwrap();
        let c = to_coeffs(&u, &g).unwrap();
        let dc: Vec<Complex64> = c.iter().zip(d1.values()).map(|(x, s)| x * s).collect();
        let want = to_coeffs(&du, &g).unwrap();
        let scale = max_abs(&want).max(max_abs(&c) * 2.0 * PI / len);
        prop_assert!(max_diff(&dc, &want) <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn kronecker_sum_is_exact(nx in 1usize..6, ny in 1usize..6, nz in 1usize..4, lx in 0.5f64..50.0, ly in 0.5f64..50.0) {
        let g = Grid::new(&[2 * nx, 2 * ny, 2 * nz], &[(0.0, lx), (1.0, 1.0 + ly), (-2.0, 5.0)]).unwrap();
        let lap = laplacian(&g);
        let kx = wavenumbers(2 * nx, (0.0, lx)).unwrap();
        let ky = wavenumbers(2 * ny, (1.0, 1.0 + ly)).unwrap();
        let kz = wavenumbers(2 * nz, (-2.0, 5.0)).unwrap();
        for i in 0..g.len() {
            let want = -(kx[g.axis_index(i, 0)].powi(2)) - ky[g.axis_index(i, 1)].powi(2)
                - kz[g.axis_index(i, 2)].powi(2);
            prop_assert_eq!(lap.values()[i], re(want));
        }
    }

    #[test]
    fn squared_second_derivative_is_fourth(n_half in 1usize..40, len in 0.1f64..100.0) {
        let g = Grid::new(&[2 * n_half], &[(0.0, len)]).unwrap();
        let d2 = diff_symbol(2, 0, &g).unwrap();
        let d4 = diff_symbol(4, 0, &g).unwrap();
        prop_assert_eq!(&d2 * &d2, d4);
    }

    #[test]
    fn nonlinear_output_of_real_field_is_real(seed in 0u64..1000) {
        let g = Grid::cube(2, 16, (0.0, 2.0 * PI)).unwrap();
        let plan = FftPlan::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..g.len()).map(|_| re(rng.random_range(-1.0..1.0))).collect();
        let c = to_coeffs(&v, &g).unwrap();
        let d1 = diff_symbol(1, 1, &g).unwrap();
        let op = NonlinearOp::scalar(|u| u * u * u - u).with_outer(vec![d1]);
        let out = apply_nonlinear(&c, &op, &plan, true, Execution::Sequential).unwrap();
        let mut back = out.clone();
        plan.inverse_in_place(&mut back, Execution::Sequential).unwrap();
        let imag = back.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
        prop_assert!(imag <= 1e-12 * max_abs(&back).max(max_abs(&v)));
    }

    #[test]
    fn parallel_matches_sequential_bitwise(seed in 0u64..100) {
        let g = Grid::new(&[16, 8, 4], &[(0.0, 1.0); 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Complex64> =
            (0..g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let plan = FftPlan::new(&g);
        let a = plan.to_coeffs(&v, Execution::Sequential).unwrap();
        let b = plan.to_coeffs(&v, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }
}
