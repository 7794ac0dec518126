mod common;

use common::{classical_ab, classical_am, phi_oracle, rk4_scalar};
use etdkit::integrator::{precompute, ScalarSystem, SemilinearSystem, SimState};
use etdkit::phifun::ContourSpec;
use etdkit::tableau::{
    ablawson4, build_abnorsett, build_pec, build_pecec, etd_am_weights, etd_euler, etdrk2, etdrk4,
    lawson4, parse_tableau, registry, Tableau,
};
use etdkit::Execution;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

type R = Rational64;

fn r(n: i64, d: i64) -> R {
    R::new(n, d)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn classical_oracles_are_right() {
    assert_eq!(classical_ab(4), vec![r(55, 24), r(-59, 24), r(37, 24), r(-9, 24)]);
    assert_eq!(classical_ab(6)[0], r(4277, 1440));
    assert_eq!(classical_am(4), vec![r(9, 24), r(19, 24), r(-5, 24), r(1, 24)]);
    assert_eq!(classical_am(2), vec![r(1, 2), r(1, 2)]);
}

fn rk4_a() -> Vec<Vec<R>> {
    vec![
        vec![],
        vec![r(1, 2)],
        vec![R::zero(), r(1, 2)],
        vec![R::zero(), R::zero(), R::one()],
    ]
}

fn rk4_b() -> Vec<R> {
    vec![r(1, 6), r(1, 3), r(1, 3), r(1, 6)]
}

#[test]
fn runge_kutta_families_reduce_to_rk4() {
    for t in [etdrk4(), lawson4()] {
        let z = t.at_zero();
        assert_eq!(z.a, rk4_a(), "{}", t.name);
        assert_eq!(z.b, rk4_b(), "{}", t.name);
        assert_eq!(t.c, vec![R::zero(), r(1, 2), r(1, 2), R::one()]);
    }
    let z = etdrk2().at_zero();
    assert_eq!(z.b, vec![r(1, 2), r(1, 2)]);
    assert_eq!(z.a[1], vec![R::one()]);
    assert_eq!(etd_euler().at_zero().b, vec![R::one()]);
}

#[test]
fn adams_families_reduce_to_classical_ab() {
    for q in 4..=6 {
        let z = build_abnorsett(q).unwrap().at_zero();
        let ab = classical_ab(q);
        assert_eq!(z.b, vec![ab[0]]);
        assert_eq!(z.v, ab[1..].to_vec());
    }
    let z = ablawson4().at_zero();
    let ab = classical_ab(4);
    assert_eq!(z.b, vec![ab[0]]);
    assert_eq!(z.v, ab[1..].to_vec());
}

#[test]
fn am_weights_reduce_to_classical_am() {
    for q in 2..=8 {
        let w: Vec<R> = etd_am_weights(q).unwrap().iter().map(|e| e.at_zero()).collect();
        assert_eq!(w, classical_am(q), "q = {q}");
    }
}

#[test]
fn predictor_correctors_reduce_to_classical_pairs() {
    for p in 4..=7 {
        let ab = classical_ab(p - 1);
        let am = classical_am(p);

        let z = build_pec(p).unwrap().at_zero();
        assert_eq!(z.a[1], vec![ab[0]]);
        assert_eq!(z.u[1], ab[1..].to_vec());
        assert_eq!(z.b, vec![am[1], am[0]]);
        assert_eq!(z.v, am[2..].to_vec());

        let z = build_pecec(p).unwrap().at_zero();
        assert_eq!(z.a[1], vec![ab[0]]);
        assert_eq!(z.u[1], ab[1..].to_vec());
        assert_eq!(z.a[2], vec![am[1], am[0]]);
        assert_eq!(z.u[2], am[2..].to_vec());
        assert_eq!(z.b, vec![am[1], R::zero(), am[0]]);
        assert_eq!(z.v, am[2..].to_vec());
    }
}

#[test]
fn registry_matches_reference_table() {
    let table: &[(&str, u32, usize, usize)] = &[
        ("ABNørsett4", 4, 1, 4),
        ("ABNørsett5", 5, 1, 5),
        ("ABNørsett6", 6, 1, 6),
        ("ETDRK4", 4, 4, 1),
        ("ABLawson4", 4, 1, 4),
        ("Lawson4", 4, 4, 1),
        ("GenLawson41", 4, 4, 1),
        ("GenLawson42", 4, 4, 2),
        ("GenLawson43", 4, 4, 3),
        ("GenLawson44", 5, 4, 4),
        ("GenLawson45", 6, 4, 5),
        ("PEC423", 4, 2, 3),
        ("PECEC433", 4, 3, 3),
        ("PEC524", 5, 2, 4),
        ("PECEC534", 5, 3, 4),
        ("PEC625", 6, 2, 5),
        ("PECEC635", 6, 3, 5),
        ("PEC726", 7, 2, 6),
        ("PECEC736", 7, 3, 6),
    ];
    let reg = registry();
    for &(name, order, s, q) in table {
        let t = &reg
            .iter()
            .find(|x| x.tableau.name == name)
            .unwrap_or_else(|| panic!("{name} missing"))
            .tableau;
        assert_eq!((t.order, t.stages(), t.steps()), (order, s, q), "{name}");
    }
    assert!(reg.iter().filter(|s| s.shipped).count() >= 15);
}

#[test]
fn summation_identities_hold_symbolically() {
    for s in registry() {
        let t = &s.tableau;
        if !t.satisfies_summation {
            continue;
        }
        for (i, res) in t.summation_residuals().iter().enumerate() {
            assert!(res.is_zero(), "{} row {i}: {res}", t.name);
        }
    }
}

#[test]
fn every_registry_tableau_round_trips_through_text() {
    for s in registry() {
        let text = s.tableau.to_string();
        let back = parse_tableau(&text, "roundtrip").unwrap();
        let mut back = back;
        back.family = s.tableau.family;
        assert_eq!(back, s.tableau, "{}\n{text}", s.tableau.name);
    }
}

#[test]
fn am3_node_one_weight_against_quadrature() {
    // ℓ(θ) = θ(θ+1)/2 on nodes {1, 0, −1}; composite Simpson, 10⁴ panels.
    let z = -1.0f64;
    let f = |th: f64| ((1.0 - th) * z).exp() * th * (th + 1.0) / 2.0;
    let n = 10_000;
    let h = 1.0 / n as f64;
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    let want = s * h / 3.0;
    let got = etd_am_weights(3).unwrap()[0].eval(c(z, 0.0));
    assert!((got.re - want).abs() < 1e-12 * want.abs(), "{got} vs {want}");
}

struct Diag<F> {
    l: Vec<Complex64>,
    f: F,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> SemilinearSystem for Diag<F> {
    fn linear(&self) -> &[Complex64] {
        &self.l
    }
    fn nonlinear(&self, u: &[Complex64], out: &mut [Complex64]) {
        for (o, &x) in out.iter_mut().zip(u) {
            *o = (self.f)(x);
        }
    }
}

#[test]
fn etdrk4_matches_explicit_cox_matthews_step() {
    let l = vec![c(-40.0, 0.0), c(-0.5, 0.0), c(0.0, 3.0), c(-200.0, 15.0)];
    let sys = Diag { l: l.clone(), f: |u: Complex64| u.sin() - u * u * 0.3 };
    let h = 0.05;
    let u0 = vec![c(0.4, 0.0), c(-0.7, 0.1), c(0.2, 0.3), c(1.0, -0.5)];

    let p = precompute(&etdrk4(), h, &l, &ContourSpec::default(), None, Execution::Sequential).unwrap();
    let mut st = SimState::new(u0.clone());
    p.step(&mut st, &sys, Execution::Sequential).unwrap();

    for k in 0..l.len() {
        let z = l[k] * h;
        let (e, e2) = (z.exp(), (z / 2.0).exp());
        let q = phi_oracle(1, z / 2.0) * (h / 2.0);
        let (p1, p2, p3) = (phi_oracle(1, z), phi_oracle(2, z), phi_oracle(3, z));
        let f1 = p1 - p2 * 3.0 + p3 * 4.0;
        let f2 = p2 - p3 * 2.0;
        let f3 = p3 * 4.0 - p2;
        let n = |x: Complex64| (sys.f)(x);
        let u = u0[k];
        let a = e2 * u + q * n(u);
        let b = e2 * u + q * n(a);
        let cc = e2 * a + q * (n(b) * 2.0 - n(u));
        let want = e * u + (f1 * n(u) + f2 * (n(a) + n(b)) * 2.0 + f3 * n(cc)) * h;
        assert!((st.u[k] - want).norm() < 1e-13 * want.norm().max(1.0), "{k}: {} vs {want}", st.u[k]);
    }
}

#[test]
fn etdrk4_without_linear_part_is_classical_rk4() {
    let sys = ScalarSystem::new(0.0, |u| u * u);
    let p = precompute(&etdrk4(), 0.1, sys.linear(), &ContourSpec::default(), None, Execution::Sequential).unwrap();
    let mut st = SimState::new(vec![c(1.0, 0.0)]);
    p.step(&mut st, &sys, Execution::Sequential).unwrap();
    let want = rk4_scalar(|u| u * u, 1.0, 0.1, 1);
    assert!((st.u[0].re - want).abs() < 1e-15, "{} vs {want}", st.u[0].re);
}

fn from_exact_history(t: &Tableau, h: f64, exact: impl Fn(f64) -> f64, f: fn(Complex64) -> Complex64) -> f64 {
    let sys = ScalarSystem::new(0.0, f);
    let p = precompute(t, h, sys.linear(), &ContourSpec::default(), None, Execution::Sequential).unwrap();
    let mut st = SimState::new(vec![c(exact(0.0), 0.0)]);
    for i in 1..t.steps() {
        st.history.push_back(vec![f(c(exact(-(i as f64) * h), 0.0))]);
    }
    p.step(&mut st, &sys, Execution::Sequential).unwrap();
    st.u[0].re
}

#[test]
fn abnorsett4_without_linear_part_is_classical_ab4() {
    let h = 0.1;
    let got = from_exact_history(&build_abnorsett(4).unwrap(), h, f64::exp, |u| u);
    let ab = classical_ab(4);
    let want = 1.0
        + h * (0..4)
            .map(|i| *ab[i].numer() as f64 / *ab[i].denom() as f64 * (-(i as f64) * h).exp())
            .sum::<f64>();
    assert!((got - want).abs() < 1e-15, "{got} vs {want}");
}

#[test]
fn pec_without_linear_part_is_classical_predictor_corrector() {
    let to_f = |x: R| *x.numer() as f64 / *x.denom() as f64;
    let h = 0.05;
    let exact = |t: f64| 1.0 / (1.0 - t); // u' = u², u(0) = 1
    let f = |u: f64| u * u;
    for p in 4..=7 {
        let ab = classical_ab(p - 1);
        let am = classical_am(p);
        let hist: Vec<f64> = (0..p).map(|i| f(exact(-(i as f64) * h))).collect();
        let pred = 1.0 + h * (0..p - 1).map(|i| to_f(ab[i]) * hist[i]).sum::<f64>();
        let corr = |x: f64| 1.0 + h * (to_f(am[0]) * f(x) + (0..p - 1).map(|i| to_f(am[i + 1]) * hist[i]).sum::<f64>());
        let pec = corr(pred);
        let pecec = corr(pec);

        let got = from_exact_history(&build_pec(p).unwrap(), h, exact, |u| u * u);
        assert!((got - pec).abs() < 1e-14, "PEC{p}: {got} vs {pec}");
        let got = from_exact_history(&build_pecec(p).unwrap(), h, exact, |u| u * u);
        assert!((got - pecec).abs() < 1e-14, "PECEC{p}: {got} vs {pecec}");
    }
}

#[test]
fn lawson4_with_zero_forcing_is_the_exact_flow() {
    for lam in [-50.0, -1.0, 0.0, 2.0] {
        let sys = ScalarSystem::new(lam, |_| Complex64::zero());
        let p = precompute(&lawson4(), 0.2, sys.linear(), &ContourSpec::default(), None, Execution::Sequential).unwrap();
        let mut st = SimState::new(vec![c(1.5, 0.0)]);
        p.step(&mut st, &sys, Execution::Sequential).unwrap();
        let want = 1.5 * (0.2 * lam).exp();
        assert!((st.u[0].re - want).abs() < 1e-14 * want.abs().max(1e-300));
    }
}

#[test]
fn etdrk4_logistic_hundred_steps() {
    let sys = ScalarSystem::new(-1.0, |u| u * u);
    let p = precompute(&etdrk4(), 0.01, sys.linear(), &ContourSpec::default(), None, Execution::Sequential).unwrap();
    let mut st = SimState::new(vec![c(0.5, 0.0)]);
    for _ in 0..100 {
        p.step(&mut st, &sys, Execution::Sequential).unwrap();
    }
    let exact = 1.0 / (1.0 + 1f64.exp());
    assert!((st.u[0].re - exact).abs() <= 1e-9);
}
