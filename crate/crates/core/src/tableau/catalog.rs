//! Built-in schemes and the name registry.

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{complete_summation, Family, Tableau};
use crate::error::{Error, Result};
use crate::phifun::{rat, rational_factorial, PhiExpr};

/// Forward Euler with the linear part integrated exactly.
pub fn etd_euler() -> Tableau {
    let t = Tableau::empty("ETDEuler", Family::EtdRungeKutta, 1, 1, 1);
    complete_summation(&t).expect("ETD Euler is a summation scheme")
}

pub fn etdrk2() -> Tableau {
    let mut t = Tableau::empty("ETDRK2", Family::EtdRungeKutta, 2, 2, 1);
    t.c[1] = Rational64::one();
    t.a[1][0] = Some(PhiExpr::phi(1));
    t.b[1] = Some(PhiExpr::phi(2));
    complete_summation(&t).expect("ETDRK2 is a summation scheme")
}

/// The fourth-order scheme of Cox and Matthews.
///
/// Its last stage is usually written as propagating the second stage by a
/// half step; substituting that stage shows it equals this tableau, which
/// propagates `u^n` and carries the difference in `A_{4,1}`.
pub fn etdrk4() -> Tableau {
    let half = rat(1, 2);
    let mut t = Tableau::empty("ETDRK4", Family::EtdRungeKutta, 4, 4, 1);
    t.c = vec![Rational64::zero(), half, half, Rational64::one()];
    let psi12 = PhiExpr::psi(1, half);
    t.a[2][1] = Some(psi12.clone());
    t.a[3][1] = Some(PhiExpr::zero());
    t.a[3][2] = Some(psi12 * rat(2, 1));
    let b23 = PhiExpr::phi(2) * rat(2, 1) - PhiExpr::phi(3) * rat(4, 1);
    t.b[1] = Some(b23.clone());
    t.b[2] = Some(b23);
    t.b[3] = Some(PhiExpr::phi(3) * rat(4, 1) - PhiExpr::phi(2));
    complete_summation(&t).expect("ETDRK4 is a summation scheme")
}

/// Coefficients of `Π_{k≠i} (θ − θ_k)/(θ_i − θ_k)` in the monomial basis.
fn lagrange_basis(nodes: &[Rational64], i: usize) -> Vec<Rational64> {
    let mut poly = vec![Rational64::one()];
    let mut denom = Rational64::one();
    for (k, &tk) in nodes.iter().enumerate() {
        if k == i {
            continue;
        }
        let mut next = vec![Rational64::zero(); poly.len() + 1];
        for (d, &p) in poly.iter().enumerate() {
            next[d + 1] += p;
            next[d] -= p * tk;
        }
        poly = next;
        denom *= nodes[i] - tk;
    }
    poly.into_iter().map(|p| p / denom).collect()
}

/// `∫₀¹ e^{(1−θ)z} ℓ(θ) dθ` for a polynomial ℓ, via `∫₀¹ e^{(1−θ)z}θ^j dθ = j! φ_{j+1}(z)`.
fn integrate_against_exp(poly: &[Rational64]) -> PhiExpr {
    poly.iter()
        .enumerate()
        .map(|(j, &a)| PhiExpr::phi(j as u32 + 1) * (a * rational_factorial(j as u32)))
        .sum()
}

fn check_q(q: usize) -> Result<()> {
    if (2..=8).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("Adams step count must be in 2..=8, got {q}")))
    }
}

fn weights_on(nodes: &[Rational64]) -> Vec<PhiExpr> {
    (0..nodes.len())
        .map(|i| integrate_against_exp(&lagrange_basis(nodes, i)))
        .collect()
}

/// Exponential Adams–Bashforth weights on nodes `0, −1, …, −(q−1)`:
/// returns `(B₁, V)` where `V[i−1]` multiplies `N(u^{n−i})`.
pub fn etd_ab_weights(q: usize) -> Result<(PhiExpr, Vec<PhiExpr>)> {
    check_q(q)?;
    let nodes: Vec<Rational64> = (0..q as i64).map(|i| rat(-i, 1)).collect();
    let mut w = weights_on(&nodes);
    let b1 = w.remove(0);
    Ok((b1, w))
}

/// Exponential Adams–Moulton weights on nodes `1, 0, −1, …, −(q−2)`.
/// Element 0 multiplies `N(u^{n+1})`, element `i ≥ 1` multiplies `N(u^{n+1−i})`.
pub fn etd_am_weights(q: usize) -> Result<Vec<PhiExpr>> {
    check_q(q)?;
    let nodes: Vec<Rational64> = (0..q as i64).map(|i| rat(1 - i, 1)).collect();
    Ok(weights_on(&nodes))
}

fn norsett_name(q: usize) -> String {
    format!("ABNørsett{q}")
}

/// Exponential Adams–Bashforth with `q` steps, built through summation
/// completion (the completed `B₁` coincides with the Lagrange weight).
pub fn build_abnorsett(q: usize) -> Result<Tableau> {
    if !(4..=6).contains(&q) {
        return Err(Error::InvalidInput(format!("ABNørsett steps must be in 4..=6, got {q}")));
    }
    abnorsett(q)
}

/// As [`build_abnorsett`] without the catalog range check (2..=8).
pub fn abnorsett(q: usize) -> Result<Tableau> {
    let (_, v) = etd_ab_weights(q)?;
    let mut t = Tableau::empty(&norsett_name(q), Family::EtdAdamsBashforth, q as u32, 1, q);
    t.v = v.into_iter().map(Some).collect();
    complete_summation(&t)
}

fn check_pc_order(p: usize) -> Result<()> {
    if (4..=7).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "predictor-corrector order must be in 4..=7, got {p}"
        )))
    }
}

/// Predict with ABNørsett(p−1), evaluate, correct with AMNørsett(p).
pub fn build_pec(p: usize) -> Result<Tableau> {
    check_pc_order(p)?;
    let q = p - 1;
    let (_, ab) = etd_ab_weights(q)?;
    let am = etd_am_weights(p)?;
    let mut t = Tableau::empty(&format!("PEC{p}2{q}"), Family::PredictorCorrector, p as u32, 2, q);
    t.c[1] = Rational64::one();
    t.u[1] = ab.into_iter().map(Some).collect();
    t.b[1] = Some(am[0].clone());
    t.v = am[2..].iter().cloned().map(Some).collect();
    complete_summation(&t)
}

/// As [`build_pec`] with a second correction evaluated at the first
/// corrected value.
pub fn build_pecec(p: usize) -> Result<Tableau> {
    check_pc_order(p)?;
    let q = p - 1;
    let (_, ab) = etd_ab_weights(q)?;
    let am = etd_am_weights(p)?;
    let mut t =
        Tableau::empty(&format!("PECEC{p}3{q}"), Family::PredictorCorrector, p as u32, 3, q);
    t.c[1] = Rational64::one();
    t.c[2] = Rational64::one();
    t.u[1] = ab.into_iter().map(Some).collect();
    t.a[2][1] = Some(am[0].clone());
    t.u[2] = am[2..].iter().cloned().map(Some).collect();
    t.b[2] = Some(am[0].clone());
    t.v = am[2..].iter().cloned().map(Some).collect();
    complete_summation(&t)
}

/// Classical RK4 applied to the integrating-factor transformed equation.
pub fn lawson4() -> Tableau {
    let half = rat(1, 2);
    let e_half = PhiExpr::exp(half);
    let mut t = Tableau::empty("Lawson4", Family::Lawson, 4, 4, 1);
    t.c = vec![Rational64::zero(), half, half, Rational64::one()];
    t.a[1][0] = Some(e_half.clone() * half);
    t.a[2][1] = Some(PhiExpr::constant(half));
    t.a[3][2] = Some(e_half.clone());
    t.b = vec![
        Some(PhiExpr::exp(Rational64::one()) * rat(1, 6)),
        Some(e_half.clone() * rat(1, 3)),
        Some(e_half * rat(1, 3)),
        Some(PhiExpr::constant(rat(1, 6))),
    ];
    t.summation_filled = true;
    t.satisfies_summation = false;
    t
}

/// Classical AB4 applied to the integrating-factor transformed equation.
pub fn ablawson4() -> Tableau {
    let mut t = Tableau::empty("ABLawson4", Family::Lawson, 4, 1, 4);
    t.b[0] = Some(PhiExpr::exp(rat(1, 1)) * rat(55, 24));
    t.v = vec![
        Some(PhiExpr::exp(rat(2, 1)) * rat(-59, 24)),
        Some(PhiExpr::exp(rat(3, 1)) * rat(37, 24)),
        Some(PhiExpr::exp(rat(4, 1)) * rat(-9, 24)),
    ];
    t.summation_filled = true;
    t.satisfies_summation = false;
    t
}

/// Generalised Lawson: classical RK4 on the equation transformed by the
/// degree `q−1` interpolant `P` of `N(u^n), …, N(u^{n−q+1})`.
///
/// With `W(t) = ∫₀ᵗ e^{(t−s)L}P(s)ds` and `g_i = N(U_i) − P(c_i h)`:
///
/// ```text
/// U₂ = E½u + (h/2)E½g₁ + W(h/2)      U₃ = E½u + (h/2)g₂ + W(h/2)
/// U₄ = Eu + hE½g₃ + W(h)             u⁺ = Eu + (h/6)(Eg₁ + 2E½(g₂+g₃) + g₄) + W(h)
/// ```
///
/// Every term is linear in the stage and history evaluations, so the
/// method is an exponential GLM with the coefficients assembled here.
pub fn gen_lawson(q: usize) -> Result<Tableau> {
    if !(1..=5).contains(&q) {
        return Err(Error::InvalidInput(format!("GenLawson steps must be in 1..=5, got {q}")));
    }
    let half = rat(1, 2);
    let one = Rational64::one();
    let order = match q {
        4 => 5,
        5 => 6,
        _ => 4,
    };
    let mut t = Tableau::empty(
        &format!("GenLawson4{q}"),
        Family::GeneralizedLawson,
        order,
        4,
        q,
    );
    t.c = vec![Rational64::zero(), half, half, one];
    let nodes: Vec<Rational64> = (0..q as i64).map(|i| rat(-i, 1)).collect();
    let basis: Vec<Vec<Rational64>> = (0..q).map(|i| lagrange_basis(&nodes, i)).collect();
    let poly_at = |p: &[Rational64], x: Rational64| {
        p.iter().rev().fold(Rational64::zero(), |acc, &a| acc * x + a)
    };
    // (1/h)∫₀^{ch} e^{(ch−s)L} ℓ(s/h) ds = Σ_m a_m m! c^{m+1} φ_{m+1}(c hL).
    let w = |p: &[Rational64], c: Rational64| -> PhiExpr {
        p.iter()
            .enumerate()
            .map(|(m, &a)| PhiExpr::psi(m as u32 + 1, c) * (a * rational_factorial(m as u32)))
            .sum()
    };
    // Coefficient of history slot j (0 = N(u^n) = stage 1) in a stage or output:
    // Σ_i weight_i·(−ℓ_j(c_i)) + W_j(c_end).
    let history = |weights: &[(usize, PhiExpr)], c_end: Rational64, j: usize| -> PhiExpr {
        let mut e = w(&basis[j], c_end);
        for (i, wt) in weights {
            e = e - wt.clone() * poly_at(&basis[j], t.c[*i]);
        }
        e
    };
    let e_half = PhiExpr::exp(half);
    let e_one = PhiExpr::exp(one);
    let cst = PhiExpr::constant;
    // (stage row, weights on g_i, end abscissa of W)
    let rows: [(usize, Vec<(usize, PhiExpr)>, Rational64); 3] = [
        (1, vec![(0, e_half.clone() * half)], half),
        (2, vec![(1, cst(half))], half),
        (3, vec![(2, e_half.clone())], one),
    ];
    let mut a = t.a.clone();
    let mut u = t.u.clone();
    for (row, weights, c_end) in &rows {
        for (i, wt) in weights {
            a[*row][*i] = Some(wt.clone());
        }
        let first = history(weights, *c_end, 0);
        a[*row][0] = Some(a[*row][0].take().unwrap_or_else(PhiExpr::zero) + first);
        for j in 1..q {
            u[*row][j - 1] = Some(history(weights, *c_end, j));
        }
    }
    let out = vec![
        (0, e_one * rat(1, 6)),
        (1, e_half.clone() * rat(1, 3)),
        (2, e_half * rat(1, 3)),
        (3, cst(rat(1, 6))),
    ];
    let mut b: Vec<Option<PhiExpr>> = out.iter().map(|(_, e)| Some(e.clone())).collect();
    b[0] = Some(b[0].take().unwrap() + history(&out, one, 0));
    let v = (1..q).map(|j| Some(history(&out, one, j))).collect();
    t.a = a;
    t.u = u;
    t.b = b;
    t.v = v;
    t.summation_filled = true;
    Ok(t)
}

/// Registry metadata for one scheme.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SchemeInfo {
    pub name: String,
    pub family: Family,
    pub order: u32,
    pub stages: usize,
    pub steps: usize,
    /// Part of the certified catalog (order checked by the test suite).
    pub shipped: bool,
}

/// A resolved scheme: the tableau plus registry metadata.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub tableau: Tableau,
    pub shipped: bool,
}

impl Scheme {
    pub fn info(&self) -> SchemeInfo {
        SchemeInfo {
            name: self.tableau.name.clone(),
            family: self.tableau.family,
            order: self.tableau.order,
            stages: self.tableau.stages(),
            steps: self.tableau.steps(),
            shipped: self.shipped,
        }
    }
}

fn shipped(t: Tableau) -> Scheme {
    Scheme { tableau: t, shipped: true }
}

/// Every built-in scheme, in catalog order.
pub fn registry() -> Vec<Scheme> {
    let mut out = vec![shipped(etd_euler()), shipped(etdrk2())];
    for q in 4..=6 {
        out.push(shipped(build_abnorsett(q).expect("in range")));
    }
    out.push(shipped(etdrk4()));
    out.push(shipped(ablawson4()));
    out.push(shipped(lawson4()));
    for q in 1..=5 {
        out.push(Scheme {
            tableau: gen_lawson(q).expect("in range"),
            shipped: false,
        });
    }
    for p in 4..=7 {
        out.push(shipped(build_pec(p).expect("in range")));
        out.push(shipped(build_pecec(p).expect("in range")));
    }
    out
}

fn normalize(name: &str) -> String {
    name.chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == 'ø' { 'o' } else { c })
        .filter(char::is_ascii_alphanumeric)
        .collect()
}

/// Case-, punctuation- and `ø`-insensitive lookup (`abnorsett5`, `ETD-RK4`).
pub fn lookup(name: &str) -> Result<Scheme> {
    let key = normalize(name);
    registry()
        .into_iter()
        .find(|s| normalize(&s.tableau.name) == key)
        .ok_or_else(|| Error::Unknown {
            kind: "scheme",
            name: name.to_string(),
        })
}
