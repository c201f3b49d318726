//! The pointed Hopf algebra `H` over `k` with basis `σ^a δ^(i)`.
//!
//! Structure constants:
//!
//! ```text
//! (σ^a δ^(i)) (σ^b δ^(j)) = q^(ib) binom(i+j, i)_q σ^(a+b) δ^(i+j)
//! Δ(σ^a δ^(k))            = Σ_{i+j=k} σ^(a+j) δ^(i) ⊗ σ^a δ^(j)
//! ε(σ^a δ^(k))            = [k = 0]
//! ```
//!
//! The antipode has no closed form here; it is solved from
//! `Σ S(h₁) h₂ = ε(h)` one basis element at a time and memoized.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use crate::prime::PrimeField;
use crate::qcomb::q_binom;
use crate::report::Report;
use crate::scalar::{FieldSpec, Scalar};
use crate::sparse::accumulate;

/// Basis label `(a, i)` for `σ^a δ^(i)`, with `0 ≤ a < N`.
pub type HBasis = (u32, usize);

/// `Σ c_{a,i} σ^a δ^(i)` with zero coefficients dropped.
#[derive(Clone)]
pub struct HElem<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    terms: BTreeMap<HBasis, Scalar<C>>,
}

/// An element of `H ⊗ H` in the product basis.
#[derive(Clone)]
pub struct HTensor<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    terms: BTreeMap<(HBasis, HBasis), Scalar<C>>,
}

impl<C: PrimeField> PartialEq for HElem<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<C: PrimeField> Eq for HElem<C> {}

impl<C: PrimeField> PartialEq for HTensor<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<C: PrimeField> Eq for HTensor<C> {}

/// Product of two basis elements.
fn basis_mul<C: PrimeField>(field: &Arc<FieldSpec<C>>, (a, i): HBasis, (b, j): HBasis) -> (HBasis, Scalar<C>) {
    let n = field.order();
    let c = &field.q_pow((i as i64) * (b as i64)) * &q_binom(field, (i + j) as i64, i as i64).expect("in range");
    (((a + b) % n, i + j), c)
}

impl<C: PrimeField> HElem<C> {
    pub fn zero(field: &Arc<FieldSpec<C>>) -> Self {
        HElem { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn one(field: &Arc<FieldSpec<C>>) -> Self {
        Self::basis(field, 0, 0)
    }

    /// `σ^a δ^(i)`; `a` is read modulo `N`.
    pub fn basis(field: &Arc<FieldSpec<C>>, a: i64, i: usize) -> Self {
        Self::term(field.one(), a, i)
    }

    pub fn term(c: Scalar<C>, a: i64, i: usize) -> Self {
        let field = c.field().clone();
        let a = a.rem_euclid(field.order() as i64) as u32;
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, (a, i), c);
        HElem { field, terms }
    }

    pub fn sigma(field: &Arc<FieldSpec<C>>, a: i64) -> Self {
        Self::basis(field, a, 0)
    }

    pub fn delta(field: &Arc<FieldSpec<C>>, i: usize) -> Self {
        Self::basis(field, 0, i)
    }

    /// `d_n = δ^(nN)`.
    pub fn d(field: &Arc<FieldSpec<C>>, n: usize) -> Self {
        Self::delta(field, n * field.order() as usize)
    }

    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (HBasis, &Scalar<C>)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, a: u32, i: usize) -> Scalar<C> {
        self.terms.get(&(a, i)).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `i` in the support.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, i)| i).max()
    }

    pub fn scale(&self, c: &Scalar<C>) -> Self {
        let mut out = Self::zero(&self.field);
        for (&k, v) in &self.terms {
            accumulate(&mut out.terms, k, v * c);
        }
        out
    }

    pub fn coproduct(&self) -> HTensor<C> {
        let n = self.field.order();
        let mut out = HTensor::zero(&self.field);
        for (&(a, k), c) in &self.terms {
            for i in 0..=k {
                let j = k - i;
                let left = ((a + j as u32) % n, i);
                accumulate(&mut out.terms, (left, (a, j)), c.clone());
            }
        }
        out
    }

    pub fn counit(&self) -> Scalar<C> {
        (0..self.field.order()).fold(self.field.zero(), |acc, a| &acc + &self.coeff(a, 0))
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear(&self, f: impl Fn(HBasis) -> HElem<C>) -> HElem<C> {
        let mut out = Self::zero(&self.field);
        for (&k, c) in &self.terms {
            out = &out + &f(k).scale(c);
        }
        out
    }
}

impl<C: PrimeField> Add for &HElem<C> {
    type Output = HElem<C>;
    fn add(self, rhs: &HElem<C>) -> HElem<C> {
        let mut out = self.clone();
        for (&k, v) in &rhs.terms {
            accumulate(&mut out.terms, k, v.clone());
        }
        out
    }
}

impl<C: PrimeField> Neg for &HElem<C> {
    type Output = HElem<C>;
    fn neg(self) -> HElem<C> {
        self.scale(&-self.field.one())
    }
}

impl<C: PrimeField> Sub for &HElem<C> {
    type Output = HElem<C>;
    fn sub(self, rhs: &HElem<C>) -> HElem<C> {
        self + &-rhs
    }
}

impl<C: PrimeField> Mul for &HElem<C> {
    type Output = HElem<C>;
    fn mul(self, rhs: &HElem<C>) -> HElem<C> {
        let mut out = HElem::zero(&self.field);
        for (&x, cx) in &self.terms {
            for (&y, cy) in &rhs.terms {
                let (key, c) = basis_mul(&self.field, x, y);
                accumulate(&mut out.terms, key, &(&c * cx) * cy);
            }
        }
        out
    }
}

fn coeff_text<C: PrimeField>(c: &Scalar<C>) -> String {
    if c.term_count() > 1 {
        format!("({c})")
    } else {
        c.to_string()
    }
}

fn basis_text((a, i): HBasis) -> String {
    match a {
        0 => format!("d({i})"),
        1 => format!("s*d({i})"),
        _ => format!("s^{a}*d({i})"),
    }
}

/// Joins `coefficient*monomial` terms, folding signs and unit coefficients.
pub(crate) fn join_terms<'a, C: PrimeField>(terms: impl Iterator<Item = (String, &'a Scalar<C>)>) -> String {
    let mut out = String::new();
    for (mono, c) in terms {
        let negative = c.is_negative_monomial();
        let abs = if negative { -c } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{mono}", coeff_text(&abs)));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl<C: PrimeField> fmt::Display for HElem<C> {
    /// Highest `δ`-order first, e.g. `q*s*d(1) + d(0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&HBasis> = self.terms.keys().collect();
        keys.sort_by_key(|x| std::cmp::Reverse((x.1, x.0)));
        f.write_str(&join_terms(keys.into_iter().map(|k| (basis_text(*k), &self.terms[k]))))
    }
}

impl<C: PrimeField> fmt::Debug for HElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HElem({self})")
    }
}

impl<C: PrimeField> HTensor<C> {
    pub fn zero(field: &Arc<FieldSpec<C>>) -> Self {
        HTensor { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn pure(x: &HElem<C>, y: &HElem<C>) -> Self {
        let mut out = Self::zero(&x.field);
        for (&kx, cx) in &x.terms {
            for (&ky, cy) in &y.terms {
                accumulate(&mut out.terms, (kx, ky), cx * cy);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = ((HBasis, HBasis), &Scalar<C>)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn twist(&self) -> Self {
        let mut out = Self::zero(&self.field);
        for (&(x, y), c) in &self.terms {
            accumulate(&mut out.terms, (y, x), c.clone());
        }
        out
    }

    /// `Σ f(x) g(y)` over the terms `x ⊗ y`.
    pub fn contract(&self, f: impl Fn(HBasis) -> HElem<C>, g: impl Fn(HBasis) -> HElem<C>) -> HElem<C> {
        let mut out = HElem::zero(&self.field);
        for (&(x, y), c) in &self.terms {
            out = &out + &(&f(x) * &g(y)).scale(c);
        }
        out
    }
}

impl<C: PrimeField> Add for &HTensor<C> {
    type Output = HTensor<C>;
    fn add(self, rhs: &HTensor<C>) -> HTensor<C> {
        let mut out = self.clone();
        for (&k, v) in &rhs.terms {
            accumulate(&mut out.terms, k, v.clone());
        }
        out
    }
}

/// Factorwise product in `H ⊗ H`.
impl<C: PrimeField> Mul for &HTensor<C> {
    type Output = HTensor<C>;
    fn mul(self, rhs: &HTensor<C>) -> HTensor<C> {
        let field = &self.field;
        let mut out = HTensor::zero(field);
        for (&(x1, x2), c) in &self.terms {
            for (&(y1, y2), d) in &rhs.terms {
                let (k1, c1) = basis_mul(field, x1, y1);
                let (k2, c2) = basis_mul(field, x2, y2);
                accumulate(&mut out.terms, (k1, k2), &(&(c * d) * &c1) * &c2);
            }
        }
        out
    }
}

impl<C: PrimeField> fmt::Display for HTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .terms
            .iter()
            .map(|(&(x, y), c)| (format!("{} ⊗ {}", basis_text(x), basis_text(y)), c));
        f.write_str(&join_terms(terms))
    }
}

impl<C: PrimeField> fmt::Debug for HTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HTensor({self})")
    }
}

/// `H` over a fixed field, holding the antipode memo.
pub struct HopfH<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    antipodes: Mutex<HashMap<HBasis, HElem<C>>>,
}

impl<C: PrimeField> HopfH<C> {
    pub fn new(field: &Arc<FieldSpec<C>>) -> Self {
        HopfH { field: field.clone(), antipodes: Mutex::new(HashMap::new()) }
    }

    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        &self.field
    }

    pub fn antipode(&self, x: &HElem<C>) -> HElem<C> {
        x.map_linear(|b| self.antipode_basis(b))
    }

    /// From `Σ_{i+j=k} S(σ^(a+j) δ^(i)) σ^a δ^(j) = [k = 0]`, whose `j = 0`
    /// term is `S(σ^a δ^(k)) σ^a`.
    pub fn antipode_basis(&self, (a, k): HBasis) -> HElem<C> {
        if let Some(v) = self.antipodes.lock().expect("antipode memo poisoned").get(&(a, k)) {
            return v.clone();
        }
        let field = &self.field;
        let n = field.order();
        let mut rhs = if k == 0 { HElem::one(field) } else { HElem::zero(field) };
        for j in 1..=k {
            let s = self.antipode_basis(((a + j as u32) % n, k - j));
            rhs = &rhs - &(&s * &HElem::basis(field, a as i64, j));
        }
        let value = &rhs * &HElem::sigma(field, -(a as i64));
        self.antipodes.lock().expect("antipode memo poisoned").insert((a, k), value.clone());
        value
    }
}

/// Basis of `H` up to `δ`-order `i_bound`.
fn basis_up_to<C: PrimeField>(field: &Arc<FieldSpec<C>>, i_bound: usize) -> Vec<HBasis> {
    (0..=i_bound).flat_map(|i| (0..field.order()).map(move |a| (a, i))).collect()
}

/// The coefficient `c` in `δ^(nN+b) = c · δ^(b) d_n`, read off the product
/// rule: `δ^(b) d_n = binom(nN+b, b)_q δ^(nN+b)`.
pub fn divided_power_coefficient<C: PrimeField>(field: &Arc<FieldSpec<C>>, n: usize, b: usize) -> Option<Scalar<C>> {
    let prod = &HElem::delta(field, b) * &HElem::d(field, n);
    let big = n * field.order() as usize + b;
    if prod.terms.len() != 1 {
        return None;
    }
    prod.coeff(0, big).inv().ok()
}

/// Checks the Hopf axioms on every basis element `σ^a δ^(i)`, `i ≤ i_bound`.
pub fn verify_hopf_axioms<C: PrimeField>(field: &Arc<FieldSpec<C>>, i_bound: usize) -> Report {
    let mut report = Report::new("hopf", field.to_string(), None);
    let h = HopfH::new(field);
    let n = field.order() as usize;
    let basis = basis_up_to(field, i_bound);
    let elem = |b: HBasis| HElem::basis(field, b.0 as i64, b.1);
    let show = |b: HBasis| basis_text(b);

    for &b in &basis {
        let x = elem(b);
        let dx = x.coproduct();

        // (Δ⊗id)Δ and (id⊗Δ)Δ as maps into triples.
        let mut left: BTreeMap<(HBasis, HBasis, HBasis), Scalar<C>> = BTreeMap::new();
        let mut right = BTreeMap::new();
        for ((u, v), c) in dx.terms() {
            for ((u1, u2), c1) in elem(u).coproduct().terms() {
                accumulate(&mut left, (u1, u2, v), c * c1);
            }
            for ((v1, v2), c2) in elem(v).coproduct().terms() {
                accumulate(&mut right, (u, v1, v2), c * c2);
            }
        }
        report.check("coassociativity", left == right, || show(b));

        let eps = |b: HBasis| HElem::term(elem(b).counit(), 0, 0);
        report.check("left counit", dx.contract(eps, elem) == x, || show(b));
        report.check("right counit", dx.contract(elem, eps) == x, || show(b));

        let unit = HElem::term(x.counit(), 0, 0);
        let s = |b: HBasis| h.antipode_basis(b);
        let l = dx.contract(s, elem);
        report.check("S(h1) h2 = eps(h)", l == unit, || format!("{}: {l}", show(b)));
        let r = dx.contract(elem, s);
        report.check("h1 S(h2) = eps(h)", r == unit, || format!("{}: {r}", show(b)));
    }

    for &x in &basis {
        for &y in &basis {
            let prod = &elem(x) * &elem(y);
            let lhs = prod.coproduct();
            let rhs = &elem(x).coproduct() * &elem(y).coproduct();
            report.check("coproduct multiplicative", lhs == rhs, || format!("{} * {}", show(x), show(y)));
            let graded = prod.terms().all(|((_, k), _)| k == x.1 + y.1);
            report.check("grading", graded, || format!("{} * {} = {prod}", show(x), show(y)));
            let counit = &elem(x).counit() * &elem(y).counit();
            report.check("counit multiplicative", prod.counit() == counit, || format!("{} * {}", show(x), show(y)));
            if x.1 < n && y.1 < n {
                let closed = prod.terms().all(|((_, k), _)| k < n);
                report.check("J closed under products", closed, || format!("{} * {} = {prod}", show(x), show(y)));
            }
        }
    }

    let d1 = HElem::delta(field, 1);
    let dd = d1.coproduct();
    report.check("not cocommutative at delta(1)", dd != dd.twist(), || dd.to_string());
    let sd = &HElem::sigma(field, 1) * &d1;
    let ds = &d1 * &HElem::sigma(field, 1);
    report.check("not commutative at delta(1) sigma", sd != ds, || sd.to_string());

    // J is generated by σ and δ: δ^i = [i]_q! δ^(i) for i < N, and δ^N = 0.
    let mut power = HElem::one(field);
    for i in 1..=n {
        power = &power * &d1;
        let want = if i < n {
            HElem::delta(field, i).scale(&crate::qcomb::q_factorial(field, i as u64))
        } else {
            HElem::zero(field)
        };
        report.check("delta^i = [i]_q! delta(i)", power == want, || format!("i={i}: {power}"));
    }

    for nn in 0..=i_bound / n {
        for b in 0..n {
            if nn * n + b > i_bound {
                continue;
            }
            let c = divided_power_coefficient(field, nn, b);
            report.check("delta(nN+b) = delta(b) d_n", c.as_ref().is_some_and(|c| c.is_one()), || {
                format!("n={nn}, b={b}: coefficient {c:?}")
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn field(n: u32) -> Arc<FieldSpec<BigRational>> {
        FieldSpec::new(n).unwrap()
    }

    #[test]
    fn delta_sigma_commutation() {
        let f = field(3);
        let lhs = &HElem::delta(&f, 1) * &HElem::sigma(&f, 1);
        assert_eq!(lhs, HElem::term(f.q(), 1, 1));
        assert_eq!(lhs.to_string(), "q*s*d(1)");
    }

    #[test]
    fn divided_powers_of_d_multiply_binomially() {
        let f = field(2);
        for (m, n) in [(1, 1), (1, 2), (2, 2)] {
            let lhs = &HElem::d(&f, m) * &HElem::d(&f, n);
            let c = crate::qcomb::binomial(&f, (m + n) as u64, m as u64);
            assert_eq!(lhs, HElem::d(&f, m + n).scale(&c));
        }
    }

    #[test]
    fn delta_one_is_nilpotent() {
        for n in [2, 3, 5] {
            let f = field(n);
            let d = HElem::delta(&f, 1);
            let mut p = HElem::one(&f);
            for _ in 0..n {
                p = &p * &d;
            }
            assert!(p.is_zero());
        }
    }

    #[test]
    fn coproduct_of_delta_one() {
        let f = field(4);
        let want = &HTensor::pure(&HElem::sigma(&f, 1), &HElem::delta(&f, 1))
            + &HTensor::pure(&HElem::delta(&f, 1), &HElem::one(&f));
        assert_eq!(HElem::delta(&f, 1).coproduct(), want);
        assert!(HElem::sigma(&f, 2).counit().is_one());
    }

    #[test]
    fn antipode_values() {
        let f = field(3);
        let h = HopfH::new(&f);
        assert_eq!(h.antipode(&HElem::one(&f)), HElem::one(&f));
        assert_eq!(h.antipode(&HElem::sigma(&f, 1)), HElem::sigma(&f, 2));
        assert_eq!(h.antipode(&HElem::delta(&f, 1)), -&HElem::basis(&f, 2, 1));
    }

    #[test]
    fn axioms_hold_to_twice_the_order() {
        for n in [2, 3, 4] {
            let f = field(n);
            let r = verify_hopf_axioms(&f, 2 * n as usize);
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn axioms_hold_over_f5() {
        let f = FieldSpec::<crate::prime::Fp<5>>::new(4).unwrap();
        let r = verify_hopf_axioms(&f, 8);
        assert!(r.passed(), "{}", r.to_text());
    }

    /// The product rule gives coefficient one, whereas `binom(n+b, b)_q^-1`
    /// is not one in general.
    #[test]
    fn divided_power_coefficient_is_one() {
        let f = field(3);
        for n in 0..3 {
            for b in 0..3 {
                assert!(divided_power_coefficient(&f, n, b).unwrap().is_one());
            }
        }
        assert!(!q_binom(&f, 2, 1).unwrap().is_one());
    }

    #[test]
    fn text_form() {
        let f = field(3);
        let x = &HElem::term(f.q(), 1, 1) + &HElem::one(&f);
        assert_eq!(x.to_string(), "q*s*d(1) + d(0)");
        let y = HElem::term(&f.q() + &f.one(), 2, 0);
        assert_eq!(y.to_string(), "(q + 1)*s^2*d(0)");
    }
}
