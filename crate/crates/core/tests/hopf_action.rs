//! `H` acts on `K = k(t)` through `σ^a δ^(i) ↦ σ_q^a ∘ δ^(i)`. The action is
//! computed here by composing the operators of `qop` directly, so the
//! multiplication, coproduct and antipode tables of `H` are checked against
//! operator composition rather than against their own formulas.

use std::sync::Arc;

use iterq::hopf::{HElem, HopfH};
use iterq::qop::delta_ratfunc;
use iterq::random::Sampler;
use iterq::{FieldSpec, Fp, PrimeField, RatFunc, Rational};

fn act<C: PrimeField>(h: &HElem<C>, f: &RatFunc<C>) -> RatFunc<C> {
    let mut out = RatFunc::zero(f.field());
    for ((a, i), c) in h.terms() {
        let v = delta_ratfunc(i, f).sigma_shift(a as i64).scale(c);
        out = &out + &v;
    }
    out
}

fn basis_pairs(n: u32, i_bound: usize) -> Vec<(u32, usize)> {
    (0..n).flat_map(|a| (0..=i_bound).map(move |i| (a, i))).collect()
}

fn check_product<C: PrimeField>(field: &Arc<FieldSpec<C>>, seed: u64) {
    let n = field.order();
    let mut rng = Sampler::new(field, seed);
    let f = rng.ratfunc(3);
    for &(a, i) in &basis_pairs(n, n as usize + 1) {
        for &(b, j) in &basis_pairs(n, n as usize) {
            let x = HElem::basis(field, a as i64, i);
            let y = HElem::basis(field, b as i64, j);
            assert_eq!(act(&(&x * &y), &f), act(&x, &act(&y, &f)), "N={n}, {x} * {y} on {f}");
        }
    }
}

fn check_coproduct_and_antipode<C: PrimeField>(field: &Arc<FieldSpec<C>>, seed: u64) {
    let n = field.order();
    let hopf = HopfH::new(field);
    let mut rng = Sampler::new(field, seed);
    let (f, g) = (rng.ratfunc(2), rng.ratfunc(2));
    let fg = &f * &g;
    for (a, i) in basis_pairs(n, 2 * n as usize) {
        let h = HElem::basis(field, a as i64, i);
        let cop = h.coproduct();
        let mut leibniz = RatFunc::zero(field);
        let mut unit = RatFunc::zero(field);
        for (((a1, i1), (a2, i2)), c) in cop.terms() {
            let h1 = HElem::term(c.clone(), a1 as i64, i1);
            let h2 = HElem::basis(field, a2 as i64, i2);
            leibniz = &leibniz + &(&act(&h1, &f) * &act(&h2, &g));
            unit = &unit + &act(&h1, &act(&hopf.antipode(&h2), &f));
        }
        assert_eq!(act(&h, &fg), leibniz, "N={n}, {h}(fg)");
        assert_eq!(unit, f.scale(&h.counit()), "N={n}, h1 S(h2) for {h}");
    }
}

#[test]
fn product_is_composition_over_q() {
    for n in [2, 3, 4] {
        check_product(&FieldSpec::<Rational>::new(n).unwrap(), 11 + n as u64);
    }
}

#[test]
fn product_is_composition_over_f7() {
    check_product(&FieldSpec::<Fp<7>>::new(3).unwrap(), 5);
}

#[test]
fn coproduct_is_leibniz_and_antipode_inverts() {
    for n in [2, 3] {
        check_coproduct_and_antipode(&FieldSpec::<Rational>::new(n).unwrap(), 23 + n as u64);
    }
    check_coproduct_and_antipode(&FieldSpec::<Fp<5>>::new(2).unwrap(), 9);
}
