//! `δ^(k)` on fractions checked against an independent route.
//!
//! Writing `p/s = g/D` with `D = Π_m σ^m(s)` the norm of `s`, the denominator
//! is σ-invariant, i.e. a polynomial in `t^N`. On such functions `δ^(aN)` acts
//! as the `a`-th Hasse derivative in `t^N` and every other `δ^(i)` vanishes, so
//!
//! ```text
//! δ^(k)(g/D) = Σ_a δ^(k-aN)(g) · H_a(1/D)
//! ```
//!
//! which only needs the polynomial formula and ordinary Hasse derivatives.
//!
//! A second route solves the twisted Leibniz rule for `p = s·(p/s)` order
//! by order in plain field arithmetic:
//!
//! ```text
//! δ^(k)(p/s) = [δ^(k)(p) - Σ_{i<k} σ^i(δ^(k-i)(s)) δ^(i)(p/s)] / σ^k(s)
//! ```

use std::sync::Arc;

use iterq::qcomb::binomial;
use iterq::qop::{delta_poly, delta_ratfunc, delta_table};
use iterq::random::Sampler;
use iterq::{FieldSpec, Fp, Poly, PrimeField, RatFunc, Rational};

/// Coefficients of `f` in `s = t^N`; `None` if `f` is not a polynomial in `t^N`.
fn in_t_pow_n<C: PrimeField>(f: &Poly<C>, n: usize) -> Option<Vec<iterq::Scalar<C>>> {
    let mut out = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if i % n == 0 {
            out.push(c.clone());
        } else if !c.is_zero() {
            return None;
        }
    }
    Some(out)
}

/// Substitutes `s = t^N`.
fn from_s<C: PrimeField>(field: &Arc<FieldSpec<C>>, coeffs: &[iterq::Scalar<C>], n: usize) -> Poly<C> {
    let mut v = vec![field.zero(); coeffs.len().saturating_sub(1) * n + 1];
    for (i, c) in coeffs.iter().enumerate() {
        v[i * n] = c.clone();
    }
    Poly::from_coeffs(field, v)
}

/// Ordinary Hasse derivative of order `i` in `s`.
fn hasse<C: PrimeField>(field: &Arc<FieldSpec<C>>, coeffs: &[iterq::Scalar<C>], i: usize) -> Vec<iterq::Scalar<C>> {
    coeffs
        .iter()
        .enumerate()
        .skip(i)
        .map(|(m, c)| c * &binomial(field, m as u64, i as u64))
        .collect()
}

fn norm_route<C: PrimeField>(f: &RatFunc<C>, k: usize) -> RatFunc<C> {
    let field = f.field().clone();
    let n = field.order() as usize;
    let s = f.denom();
    let mut g = f.numer().clone();
    let mut norm = s.clone();
    for m in 1..n {
        let sh = s.sigma_shift(m as i64);
        g = &g * &sh;
        norm = &norm * &sh;
    }
    let ds = in_t_pow_n(&norm, n).expect("the norm is σ-invariant");
    let d_t = from_s(&field, &ds, n);
    // H_a(1/D) = N_a / D^(a+1) with N_a = -Σ_{i=1..a} H_i(D) N_(a-i) D^(i-1).
    let a_max = k / n;
    let mut numers: Vec<Poly<C>> = vec![Poly::one(&field)];
    for a in 1..=a_max {
        let mut acc = Poly::zero(&field);
        let mut d_pow = Poly::one(&field);
        for i in 1..=a {
            let hi = from_s(&field, &hasse(&field, &ds, i), n);
            acc = &acc - &(&(&hi * &numers[a - i]) * &d_pow);
            d_pow = &d_pow * &d_t;
        }
        numers.push(acc);
    }
    let mut total = RatFunc::zero(&field);
    let mut d_pow = d_t.clone();
    for (a, na) in numers.iter().enumerate() {
        let term = RatFunc::new(&delta_poly(k - a * n, &g) * na, d_pow.clone()).unwrap();
        total = &total + &term;
        d_pow = &d_pow * &d_t;
    }
    total
}

fn recursion_route<C: PrimeField>(f: &RatFunc<C>, k_max: usize) -> Vec<RatFunc<C>> {
    let p = f.numer();
    let s = f.denom();
    let mut out: Vec<RatFunc<C>> = Vec::new();
    for k in 0..=k_max {
        let mut acc = RatFunc::from_poly(delta_poly(k, p));
        for (i, di) in out.iter().enumerate() {
            let ds = RatFunc::from_poly(delta_poly(k - i, s).sigma_shift(i as i64));
            acc = &acc - &(&ds * di);
        }
        let lead = RatFunc::from_poly(s.sigma_shift(k as i64));
        out.push(acc.div(&lead).unwrap());
    }
    out
}

fn check_field<C: PrimeField>(field: &Arc<FieldSpec<C>>, seed: u64, trials: usize, deg: usize) {
    let n = field.order() as usize;
    let mut rng = Sampler::new(field, seed);
    for _ in 0..trials {
        let f = rng.ratfunc(deg);
        let table = delta_table(&f, 2 * n);
        assert_eq!(table, recursion_route(&f, 2 * n), "N={n}, f={f}");
        for (k, v) in table.iter().enumerate() {
            assert_eq!(*v, norm_route(&f, k), "N={n}, f={f}, k={k}");
        }
    }
}

#[test]
fn matches_independent_routes_in_characteristic_zero() {
    for n in [2, 3, 4, 6] {
        check_field(&FieldSpec::<Rational>::new(n).unwrap(), 41 + n as u64, 6, 3);
    }
}

#[test]
fn matches_independent_routes_over_f5() {
    check_field(&FieldSpec::<Fp<5>>::new(3).unwrap(), 7, 10, 3);
    check_field(&FieldSpec::<Fp<5>>::new(4).unwrap(), 8, 10, 3);
}

#[test]
fn single_order_agrees_with_table() {
    let f = FieldSpec::<Rational>::new(3).unwrap();
    let mut rng = Sampler::new(&f, 3);
    let x = rng.ratfunc(4);
    let table = delta_table(&x, 6);
    for (k, v) in table.iter().enumerate() {
        assert_eq!(delta_ratfunc(k, &x), *v);
    }
}

/// `δ^(k)(t^-1) = binom(-1, k)_q t^(-1-k)` with
/// `binom(-1, k)_q = (-1)^k q^(-k(k+1)/2)`.
#[test]
fn reciprocal_of_t() {
    for n in [2u32, 3, 5] {
        let f = FieldSpec::<Rational>::new(n).unwrap();
        let inv_t = RatFunc::t(&f).inv().unwrap();
        for k in 0..=2 * n as i64 {
            let sign = if k % 2 == 0 { f.one() } else { -f.one() };
            let coeff = &sign * &f.q_pow(-k * (k + 1) / 2);
            let want = RatFunc::t(&f).pow(-1 - k).unwrap().scale(&coeff);
            assert_eq!(delta_ratfunc(k as usize, &inv_t), want, "N={n}, k={k}");
        }
    }
}
