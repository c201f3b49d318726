//! The iterative q-difference operator `δ* = (δ^(k))` on `k[t]` and `k(t)`.
//!
//! On polynomials `δ^(k)(t^n) = binom(n, k)_q t^(n-k)`. On a fraction `p/s`
//! the value is forced by the twisted Leibniz rule applied to `p = (p/s)·s`:
//!
//! ```text
//! δ^(k)(p/s) = [δ^(k)(p) - Σ_{i=1..k} σ^i(δ^(k-i)(p/s)) δ^(i)(s)] / s
//! ```
//!
//! In practice the fraction is rewritten as `g/Q` with `Q` the lcm of the
//! σ-orbit of `s`. `Q` is a polynomial in `t^N`, on which `δ^(aN)` is the
//! `a`-th Hasse derivative in `t^N` and all other orders vanish, so the
//! rule collapses to a short sum of polynomial terms. Each order is reduced
//! against a coprime base of the shifts of `s`, which keeps every gcd small.

use std::sync::Arc;

use crate::poly::Poly;
use crate::prime::PrimeField;
use crate::qcomb::{binomial, q_binom};
use crate::random::Sampler;
use crate::ratfunc::RatFunc;
use crate::report::Report;
use crate::scalar::FieldSpec;

/// `δ^(k)` on a polynomial.
pub fn delta_poly<C: PrimeField>(k: usize, p: &Poly<C>) -> Poly<C> {
    if k == 0 {
        return p.clone();
    }
    let field = p.field();
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .skip(k)
        .map(|(n, c)| c * &q_binom(field, n as i64, k as i64).expect("k <= n"))
        .collect();
    Poly::from_coeffs(field, coeffs)
}

/// `δ^(k)` on a rational function.
pub fn delta_ratfunc<C: PrimeField>(k: usize, f: &RatFunc<C>) -> RatFunc<C> {
    delta_table(f, k).pop().expect("table is nonempty")
}

/// `[δ^(0)(f), δ^(1)(f), ..., δ^(k_max)(f)]`.
pub fn delta_table<C: PrimeField>(f: &RatFunc<C>, k_max: usize) -> Vec<RatFunc<C>> {
    let p = f.numer();
    let s = f.denom();
    if s.is_one() {
        return (0..=k_max).map(|k| RatFunc::from_poly(delta_poly(k, p))).collect();
    }
    let field = f.field().clone();
    let n = field.order() as usize;
    // The lcm of the σ-orbit of s is σ-invariant up to a scalar; padding it
    // with a power of t to degree 0 mod N makes it a polynomial Q~(t^N).
    let shifts: Vec<Poly<C>> = (0..n).map(|m| s.sigma_shift(m as i64).monic()).collect();
    let t = Poly::t(&field);
    let mut inputs = shifts.clone();
    inputs.push(t.clone());
    let base = coprime_base(inputs);
    let mut q_exps = vec![0u32; base.len()];
    for sh in &shifts {
        let (_, exps) = factor_over(sh, &base).expect("shifts factor over their base");
        for (e, x) in q_exps.iter_mut().zip(exps) {
            *e = (*e).max(x);
        }
    }
    let deg_q: usize = base.iter().zip(&q_exps).map(|(b, &e)| b.degree().unwrap_or(0) * e as usize).sum();
    let t_at = base.iter().position(|b| *b == t).expect("t is in the base");
    q_exps[t_at] += ((n - deg_q % n) % n) as u32;
    let mut q = Poly::one(&field);
    let mut cofactor = Poly::one(&field);
    let (_, s_exps) = factor_over(&s.monic(), &base).expect("s factors over its base");
    for ((b, &e), &es) in base.iter().zip(&q_exps).zip(&s_exps) {
        for i in 0..e {
            q = &q * b;
            if i >= es {
                cofactor = &cofactor * b;
            }
        }
    }
    let g = &p.scale(&s.leading().inv().expect("nonzero")) * &cofactor;
    let q_coeffs = in_powers_of(&q, n);

    // Leibniz with a σ-invariant factor: δ^(k)(g/Q) = Σ_a δ^(k-aN)(g) · δ^(aN)(1/Q),
    // and δ^(aN)(1/Q) = H_a(1/Q~) = R_a / Q^(a+1) with
    // R_a = -Σ_{j=1..a} H_j(Q~) R_(a-j) Q^(j-1).
    let a_max = k_max / n;
    let hasse_q: Vec<Poly<C>> = (0..=a_max).map(|j| spread(&field, &hasse(&field, &q_coeffs, j), n)).collect();
    let mut q_pows = vec![Poly::one(&field)];
    for a in 1..=a_max + 1 {
        let next = &q_pows[a - 1] * &q;
        q_pows.push(next);
    }
    let mut r: Vec<Poly<C>> = vec![Poly::one(&field)];
    for a in 1..=a_max {
        let mut acc = Poly::zero(&field);
        for j in 1..=a {
            acc = &acc - &(&(&hasse_q[j] * &r[a - j]) * &q_pows[j - 1]);
        }
        r.push(acc);
    }
    // Each R_a Q^(A-a) is shared by every order k with floor(k/N) = A.
    let mut out = Vec::with_capacity(k_max + 1);
    let mut weights: Vec<Poly<C>> = Vec::new();
    let one = field.one();
    for k in 0..=k_max {
        let big_a = k / n;
        if k % n == 0 {
            weights = (0..=big_a).map(|a| &r[a] * &q_pows[big_a - a]).collect();
        }
        let mut num = Poly::zero(&field);
        for (a, w) in weights.iter().enumerate() {
            num = &num + &(&delta_poly(k - a * n, &g) * w);
        }
        let exps: Vec<u32> = q_exps.iter().map(|e| e * (big_a as u32 + 1)).collect();
        out.push(reduce_over_base(&num, &one, &base, &exps));
    }
    out
}

/// Coefficients of a polynomial in `t^N`, read off at the multiples of `N`.
fn in_powers_of<C: PrimeField>(p: &Poly<C>, n: usize) -> Vec<crate::scalar::Scalar<C>> {
    debug_assert!(p.coeffs().iter().enumerate().all(|(i, c)| i % n == 0 || c.is_zero()));
    p.coeffs().iter().step_by(n).cloned().collect()
}

/// Substitutes `T = t^N` into a polynomial in `T`.
fn spread<C: PrimeField>(field: &Arc<FieldSpec<C>>, coeffs: &[crate::scalar::Scalar<C>], n: usize) -> Poly<C> {
    let mut v = vec![field.zero(); coeffs.len().saturating_sub(1) * n + 1];
    for (i, c) in coeffs.iter().enumerate() {
        v[i * n] = c.clone();
    }
    Poly::from_coeffs(field, v)
}

/// Ordinary Hasse derivative of order `j` of a polynomial in `T`.
fn hasse<C: PrimeField>(
    field: &Arc<FieldSpec<C>>,
    coeffs: &[crate::scalar::Scalar<C>],
    j: usize,
) -> Vec<crate::scalar::Scalar<C>> {
    if j >= coeffs.len() {
        return vec![field.zero()];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(j)
        .map(|(m, c)| c * &binomial(field, m as u64, j as u64))
        .collect()
}

/// `(σ_q(f) - f) / ((q - 1) t)`: the first-order operator written directly.
pub fn delta_one_direct<C: PrimeField>(f: &RatFunc<C>) -> RatFunc<C> {
    let u = RatFunc::u(f.field());
    &u * &(&f.sigma_shift(1) - f)
}

/// A pairwise coprime list of monic nonconstant polynomials such that every
/// input is, up to a unit, a product of powers of its members.
pub(crate) fn coprime_base<C: PrimeField>(inputs: Vec<Poly<C>>) -> Vec<Poly<C>> {
    let mut list: Vec<Poly<C>> = Vec::new();
    for p in inputs {
        if p.degree().unwrap_or(0) > 0 {
            let m = p.monic();
            if !list.contains(&m) {
                list.push(m);
            }
        }
    }
    'refine: loop {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let g = list[i].gcd(&list[j]);
                if g.degree().unwrap_or(0) == 0 {
                    continue;
                }
                let a = list[i].exact_div(&g).expect("gcd divides");
                let b = list[j].exact_div(&g).expect("gcd divides");
                list.remove(j);
                list.remove(i);
                for x in [g, a, b] {
                    if x.degree().unwrap_or(0) > 0 && !list.contains(&x) {
                        list.push(x.monic());
                    }
                }
                continue 'refine;
            }
        }
        break;
    }
    list
}

/// Writes `p = unit · Π base[i]^e[i]`, or `None` if `p` does not factor.
pub(crate) fn factor_over<C: PrimeField>(p: &Poly<C>, base: &[Poly<C>]) -> Option<(Poly<C>, Vec<u32>)> {
    let mut rest = p.clone();
    let mut exps = vec![0; base.len()];
    for (b, e) in base.iter().zip(exps.iter_mut()) {
        loop {
            let (q, r) = rest.divrem(b).ok()?;
            if !r.is_zero() {
                break;
            }
            rest = q;
            *e += 1;
        }
    }
    (rest.degree() == Some(0)).then_some((rest, exps))
}

/// Canonical form of `num / (lead · Π base[i]^exps[i])` with pairwise
/// coprime monic base elements: the gcd splits into one small gcd per
/// base power.
fn reduce_over_base<C: PrimeField>(
    num: &Poly<C>,
    lead: &crate::scalar::Scalar<C>,
    base: &[Poly<C>],
    exps: &[u32],
) -> RatFunc<C> {
    let field = num.field();
    if num.is_zero() {
        return RatFunc::zero(field);
    }
    let mut num = num.clone();
    let mut den = Poly::one(field);
    for (b, &e) in base.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        let mut power = Poly::one(field);
        for _ in 0..e {
            power = &power * b;
        }
        if !num.certainly_coprime(&power) {
            let (_, n, pw) = num.gcd_cofactors(&power);
            num = n;
            power = pw;
        }
        den = &den * &power;
    }
    RatFunc::from_parts(num.scale(&lead.inv().expect("unit leading coefficient")), den)
}

/// Bounds for the operator suite.
#[derive(Debug, Clone, Copy)]
pub struct OperatorSuite {
    pub deg_bound: usize,
    pub k_bound: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Checks the defining axioms of an iterative q-difference operator and the
/// derived identities on seeded random rational functions.
pub fn verify_operator_axioms<C: PrimeField>(field: &Arc<FieldSpec<C>>, cfg: OperatorSuite) -> Report {
    let mut report = Report::new("qop", field.to_string(), Some(cfg.seed));
    let n = field.order() as usize;
    let kb = cfg.k_bound;
    let mut rng = Sampler::new(field, cfg.seed);
    let t = RatFunc::t(field);
    let one = RatFunc::one(field);

    let tt = delta_table(&t, kb.max(2));
    report.check("delta(1)(t) = 1", tt[1].is_one(), || format!("got {}", tt[1]));
    for (k, v) in tt.iter().enumerate().skip(2) {
        report.check("delta(k)(t) = 0 for k > 1", v.is_zero(), || format!("k={k}: {v}"));
    }
    for (k, v) in delta_table(&one, kb).iter().enumerate().skip(1) {
        report.check("delta(k)(1) = 0 for k > 0", v.is_zero(), || format!("k={k}: {v}"));
    }

    for trial in 0..cfg.trials {
        let x = rng.ratfunc(cfg.deg_bound);
        let y = rng.ratfunc(cfg.deg_bound);
        let tag = |extra: String| format!("trial {trial}, x = {x}, y = {y}{extra}");

        let dx = delta_table(&x, kb);
        let dy = delta_table(&y, kb);
        let dxy = delta_table(&(&x * &y), kb);
        let dsum = delta_table(&(&x + &y), kb);
        let c = rng.scalar();
        let dcx = delta_table(&x.scale(&c), kb);

        report.check("delta(0) = id", dx[0] == x, || tag(String::new()));
        let direct = delta_one_direct(&x);
        report.check("delta(1) = (sigma - 1)/((q - 1) t)", dx[1] == direct, || {
            tag(format!(": {} vs {}", dx[1], direct))
        });
        report.check("sigma^N = id", x.sigma_shift(n as i64) == x, || tag(String::new()));

        let sx = x.sigma_shift(1);
        let sy = y.sigma_shift(1);
        report.check("sigma additive", (&x + &y).sigma_shift(1) == &sx + &sy, || tag(String::new()));
        report.check("sigma multiplicative", (&x * &y).sigma_shift(1) == &sx * &sy, || tag(String::new()));

        let dsx = delta_table(&sx, kb);
        for k in 0..=kb {
            report.check("additivity", dsum[k] == &dx[k] + &dy[k], || tag(format!(", k={k}")));
            report.check("k-linear", dcx[k] == dx[k].scale(&c), || tag(format!(", c = {c}, k={k}")));

            let mut twisted = RatFunc::zero(field);
            let mut flipped = RatFunc::zero(field);
            for i in 0..=k {
                let j = k - i;
                twisted = &twisted + &(&dx[j].sigma_shift(i as i64) * &dy[i]);
                flipped = &flipped + &(&dx[i] * &dy[j].sigma_shift(i as i64));
            }
            report.check("twisted Leibniz", dxy[k] == twisted, || tag(format!(", k={k}")));
            report.check("flipped Leibniz", dxy[k] == flipped, || tag(format!(", k={k}")));

            let rhs = dx[k].sigma_shift(1).scale(&field.q_pow(k as i64));
            report.check("delta(k) sigma = q^k sigma delta(k)", dsx[k] == rhs, || tag(format!(", k={k}")));
        }

        for j in 0..=kb {
            // δ^(0) is the identity, so the j = 0 row is the table itself.
            let inner = if j == 0 { dx.clone() } else { delta_table(&dx[j], kb - j) };
            for i in 0..=kb - j {
                let c = q_binom(field, (i + j) as i64, i as i64).expect("in range");
                let rhs = dx[i + j].scale(&c);
                report.check("iteration rule", inner[i] == rhs, || tag(format!(", i={i}, j={j}")));
            }
        }

        let mut iter = x.clone();
        for _ in 0..n {
            iter = delta_ratfunc(1, &iter);
        }
        report.check("delta(1)^N = 0", iter.is_zero(), || tag(format!(": {iter}")));

        let p = rng.poly(cfg.deg_bound);
        let pf = RatFunc::from_poly(p.clone());
        let table = delta_table(&pf, kb);
        for (k, v) in table.iter().enumerate() {
            let direct = RatFunc::from_poly(delta_poly(k, &p));
            report.check("agrees with the polynomial formula", *v == direct, || {
                format!("p = {p}, k={k}")
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::Fp;
    use num_rational::BigRational;

    fn field(n: u32) -> Arc<FieldSpec<BigRational>> {
        FieldSpec::new(n).unwrap()
    }

    #[test]
    fn monomial_formula() {
        let f = field(3);
        let t = Poly::t(&f);
        assert!(delta_poly(1, &t).is_one());
        assert!(delta_poly(2, &Poly::one(&f)).is_zero());
        let t5 = Poly::monomial(f.one(), 5);
        assert_eq!(delta_poly(2, &t5), Poly::monomial(q_binom(&f, 5, 2).unwrap(), 3));
    }

    #[test]
    fn delta_of_reciprocal() {
        let f = field(4);
        let inv_t = RatFunc::t(&f).inv().unwrap();
        let expected = RatFunc::new(Poly::constant(-f.q().inv().unwrap()), Poly::monomial(f.one(), 2)).unwrap();
        assert_eq!(delta_ratfunc(1, &inv_t), expected);
        assert_eq!(delta_one_direct(&inv_t), expected);
    }

    #[test]
    fn delta_of_u() {
        let f = field(5);
        let u = RatFunc::u(&f);
        let c = (&f.q() - &f.one()).div(&f.q()).unwrap();
        assert_eq!(delta_ratfunc(1, &u), (&u * &u).scale(&-c));
    }

    #[test]
    fn constants_are_killed() {
        let f = field(3);
        let c = RatFunc::constant(&f.q() + &f.from_i64(2));
        for k in 1..7 {
            assert!(delta_ratfunc(k, &c).is_zero());
        }
    }

    #[test]
    fn second_order_on_t_squared() {
        let f = field(3);
        let t2 = RatFunc::from_poly(Poly::monomial(f.one(), 2));
        assert!(delta_ratfunc(2, &t2).is_one());
        let twice = delta_ratfunc(1, &delta_ratfunc(1, &t2));
        assert_eq!(twice, RatFunc::constant(crate::qcomb::q_int(&f, 2)));
    }

    #[test]
    fn coprime_base_splits_common_factors() {
        let f = field(3);
        let t = Poly::t(&f);
        let a = &t - &Poly::one(&f);
        let b = &t + &Poly::one(&f);
        let base = coprime_base(vec![&a * &b, &a * &a]);
        assert_eq!(base.len(), 2);
        assert!(factor_over(&(&(&a * &a) * &b), &base).is_some());
    }

    #[test]
    fn small_suite_passes() {
        let cfg = OperatorSuite {
            deg_bound: 3,
            k_bound: 6,
            trials: 4,
            seed: 11,
        };
        let report = verify_operator_axioms(&field(3), cfg);
        assert!(report.passed(), "{}", report.to_text());
        let report = verify_operator_axioms(&FieldSpec::<Fp<5>>::new(3).unwrap(), cfg);
        assert!(report.passed(), "{}", report.to_text());
    }
}
