//! The coefficient field `k = k0(q)` with `q` a primitive `N`-th root of unity,
//! realized as `k0[x] / (m(x))` where `m` is the minimal polynomial of `q`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::modgcd::PrimeImage;
use crate::modp::Reduction;
use crate::prime::{is_prime, PrimeField};

/// Upper bound on monic candidates tried when factoring a cyclotomic
/// polynomial over `F_p`.
const FACTOR_SEARCH_LIMIT: u64 = 1 << 20;

// Dense univariate helpers over the prime field, coefficients low to high.

fn trim<C: PrimeField>(v: &mut Vec<C>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_mul<C: PrimeField>(a: &[C], b: &[C]) -> Vec<C> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

fn poly_sub<C: PrimeField>(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    let mut out: Vec<C> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(C::zero);
            let y = b.get(i).cloned().unwrap_or_else(C::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder by a nonzero divisor.
fn poly_divrem<C: PrimeField>(a: &[C], b: &[C]) -> (Vec<C>, Vec<C>) {
    let lead_inv = b.last().and_then(|c| c.inverse()).expect("nonzero divisor");
    let mut rem = a.to_vec();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![C::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let factor = rem.last().unwrap().clone() * lead_inv.clone();
        for (j, c) in b.iter().enumerate() {
            rem[shift + j] = rem[shift + j].clone() - factor.clone() * c.clone();
        }
        quot[shift] = factor;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
fn poly_inverse_mod<C: PrimeField>(a: &[C], m: &[C]) -> Option<Vec<C>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (Vec::<C>::new(), vec![C::one()]);
    trim(&mut r1);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is the gcd; invertible iff it is a nonzero constant.
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].inverse()?;
    let mut out: Vec<C> = s0.into_iter().map(|x| x * c.clone()).collect();
    trim(&mut out);
    Some(poly_divrem(&out, m).1)
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The `n`-th cyclotomic polynomial over the prime field, by exact division of
/// `x^n - 1` by the cyclotomic polynomials of the proper divisors.
fn cyclotomic<C: PrimeField>(n: u32) -> Vec<C> {
    let mut xn1 = vec![C::zero(); n as usize + 1];
    xn1[0] = -C::one();
    xn1[n as usize] = C::one();
    let mut out = xn1;
    for d in divisors(n) {
        if d < n {
            let (q, r) = poly_divrem(&out, &cyclotomic::<C>(d));
            debug_assert!(r.is_empty());
            out = q;
        }
    }
    out
}

fn multiplicative_order(p: u64, n: u32) -> u32 {
    let n = n as u64;
    let mut acc = p % n;
    let mut k = 1;
    while acc != 1 {
        acc = acc * p % n;
        k += 1;
    }
    k
}

/// Least monic irreducible factor of `phi` over `F_p`, all of whose factors
/// have degree `degree`. Candidates are compared on the coefficients below
/// the leading one, highest degree first.
fn least_factor<C: PrimeField>(phi: &[C], degree: usize) -> Result<Vec<C>> {
    let elements = C::elements().expect("finite field");
    let p = elements.len() as u64;
    let count = p.checked_pow(degree as u32).unwrap_or(u64::MAX);
    if count > FACTOR_SEARCH_LIMIT {
        return Err(Error::FieldTooLarge {
            characteristic: C::CHARACTERISTIC,
        });
    }
    for index in 0..count {
        let mut cand = vec![C::zero(); degree + 1];
        cand[degree] = C::one();
        let mut rest = index;
        for slot in 0..degree {
            cand[slot] = elements[(rest % p) as usize].clone();
            rest /= p;
        }
        if poly_divrem(phi, &cand).1.is_empty() {
            return Ok(cand);
        }
    }
    Err(Error::Internal("cyclotomic polynomial has no factor of the expected degree".into()))
}

/// The field `k = k0(q)`, `q` a primitive `N`-th root of unity.
pub struct FieldSpec<C: PrimeField> {
    order: u32,
    modulus: Vec<C>,
    q_powers: Vec<Vec<C>>,
    pub(crate) binomials: Mutex<Vec<Vec<Vec<C>>>>,
    reduction: OnceLock<Option<Reduction>>,
    primes: Mutex<Vec<Arc<PrimeImage>>>,
}

impl<C: PrimeField> fmt::Debug for FieldSpec<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("characteristic", &C::CHARACTERISTIC)
            .field("order", &self.order)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl<C: PrimeField> FieldSpec<C> {
    /// Builds the field for a primitive root of order `order`.
    pub fn new(order: u32) -> Result<Arc<Self>> {
        if order < 2 {
            return Err(Error::OrderTooSmall(order));
        }
        let p = C::CHARACTERISTIC;
        if p != 0 {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if (order as u64).is_multiple_of(p) {
                return Err(Error::DegenerateOrder {
                    characteristic: p,
                    order,
                });
            }
        }
        let phi = cyclotomic::<C>(order);
        let modulus = if p == 0 {
            phi
        } else {
            let degree = multiplicative_order(p, order) as usize;
            if degree + 1 == phi.len() {
                phi
            } else {
                least_factor(&phi, degree)?
            }
        };
        let mut field = FieldSpec {
            order,
            modulus,
            q_powers: Vec::new(),
            binomials: Mutex::new(Vec::new()),
            reduction: OnceLock::new(),
            primes: Mutex::new(Vec::new()),
        };
        let mut acc = vec![C::one()];
        for _ in 0..order {
            field.q_powers.push(acc.clone());
            acc = field.reduce(poly_mul(&acc, &[C::zero(), C::one()]));
        }
        let field = Arc::new(field);
        field.check_primitive()?;
        Ok(field)
    }

    fn reduce(&self, mut v: Vec<C>) -> Vec<C> {
        let d = self.degree();
        for i in (d..v.len()).rev() {
            let c = std::mem::replace(&mut v[i], C::zero());
            if c.is_zero() {
                continue;
            }
            // The modulus is monic with mostly unit coefficients.
            for (j, m) in self.modulus[..d].iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                let cur = std::mem::replace(&mut v[i - d + j], C::zero());
                v[i - d + j] = if m.is_one() {
                    cur - c.clone()
                } else if (-m.clone()).is_one() {
                    cur + c.clone()
                } else {
                    cur - c.clone() * m.clone()
                };
            }
        }
        v.truncate(d);
        trim(&mut v);
        v
    }

    /// Reduces an unreduced product accumulated coefficientwise.
    pub(crate) fn from_raw(self: &Arc<Self>, coeffs: Vec<C>) -> Scalar<C> {
        Scalar {
            field: self.clone(),
            coeffs: self.reduce(coeffs),
        }
    }

    fn check_primitive(self: &Arc<Self>) -> Result<()> {
        let q = self.q();
        let one = self.one();
        let mut acc = one.clone();
        for j in 1..=self.order {
            acc = &acc * &q;
            if (j == self.order) != (acc == one) {
                return Err(Error::Internal(format!("q is not a primitive root of order {}", self.order)));
            }
        }
        Ok(())
    }

    /// Reduction modulo a word-sized prime, characteristic zero only.
    pub(crate) fn reduction(&self) -> Option<Reduction> {
        *self.reduction.get_or_init(|| Reduction::find(self.order, &self.modulus))
    }

    /// The `idx`-th prime image used by the multi-modular gcd, searched
    /// downwards from `2^62`; characteristic zero only.
    pub(crate) fn prime_image(&self, idx: usize) -> Option<Arc<PrimeImage>> {
        let mut primes = self.primes.lock().expect("prime cache poisoned");
        while primes.len() <= idx {
            let below = primes.last().map_or(1 << 62, |img| img.p);
            primes.push(Arc::new(PrimeImage::search(self.order, &self.modulus, below)?));
        }
        Some(primes[idx].clone())
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u64 {
        C::CHARACTERISTIC
    }

    /// Coefficients of the minimal polynomial of `q`, low to high, monic.
    pub fn modulus(&self) -> &[C] {
        &self.modulus
    }

    /// Degree of `k` over the prime field.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Human-readable minimal polynomial in `x`.
    pub fn modulus_string(&self) -> String {
        format_poly(&self.modulus, "x")
    }

    pub fn zero(self: &Arc<Self>) -> Scalar<C> {
        Scalar {
            field: self.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(self: &Arc<Self>) -> Scalar<C> {
        self.from_prime(C::one())
    }

    pub fn q(self: &Arc<Self>) -> Scalar<C> {
        self.q_pow(1)
    }

    /// `q^e` for any integer `e`.
    pub fn q_pow(self: &Arc<Self>, e: i64) -> Scalar<C> {
        let idx = e.rem_euclid(self.order as i64) as usize;
        Scalar {
            field: self.clone(),
            coeffs: self.q_powers[idx].clone(),
        }
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> Scalar<C> {
        self.from_prime(C::from_i64(n))
    }

    pub fn from_prime(self: &Arc<Self>, c: C) -> Scalar<C> {
        let mut coeffs = vec![c];
        trim(&mut coeffs);
        Scalar {
            field: self.clone(),
            coeffs,
        }
    }

    /// Builds a scalar from a polynomial in `q`, reducing modulo the minimal polynomial.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: Vec<C>) -> Scalar<C> {
        Scalar {
            field: self.clone(),
            coeffs: self.reduce(coeffs),
        }
    }
}

impl<C: PrimeField> fmt::Display for FieldSpec<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match C::CHARACTERISTIC {
            0 => write!(f, "Q(q), q primitive of order {}, minimal polynomial {}", self.order(), self.modulus_string()),
            p => write!(
                f,
                "F_{p}(q), q primitive of order {}, minimal polynomial {}",
                self.order(),
                self.modulus_string()
            ),
        }
    }
}

fn format_poly<C: PrimeField>(coeffs: &[C], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative();
        let abs = if negative { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if i == 0 {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// An element of `k`, stored as its canonical residue of degree below `[k : k0]`.
#[derive(Clone)]
pub struct Scalar<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    coeffs: Vec<C>,
}

impl<C: PrimeField> Scalar<C> {
    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        &self.field
    }

    /// Residue coefficients in `q`, low to high, without trailing zeros.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The prime-field value, if this scalar lies in the prime field.
    pub fn as_prime(&self) -> Option<C> {
        match self.coeffs.len() {
            0 => Some(C::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Number of nonzero monomials `c*q^i` in the canonical form.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Whether the printed form begins with a minus sign.
    pub fn is_negative_monomial(&self) -> bool {
        self.term_count() == 1 && self.coeffs.iter().rev().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let coeffs = poly_inverse_mod(&self.coeffs, &self.field.modulus)
            .ok_or_else(|| Error::Internal("modulus is reducible".into()))?;
        Ok(Scalar {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn scale_prime(&self, c: &C) -> Self {
        let mut coeffs: Vec<C> = self.coeffs.iter().map(|x| x.clone() * c.clone()).collect();
        trim(&mut coeffs);
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }
}

impl<C: PrimeField> PartialEq for Scalar<C> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<C: PrimeField> Eq for Scalar<C> {}

impl<C: PrimeField> Hash for Scalar<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<C: PrimeField> fmt::Debug for Scalar<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl<C: PrimeField> fmt::Display for Scalar<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_poly(&self.coeffs, "q"))
    }
}

impl<C: PrimeField> Add for &Scalar<C> {
    type Output = Scalar<C>;
    fn add(self, rhs: Self) -> Scalar<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs: Vec<C> = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.clone() + b.clone(),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => C::zero(),
            })
            .collect();
        trim(&mut coeffs);
        Scalar {
            field: self.field.clone(),
            coeffs,
        }
    }
}

impl<C: PrimeField> Sub for &Scalar<C> {
    type Output = Scalar<C>;
    fn sub(self, rhs: Self) -> Scalar<C> {
        Scalar {
            field: self.field.clone(),
            coeffs: poly_sub(&self.coeffs, &rhs.coeffs),
        }
    }
}

impl<C: PrimeField> Mul for &Scalar<C> {
    type Output = Scalar<C>;
    fn mul(self, rhs: Self) -> Scalar<C> {
        if self.is_zero() || rhs.is_zero() {
            return self.field.zero();
        }
        if self.coeffs.len() == 1 {
            return rhs.scale_prime(&self.coeffs[0]);
        }
        if rhs.coeffs.len() == 1 {
            return self.scale_prime(&rhs.coeffs[0]);
        }
        Scalar {
            field: self.field.clone(),
            coeffs: self.field.reduce(poly_mul(&self.coeffs, &rhs.coeffs)),
        }
    }
}

impl<C: PrimeField> Neg for &Scalar<C> {
    type Output = Scalar<C>;
    fn neg(self) -> Scalar<C> {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($ty:ident, $tr:ident, $method:ident) => {
        impl<C: PrimeField> $tr for $ty<C> {
            type Output = $ty<C>;
            fn $method(self, rhs: Self) -> $ty<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: PrimeField> $tr<&$ty<C>> for $ty<C> {
            type Output = $ty<C>;
            fn $method(self, rhs: &$ty<C>) -> $ty<C> {
                (&self).$method(rhs)
            }
        }
    };
}
pub(crate) use forward_owned_binop;

forward_owned_binop!(Scalar, Add, add);
forward_owned_binop!(Scalar, Sub, sub);
forward_owned_binop!(Scalar, Mul, mul);

impl<C: PrimeField> Neg for Scalar<C> {
    type Output = Scalar<C>;
    fn neg(self) -> Scalar<C> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::Fp;
    use num_rational::BigRational;

    type Q = BigRational;

    fn rat(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn modulus_for_order_two_is_x_plus_one() {
        let f = FieldSpec::<Q>::new(2).unwrap();
        assert_eq!(f.modulus(), &[rat(1, 1), rat(1, 1)]);
        assert_eq!(f.q(), f.from_i64(-1));
    }

    #[test]
    fn modulus_for_order_three() {
        let f = FieldSpec::<Q>::new(3).unwrap();
        assert_eq!(f.modulus_string(), "x^2 + x + 1");
    }

    #[test]
    fn order_four_is_i() {
        let f = FieldSpec::<Q>::new(4).unwrap();
        let q = f.q();
        let q2 = &q * &q;
        assert_eq!(q2, f.from_i64(-1));
        assert_eq!(&q2 * &q2, f.one());
        assert_ne!(q2, f.one());
    }

    #[test]
    fn cyclotomic_degrees_are_euler_phi() {
        for (n, phi) in [(2, 1), (3, 2), (4, 2), (5, 4), (6, 2), (8, 4), (9, 6), (12, 4)] {
            assert_eq!(FieldSpec::<Q>::new(n).unwrap().degree(), phi, "N = {n}");
        }
    }

    #[test]
    fn inverse_of_one_plus_q_for_order_three() {
        let f = FieldSpec::<Q>::new(3).unwrap();
        let a = &f.one() + &f.q();
        assert_eq!(a.inv().unwrap(), -f.q());
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = FieldSpec::<Q>::new(5).unwrap();
        assert_eq!((&f.q() - &f.q()).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn q_times_q_to_n_minus_one_is_one() {
        for n in 2..9 {
            let f = FieldSpec::<Q>::new(n).unwrap();
            assert!((&f.q() * &f.q_pow(n as i64 - 1)).is_one());
        }
    }

    #[test]
    fn rejects_small_or_degenerate_orders() {
        assert_eq!(FieldSpec::<Q>::new(1).unwrap_err(), Error::OrderTooSmall(1));
        assert_eq!(
            FieldSpec::<Fp<5>>::new(10).unwrap_err(),
            Error::DegenerateOrder {
                characteristic: 5,
                order: 10
            }
        );
        assert_eq!(FieldSpec::<Fp<9>>::new(2).unwrap_err(), Error::NotPrime(9));
    }

    #[test]
    fn finite_field_factor_is_least() {
        // x^2 + x + 1 stays irreducible over F_5.
        let f = FieldSpec::<Fp<5>>::new(3).unwrap();
        assert_eq!(f.modulus_string(), "x^2 + x + 1");
        // 7 = 1 mod 3: the factors are x - 2 and x - 4; least is x + 3.
        let f = FieldSpec::<Fp<7>>::new(3).unwrap();
        assert_eq!(f.modulus_string(), "x + 3");
        assert_eq!(f.q(), f.from_i64(4));
        // Phi_8 splits over F_3 into two quadratics.
        let f = FieldSpec::<Fp<3>>::new(8).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.modulus_string(), "x^2 + x + 2");
    }

    #[test]
    fn display_matches_textual_format() {
        let f = FieldSpec::<Q>::new(5).unwrap();
        let x = &(&f.q_pow(2) * &f.from_prime(rat(1, 2))) - &f.from_i64(3);
        assert_eq!(x.to_string(), "1/2*q^2 - 3");
        assert_eq!((-f.q()).to_string(), "-q");
        assert_eq!(f.zero().to_string(), "0");
    }
}
