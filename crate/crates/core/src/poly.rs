//! Dense polynomials in `t` over the cyclotomic field `k`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modgcd::{modular_gcd, ModGcd};
use crate::prime::PrimeField;
use crate::scalar::{forward_owned_binop, FieldSpec, Scalar};

#[derive(Clone)]
pub struct Poly<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    coeffs: Vec<Scalar<C>>,
}

impl<C: PrimeField> Poly<C> {
    pub fn zero(field: &Arc<FieldSpec<C>>) -> Self {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Arc<FieldSpec<C>>) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Scalar<C>) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * t^degree`.
    pub fn monomial(c: Scalar<C>, degree: usize) -> Self {
        let field = c.field().clone();
        if c.is_zero() {
            return Self::zero(&field);
        }
        let mut coeffs = vec![field.zero(); degree + 1];
        coeffs[degree] = c;
        Poly { field, coeffs }
    }

    pub fn t(field: &Arc<FieldSpec<C>>) -> Self {
        Self::monomial(field.one(), 1)
    }

    pub fn from_coeffs(field: &Arc<FieldSpec<C>>, coeffs: Vec<Scalar<C>>) -> Self {
        let mut p = Poly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        &self.field
    }

    /// Coefficients indexed by degree in `t`.
    pub fn coeffs(&self) -> &[Scalar<C>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar<C> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar<C> {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    /// The constant value if the polynomial has degree at most zero.
    pub fn as_constant(&self) -> Option<Scalar<C>> {
        match self.coeffs.len() {
            0 => Some(self.field.zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Scalar<C>) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field);
        }
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn scale_prime(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.scale_prime(c)).collect();
        Self::from_coeffs(&self.field, coeffs)
    }

    /// A nonzero prime-field multiple making every coefficient integral.
    pub(crate) fn denominator_lcm(&self) -> C {
        C::denominator_lcm(self.coeffs.iter().flat_map(|c| c.coeffs().iter()))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lead_inv = divisor.leading().inv()?;
        let mut rem = self.coeffs.clone();
        let dl = divisor.coeffs.len();
        if rem.len() < dl {
            return Ok((Self::zero(&self.field), self.clone()));
        }
        let mut quot = vec![self.field.zero(); rem.len() - dl + 1];
        while rem.len() >= dl {
            let shift = rem.len() - dl;
            let factor = &rem[rem.len() - 1] * &lead_inv;
            if !factor.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[shift + j] = &rem[shift + j] - &(&factor * c);
                }
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((
            Self::from_coeffs(&self.field, quot),
            Self::from_coeffs(&self.field, rem),
        ))
    }

    /// Division known to be exact; a nonzero remainder is an internal error.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.divrem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!("inexact division of {self} by {divisor}")));
        }
        Ok(q)
    }

    /// Images of the coefficients modulo the field's word-sized prime.
    fn residues(&self) -> Option<(Vec<u64>, u64)> {
        let red = self.field.reduction()?;
        let v = self
            .coeffs
            .iter()
            .map(|c| red.scalar(c.coeffs()))
            .collect::<Option<Vec<_>>>()?;
        Some((v, red.p))
    }

    /// Cheap sufficient test for `gcd(self, other) = 1`.
    pub(crate) fn certainly_coprime(&self, other: &Self) -> bool {
        self.gcd_degree_bound(other) == Some(0)
    }

    /// Upper bound on `deg gcd(self, other)` from a modular image, when one
    /// is available and both leading coefficients survive it.
    pub(crate) fn gcd_degree_bound(&self, other: &Self) -> Option<usize> {
        let (a, p) = self.residues()?;
        let (b, _) = other.residues()?;
        if a.last().is_none_or(|&c| c == 0) || b.last().is_none_or(|&c| c == 0) {
            return None;
        }
        Some(crate::modp::gcd_degree(&a, &b, p))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() { other.monic() } else { self.monic() };
        }
        self.gcd_cofactors(other).0
    }

    /// `(g, self / g, other / g)` for the monic gcd `g` of two nonzero
    /// polynomials.
    pub fn gcd_cofactors(&self, other: &Self) -> (Self, Self, Self) {
        if self.degree() == Some(0) || other.degree() == Some(0) || self.certainly_coprime(other) {
            return (Self::one(&self.field), self.clone(), other.clone());
        }
        if let ModGcd::Found(g, a, b) = modular_gcd(self, other) {
            return (g, a, b);
        }
        let g = self.euclid_gcd(other);
        if g.is_one() {
            return (g, self.clone(), other.clone());
        }
        let a = self.exact_div(&g).expect("gcd divides");
        let b = other.exact_div(&g).expect("gcd divides");
        (g, a, b)
    }

    pub(crate) fn euclid_gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.monic(), other.monic());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == Some(0) {
                return Self::one(&self.field);
            }
            let r = a.divrem(&b).expect("nonzero divisor").1.monic();
            a = std::mem::replace(&mut b, r);
        }
        a
    }

    /// Substitutes `t -> q^e t`.
    pub fn sigma_shift(&self, e: i64) -> Self {
        if e.rem_euclid(self.field.order() as i64) == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * &self.field.q_pow(e * i as i64))
            .collect();
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn eval(&self, x: &Scalar<C>) -> Scalar<C> {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }
}

impl<C: PrimeField> PartialEq for Poly<C> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<C: PrimeField> Eq for Poly<C> {}

impl<C: PrimeField> Hash for Poly<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<C: PrimeField> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: Self) -> Poly<C> {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            coeffs[i] = &coeffs[i] + c;
        }
        Poly::from_coeffs(&self.field, coeffs)
    }
}

impl<C: PrimeField> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: Self) -> Poly<C> {
        self + &(-rhs)
    }
}

impl<C: PrimeField> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Self) -> Poly<C> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        if let Some(out) = self.mul_small(rhs) {
            return out;
        }
        // Products run on integral multiples, and each output coefficient is
        // reduced modulo the minimal polynomial once.
        let la = self.denominator_lcm();
        let lb = rhs.denominator_lcm();
        let a = if la.is_one() { None } else { Some(self.scale_prime(&la)) };
        let b = if lb.is_one() { None } else { Some(rhs.scale_prime(&lb)) };
        let (a, b) = (a.as_ref().unwrap_or(self), b.as_ref().unwrap_or(rhs));
        let (na, nb) = (a.coeffs.len(), b.coeffs.len());
        let width = 2 * self.field.degree() - 1;
        let mut coeffs = Vec::with_capacity(na + nb - 1);
        for k in 0..na + nb - 1 {
            let mut acc = vec![C::zero(); width];
            for i in k.saturating_sub(nb - 1)..=k.min(na - 1) {
                mul_acc(&mut acc, a.coeffs[i].coeffs(), b.coeffs[k - i].coeffs());
            }
            coeffs.push(self.field.from_raw(acc));
        }
        let out = Poly::from_coeffs(&self.field, coeffs);
        if la.is_one() && lb.is_one() {
            out
        } else {
            out.scale_prime(&(la * lb).inverse().expect("nonzero"))
        }
    }
}

impl<C: PrimeField> Poly<C> {
    /// Product in `i128` when every coordinate is a machine integer and
    /// nothing overflows.
    fn mul_small(&self, rhs: &Self) -> Option<Self> {
        let d = self.field.degree();
        let flat = |p: &Self| -> Option<Vec<i64>> {
            let mut v = vec![0i64; p.coeffs.len() * d];
            for (i, c) in p.coeffs.iter().enumerate() {
                for (r, x) in c.coeffs().iter().enumerate() {
                    v[i * d + r] = x.small_int()?;
                }
            }
            Some(v)
        };
        let modulus: Vec<i64> = self.field.modulus().iter().map(|c| c.small_int()).collect::<Option<_>>()?;
        let (a, b) = (flat(self)?, flat(rhs)?);
        let (na, nb) = (self.coeffs.len(), rhs.coeffs.len());
        let width = 2 * d - 1;
        let mut coeffs = Vec::with_capacity(na + nb - 1);
        let mut acc = vec![0i128; width];
        for k in 0..na + nb - 1 {
            acc.iter_mut().for_each(|x| *x = 0);
            for i in k.saturating_sub(nb - 1)..=k.min(na - 1) {
                let (x, y) = (&a[i * d..(i + 1) * d], &b[(k - i) * d..(k - i + 1) * d]);
                for (u, &xu) in x.iter().enumerate() {
                    if xu == 0 {
                        continue;
                    }
                    for (v, &yv) in y.iter().enumerate() {
                        acc[u + v] = acc[u + v].checked_add(xu as i128 * yv as i128)?;
                    }
                }
            }
            // Reduce modulo the monic minimal polynomial.
            for top in (d..width).rev() {
                let c = std::mem::take(&mut acc[top]);
                if c != 0 {
                    for (j, &m) in modulus[..d].iter().enumerate() {
                        if m != 0 {
                            acc[top - d + j] = acc[top - d + j].checked_sub(c.checked_mul(m as i128)?)?;
                        }
                    }
                }
            }
            coeffs.push(self.field.from_raw(acc[..d].iter().map(|&x| C::from_i128(x)).collect()));
        }
        Some(Poly::from_coeffs(&self.field, coeffs))
    }
}

/// `acc += x * y` on coefficient vectors in `q`, without reduction.
fn mul_acc<C: PrimeField>(acc: &mut [C], x: &[C], y: &[C]) {
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                let cur = std::mem::replace(&mut acc[i + j], C::zero());
                acc[i + j] = cur + xi.clone() * yj.clone();
            }
        }
    }
}

impl<C: PrimeField> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

forward_owned_binop!(Poly, Add, add);
forward_owned_binop!(Poly, Sub, sub);
forward_owned_binop!(Poly, Mul, mul);

impl<C: PrimeField> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

/// Writes `c*var^i` terms highest degree first, parenthesizing compound
/// coefficients.
pub(crate) fn format_terms<C: PrimeField>(coeffs: &[Scalar<C>], var: &str) -> String {
    let nonzero = coeffs.iter().filter(|c| !c.is_zero()).count();
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative_monomial();
        let abs = if negative { -c } else { c.clone() };
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
        let coeff = if abs.term_count() > 1 && (nonzero > 1 || i > 0) {
            format!("({abs})")
        } else {
            abs.to_string()
        };
        if i == 0 {
            out.push_str(&coeff);
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{coeff}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl<C: PrimeField> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.coeffs, "t"))
    }
}

impl<C: PrimeField> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
