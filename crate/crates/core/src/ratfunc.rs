//! Rational functions `K = k(t)` in canonical form, with the q-shift automorphism.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::prime::PrimeField;
use crate::scalar::{forward_owned_binop, FieldSpec, Scalar};

/// `numerator / denominator` with a monic denominator coprime to the numerator.
#[derive(Clone)]
pub struct RatFunc<C: PrimeField> {
    num: Poly<C>,
    den: Poly<C>,
}

impl<C: PrimeField> RatFunc<C> {
    pub fn new(num: Poly<C>, den: Poly<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.field()));
        }
        let (_, num, den) = num.gcd_cofactors(&den);
        let lead = den.leading();
        if lead.is_one() {
            return Ok(RatFunc { num, den });
        }
        let inv = lead.inv()?;
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    /// Assembles a fraction already known to be canonical.
    pub(crate) fn from_parts(num: Poly<C>, den: Poly<C>) -> Self {
        debug_assert!(den.leading().is_one());
        RatFunc { num, den }
    }

    pub fn zero(field: &Arc<FieldSpec<C>>) -> Self {
        Self::from_parts(Poly::zero(field), Poly::one(field))
    }

    pub fn one(field: &Arc<FieldSpec<C>>) -> Self {
        Self::from_poly(Poly::one(field))
    }

    pub fn from_poly(p: Poly<C>) -> Self {
        let one = Poly::one(p.field());
        Self::from_parts(p, one)
    }

    pub fn constant(c: Scalar<C>) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn t(field: &Arc<FieldSpec<C>>) -> Self {
        Self::from_poly(Poly::t(field))
    }

    /// `u = 1 / ((q - 1) t)`, the coefficient tying `delta` to `sigma - 1`.
    pub fn u(field: &Arc<FieldSpec<C>>) -> Self {
        let c = (&field.q() - &field.one()).inv().expect("q != 1");
        Self::from_parts(Poly::constant(c), Poly::t(field))
    }

    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        self.num.field()
    }

    pub fn numer(&self) -> &Poly<C> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Scalar<C>> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Scalar<C>) -> Self {
        if c.is_zero() {
            return Self::zero(self.field());
        }
        Self::from_parts(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &Poly<C>) -> Self {
        self * &Self::from_poly(p.clone())
    }

    /// `f(t) -> f(q^e t)`; `e` is taken modulo `N`.
    pub fn sigma_shift(&self, e: i64) -> Self {
        let n = self.field().order() as i64;
        if e.rem_euclid(n) == 0 || (self.num.degree() <= Some(0) && self.den.is_one()) {
            return self.clone();
        }
        let num = self.num.sigma_shift(e);
        let den = self.den.sigma_shift(e);
        let lead = den.leading();
        if lead.is_one() {
            return Self::from_parts(num, den);
        }
        let inv = lead.inv().expect("unit");
        Self::from_parts(num.scale(&inv), den.scale(&inv))
    }
}

impl<C: PrimeField> PartialEq for RatFunc<C> {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl<C: PrimeField> Eq for RatFunc<C> {}

impl<C: PrimeField> Hash for RatFunc<C> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl<C: PrimeField> Add for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn add(self, rhs: Self) -> RatFunc<C> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero denominator");
        }
        if self.den.is_one() || rhs.den.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc::from_parts(num, &self.den * &rhs.den);
        }
        let (g, b, d) = self.den.gcd_cofactors(&rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RatFunc::from_parts(num, &self.den * &rhs.den);
        }
        let num = &(&self.num * &d) + &(&rhs.num * &b);
        if num.is_zero() {
            return RatFunc::zero(self.field());
        }
        let (_, num, g) = num.gcd_cofactors(&g);
        RatFunc::from_parts(num, &(&b * &d) * &g)
    }
}

impl<C: PrimeField> Sub for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn sub(self, rhs: Self) -> RatFunc<C> {
        self + &(-rhs)
    }
}

impl<C: PrimeField> Mul for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn mul(self, rhs: Self) -> RatFunc<C> {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.field());
        }
        let reduce = |n: &Poly<C>, d: &Poly<C>| -> (Poly<C>, Poly<C>) {
            if d.is_one() || n.degree() == Some(0) {
                return (n.clone(), d.clone());
            }
            let (_, n, d) = n.gcd_cofactors(d);
            (n, d)
        };
        let (a, d) = reduce(&self.num, &rhs.den);
        let (c, b) = reduce(&rhs.num, &self.den);
        RatFunc::from_parts(&a * &c, &b * &d)
    }
}

impl<C: PrimeField> Neg for &RatFunc<C> {
    type Output = RatFunc<C>;
    fn neg(self) -> RatFunc<C> {
        RatFunc::from_parts(-&self.num, self.den.clone())
    }
}

forward_owned_binop!(RatFunc, Add, add);
forward_owned_binop!(RatFunc, Sub, sub);
forward_owned_binop!(RatFunc, Mul, mul);

impl<C: PrimeField> Neg for RatFunc<C> {
    type Output = RatFunc<C>;
    fn neg(self) -> RatFunc<C> {
        -&self
    }
}

fn is_atomic(s: &str) -> bool {
    !s.starts_with('-') && !s.contains([' ', '*', '/'])
}

impl<C: PrimeField> fmt::Display for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.to_string();
        if self.den.is_one() {
            return f.write_str(&num);
        }
        let den = self.den.to_string();
        let wrap = |s: String| if is_atomic(&s) { s } else { format!("({s})") };
        write!(f, "{}/{}", wrap(num), wrap(den))
    }
}

impl<C: PrimeField> fmt::Debug for RatFunc<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn field(n: u32) -> Arc<FieldSpec<BigRational>> {
        FieldSpec::new(n).unwrap()
    }

    #[test]
    fn t_over_t_is_one() {
        let f = field(3);
        let t = RatFunc::t(&f);
        assert!(t.div(&t).unwrap().is_one());
    }

    #[test]
    fn u_has_monic_denominator() {
        let f = field(3);
        let u = RatFunc::u(&f);
        assert_eq!(u.denom(), &Poly::t(&f));
        assert_eq!(u.numer().as_constant().unwrap(), (&f.q() - &f.one()).inv().unwrap());
    }

    #[test]
    fn gcd_reduction() {
        let f = field(4);
        let t = Poly::t(&f);
        let one = Poly::one(&f);
        let r = RatFunc::new(&(&t * &t) - &one, &t - &one).unwrap();
        assert_eq!(r, RatFunc::from_poly(&t + &one));
    }

    #[test]
    fn zero_denominator_rejected() {
        let f = field(3);
        assert_eq!(RatFunc::new(Poly::one(&f), Poly::zero(&f)).unwrap_err(), Error::DivisionByZero);
        assert_eq!(RatFunc::zero(&f).inv().unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn sigma_shift_examples() {
        let f = field(5);
        let t = RatFunc::t(&f);
        assert_eq!(t.sigma_shift(1), RatFunc::from_poly(Poly::monomial(f.q(), 1)));
        let u = RatFunc::u(&f);
        assert_eq!(u.sigma_shift(1), u.scale(&f.q_pow(-1)));
        let g = RatFunc::new(&Poly::t(&f) + &Poly::one(&f), Poly::monomial(f.one(), 2)).unwrap();
        assert_eq!(g.sigma_shift(5), g);
        assert_eq!(g.sigma_shift(2).sigma_shift(4), g.sigma_shift(1));
    }

    #[test]
    fn display() {
        let f = field(3);
        let t = Poly::t(&f);
        let r = RatFunc::new(&(&t * &t) + &Poly::constant(f.q()), &t - &Poly::one(&f)).unwrap();
        assert_eq!(r.to_string(), "(t^2 + q)/(t - 1)");
        assert_eq!(RatFunc::from_poly(t.clone()).inv().unwrap().to_string(), "1/t");
    }
}
