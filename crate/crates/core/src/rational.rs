//! Exact rationals with an inline fast path.
//!
//! Values whose numerator and denominator fit in `i64` are stored inline and
//! combined in `i128`; anything larger falls back to [`BigRational`]. The
//! representation is canonical (inline whenever it fits), so derived equality
//! and hashing are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::prime::PrimeField;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    /// `num / den` with `den > 0` and `gcd(num, den) = 1`.
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub fn from_integer(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    /// Canonicalizes `num / den`, `den != 0`.
    fn from_i128(num: i128, den: i128) -> Self {
        let (mut num, mut den) = if den < 0 {
            match (num.checked_neg(), den.checked_neg()) {
                (Some(n), Some(d)) => (n, d),
                _ => return Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den))),
            }
        } else {
            (num, den)
        };
        if num == 0 {
            return Rational::Small(0, 1);
        }
        if den != 1 {
            let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
            if g > 1 {
                num /= g;
                den /= g;
            }
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => Rational::Small(n, d),
            _ => Rational::Big(BigRational::new_raw(BigInt::from(num), BigInt::from(den))),
        }
    }

    /// Demotes to the inline form when the (reduced) value fits.
    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational::Small(n, d),
            _ => Rational::Big(r),
        }
    }

    /// Integer values skip the gcd normalization of `BigRational`.
    fn as_int(&self) -> Option<BigInt> {
        match self {
            Rational::Small(n, 1) => Some(BigInt::from(*n)),
            Rational::Big(r) if r.is_integer() => Some(r.numer().clone()),
            _ => None,
        }
    }

    fn from_int(n: BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Rational::Small(v, 1),
            None => Rational::Big(BigRational::from_integer(n)),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small(_, d) => *d == 1,
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(n, _) => n.signum() as i32,
            Rational::Big(r) => {
                if r.is_zero() {
                    0
                } else if Signed::is_negative(r) {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn recip(&self) -> Option<Self> {
        match self {
            Rational::Small(0, _) => None,
            Rational::Small(n, d) => Some(Self::from_i128(*d as i128, *n as i128)),
            Rational::Big(r) => Some(Self::from_big(r.recip())),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::Small(n, 1)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self::from_big(r)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Add for Rational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (&self, &rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if b == d {
                    Self::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    Self::from_i128(a * d + c * b, b * d)
                }
            }
            _ => match (self.as_int(), rhs.as_int()) {
                (Some(a), Some(b)) => Self::from_int(a + b),
                _ => Self::from_big(self.to_big() + rhs.to_big()),
            },
        }
    }
}

impl Sub for Rational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for Rational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match (&self, &rhs) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    Self::from_i128(*a as i128 * *c as i128, 1)
                } else {
                    Self::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
                }
            }
            _ => match (self.as_int(), rhs.as_int()) {
                (Some(a), Some(b)) => Self::from_int(a * b),
                _ => Self::from_big(self.to_big() * rhs.to_big()),
            },
        }
    }
}

impl Div for Rational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip().expect("division by zero")
    }
}

/// Fields are Euclidean with zero remainder.
impl Rem for Rational {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        Rational::zero()
    }
}

impl Neg for Rational {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            Rational::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational::Small(m, d),
                None => Self::from_big(-BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
            },
            Rational::Big(r) => Self::from_big(-r),
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::Small(0, 1)
    }
    fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::Small(1, 1)
    }
}

impl Num for Rational {
    type FromStrRadixErr = num_rational::ParseRatioError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(Self::from_big)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PrimeField for Rational {
    const CHARACTERISTIC: u64 = 0;

    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => Rational::Small(v, 1),
            None => Rational::Big(BigRational::from_integer(n.clone())),
        }
    }

    fn from_i64(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    fn inverse(&self) -> Option<Self> {
        self.recip()
    }

    fn elements() -> Option<Vec<Self>> {
        None
    }

    fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    fn denominator_lcm<'a>(values: impl Iterator<Item = &'a Self>) -> Self {
        let mut small: u128 = 1;
        let mut big: Option<BigInt> = None;
        for v in values {
            match v {
                Rational::Small(_, 1) => {}
                Rational::Small(_, d) => {
                    let d = *d as u128;
                    let l = small / gcd_u128(small, d);
                    match l.checked_mul(d) {
                        Some(x) => small = x,
                        None => {
                            let b = big.take().unwrap_or_else(BigInt::one);
                            big = Some(num_integer::Integer::lcm(&b, &BigInt::from(small)));
                            small = d;
                        }
                    }
                }
                Rational::Big(r) => {
                    let b = big.take().unwrap_or_else(BigInt::one);
                    big = Some(num_integer::Integer::lcm(&b, r.denom()));
                }
            }
        }
        match big {
            None => Self::from_int(BigInt::from(small)),
            Some(b) => Self::from_int(num_integer::Integer::lcm(&b, &BigInt::from(small))),
        }
    }

    fn small_int(&self) -> Option<i64> {
        match self {
            Rational::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    fn from_i128(n: i128) -> Self {
        match i64::try_from(n) {
            Ok(v) => Rational::Small(v, 1),
            Err(_) => Rational::Big(BigRational::from_integer(BigInt::from(n))),
        }
    }

    fn integer_abs(&self) -> Option<BigInt> {
        match self {
            Rational::Small(n, 1) => Some(BigInt::from(n.unsigned_abs())),
            Rational::Small(..) => None,
            Rational::Big(r) => r.is_integer().then(|| r.numer().abs()),
        }
    }

    fn residue(&self, p: u64) -> Option<u64> {
        match self {
            Rational::Small(n, 1) => Some(n.rem_euclid(p as i64) as u64),
            Rational::Small(n, d) => {
                let n = n.rem_euclid(p as i64) as u64;
                let d = d.rem_euclid(p as i64) as u64;
                Some(crate::modp::mul_mod(n, crate::modp::inv_mod(d, p)?, p))
            }
            Rational::Big(r) => r.residue(p),
        }
    }
}
