//! Prime fields: the coefficient rings underneath the cyclotomic scalars.
//!
//! Everything above this module is generic over [`PrimeField`]. Two
//! implementations ship: [`num_rational::BigRational`] for characteristic zero
//! and [`Fp`] for a prime characteristic fixed at compile time.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A prime field `Q` or `F_p`, usable as the base of a cyclotomic extension.
pub trait PrimeField:
    Num + Neg<Output = Self> + Clone + Eq + Hash + Debug + Display + Send + Sync + 'static
{
    /// `0` for the rationals, `p` for `F_p`.
    const CHARACTERISTIC: u64;

    fn from_bigint(n: &BigInt) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;

    /// All field elements in increasing order of their canonical
    /// representative, or `None` for an infinite field.
    fn elements() -> Option<Vec<Self>>;

    /// Whether the printed form starts with a minus sign.
    fn is_negative(&self) -> bool;

    /// A nonzero multiple clearing every denominator in `values`; one in
    /// positive characteristic.
    fn denominator_lcm<'a>(values: impl Iterator<Item = &'a Self>) -> Self
    where
        Self: 'a,
    {
        let _ = values;
        Self::one()
    }

    /// The value as a machine integer, when it is one (characteristic zero).
    fn small_int(&self) -> Option<i64> {
        None
    }

    fn from_i128(n: i128) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    /// `|self|` for an integer in characteristic zero, `None` otherwise.
    fn integer_abs(&self) -> Option<BigInt> {
        None
    }

    /// Image modulo a large prime `p`, or `None` when `p` divides a
    /// denominator. Only meaningful in characteristic zero, where it backs
    /// modular coprimality certificates.
    fn residue(&self, _p: u64) -> Option<u64> {
        None
    }
}

impl PrimeField for BigRational {
    const CHARACTERISTIC: u64 = 0;

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn elements() -> Option<Vec<Self>> {
        None
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn integer_abs(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().abs())
    }

    fn residue(&self, p: u64) -> Option<u64> {
        let m = BigInt::from(p);
        let n = self.numer().mod_floor(&m).to_u64()?;
        let d = self.denom().mod_floor(&m).to_u64()?;
        Some(crate::modp::mul_mod(n, crate::modp::inv_mod(d, p)?, p))
    }
}

/// An element of `F_P`, stored as its least non-negative residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(value: i64) -> Self {
        Fp(value.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.0, P)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp((self.0 + rhs.0) % P)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero in F_p")
    }
}

/// Fields are Euclidean with zero remainder.
impl<const P: u64> Rem for Fp<P> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "division by zero in F_p");
        Fp(0)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Num for Fp<P> {
    type FromStrRadixErr = std::num::ParseIntError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        i64::from_str_radix(s, radix).map(Fp::new)
    }
}

impl<const P: u64> PrimeField for Fp<P> {
    const CHARACTERISTIC: u64 = P;

    fn from_bigint(n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("residue fits in u64"))
    }

    fn inverse(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    fn elements() -> Option<Vec<Self>> {
        Some((0..P).map(Fp).collect())
    }

    fn is_negative(&self) -> bool {
        false
    }
}

/// Deterministic primality test for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    use crate::modp::{mul_mod, pow_mod};
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for w in WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    // Deterministic Miller-Rabin for 64-bit inputs.
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for w in WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    type F7 = Fp<7>;

    #[test]
    fn primality_matches_trial_division() {
        let slow = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000 {
            assert_eq!(is_prime(n), slow(n), "{n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn fp_inverse_roundtrip() {
        for v in 1..7 {
            let a = F7::new(v);
            assert_eq!(a * a.inverse().unwrap(), F7::one());
        }
        assert!(F7::zero().inverse().is_none());
    }

    #[test]
    fn fp_reduces_negative_input() {
        assert_eq!(F7::new(-1).value(), 6);
        assert_eq!(F7::from_bigint(&BigInt::from(-15)).value(), 6);
    }

    #[test]
    fn rational_has_no_element_list() {
        assert!(BigRational::elements().is_none());
        assert_eq!(F7::elements().unwrap().len(), 7);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
