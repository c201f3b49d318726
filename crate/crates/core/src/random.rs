//! Seeded pseudo-random field elements for the verification suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::Poly;
use crate::prime::PrimeField;
use crate::ratfunc::RatFunc;
use crate::scalar::{FieldSpec, Scalar};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Coefficients are drawn from `-COEFF_RANGE..=COEFF_RANGE`.
const COEFF_RANGE: i64 = 3;

pub struct Sampler<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    rng: ChaCha8Rng,
}

impl<C: PrimeField> Sampler<C> {
    pub fn new(field: &Arc<FieldSpec<C>>, seed: u64) -> Self {
        Sampler {
            field: field.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn scalar(&mut self) -> Scalar<C> {
        let coeffs = (0..self.field.degree())
            .map(|_| C::from_i64(self.rng.gen_range(-COEFF_RANGE..=COEFF_RANGE)))
            .collect();
        self.field.from_coeffs(coeffs)
    }

    pub fn nonzero_scalar(&mut self) -> Scalar<C> {
        loop {
            let s = self.scalar();
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// A polynomial of degree at most `max_degree`.
    pub fn poly(&mut self, max_degree: usize) -> Poly<C> {
        let coeffs = (0..=max_degree).map(|_| self.scalar()).collect();
        Poly::from_coeffs(&self.field, coeffs)
    }

    /// A polynomial of exact degree `degree`.
    pub fn poly_of_degree(&mut self, degree: usize) -> Poly<C> {
        let mut coeffs: Vec<_> = (0..degree).map(|_| self.scalar()).collect();
        coeffs.push(self.nonzero_scalar());
        Poly::from_coeffs(&self.field, coeffs)
    }

    /// A rational function with numerator and denominator of degree at most
    /// `max_degree`; the denominator is nonconstant whenever `max_degree > 0`.
    pub fn ratfunc(&mut self, max_degree: usize) -> RatFunc<C> {
        let num_deg = self.rng.gen_range(0..=max_degree);
        let num = self.poly_of_degree(num_deg);
        let den_deg = if max_degree == 0 { 0 } else { self.rng.gen_range(1..=max_degree) };
        let den = self.poly_of_degree(den_deg);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn nonzero_ratfunc(&mut self, max_degree: usize) -> RatFunc<C> {
        loop {
            let f = self.ratfunc(max_degree);
            if !f.is_zero() {
                return f;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn same_seed_same_stream() {
        let f = FieldSpec::<BigRational>::new(4).unwrap();
        let mut a = Sampler::new(&f, 9);
        let mut b = Sampler::new(&f, 9);
        for _ in 0..5 {
            assert_eq!(a.ratfunc(4), b.ratfunc(4));
        }
    }

    #[test]
    fn degree_bounds_hold() {
        let f = FieldSpec::<BigRational>::new(3).unwrap();
        let mut s = Sampler::new(&f, 1);
        for _ in 0..20 {
            let r = s.ratfunc(3);
            assert!(r.numer().degree().unwrap_or(0) <= 3);
            assert!(r.denom().degree().unwrap() <= 3);
        }
    }
}
