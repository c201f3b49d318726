//! Word-sized arithmetic modulo a prime, used to certify that two
//! characteristic-zero polynomials are coprime without running Euclid over
//! `Q(q)`.
//!
//! `Z[q]/(Phi_N)` maps onto `F_p` by `q -> w` for any root `w` of `Phi_N`
//! mod `p`. If the images of `a` and `b` keep their degrees and are coprime,
//! then so are `a` and `b`; any other outcome is inconclusive.

use crate::prime::{is_prime, PrimeField};

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    (!a.is_multiple_of(p)).then(|| pow_mod(a, p - 2, p))
}

/// A prime `p = 1 mod N` and the image `w` of `q`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reduction {
    pub p: u64,
    pub omega: u64,
}

impl Reduction {
    pub(crate) fn find<C: PrimeField>(order: u32, modulus: &[C]) -> Option<Self> {
        if C::CHARACTERISTIC != 0 {
            return None;
        }
        let n = order as u64;
        let mut p = (1u64 << 31) / n * n + 1;
        loop {
            if is_prime(p) {
                if let Some(m) = modulus.iter().map(|c| c.residue(p)).collect::<Option<Vec<_>>>() {
                    for a in 2..p {
                        let w = pow_mod(a, (p - 1) / n, p);
                        if eval(&m, w, p) == 0 {
                            return Some(Reduction { p, omega: w });
                        }
                    }
                }
            }
            p += n;
        }
    }

    /// Image of an element of `k` given by its coefficients in `q`.
    pub(crate) fn scalar<C: PrimeField>(&self, coeffs: &[C]) -> Option<u64> {
        let mut acc = 0;
        for c in coeffs.iter().rev() {
            acc = (mul_mod(acc, self.omega, self.p) + c.residue(self.p)?) % self.p;
        }
        Some(acc)
    }
}

fn eval(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of `gcd(a, b)` over `F_p`; both inputs must be nonzero.
pub(crate) fn gcd_degree(a: &[u64], b: &[u64], p: u64) -> usize {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap(), p).expect("nonzero leading coefficient");
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for (j, &c) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + p - mul_mod(f, c, p)) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}
