//! Multi-modular gcd over `Q(q)`.
//!
//! For a prime `p = 1 mod N`, `Z[q]/(Phi_N, p)` splits as a product of copies
//! of `F_p`, one per root of `Phi_N` mod `p`. The monic gcd is computed in each
//! copy, the coordinates in the basis `1, q, ..., q^(d-1)` are recovered by
//! inverting the Vandermonde matrix of the roots, and the rational coordinates
//! are lifted by Chinese remaindering and rational reconstruction. A lifted
//! candidate is accepted only once `g * (a / g) = a` and `g * (b / g) = b`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::modp::{inv_mod, mul_mod, pow_mod};
use crate::poly::Poly;
use crate::prime::{is_prime, PrimeField};
use crate::scalar::FieldSpec;

/// A prime with all roots of the minimal polynomial and the inverse
/// Vandermonde matrix mapping root values back to coordinates.
#[derive(Debug)]
pub(crate) struct PrimeImage {
    pub p: u64,
    roots: Vec<u64>,
    vinv: Vec<Vec<u64>>,
}

impl PrimeImage {
    /// The next usable prime below `below` (exclusive), stepping by `N`.
    pub(crate) fn search<C: PrimeField>(order: u32, modulus: &[C], below: u64) -> Option<Self> {
        if C::CHARACTERISTIC != 0 {
            return None;
        }
        let n = order as u64;
        let d = modulus.len() - 1;
        let mut p = (below - 1) / n * n + 1;
        if p >= below {
            p -= n;
        }
        while p > n {
            if is_prime(p) {
                if let Some(img) = Self::at(p, n, d, modulus) {
                    return Some(img);
                }
            }
            p -= n;
        }
        None
    }

    fn at<C: PrimeField>(p: u64, n: u64, d: usize, modulus: &[C]) -> Option<Self> {
        let m: Vec<u64> = modulus.iter().map(|c| c.residue(p)).collect::<Option<_>>()?;
        let eval = |x: u64| m.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p);
        let omega = (2..p).map(|a| pow_mod(a, (p - 1) / n, p)).find(|&w| eval(w) == 0)?;
        let roots: Vec<u64> = (0..n).map(|j| pow_mod(omega, j, p)).filter(|&r| eval(r) == 0).collect();
        if roots.len() != d {
            return None;
        }
        let vander: Vec<Vec<u64>> = roots.iter().map(|&r| (0..d).map(|i| pow_mod(r, i as u64, p)).collect()).collect();
        let vinv = invert_mod(vander, p)?;
        Some(PrimeImage { p, roots, vinv })
    }

    /// Values of an element of `k` at every root, `None` if a denominator
    /// vanishes mod `p`.
    fn scalar_images<C: PrimeField>(&self, coeffs: &[C]) -> Option<Vec<u64>> {
        let res: Vec<u64> = coeffs.iter().map(|c| c.residue(self.p)).collect::<Option<_>>()?;
        Some(
            self.roots
                .iter()
                .map(|&r| res.iter().rev().fold(0, |acc, &c| (mul_mod(acc, r, self.p) + c) % self.p))
                .collect(),
        )
    }
}

fn invert_mod(mut a: Vec<Vec<u64>>, p: u64) -> Option<Vec<Vec<u64>>> {
    let d = a.len();
    let mut inv: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let f = inv_mod(a[col][col], p)?;
        for j in 0..d {
            a[col][j] = mul_mod(a[col][j], f, p);
            inv[col][j] = mul_mod(inv[col][j], f, p);
        }
        for r in 0..d {
            if r != col && a[r][col] != 0 {
                let g = a[r][col];
                for j in 0..d {
                    a[r][j] = (a[r][j] + p - mul_mod(g, a[col][j], p)) % p;
                    inv[r][j] = (inv[r][j] + p - mul_mod(g, inv[col][j], p)) % p;
                }
            }
        }
    }
    Some(inv)
}

/// Monic gcd over `F_p`; inputs are nonzero and trimmed.
fn gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap(), p).expect("trimmed");
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for (j, &c) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + p - mul_mod(f, c, p)) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    let inv = inv_mod(*a.last().unwrap(), p).expect("nonzero");
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

/// `n/d` with `|n|, d <= sqrt(m/2)` and `n = d u mod m`.
fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound || !r1.gcd(&s1).is_one() || !s1.gcd(m).is_one() {
        return None;
    }
    if s1.is_negative() {
        Some((-r1, -s1))
    } else {
        Some((r1, s1))
    }
}

/// Reconstructs every residue, reusing the running common denominator: most
/// coordinates then lift with one multiplication instead of a Euclid run.
/// Returned fractions need not be in lowest terms.
fn reconstruct_all(residues: &[BigInt], m: &BigInt) -> Option<Vec<(BigInt, BigInt)>> {
    let bound = (m >> 1u32).sqrt();
    let half = m >> 1u32;
    let mut den = BigInt::one();
    let mut out = Vec::with_capacity(residues.len());
    for x in residues {
        if den <= bound {
            let mut y = (x * &den).mod_floor(m);
            if y > half {
                y -= m;
            }
            if y.abs() <= bound {
                out.push((y, den.clone()));
                continue;
            }
        }
        let (n, d) = rational_reconstruct(x, m)?;
        den = den.lcm(&d);
        out.push((n, d));
    }
    Some(out)
}

/// Outcome of the modular attempt.
pub(crate) enum ModGcd<C: PrimeField> {
    /// Certified monic gcd with both cofactors.
    Found(Poly<C>, Poly<C>, Poly<C>),
    /// No modular image is available (positive characteristic).
    Unavailable,
}

/// Monic gcd of two nonzero polynomials over a characteristic-zero `k`,
/// together with `a / g` and `b / g`.
///
/// All three are lifted from modular images. At every prime used,
/// `g * (a / g) = a` holds by construction, so once the product of those
/// primes exceeds twice a height bound for the cleared identity it holds
/// over `Z[q]`, which certifies the result without a multiplication.
pub(crate) fn modular_gcd<C: PrimeField>(a: &Poly<C>, b: &Poly<C>) -> ModGcd<C> {
    let field = a.field().clone();
    if field.characteristic() != 0 || a.is_zero() || b.is_zero() {
        return ModGcd::Unavailable;
    }
    // Integral multiples keep residues cheap and lifted values small.
    let la = a.denominator_lcm();
    let lb = b.denominator_lcm();
    let sa = (!la.is_one()).then(|| a.scale_prime(&la));
    let sb = (!lb.is_one()).then(|| b.scale_prime(&lb));
    let (a, b) = (sa.as_ref().unwrap_or(a), sb.as_ref().unwrap_or(b));
    let unscale = |q: Poly<C>, l: &C| if l.is_one() { q } else { q.scale_prime(&l.inverse().expect("nonzero")) };
    let (Some(ha), Some(hb)) = (poly_height(a), poly_height(b)) else {
        return ModGcd::Unavailable;
    };
    let Some(spread) = power_spread(&field) else {
        return ModGcd::Unavailable;
    };
    let d = field.degree();
    let (da, db) = (a.degree().unwrap_or(0), b.degree().unwrap_or(0));
    let mut primes_used = 0usize;
    let mut next_attempt = 1usize;
    // A lifted candidate, the product of primes it is consistent with, and
    // the modulus that certifies it.
    let mut candidate: Option<(Vec<(BigInt, BigInt)>, BigInt, BigInt)> = None;
    let mut degree: Option<usize> = None;
    let mut residues: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    for idx in 0.. {
        let Some(img) = field.prime_image(idx) else {
            return ModGcd::Unavailable;
        };
        let p = img.p;
        let Some(ia) = images(a, &img) else { continue };
        let Some(ib) = images(b, &img) else { continue };
        // Leading coefficients must survive at every root.
        if ia.iter().chain(&ib).any(|v| v.last().is_none_or(|&c| c == 0)) {
            continue;
        }
        let gs: Vec<Vec<u64>> = ia.iter().zip(&ib).map(|(x, y)| gcd_mod(x, y, p)).collect();
        let deg = gs[0].len() - 1;
        if gs.iter().any(|g| g.len() - 1 != deg) {
            continue;
        }
        if deg == 0 {
            return ModGcd::Found(Poly::one(&field), unscale(a.clone(), &la), unscale(b.clone(), &lb));
        }
        match degree {
            Some(prev) if deg > prev => continue,
            Some(prev) if deg == prev => {}
            _ => {
                degree = Some(deg);
                residues = vec![BigInt::zero(); (deg + 1 + da - deg + 1 + db - deg + 1) * d];
                modulus = BigInt::one();
                primes_used = 0;
                next_attempt = 1;
                candidate = None;
            }
        }
        // Values at each root of g, a/g, b/g, concatenated.
        let parts: Vec<Vec<u64>> = (0..d)
            .map(|r| {
                let mut v = gs[r].clone();
                v.extend(div_mod(&ia[r], &gs[r], p));
                v.extend(div_mod(&ib[r], &gs[r], p));
                v
            })
            .collect();
        let len = parts[0].len();
        debug_assert_eq!(len * d, residues.len());
        let mut coords = Vec::with_capacity(len * d);
        for j in 0..len {
            for row in &img.vinv {
                coords.push(row.iter().zip(&parts).fold(0, |acc, (&w, g)| (acc + mul_mod(w, g[j], p)) % p));
            }
        }
        let pb = BigInt::from(p);
        if let Some((cand, consistent, needed)) = &mut candidate {
            let agrees = cand.iter().zip(&coords).all(|((n, den), &v)| {
                let n = n.mod_floor(&pb).to_u64().expect("reduced mod p");
                let den = den.mod_floor(&pb).to_u64().expect("reduced mod p");
                inv_mod(den, p).is_some_and(|di| mul_mod(n, di, p) == v)
            });
            if agrees {
                *consistent *= &pb;
                if *consistent > *needed {
                    let (cand, _, _) = candidate.take().expect("present");
                    let (g, qa, qb) = split(&field, &cand, deg, da, d);
                    return ModGcd::Found(g, unscale(qa, &la), unscale(qb, &lb));
                }
            } else {
                candidate = None;
            }
        }
        let m_mod: u64 = (&modulus % &pb).try_into().expect("reduced mod p");
        let m_inv = inv_mod(m_mod, p).expect("coprime");
        for (x, &v) in residues.iter_mut().zip(&coords) {
            let x_mod: u64 = (&*x % &pb).try_into().expect("reduced mod p");
            let diff = (v + p - x_mod) % p;
            *x += &modulus * mul_mod(diff, m_inv, p);
        }
        modulus *= &pb;
        primes_used += 1;
        // Reconstruction is attempted on a geometric schedule.
        if candidate.is_none() && primes_used >= next_attempt {
            next_attempt = primes_used + primes_used.div_ceil(2);
            if let Some(lifted) = reconstruct_all(&residues, &modulus) {
                let (lg, rest) = lifted.split_at((deg + 1) * d);
                let (lqa, lqb) = rest.split_at((da - deg + 1) * d);
                let (dg, hg) = cleared_height(lg);
                let bound_for = |lq: &[(BigInt, BigInt)], h: &BigInt| {
                    let (dq, hq) = cleared_height(lq);
                    let terms = BigInt::from((deg + 1).min(lq.len() / d) * d * (2 * d - 1));
                    terms * &spread * &hg * hq + &dg * dq * h
                };
                let bound = bound_for(lqa, &ha).max(bound_for(lqb, &hb));
                let needed: BigInt = bound << 1u32;
                if modulus > needed {
                    let (g, qa, qb) = split(&field, &lifted, deg, da, d);
                    return ModGcd::Found(g, unscale(qa, &la), unscale(qb, &lb));
                }
                candidate = Some((lifted, modulus.clone(), needed));
            }
        }
    }
    unreachable!("prime search is unbounded")
}

/// Common denominator of lifted coordinates and the largest cleared numerator.
fn cleared_height(lifted: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
    let den = lifted.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
    let h = lifted.iter().map(|(n, d)| n.abs() * (&den / d)).max().unwrap_or_default();
    (den, h)
}

/// Largest coordinate of an integral polynomial, `None` if not integral.
fn poly_height<C: PrimeField>(f: &Poly<C>) -> Option<BigInt> {
    f.coeffs()
        .iter()
        .flat_map(|c| c.coeffs())
        .map(|c| c.integer_abs())
        .try_fold(BigInt::zero(), |acc, h| h.map(|h| acc.max(h)))
}

/// Largest coordinate of any power of `q`.
fn power_spread<C: PrimeField>(field: &Arc<FieldSpec<C>>) -> Option<BigInt> {
    let mut acc = BigInt::one();
    for e in 0..field.order() {
        for c in field.q_pow(e as i64).coeffs() {
            acc = acc.max(c.integer_abs()?);
        }
    }
    Some(acc)
}

fn split<C: PrimeField>(
    field: &Arc<FieldSpec<C>>,
    lifted: &[(BigInt, BigInt)],
    deg: usize,
    da: usize,
    d: usize,
) -> (Poly<C>, Poly<C>, Poly<C>) {
    let (lg, rest) = lifted.split_at((deg + 1) * d);
    let (la, lb) = rest.split_at((da - deg + 1) * d);
    (assemble(field, lg, d), assemble(field, la, d), assemble(field, lb, d))
}

/// Exact quotient over `F_p` by a monic divisor.
fn div_mod(a: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut rem = a.to_vec();
    let n = a.len() - g.len() + 1;
    let mut quot = vec![0; n];
    for shift in (0..n).rev() {
        let f = rem[shift + g.len() - 1];
        quot[shift] = f;
        if f != 0 {
            for (j, &c) in g.iter().enumerate() {
                rem[shift + j] = (rem[shift + j] + p - mul_mod(f, c, p)) % p;
            }
        }
    }
    quot
}

fn images<C: PrimeField>(f: &Poly<C>, img: &PrimeImage) -> Option<Vec<Vec<u64>>> {
    let d = img.roots.len();
    let mut out = vec![Vec::with_capacity(f.coeffs().len()); d];
    for c in f.coeffs() {
        for (o, v) in out.iter_mut().zip(img.scalar_images(c.coeffs())?) {
            o.push(v);
        }
    }
    for o in &mut out {
        while o.last() == Some(&0) {
            o.pop();
        }
    }
    Some(out)
}

fn assemble<C: PrimeField>(field: &Arc<FieldSpec<C>>, lifted: &[(BigInt, BigInt)], d: usize) -> Poly<C> {
    let coeffs = lifted
        .chunks(d)
        .map(|chunk| {
            let v = chunk
                .iter()
                .map(|(n, den)| C::from_bigint(n) * C::from_bigint(den).inverse().expect("nonzero"))
                .collect();
            field.from_coeffs(v)
        })
        .collect();
    Poly::from_coeffs(field, coeffs)
}
