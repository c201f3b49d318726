//! q-integers, q-factorials and Gaussian binomials evaluated at `q`.
//!
//! At a primitive `N`-th root of unity `[N]_q = 0`, so q-factorials vanish from
//! `N` on and binomials are evaluated by the q-Pascal recurrence only.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::prime::PrimeField;
use crate::report::Report;
use crate::scalar::{FieldSpec, Scalar};

/// `[k]_q = 1 + q + ... + q^(k-1)`; `[0]_q = 0`.
pub fn q_int<C: PrimeField>(field: &Arc<FieldSpec<C>>, k: u64) -> Scalar<C> {
    let n = field.order() as u64;
    // The geometric sum over a full period vanishes.
    let mut acc = field.zero();
    for j in 0..k % n {
        acc = &acc + &field.q_pow(j as i64);
    }
    acc
}

/// `[k]_q! = [1]_q [2]_q ... [k]_q`, with `[0]_q! = 1`.
pub fn q_factorial<C: PrimeField>(field: &Arc<FieldSpec<C>>, k: u64) -> Scalar<C> {
    (1..=k).fold(field.one(), |acc, j| &acc * &q_int(field, j))
}

/// Gaussian binomial `binom(r, s)_q`, memoized per field.
pub fn q_binom<C: PrimeField>(field: &Arc<FieldSpec<C>>, r: i64, s: i64) -> Result<Scalar<C>> {
    if r < 0 || s < 0 || s > r {
        return Err(Error::OutOfRange { r, s });
    }
    let (r, s) = (r as usize, s as usize);
    let mut table = field.binomials.lock().expect("binomial table poisoned");
    while table.len() <= r {
        let row = table.len();
        let next: Vec<Vec<C>> = if row == 0 {
            vec![field.one().coeffs().to_vec()]
        } else {
            let prev = &table[row - 1];
            (0..=row)
                .map(|j| {
                    let left = if j == 0 {
                        field.zero()
                    } else {
                        field.from_coeffs(prev[j - 1].clone())
                    };
                    let right = match prev.get(j) {
                        Some(c) => &field.q_pow(j as i64) * &field.from_coeffs(c.clone()),
                        None => field.zero(),
                    };
                    (&left + &right).coeffs().to_vec()
                })
                .collect()
        };
        table.push(next);
    }
    Ok(field.from_coeffs(table[r][s].clone()))
}

/// Ordinary binomial coefficient mapped into `k`.
pub fn binomial<C: PrimeField>(field: &Arc<FieldSpec<C>>, r: u64, s: u64) -> Scalar<C> {
    if s > r {
        return field.zero();
    }
    let mut acc = BigInt::one();
    for j in 0..s {
        acc = acc * BigInt::from(r - j) / BigInt::from(j + 1);
    }
    field.from_prime(C::from_bigint(&acc))
}

/// Checks the root-of-unity identities the kernel relies on:
/// `binom(rN, sN)_q = binom(r, s)`, the q-Lucas factorization, and symmetry.
pub fn verify_qcomb<C: PrimeField>(field: &Arc<FieldSpec<C>>, rs_bound: u64, lucas_bound: u64) -> Report {
    let mut report = Report::new("qcomb", field.to_string(), None);
    let n = field.order() as u64;
    report.check("[N]_q = 0", q_int(field, n).is_zero(), || format!("[{n}]_q = {}", q_int(field, n)));
    for r in 0..=rs_bound {
        for s in 0..=r {
            let lhs = q_binom(field, (r * n) as i64, (s * n) as i64).expect("in range");
            let rhs = binomial(field, r, s);
            report.check("binom(rN,sN)_q = binom(r,s)", lhs == rhs, || {
                format!("r={r} s={s}: {lhs} != {rhs}")
            });
        }
    }
    for a in 0..=lucas_bound {
        for c in 0..=a {
            for b in 0..n {
                for d in 0..n {
                    if c * n + d > a * n + b {
                        continue;
                    }
                    let lhs = q_binom(field, (a * n + b) as i64, (c * n + d) as i64).expect("in range");
                    let rhs = if d <= b {
                        &binomial(field, a, c) * &q_binom(field, b as i64, d as i64).expect("in range")
                    } else {
                        field.zero()
                    };
                    report.check("q-Lucas", lhs == rhs, || format!("a={a} b={b} c={c} d={d}: {lhs} != {rhs}"));
                }
            }
        }
    }
    for r in 0..=(rs_bound * n) {
        for s in 0..=r {
            let x = q_binom(field, r as i64, s as i64).expect("in range");
            let y = q_binom(field, r as i64, (r - s) as i64).expect("in range");
            report.check("binom symmetry", x == y, || format!("r={r} s={s}"));
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
    fn q_int_values() {
        let f = field(5);
        assert!(q_int(&f, 1).is_one());
        assert_eq!(q_int(&f, 2), &f.one() + &f.q());
        assert!(q_int(&f, 5).is_zero());
        assert!(q_int(&f, 0).is_zero());
    }

    #[test]
    fn factorial_vanishes_from_n() {
        let f = field(3);
        assert!(q_factorial(&f, 0).is_one());
        assert!(!q_factorial(&f, 2).is_zero());
        assert!(q_factorial(&f, 3).is_zero());
    }

    #[test]
    fn small_binomials() {
        let f = field(4);
        assert!(q_binom(&f, 7, 0).unwrap().is_one());
        assert_eq!(q_binom(&f, 2, 1).unwrap(), &f.one() + &f.q());
        assert_eq!(q_binom(&f, 3, 4).unwrap_err(), Error::OutOfRange { r: 3, s: 4 });
        assert_eq!(q_binom(&f, 2, -1).unwrap_err(), Error::OutOfRange { r: 2, s: -1 });
    }

    #[test]
    fn binom_at_minus_one() {
        let f = field(2);
        assert_eq!(q_binom(&f, 4, 2).unwrap(), f.from_i64(2));
    }

    /// Product formula away from the vanishing range, as an independent oracle.
    #[test]
    fn agrees_with_factorial_quotient_below_n() {
        let f = field(7);
        for r in 0..7 {
            for s in 0..=r {
                let quot = q_factorial(&f, r)
                    .div(&(&q_factorial(&f, s) * &q_factorial(&f, r - s)))
                    .unwrap();
                assert_eq!(q_binom(&f, r as i64, s as i64).unwrap(), quot);
            }
        }
    }

    #[test]
    fn identity_suite_passes() {
        for n in [2, 3, 4, 6] {
            let report = verify_qcomb(&field(n), 6, 5);
            assert!(report.passed(), "{}", report.to_text());
        }
        let report = verify_qcomb(&FieldSpec::<Fp<5>>::new(3).unwrap(), 6, 5);
        assert!(report.passed(), "{}", report.to_text());
    }
}
