//! Dense exact linear algebra: fraction-free (Bareiss) elimination over an
//! integral domain, and kernels, solves and inverses over a field.
//!
//! Pivoting is deterministic: the pivot of each column is the first nonzero
//! entry at or below the current row.

use std::fmt::Display;

use crate::poly::Poly;
use crate::prime::PrimeField;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

pub type Matrix<T> = Vec<Vec<T>>;

/// An integral domain whose elements know their own zero and one.
pub trait Domain: Clone + PartialEq + Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, other: &Self) -> Self;
    fn sub_elem(&self, other: &Self) -> Self;
    fn mul_elem(&self, other: &Self) -> Self;
    fn neg_elem(&self) -> Self;
    /// Division that is known to be exact.
    fn div_exact(&self, other: &Self) -> Self;
}

pub trait Field: Domain {
    fn inv_elem(&self) -> Self;
}

macro_rules! impl_domain {
    ($ty:ident, $div:expr) => {
        impl<C: PrimeField> Domain for $ty<C> {
            fn zero_like(&self) -> Self {
                $ty::zero(self.field())
            }
            fn one_like(&self) -> Self {
                $ty::one(self.field())
            }
            fn is_zero_elem(&self) -> bool {
                self.is_zero()
            }
            fn add_elem(&self, other: &Self) -> Self {
                self + other
            }
            fn sub_elem(&self, other: &Self) -> Self {
                self - other
            }
            fn mul_elem(&self, other: &Self) -> Self {
                self * other
            }
            fn neg_elem(&self) -> Self {
                -self
            }
            fn div_exact(&self, other: &Self) -> Self {
                let f: fn(&Self, &Self) -> Self = $div;
                f(self, other)
            }
        }
    };
}

impl_domain!(Poly, |a, b| a.exact_div(b).expect("exact polynomial division"));
impl_domain!(RatFunc, |a, b| a.div(b).expect("nonzero divisor"));

impl<C: PrimeField> Domain for Scalar<C> {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_elem(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_elem(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_elem(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Self {
        self.div(other).expect("nonzero divisor")
    }
}

impl<C: PrimeField> Field for Scalar<C> {
    fn inv_elem(&self) -> Self {
        self.inv().expect("nonzero pivot")
    }
}

impl<C: PrimeField> Field for RatFunc<C> {
    fn inv_elem(&self) -> Self {
        self.inv().expect("nonzero pivot")
    }
}

/// Fraction-free row echelon form in place. Returns the pivot columns and
/// the parity of row swaps.
pub fn bareiss_echelon<T: Domain>(m: &mut Matrix<T>) -> (Vec<usize>, bool) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut odd = false;
    let mut prev: Option<T> = None;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero_elem()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            odd = !odd;
        }
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            let factor = m[i][c].clone();
            for j in c + 1..cols {
                let mut v = pivot.mul_elem(&m[i][j]);
                if !factor.is_zero_elem() {
                    v = v.sub_elem(&factor.mul_elem(&m[r][j]));
                }
                if let Some(d) = &prev {
                    v = v.div_exact(d);
                }
                m[i][j] = v;
            }
            m[i][c] = factor.zero_like();
        }
        prev = Some(pivot);
        pivots.push(c);
        r += 1;
    }
    (pivots, odd)
}

pub fn rank<T: Domain>(m: &Matrix<T>) -> usize {
    let mut work = m.clone();
    bareiss_echelon(&mut work).0.len()
}

/// Determinant of a square matrix.
pub fn det<T: Domain>(m: &Matrix<T>, one: &T) -> T {
    let n = m.len();
    if n == 0 {
        return one.one_like();
    }
    let mut work = m.clone();
    let (pivots, odd) = bareiss_echelon(&mut work);
    if pivots.len() < n {
        return one.zero_like();
    }
    let d = work[n - 1][n - 1].clone();
    if odd {
        d.neg_elem()
    } else {
        d
    }
}

/// Reduced row echelon form over a field; returns the pivot columns.
pub fn rref<T: Field>(m: &mut Matrix<T>) -> Vec<usize> {
    let (pivots, _) = bareiss_echelon(m);
    for (r, &c) in pivots.iter().enumerate().rev() {
        let inv = m[r][c].inv_elem();
        for j in c..m[r].len() {
            if !m[r][j].is_zero_elem() {
                m[r][j] = m[r][j].mul_elem(&inv);
            }
        }
        for i in 0..r {
            let factor = m[i][c].clone();
            if factor.is_zero_elem() {
                continue;
            }
            for j in c..m[i].len() {
                if !m[r][j].is_zero_elem() {
                    m[i][j] = m[i][j].sub_elem(&factor.mul_elem(&m[r][j]));
                }
            }
        }
    }
    for row in m.iter_mut().skip(pivots.len()) {
        for x in row.iter_mut() {
            *x = x.zero_like();
        }
    }
    pivots
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column in
/// increasing order, with that free entry equal to one.
pub fn nullspace<T: Field>(m: &Matrix<T>, cols: usize, one: &T) -> Vec<Vec<T>> {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let zero = one.zero_like();
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![zero.clone(); cols];
            v[free] = one.clone();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = work[r][free].neg_elem();
            }
            v
        })
        .collect()
}

/// A solution of `a x = b` with free unknowns set to zero, or `None` if the
/// system is inconsistent.
pub fn solve<T: Field>(a: &Matrix<T>, b: &[T], cols: usize, one: &T) -> Option<Vec<T>> {
    let mut aug: Matrix<T> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![one.zero_like(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn identity<T: Domain>(n: usize, one: &T) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.one_like() } else { one.zero_like() }).collect())
        .collect()
}

pub fn inverse<T: Field>(m: &Matrix<T>, one: &T) -> Option<Matrix<T>> {
    let n = m.len();
    let mut aug: Matrix<T> = m
        .iter()
        .zip(identity(n, one))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul<T: Domain>(a: &Matrix<T>, b: &Matrix<T>, one: &T) -> Matrix<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(one.zero_like(), |acc, k| {
                        if row[k].is_zero_elem() || b[k][j].is_zero_elem() {
                            acc
                        } else {
                            acc.add_elem(&row[k].mul_elem(&b[k][j]))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn mat_add<T: Domain>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.add_elem(v)).collect())
        .collect()
}

pub fn mat_sub<T: Domain>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.sub_elem(v)).collect())
        .collect()
}

pub fn mat_scale<T: Domain>(a: &Matrix<T>, c: &T) -> Matrix<T> {
    a.iter().map(|row| row.iter().map(|x| c.mul_elem(x)).collect()).collect()
}

pub fn mat_vec<T: Domain>(a: &Matrix<T>, v: &[T], one: &T) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(one.zero_like(), |acc, (x, y)| acc.add_elem(&x.mul_elem(y)))
        })
        .collect()
}

pub fn map_entries<T, U>(a: &Matrix<T>, f: impl Fn(&T) -> U) -> Matrix<U> {
    a.iter().map(|row| row.iter().map(&f).collect()).collect()
}

pub fn transpose<T: Clone>(a: &Matrix<T>) -> Matrix<T> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Kronecker product, row-major in the left factor.
pub fn kronecker<T: Domain>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (bn, bm) = (b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = Vec::with_capacity(a.len() * bn);
    for arow in a {
        for brow in b {
            let mut row = Vec::with_capacity(arow.len() * bm);
            for x in arow {
                for y in brow {
                    row.push(x.mul_elem(y));
                }
            }
            out.push(row);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldSpec;
    use num_rational::BigRational;
    use std::sync::Arc;

    fn field() -> Arc<FieldSpec<BigRational>> {
        FieldSpec::new(3).unwrap()
    }

    fn ints(f: &Arc<FieldSpec<BigRational>>, rows: &[&[i64]]) -> Matrix<Scalar<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
    }

    #[test]
    fn det_and_rank() {
        let f = field();
        let m = ints(&f, &[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&m, &f.one()), f.from_i64(18));
        let sing = ints(&f, &[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&sing), 1);
        assert!(det(&sing, &f.one()).is_zero());
        let swapped = ints(&f, &[&[0, 1], &[1, 0]]);
        assert_eq!(det(&swapped, &f.one()), f.from_i64(-1));
    }

    #[test]
    fn nullspace_is_annihilated() {
        let f = field();
        let m = ints(&f, &[&[1, 2, 3, 4], &[2, 4, 7, 9]]);
        let ns = nullspace(&m, 4, &f.one());
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&m, &v, &f.one()).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_roundtrip_with_q_entries() {
        let f = field();
        let mut m = ints(&f, &[&[1, 1], &[0, 1]]);
        m[0][1] = f.q();
        m[1][0] = &f.q() + &f.one();
        let inv = inverse(&m, &f.one()).unwrap();
        assert_eq!(mat_mul(&m, &inv, &f.one()), identity(2, &f.one()));
        assert!(inverse(&ints(&f, &[&[1, 1], &[1, 1]]), &f.one()).is_none());
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f = field();
        let a = ints(&f, &[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[f.one(), f.one()], 2, &f.one()).is_none());
        let x = solve(&a, &[f.one(), f.from_i64(2)], 2, &f.one()).unwrap();
        assert_eq!(mat_vec(&a, &x, &f.one()), vec![f.one(), f.from_i64(2)]);
    }

    #[test]
    fn bareiss_over_polynomials() {
        let f = field();
        let t = Poly::t(&f);
        let one = Poly::one(&f);
        let m = vec![vec![t.clone(), one.clone()], vec![one.clone(), t.clone()]];
        assert_eq!(det(&m, &one), &(&t * &t) - &one);
    }

    #[test]
    fn kronecker_ordering() {
        let f = field();
        let a = ints(&f, &[&[1, 2]]);
        let b = ints(&f, &[&[1], &[3]]);
        assert_eq!(kronecker(&a, &b), ints(&f, &[&[1, 2], &[3, 6]]));
    }
}
