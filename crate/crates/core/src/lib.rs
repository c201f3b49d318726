//! Exact arithmetic for iterative q-difference operators at a root of unity.
//!
//! The coefficient field is `k = k0(q)` with `q` a primitive `N`-th root of
//! unity over `k0 = Q` or `F_p`; functions live in `K = k(t)`. On top of that
//! sit the Hopf algebra `H`, the bialgebra `ℋ = K#H/I`, the cocycle pipeline
//! producing a cocommutative basis `d'_n`, and iterative q-difference modules.

pub mod cocycle;
pub mod error;
pub mod hopf;
pub mod hscript;
pub mod linalg;
mod modgcd;
mod modp;
pub mod parse;
pub mod poly;
pub mod prime;
pub mod qcomb;
pub mod qmod;
pub mod qop;
pub mod random;
pub mod rational;
pub mod ratfunc;
pub mod report;
pub mod scalar;
mod sparse;

pub use error::{Error, Result};
pub use poly::Poly;
pub use prime::{Fp, PrimeField};
pub use ratfunc::RatFunc;
pub use scalar::{FieldSpec, Scalar};

pub use rational::Rational;

pub type QScalar = Scalar<Rational>;
pub type QPoly = Poly<Rational>;
pub type QRatFunc = RatFunc<Rational>;
