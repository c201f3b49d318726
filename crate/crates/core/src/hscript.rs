//! The bialgebra `ℋ = K#H / I` over `K = k(t)`, with `I` generated by
//! `ξ = δ − u(σ − 1)`, `u = 1/((q − 1)t)`.
//!
//! Two layers live here. [`SmashElem`] is the smash product `K#H` in the
//! normal form `Σ x σ^a δ^(i)`, multiplied by
//!
//! ```text
//! δ^(k) x = Σ_{i+j=k} σ_q^j(δ^(i)(x)) δ^(j),   σ x = σ_q(x) σ,
//! ```
//!
//! and [`ScriptHElem`] is ℋ in the normal form `Σ x σ^a d_n`. The quotient
//! map writes `δ^(nN+b) = binom(nN+b, b)_q^-1 δ^(b) d_n` and replaces
//! `δ^(b)`, `b < N`, by `(u(σ − 1))^b / [b]_q!`. Products in ℋ lift to
//! `K#H` via `d_n ↦ δ^(nN)` and project back.
//!
//! Tensors in `ℋ ⊗_K ℋ` carry every `K`-coefficient on the first factor.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use crate::linalg::{self, Matrix};
use crate::prime::PrimeField;
use crate::qcomb::{q_binom, q_int};
use crate::qop::{delta_ratfunc, delta_table};
use crate::random::Sampler;
use crate::ratfunc::RatFunc;
use crate::report::Report;
use crate::scalar::FieldSpec;
use crate::sparse::accumulate;

/// `(a, i)`: `σ^a δ^(i)` in `K#H`, or `σ^a d_i` in ℋ.
pub type Basis = (u32, usize);

/// Field data shared by all elements of ℋ over one field.
pub struct ScriptH<C: PrimeField> {
    field: Arc<FieldSpec<C>>,
    /// `δ^(b) ≡ Σ_e divided[b][e] σ^e` in ℋ, for `b < N`.
    divided: Vec<Vec<RatFunc<C>>>,
    coproducts: Mutex<HashMap<Basis, ScriptHTensor<C>>>,
}

impl<C: PrimeField> ScriptH<C> {
    pub fn new(field: &Arc<FieldSpec<C>>) -> Arc<Self> {
        let n = field.order() as usize;
        let u = RatFunc::u(field);
        let mut divided = vec![{
            let mut e = vec![RatFunc::zero(field); n];
            e[0] = RatFunc::one(field);
            e
        }];
        for b in 1..n {
            let qb = q_int(field, b as u64);
            assert!(!qb.is_zero(), "[b]_q vanishes below the order");
            let inv = qb.inv().expect("nonzero");
            let prev = &divided[b - 1];
            let mut next = vec![RatFunc::zero(field); n];
            // u(σ − 1) · Σ e σ^c = Σ (u σ_q(e) σ^(c+1) − u e σ^c)
            for (c, e) in prev.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let up = &(&u * &e.sigma_shift(1)).scale(&inv);
                next[(c + 1) % n] = &next[(c + 1) % n] + up;
                next[c] = &next[c] - &(&u * e).scale(&inv);
            }
            divided.push(next);
        }
        Arc::new(ScriptH { field: field.clone(), divided, coproducts: Mutex::new(HashMap::new()) })
    }

    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.field.order() as usize
    }

    /// `Δ(σ^a d_n) = Σ_{i+j=nN} σ^(a+j) δ^(i) ⊗ σ^a δ^(j)`, both legs reduced.
    fn basis_coproduct(self: &Arc<Self>, (a, n): Basis) -> ScriptHTensor<C> {
        if let Some(v) = self.coproducts.lock().expect("coproduct memo poisoned").get(&(a, n)) {
            return v.clone();
        }
        let big = n * self.order();
        let mut out = ScriptHTensor::zero(self);
        for i in 0..=big {
            let j = big - i;
            let left = SmashElem::basis(self, a as i64 + j as i64, i).quotient();
            let right = SmashElem::basis(self, a as i64, j).quotient();
            out = &out + &ScriptHTensor::pure(&left, &right);
        }
        self.coproducts.lock().expect("coproduct memo poisoned").insert((a, n), out.clone());
        out
    }
}

fn reduce_a<C: PrimeField>(ctx: &ScriptH<C>, a: i64) -> u32 {
    a.rem_euclid(ctx.field.order() as i64) as u32
}

/// `Σ x σ^a δ^(i)` in `K#H`.
#[derive(Clone)]
pub struct SmashElem<C: PrimeField> {
    ctx: Arc<ScriptH<C>>,
    terms: BTreeMap<Basis, RatFunc<C>>,
}

/// `Σ x σ^a d_n` in ℋ.
#[derive(Clone)]
pub struct ScriptHElem<C: PrimeField> {
    ctx: Arc<ScriptH<C>>,
    terms: BTreeMap<Basis, RatFunc<C>>,
}

/// `Σ x (σ^a d_m ⊗ σ^b d_n)` in `ℋ ⊗_K ℋ`.
#[derive(Clone)]
pub struct ScriptHTensor<C: PrimeField> {
    ctx: Arc<ScriptH<C>>,
    terms: BTreeMap<(Basis, Basis), RatFunc<C>>,
}

macro_rules! sparse_common {
    ($ty:ident, $key:ty) => {
        impl<C: PrimeField> PartialEq for $ty<C> {
            fn eq(&self, other: &Self) -> bool {
                self.terms == other.terms
            }
        }

        impl<C: PrimeField> Eq for $ty<C> {}

        impl<C: PrimeField> $ty<C> {
            pub fn zero(ctx: &Arc<ScriptH<C>>) -> Self {
                $ty { ctx: ctx.clone(), terms: BTreeMap::new() }
            }

            pub fn ctx(&self) -> &Arc<ScriptH<C>> {
                &self.ctx
            }

            pub fn field(&self) -> &Arc<FieldSpec<C>> {
                &self.ctx.field
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn terms(&self) -> impl Iterator<Item = ($key, &RatFunc<C>)> {
                self.terms.iter().map(|(k, v)| (*k, v))
            }

            pub fn coeff(&self, key: $key) -> RatFunc<C> {
                self.terms.get(&key).cloned().unwrap_or_else(|| RatFunc::zero(self.field()))
            }

            /// Left multiplication by `x ∈ K`.
            pub fn scale(&self, x: &RatFunc<C>) -> Self {
                let mut out = Self::zero(&self.ctx);
                for (&k, v) in &self.terms {
                    accumulate(&mut out.terms, k, x * v);
                }
                out
            }

            fn push(&mut self, key: $key, c: RatFunc<C>) {
                accumulate(&mut self.terms, key, c);
            }
        }

        impl<C: PrimeField> Add for &$ty<C> {
            type Output = $ty<C>;
            fn add(self, rhs: &$ty<C>) -> $ty<C> {
                let mut out = self.clone();
                for (&k, v) in &rhs.terms {
                    out.push(k, v.clone());
                }
                out
            }
        }

        impl<C: PrimeField> Neg for &$ty<C> {
            type Output = $ty<C>;
            fn neg(self) -> $ty<C> {
                $ty { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
            }
        }

        impl<C: PrimeField> Sub for &$ty<C> {
            type Output = $ty<C>;
            fn sub(self, rhs: &$ty<C>) -> $ty<C> {
                self + &-rhs
            }
        }
    };
}

sparse_common!(SmashElem, Basis);
sparse_common!(ScriptHElem, Basis);
sparse_common!(ScriptHTensor, (Basis, Basis));

impl<C: PrimeField> SmashElem<C> {
    pub fn term(ctx: &Arc<ScriptH<C>>, x: RatFunc<C>, a: i64, i: usize) -> Self {
        let mut out = Self::zero(ctx);
        out.push((reduce_a(ctx, a), i), x);
        out
    }

    pub fn basis(ctx: &Arc<ScriptH<C>>, a: i64, i: usize) -> Self {
        Self::term(ctx, RatFunc::one(&ctx.field), a, i)
    }

    pub fn one(ctx: &Arc<ScriptH<C>>) -> Self {
        Self::basis(ctx, 0, 0)
    }

    pub fn func(ctx: &Arc<ScriptH<C>>, x: RatFunc<C>) -> Self {
        Self::term(ctx, x, 0, 0)
    }

    pub fn sigma(ctx: &Arc<ScriptH<C>>, a: i64) -> Self {
        Self::basis(ctx, a, 0)
    }

    pub fn delta(ctx: &Arc<ScriptH<C>>, i: usize) -> Self {
        Self::basis(ctx, 0, i)
    }

    /// `ξ = δ − u(σ − 1)`, the generator of `I`.
    pub fn xi(ctx: &Arc<ScriptH<C>>) -> Self {
        let u = RatFunc::u(&ctx.field);
        let us = &Self::term(ctx, u.clone(), 1, 0) - &Self::func(ctx, u);
        &Self::delta(ctx, 1) - &us
    }

    /// The element of `K`, if this is one.
    pub fn as_func(&self) -> Option<RatFunc<C>> {
        match self.terms.len() {
            0 => Some(RatFunc::zero(self.field())),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Image in ℋ.
    pub fn quotient(&self) -> ScriptHElem<C> {
        let ctx = &self.ctx;
        let n = ctx.order();
        let mut out = ScriptHElem::zero(ctx);
        for (&(a, k), x) in &self.terms {
            let (c, b) = (k / n, k % n);
            let beta = q_binom(&ctx.field, k as i64, b as i64).expect("in range");
            let beta_inv = beta.inv().expect("binom(nN+b, b)_q is a unit");
            for (e, coeff) in ctx.divided[b].iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let v = (x * &coeff.sigma_shift(a as i64)).scale(&beta_inv);
                out.push(((a + e as u32) % n as u32, c), v);
            }
        }
        out
    }

    /// `h ⇀ f` for the natural action of `K#H` on `K`.
    pub fn act(&self, f: &RatFunc<C>) -> RatFunc<C> {
        let top = self.terms.keys().map(|&(_, i)| i).max().unwrap_or(0);
        let table = delta_table(f, top);
        let mut out = RatFunc::zero(self.field());
        for (&(a, i), x) in &self.terms {
            out = &out + &(x * &table[i].sigma_shift(a as i64));
        }
        out
    }
}

impl<C: PrimeField> Mul for &SmashElem<C> {
    type Output = SmashElem<C>;
    /// `(x σ^a δ^(i))(y σ^b δ^(j)) =
    ///  Σ_{l+m=i} x σ_q^(a+m)(δ^(l) y) q^(mb) binom(m+j, m)_q σ^(a+b) δ^(m+j)`.
    fn mul(self, rhs: &SmashElem<C>) -> SmashElem<C> {
        let ctx = &self.ctx;
        let field = &ctx.field;
        let n = field.order();
        let top = self.terms.keys().map(|&(_, i)| i).max().unwrap_or(0);
        let mut out = SmashElem::zero(ctx);
        for (&(b, j), y) in &rhs.terms {
            let table = delta_table(y, top);
            for (&(a, i), x) in &self.terms {
                for l in 0..=i {
                    if table[l].is_zero() {
                        continue;
                    }
                    let m = i - l;
                    let c = &field.q_pow((m * b as usize) as i64)
                        * &q_binom(field, (m + j) as i64, m as i64).expect("in range");
                    if c.is_zero() {
                        continue;
                    }
                    let v = (x * &table[l].sigma_shift((a as usize + m) as i64)).scale(&c);
                    out.push(((a + b) % n, m + j), v);
                }
            }
        }
        out
    }
}

impl<C: PrimeField> ScriptHElem<C> {
    pub fn term(ctx: &Arc<ScriptH<C>>, x: RatFunc<C>, a: i64, n: usize) -> Self {
        let mut out = Self::zero(ctx);
        out.push((reduce_a(ctx, a), n), x);
        out
    }

    pub fn basis(ctx: &Arc<ScriptH<C>>, a: i64, n: usize) -> Self {
        Self::term(ctx, RatFunc::one(&ctx.field), a, n)
    }

    pub fn one(ctx: &Arc<ScriptH<C>>) -> Self {
        Self::basis(ctx, 0, 0)
    }

    pub fn func(ctx: &Arc<ScriptH<C>>, x: RatFunc<C>) -> Self {
        Self::term(ctx, x, 0, 0)
    }

    pub fn sigma(ctx: &Arc<ScriptH<C>>, a: i64) -> Self {
        Self::basis(ctx, a, 0)
    }

    /// `d_n`, the image of `δ^(nN)`.
    pub fn d(ctx: &Arc<ScriptH<C>>, n: usize) -> Self {
        Self::basis(ctx, 0, n)
    }

    /// The preimage `Σ x σ^a δ^(nN)` in `K#H`.
    pub fn lift(&self) -> SmashElem<C> {
        let n = self.ctx.order();
        let mut out = SmashElem::zero(&self.ctx);
        for (&(a, m), x) in &self.terms {
            out.push((a, m * n), x.clone());
        }
        out
    }

    /// Largest `n` with a `d_n` term: the filtration degree.
    pub fn filtration(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, n)| n).max()
    }

    /// `ε(x σ^a d_n) = x [n = 0]`.
    pub fn counit(&self) -> RatFunc<C> {
        self.terms
            .iter()
            .filter(|((_, n), _)| *n == 0)
            .fold(RatFunc::zero(self.field()), |acc, (_, x)| &acc + x)
    }

    pub fn coproduct(&self) -> ScriptHTensor<C> {
        let mut out = ScriptHTensor::zero(&self.ctx);
        for (&k, x) in &self.terms {
            out = &out + &self.ctx.basis_coproduct(k).scale(x);
        }
        out
    }

    /// `h ⇀ f`; equals `ε(h f)`.
    pub fn act(&self, f: &RatFunc<C>) -> RatFunc<C> {
        let n = self.ctx.order();
        let top = self.filtration().unwrap_or(0) * n;
        let table = delta_table(f, top);
        let mut out = RatFunc::zero(self.field());
        for (&(a, m), x) in &self.terms {
            out = &out + &(x * &table[m * n].sigma_shift(a as i64));
        }
        out
    }

    /// `γ`: the `d_0` part, as coefficients of `σ^a`.
    pub fn gamma(&self) -> Vec<RatFunc<C>> {
        (0..self.ctx.order() as u32).map(|a| self.coeff((a, 0))).collect()
    }
}

impl<C: PrimeField> Mul for &ScriptHElem<C> {
    type Output = ScriptHElem<C>;
    fn mul(self, rhs: &ScriptHElem<C>) -> ScriptHElem<C> {
        if self.is_zero() || rhs.is_zero() {
            return ScriptHElem::zero(&self.ctx);
        }
        // A coefficient-only left factor needs no lifting.
        if self.terms.len() == 1 {
            if let Some(x) = self.terms.get(&(0, 0)) {
                return rhs.scale(x);
            }
        }
        (&self.lift() * &rhs.lift()).quotient()
    }
}

impl<C: PrimeField> ScriptHTensor<C> {
    /// `x ⊗ y` with the coefficients of `y` moved to the first factor.
    pub fn pure(x: &ScriptHElem<C>, y: &ScriptHElem<C>) -> Self {
        let mut out = Self::zero(&x.ctx);
        for (&kx, cx) in &x.terms {
            for (&ky, cy) in &y.terms {
                out.push((kx, ky), cx * cy);
            }
        }
        out
    }

    pub fn twist(&self) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (&(x, y), c) in &self.terms {
            out.push((y, x), c.clone());
        }
        out
    }

    /// `Σ c f(x) ⊗ g(y)` over the terms `c (x ⊗ y)`.
    pub fn map_legs(
        &self,
        f: impl Fn(&ScriptHElem<C>) -> ScriptHElem<C>,
        g: impl Fn(&ScriptHElem<C>) -> ScriptHElem<C>,
    ) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (&(x, y), c) in &self.terms {
            let fx = f(&ScriptHElem::basis(&self.ctx, x.0 as i64, x.1));
            let gy = g(&ScriptHElem::basis(&self.ctx, y.0 as i64, y.1));
            out = &out + &Self::pure(&fx, &gy).scale(c);
        }
        out
    }

    /// `Σ c ε(x) y`.
    pub fn counit_left(&self) -> ScriptHElem<C> {
        let mut out = ScriptHElem::zero(&self.ctx);
        for (&(x, y), c) in &self.terms {
            if x.1 == 0 {
                out.push(y, c.clone());
            }
        }
        out
    }

    /// `Σ c x ε(y)`.
    pub fn counit_right(&self) -> ScriptHElem<C> {
        let mut out = ScriptHElem::zero(&self.ctx);
        for (&(x, y), c) in &self.terms {
            if y.1 == 0 {
                out.push(x, c.clone());
            }
        }
        out
    }

    /// Triple tensors `(Δ ⊗ id)` and `(id ⊗ Δ)` of this tensor.
    pub fn coassociators(&self) -> (Triple<C>, Triple<C>) {
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        for (&(x, y), c) in &self.terms {
            for ((x1, x2), cx) in self.ctx.basis_coproduct(x).terms() {
                accumulate(&mut left, (x1, x2, y), c * cx);
            }
            for ((y1, y2), cy) in self.ctx.basis_coproduct(y).terms() {
                accumulate(&mut right, (x, y1, y2), c * cy);
            }
        }
        (left, right)
    }
}

pub type Triple<C> = BTreeMap<(Basis, Basis, Basis), RatFunc<C>>;

fn coeff_text<C: PrimeField>(x: &RatFunc<C>) -> String {
    let s = x.to_string();
    if s.contains([' ', '/', '*']) || s.starts_with('-') {
        format!("({s})")
    } else {
        s
    }
}

fn basis_text((a, n): Basis, d: &str) -> String {
    match a {
        0 => format!("{d}({n})"),
        1 => format!("s * {d}({n})"),
        _ => format!("s^{a} * {d}({n})"),
    }
}

fn join<'a, C: PrimeField>(terms: impl Iterator<Item = (String, &'a RatFunc<C>)>) -> String {
    let parts: Vec<String> = terms
        .map(|(mono, x)| if x.is_one() { mono } else { format!("{} * {mono}", coeff_text(x)) })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Highest order first.
fn display_order(keys: &BTreeMap<Basis, impl Sized>) -> Vec<Basis> {
    let mut v: Vec<Basis> = keys.keys().copied().collect();
    v.sort_by_key(|x| std::cmp::Reverse((x.1, x.0)));
    v
}

impl<C: PrimeField> fmt::Display for ScriptHElem<C> {
    /// Terms `x * s^a * D(n)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let keys = display_order(&self.terms);
        f.write_str(&join(keys.into_iter().map(|k| (basis_text(k, "D"), &self.terms[&k]))))
    }
}

impl<C: PrimeField> fmt::Display for SmashElem<C> {
    /// Terms `x * s^a * d(i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let keys = display_order(&self.terms);
        f.write_str(&join(keys.into_iter().map(|k| (basis_text(k, "d"), &self.terms[&k]))))
    }
}

impl<C: PrimeField> fmt::Display for ScriptHTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .terms
            .iter()
            .map(|(&(x, y), c)| (format!("({} ⊗ {})", basis_text(x, "D"), basis_text(y, "D")), c));
        f.write_str(&join(terms))
    }
}

macro_rules! debug_via_display {
    ($($ty:ident),*) => {$(
        impl<C: PrimeField> fmt::Debug for $ty<C> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({self})", stringify!($ty))
            }
        }
    )*};
}

debug_via_display!(SmashElem, ScriptHElem, ScriptHTensor);

/// A formal product of generators, reduced by [`reduce`].
#[derive(Clone, Debug)]
pub enum SmashToken<C: PrimeField> {
    Func(RatFunc<C>),
    Sigma(i64),
    Delta(usize),
    /// `d_n = δ^(nN)`.
    D(usize),
}

pub type SmashWord<C> = Vec<SmashToken<C>>;

/// Normal form in ℋ of a product of generators.
pub fn reduce<C: PrimeField>(ctx: &Arc<ScriptH<C>>, word: &[SmashToken<C>]) -> ScriptHElem<C> {
    let n = ctx.order();
    let mut acc = SmashElem::one(ctx);
    for tok in word {
        let x = match tok {
            SmashToken::Func(f) => SmashElem::func(ctx, f.clone()),
            SmashToken::Sigma(a) => SmashElem::sigma(ctx, *a),
            SmashToken::Delta(i) => SmashElem::delta(ctx, *i),
            SmashToken::D(m) => SmashElem::delta(ctx, m * n),
        };
        acc = &acc * &x;
    }
    acc.quotient()
}

/// Sample functions for the relation checks.
pub fn probe_functions<C: PrimeField>(field: &Arc<FieldSpec<C>>) -> Vec<RatFunc<C>> {
    let t = RatFunc::t(field);
    let one = RatFunc::one(field);
    vec![t.clone(), t.inv().expect("t is nonzero"), &(&t * &t) + &one]
}

/// Basis `σ^a d_n` of `ℋ_n_bound`.
pub fn basis_up_to<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n_bound: usize) -> Vec<Basis> {
    (0..=n_bound).flat_map(|n| (0..ctx.order() as u32).map(move |a| (a, n))).collect()
}

fn show(b: Basis) -> String {
    basis_text(b, "D")
}

/// Coalgebra checks on `σ^a d_n`, `n ≤ n_bound`: cocommutativity,
/// coassociativity, counit, the `×_K` centralizer condition and the
/// filtration of `Δ`.
pub fn check_cocommutative<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n_bound: usize) -> Report {
    let field = ctx.field();
    let mut report = Report::new("hscript", field.to_string(), None);
    let probes = probe_functions(field);
    for b in basis_up_to(ctx, n_bound) {
        let x = ScriptHElem::basis(ctx, b.0 as i64, b.1);
        let dx = x.coproduct();
        report.check("cocommutative", dx == dx.twist(), || format!("{}: {dx}", show(b)));
        let (l, r) = dx.coassociators();
        report.check("coassociative", l == r, || show(b));
        report.check("left counit", dx.counit_left() == x, || show(b));
        report.check("right counit", dx.counit_right() == x, || show(b));
        let filtered = dx.terms().all(|((u, v), _)| u.1 + v.1 <= b.1);
        report.check("coproduct respects the filtration", filtered, || show(b));
        for f in &probes {
            let fx = ScriptHElem::func(ctx, f.clone());
            let lhs = dx.map_legs(|u| u * &fx, |v| v.clone());
            let rhs = dx.map_legs(|u| u.clone(), |v| v * &fx);
            report.check("coproduct lands in the centralizer", lhs == rhs, || format!("{}, x = {f}", show(b)));
        }
    }
    report
}

/// Relations of `K#H` and ℋ: `ξ` generates `I`, acts by zero, and obeys
/// `ξσ = qσξ`, `ξδ = δξ + ((q − 1)/q) u ξ`, `ξx = σ_q(x) ξ`.
pub fn verify_relations<C: PrimeField>(ctx: &Arc<ScriptH<C>>) -> Report {
    let field = ctx.field();
    let n = ctx.order();
    let mut report = Report::new("hscript", field.to_string(), None);
    let xi = SmashElem::xi(ctx);
    let sigma = SmashElem::sigma(ctx, 1);
    let delta = SmashElem::delta(ctx, 1);
    let u = RatFunc::u(field);
    let q = field.q();

    report.check("reduce(xi) = 0", xi.quotient().is_zero(), || xi.quotient().to_string());
    let lhs = &xi * &sigma;
    let rhs = (&sigma * &xi).scale(&RatFunc::constant(q.clone()));
    report.check("xi sigma = q sigma xi", lhs == rhs, || format!("{lhs} vs {rhs}"));
    let c = (&q - &field.one()).div(&q).expect("q is a unit");
    let lhs = &xi * &delta;
    let rhs = &(&delta * &xi) + &xi.scale(&u.scale(&c));
    report.check("xi delta = delta xi + ((q-1)/q) u xi", lhs == rhs, || format!("{lhs} vs {rhs}"));
    for f in probe_functions(field) {
        let fx = SmashElem::func(ctx, f.clone());
        let lhs = &xi * &fx;
        let rhs = &SmashElem::func(ctx, f.sigma_shift(1)) * &xi;
        report.check("xi x = sigma(x) xi", lhs == rhs, || format!("x = {f}"));
        report.check("xi acts by zero", xi.act(&f).is_zero(), || format!("x = {f}"));
    }

    let sn = reduce(ctx, &[SmashToken::Sigma(n as i64)]);
    report.check("reduce(sigma^N) = 1", sn == ScriptHElem::one(ctx), || sn.to_string());
    let d1 = ScriptHElem::d(ctx, 1);
    let s = ScriptHElem::sigma(ctx, 1);
    report.check("d_1 sigma = sigma d_1", &d1 * &s == &s * &d1, String::new);
    for (l, m) in [(1, 1), (1, 2), (2, 2)] {
        let lhs = &ScriptHElem::d(ctx, l) * &ScriptHElem::d(ctx, m);
        let c = crate::qcomb::binomial(field, (l + m) as u64, l as u64);
        let rhs = ScriptHElem::d(ctx, l + m).scale(&RatFunc::constant(c));
        report.check("d_l d_m = binom(l+m, l) d_(l+m)", lhs == rhs, || format!("l={l}, m={m}: {lhs}"));
    }
    report
}

/// Random element of `ℋ_n_bound` with `terms` terms.
pub fn random_element<C: PrimeField>(
    ctx: &Arc<ScriptH<C>>,
    rng: &mut Sampler<C>,
    n_bound: usize,
    terms: usize,
    deg: usize,
) -> ScriptHElem<C> {
    let mut out = ScriptHElem::zero(ctx);
    for _ in 0..terms {
        let a = rng.index(ctx.order()) as i64;
        let n = rng.index(n_bound + 1);
        out = &out + &ScriptHElem::term(ctx, rng.ratfunc(deg), a, n);
    }
    out
}

/// Ring and module checks on random elements: associativity, filtration,
/// the module axiom on `K`, idempotence of reduction, and `h ⇀ f = ε(h f)`.
pub fn verify_ring<C: PrimeField>(ctx: &Arc<ScriptH<C>>, trials: usize, seed: u64) -> Report {
    let field = ctx.field();
    let mut report = Report::new("hscript", field.to_string(), Some(seed));
    let mut rng = Sampler::new(field, seed);
    for trial in 0..trials {
        let x = random_element(ctx, &mut rng, 1, 2, 1);
        let y = random_element(ctx, &mut rng, 1, 2, 1);
        let z = random_element(ctx, &mut rng, 1, 2, 1);
        let f = rng.ratfunc(2);
        let tag = || format!("trial {trial}: x = {x}, y = {y}, z = {z}, f = {f}");
        let xy = &x * &y;
        report.check("associative", &xy * &z == &x * &(&y * &z), tag);
        let bound = x.filtration().unwrap_or(0) + y.filtration().unwrap_or(0);
        report.check("product respects the filtration", xy.filtration().unwrap_or(0) <= bound, tag);
        report.check("module axiom", xy.act(&f) == x.act(&y.act(&f)), tag);
        report.check("reduce is idempotent", x.lift().quotient() == x, tag);
        let eps = (&x * &ScriptHElem::func(ctx, f.clone())).counit();
        report.check("action is counit of product", x.act(&f) == eps, tag);
        let g = rng.ratfunc(2);
        let fx = ScriptHElem::func(ctx, f.clone());
        let gx = ScriptHElem::func(ctx, g.clone());
        report.check("K is a subring", &fx * &gx == ScriptHElem::func(ctx, &f * &g), tag);
    }
    report
}

/// `d_n ⇀ t^(nN) = 1`, and the action of reduced generators agrees with the
/// operators of `qop` on random functions.
pub fn verify_action<C: PrimeField>(ctx: &Arc<ScriptH<C>>, trials: usize, n_bound: usize, seed: u64) -> Report {
    let field = ctx.field();
    let n = ctx.order();
    let mut report = Report::new("hscript", field.to_string(), Some(seed));
    let t = RatFunc::t(field);
    for m in 0..=n_bound {
        let f = t.pow((m * n) as i64).expect("nonnegative power");
        let v = ScriptHElem::d(ctx, m).act(&f);
        report.check("d_n acts on t^(nN) as 1", v.is_one(), || format!("n={m}: {v}"));
    }
    let one = ScriptHElem::one(ctx);
    let mut rng = Sampler::new(field, seed);
    for trial in 0..trials {
        let f = rng.ratfunc(3);
        report.check("1 acts as the identity", one.act(&f) == f, || format!("f = {f}"));
        let k = rng.index(2 * n + 1);
        let (name, word, want) = match rng.index(3) {
            0 => ("sigma", vec![SmashToken::Sigma(1)], f.sigma_shift(1)),
            1 => ("delta(k)", vec![SmashToken::Delta(k)], delta_ratfunc(k, &f)),
            _ => {
                let m = k / n;
                ("d_n", vec![SmashToken::D(m)], delta_ratfunc(m * n, &f))
            }
        };
        let got = reduce(ctx, &word).act(&f);
        report.check("action agrees with the operators", got == want, || {
            format!("trial {trial}: {name}, k={k}, f = {f}: {got} vs {want}")
        });
    }
    report
}

/// Rank of the matrix of `σ^a d_n ⇀ t^m`, `n ≤ n_bound`, `m ≤ m_bound`.
pub fn action_rank<C: PrimeField>(ctx: &Arc<ScriptH<C>>, rows: &[Basis], m_bound: usize) -> usize {
    let t = RatFunc::t(ctx.field());
    let cols: Vec<RatFunc<C>> = (0..=m_bound).map(|m| t.pow(m as i64).expect("nonnegative")).collect();
    let matrix: Matrix<RatFunc<C>> = rows
        .iter()
        .map(|&(a, n)| {
            let h = ScriptHElem::basis(ctx, a as i64, n);
            cols.iter().map(|f| h.act(f)).collect()
        })
        .collect();
    linalg::rank(&matrix)
}

/// Whether the basis of `ℋ_n_bound` acts `K`-linearly independently on the
/// monomials `t^m`, `m ≤ m_bound`.
pub fn separation_check<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n_bound: usize, m_bound: usize) -> Report {
    let field = ctx.field();
    let n = ctx.order();
    let mut report = Report::new("hscript", field.to_string(), None);
    let rows = basis_up_to(ctx, n_bound);
    let r = action_rank(ctx, &rows, m_bound);
    report.check("basis acts independently", r == rows.len(), || {
        format!("rank {r} of {} at m <= {m_bound}", rows.len())
    });
    // d_1 is not a combination of the σ^a: it separates t^N from 1.
    let mut small: Vec<Basis> = (0..n as u32).map(|a| (a, 0)).collect();
    small.push((0, 1));
    let r = action_rank(ctx, &small, n);
    report.check("d_1 is not in the span of the sigma^a", r == n + 1, || format!("rank {r}"));
    report
}

/// Every `ℋ` check at the given bounds.
pub fn verify_hscript<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n_bound: usize, trials: usize, seed: u64) -> Report {
    let field = ctx.field();
    let n = ctx.order();
    let mut report = Report::new("hscript", field.to_string(), Some(seed));
    report.extend(verify_relations(ctx));
    report.extend(check_cocommutative(ctx, n_bound));
    report.extend(verify_ring(ctx, trials, seed));
    report.extend(verify_action(ctx, trials, n_bound, seed));
    report.extend(separation_check(ctx, 2, 3 * n));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn ctx(n: u32) -> Arc<ScriptH<Rational>> {
        ScriptH::new(&FieldSpec::new(n).unwrap())
    }

    #[test]
    fn delta_times_t() {
        let h = ctx(3);
        let f = h.field().clone();
        let t = RatFunc::t(&f);
        let got = reduce(&h, &[SmashToken::Delta(1), SmashToken::Func(t)]);
        let q = f.q();
        let qm1 = (&q - &f.one()).inv().unwrap();
        let want = &ScriptHElem::term(&h, RatFunc::constant(&q * &qm1), 1, 0) - &ScriptHElem::func(&h, RatFunc::constant(qm1));
        assert_eq!(got, want);
        for m in 0..=5 {
            let tm = RatFunc::t(&f).pow(m).unwrap();
            let direct = SmashElem::delta(&h, 1).act(&(&RatFunc::t(&f) * &tm));
            assert_eq!(got.act(&tm), direct);
        }
    }

    #[test]
    fn sigma_to_the_order_is_one() {
        let h = ctx(4);
        assert_eq!(reduce(&h, &[SmashToken::Sigma(4)]), ScriptHElem::one(&h));
    }

    #[test]
    fn d1_acts_on_t_to_the_n() {
        let h = ctx(3);
        let t3 = RatFunc::t(h.field()).pow(3).unwrap();
        assert!(ScriptHElem::d(&h, 1).act(&t3).is_one());
        let f = RatFunc::t(h.field()).inv().unwrap();
        assert_eq!(ScriptHElem::sigma(&h, 1).act(&f), f.sigma_shift(1));
    }

    #[test]
    fn coproduct_of_grouplike() {
        let h = ctx(3);
        let s = ScriptHElem::sigma(&h, 2);
        assert_eq!(s.coproduct(), ScriptHTensor::pure(&s, &s));
    }

    #[test]
    fn coproduct_of_d1_matches_reduced_legs() {
        let h = ctx(3);
        let mut want = ScriptHTensor::zero(&h);
        for i in 0..=3 {
            let j = 3 - i;
            let l = SmashElem::basis(&h, j as i64, i).quotient();
            let r = SmashElem::delta(&h, j).quotient();
            want = &want + &ScriptHTensor::pure(&l, &r);
        }
        assert_eq!(ScriptHElem::d(&h, 1).coproduct(), want);
    }

    #[test]
    fn structure_checks_pass() {
        for n in [2, 3] {
            let h = ctx(n);
            let r = verify_hscript(&h, 2, 4, 7);
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn cocommutative_to_four_for_n2() {
        let r = check_cocommutative(&ctx(2), 4);
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn separation_small() {
        let r = separation_check(&ctx(2), 2, 8);
        assert!(r.passed(), "{}", r.to_text());
        let h = ctx(3);
        assert_eq!(action_rank(&h, &[(0, 0)], 3), 1);
    }

    #[test]
    fn text_form() {
        let h = ctx(3);
        let x = &ScriptHElem::d(&h, 1) + &ScriptHElem::term(&h, RatFunc::t(h.field()).inv().unwrap(), 1, 0);
        assert_eq!(x.to_string(), "D(1) + (1/t) * s * D(0)");
    }
}
