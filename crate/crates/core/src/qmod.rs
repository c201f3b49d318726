//! Iterative q-difference modules over `K = k(t)` as matrix data.
//!
//! A module of rank `n` is given by `M(σ)` and the matrices `M(d_n)` of a
//! generating family; every other action matrix is derived. Action matrices
//! act on coordinate vectors, so a solution is an `x ∈ K^n` with
//! `h(x) = M(h) x` entrywise, and composites follow the twisted Leibniz rule
//! `M(δ^(i) h) = Σ_{a+b=i} σ_q^b(δ^(a) M(h)) · M(δ^(b))`.
//!
//! In characteristic 0 the family is `{d_1}`. In characteristic `p` it is
//! `{d_1, d_p, d_p², ...}`; `M(d_n)` for other `n` comes from
//! `d_l d_(n−l) = binom(n, l) d_n` with `l` the lowest base-`p` digit power.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hopf::HopfH;
use crate::hscript::{ScriptH, ScriptHElem, SmashElem};
use crate::linalg::{self, Matrix};
use crate::parse::parse_ratfunc_in;
use crate::poly::Poly;
use crate::prime::PrimeField;
use crate::qcomb::{binomial, q_binom};
use crate::qop::{delta_ratfunc, delta_table};
use crate::ratfunc::RatFunc;
use crate::report::{Report, SCHEMA_VERSION};
use crate::scalar::{FieldSpec, Scalar};

type Mat<C> = Matrix<RatFunc<C>>;

pub struct QDiffModule<C: PrimeField> {
    ctx: Arc<ScriptH<C>>,
    sigma: Mat<C>,
    generators: BTreeMap<usize, Mat<C>>,
    d_cache: Mutex<HashMap<usize, Mat<C>>>,
    delta_cache: Mutex<HashMap<usize, Mat<C>>>,
}

impl<C: PrimeField> Clone for QDiffModule<C> {
    fn clone(&self) -> Self {
        QDiffModule::from_parts(&self.ctx, self.sigma.clone(), self.generators.clone())
    }
}

impl<C: PrimeField> std::fmt::Debug for QDiffModule<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |m: &Mat<C>| -> Vec<Vec<String>> { linalg::map_entries(m, |x| x.to_string()) };
        f.debug_struct("QDiffModule")
            .field("sigma", &show(&self.sigma))
            .field("generators", &self.generators.iter().map(|(n, m)| (n, show(m))).collect::<Vec<_>>())
            .finish()
    }
}

fn one<C: PrimeField>(field: &Arc<FieldSpec<C>>) -> RatFunc<C> {
    RatFunc::one(field)
}

fn square_of<C: PrimeField>(m: &Mat<C>, n: usize, what: &str) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("{what} must be {n}x{n}")));
    }
    Ok(())
}

fn entry_sigma<C: PrimeField>(m: &Mat<C>, e: i64) -> Mat<C> {
    linalg::map_entries(m, |x| x.sigma_shift(e))
}

/// `[δ^(0) m, ..., δ^(k) m]`, entrywise.
fn entry_jet<C: PrimeField>(m: &Mat<C>, k: usize) -> Vec<Mat<C>> {
    let tables: Vec<Vec<Vec<RatFunc<C>>>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| if x.is_zero() { vec![x.clone(); k + 1] } else { delta_table(x, k) })
                .collect()
        })
        .collect();
    (0..=k)
        .map(|a| tables.iter().map(|row| row.iter().map(|t| t[a].clone()).collect()).collect())
        .collect()
}

/// Lowest power of `p` with a nonzero base-`p` digit in `n`; 1 in characteristic 0.
fn lowest_digit_power(p: u64, n: usize) -> usize {
    if p == 0 {
        return 1;
    }
    let p = p as usize;
    let mut l = 1;
    while (n / l).is_multiple_of(p) {
        l *= p;
    }
    l
}

impl<C: PrimeField> QDiffModule<C> {
    fn from_parts(ctx: &Arc<ScriptH<C>>, sigma: Mat<C>, generators: BTreeMap<usize, Mat<C>>) -> Self {
        QDiffModule {
            ctx: ctx.clone(),
            sigma,
            generators,
            d_cache: Mutex::new(HashMap::new()),
            delta_cache: Mutex::new(HashMap::new()),
        }
    }

    /// The module with `M(σ) = sigma` and `M(d_1) = d1`.
    pub fn new(ctx: &Arc<ScriptH<C>>, sigma: Mat<C>, d1: Mat<C>) -> Result<Self> {
        Self::with_family(ctx, sigma, BTreeMap::from([(1, d1)]))
    }

    /// The module with `M(σ) = sigma` and explicit `M(d_n)` for each key `n`.
    pub fn with_family(ctx: &Arc<ScriptH<C>>, sigma: Mat<C>, family: BTreeMap<usize, Mat<C>>) -> Result<Self> {
        let n = sigma.len();
        if n == 0 {
            return Err(Error::Dimension("rank must be positive".into()));
        }
        square_of(&sigma, n, "M(sigma)")?;
        if !family.contains_key(&1) {
            return Err(Error::Dimension("M(d_1) is required".into()));
        }
        for (k, m) in &family {
            if *k == 0 {
                return Err(Error::Dimension("d_0 acts as the identity and cannot be given".into()));
            }
            square_of(m, n, &format!("M(d_{k})"))?;
        }
        Ok(Self::from_parts(ctx, sigma, family))
    }

    /// The unit object `K`: `M(σ) = [1]`, `M(d_1) = [0]`.
    pub fn unit(ctx: &Arc<ScriptH<C>>) -> Self {
        let f = ctx.field();
        Self::from_parts(ctx, vec![vec![one(f)]], BTreeMap::from([(1, vec![vec![RatFunc::zero(f)]])]))
    }

    /// The rank-one module spanned by the solution `t`: `M(σ) = [q]`, `M(d_1) = [0]`.
    pub fn v_t(ctx: &Arc<ScriptH<C>>) -> Self {
        let f = ctx.field();
        Self::from_parts(
            ctx,
            vec![vec![RatFunc::constant(f.q())]],
            BTreeMap::from([(1, vec![vec![RatFunc::zero(f)]])]),
        )
    }

    pub fn ctx(&self) -> &Arc<ScriptH<C>> {
        &self.ctx
    }

    pub fn field(&self) -> &Arc<FieldSpec<C>> {
        self.ctx.field()
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &Mat<C> {
        &self.sigma
    }

    pub fn generators(&self) -> &BTreeMap<usize, Mat<C>> {
        &self.generators
    }

    fn identity(&self) -> Mat<C> {
        linalg::identity(self.rank(), &one(self.field()))
    }

    fn mul(&self, a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
        linalg::mat_mul(a, b, &one(self.field()))
    }

    /// `M(σ^a)` for `0 ≤ a`, without reducing `a` modulo `N`:
    /// `M(σ^(a+1)) = σ_q(M(σ^a)) · M(σ)`.
    fn sigma_power_raw(&self, a: usize) -> Mat<C> {
        let mut acc = self.identity();
        for _ in 0..a {
            acc = self.mul(&entry_sigma(&acc, 1), &self.sigma);
        }
        acc
    }

    /// `M(σ^a)`, `a` taken modulo `N`.
    pub fn sigma_power(&self, a: i64) -> Mat<C> {
        self.sigma_power_raw(a.rem_euclid(self.ctx.order() as i64) as usize)
    }

    /// `M(d_n)`.
    pub fn d_matrix(&self, n: usize) -> Result<Mat<C>> {
        if n == 0 {
            return Ok(self.identity());
        }
        if let Some(m) = self.generators.get(&n) {
            return Ok(m.clone());
        }
        if let Some(m) = self.d_cache.lock().expect("module cache poisoned").get(&n) {
            return Ok(m.clone());
        }
        let field = self.field();
        let l = lowest_digit_power(C::CHARACTERISTIC, n);
        if l == n {
            return Err(Error::Dimension(format!("no generator M(d_{n}) given")));
        }
        let c = binomial(field, n as u64, l as u64);
        let inv = c.inv().map_err(|_| Error::Internal(format!("binom({n}, {l}) vanishes")))?;
        let big = l * self.ctx.order();
        let rest = self.d_matrix(n - l)?;
        let jet = entry_jet(&rest, big);
        let mut acc = linalg::mat_scale(&self.identity(), &RatFunc::zero(field));
        for (i, ji) in jet.iter().enumerate() {
            let j = big - i;
            let term = self.mul(&entry_sigma(ji, j as i64), &self.delta_matrix(j)?);
            acc = linalg::mat_add(&acc, &term);
        }
        let m = linalg::mat_scale(&acc, &RatFunc::constant(inv));
        self.d_cache.lock().expect("module cache poisoned").insert(n, m.clone());
        Ok(m)
    }

    /// `M(Σ x σ^a d_n) = Σ x · σ_q^a(M(d_n)) · M(σ^a)`.
    pub fn script_matrix(&self, h: &ScriptHElem<C>) -> Result<Mat<C>> {
        let field = self.field();
        let mut acc = linalg::mat_scale(&self.identity(), &RatFunc::zero(field));
        for ((a, n), x) in h.terms() {
            let m = self.mul(&entry_sigma(&self.d_matrix(n)?, a as i64), &self.sigma_power(a as i64));
            acc = linalg::mat_add(&acc, &linalg::mat_scale(&m, x));
        }
        Ok(acc)
    }

    /// `M(δ^(k))`.
    pub fn delta_matrix(&self, k: usize) -> Result<Mat<C>> {
        if let Some(m) = self.delta_cache.lock().expect("module cache poisoned").get(&k) {
            return Ok(m.clone());
        }
        let m = if k.is_multiple_of(self.ctx.order()) {
            self.d_matrix(k / self.ctx.order())?
        } else {
            self.script_matrix(&SmashElem::delta(&self.ctx, k).quotient())?
        };
        self.delta_cache.lock().expect("module cache poisoned").insert(k, m.clone());
        Ok(m)
    }

    /// `M(σ^j δ^(i)) = σ_q^j(M(δ^(i))) · M(σ^j)`.
    pub fn sigma_delta_matrix(&self, j: usize, i: usize) -> Result<Mat<C>> {
        Ok(self.mul(&entry_sigma(&self.delta_matrix(i)?, j as i64), &self.sigma_power(j as i64)))
    }

    /// Checks the defining relations of ℋ on the module up to `δ^(k_bound)`.
    pub fn validate(&self, k_bound: usize) -> Report {
        let field = self.field().clone();
        let mut report = Report::new("qmod", field.to_string(), None);
        let n = self.ctx.order();
        let k_bound = k_bound.max(n);
        let zero = RatFunc::zero(&field);
        let id = self.identity();

        let det = linalg::det(&self.sigma, &one(&field));
        report.check("M(sigma) invertible", !det.is_zero(), || "det M(sigma) = 0".into());
        let norm = self.sigma_power_raw(n);
        report.check("sigma^N = id (twisted norm)", norm == id, || format!("M(sigma^N) = {}", show(&norm)));

        let deltas: Result<Vec<Mat<C>>> = (0..=k_bound).map(|k| self.delta_matrix(k)).collect();
        let deltas = match deltas {
            Ok(d) => d,
            Err(e) => {
                report.check("action matrices derivable", false, || e.to_string());
                return report;
            }
        };
        let u = RatFunc::u(&field);
        let forced = linalg::mat_scale(&linalg::mat_sub(&self.sigma, &id), &u);
        report.check("M(delta(1)) = u (M(sigma) - 1)", deltas[1] == forced, || {
            format!("M(delta(1)) = {}, u (M(sigma) - 1) = {}", show(&deltas[1]), show(&forced))
        });

        // δ^(i) ∘ δ^(j) = binom(i+j, i)_q δ^(i+j)
        for j in 0..=k_bound {
            let jet = entry_jet(&deltas[j], k_bound - j);
            for i in 1..=k_bound - j {
                let mut lhs = linalg::mat_scale(&id, &zero);
                for (a, ja) in jet.iter().enumerate().take(i + 1) {
                    let b = i - a;
                    lhs = linalg::mat_add(&lhs, &self.mul(&entry_sigma(ja, b as i64), &deltas[b]));
                }
                let c = q_binom(&field, (i + j) as i64, i as i64).expect("in range");
                let rhs = linalg::mat_scale(&deltas[i + j], &RatFunc::constant(c));
                report.check("delta(i) delta(j) = binom(i+j,i)_q delta(i+j)", lhs == rhs, || {
                    format!("i = {i}, j = {j}: composite {} vs {}", show(&lhs), show(&rhs))
                });
            }
        }

        // δ^(k) σ = q^k σ δ^(k)
        let sigma_jet = entry_jet(&self.sigma, k_bound);
        for k in 0..=k_bound {
            let mut lhs = linalg::mat_scale(&id, &zero);
            for (a, sa) in sigma_jet.iter().enumerate().take(k + 1) {
                let b = k - a;
                lhs = linalg::mat_add(&lhs, &self.mul(&entry_sigma(sa, b as i64), &deltas[b]));
            }
            let rhs = linalg::mat_scale(
                &self.mul(&entry_sigma(&deltas[k], 1), &self.sigma),
                &RatFunc::constant(field.q_pow(k as i64)),
            );
            report.check("delta(k) sigma = q^k sigma delta(k)", lhs == rhs, || {
                format!("k = {k}: {} vs {}", show(&lhs), show(&rhs))
            });
        }
        report
    }

    /// `V ⊗_K W` with the Kronecker basis, row-major in `V`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.field().order() != other.field().order() {
            return Err(Error::Dimension("modules over different fields".into()));
        }
        let sigma = linalg::kronecker(&self.sigma, &other.sigma);
        let mut family = BTreeMap::new();
        let keys: Vec<usize> = self.generators.keys().chain(other.generators.keys()).copied().collect();
        for n in keys {
            if family.contains_key(&n) {
                continue;
            }
            let big = n * self.ctx.order();
            let mut acc: Option<Mat<C>> = None;
            for i in 0..=big {
                let j = big - i;
                let term = linalg::kronecker(&self.sigma_delta_matrix(j, i)?, &other.delta_matrix(j)?);
                acc = Some(match acc {
                    None => term,
                    Some(a) => linalg::mat_add(&a, &term),
                });
            }
            family.insert(n, acc.expect("nonempty sum"));
        }
        Ok(Self::from_parts(&self.ctx, sigma, family))
    }

    /// `V*` with the dual basis, via `(h ⇀ f)(v) = Σ h₁ ⇀ f(S(h₂) ⇀ v)`.
    pub fn dual(&self) -> Result<Self> {
        let field = self.field().clone();
        let inv = linalg::inverse(&self.sigma, &one(&field))
            .ok_or_else(|| Error::NotDualizable("M(sigma) is singular".into()))?;
        let sigma = linalg::transpose(&inv);
        let hopf = HopfH::new(&field);
        let mut family = BTreeMap::new();
        for &n in self.generators.keys() {
            let big = n * self.ctx.order();
            let mut acc = linalg::mat_scale(&self.identity(), &RatFunc::zero(&field));
            for j in 0..=big {
                let i = big - j;
                let mut s_mat = linalg::mat_scale(&self.identity(), &RatFunc::zero(&field));
                for ((a, m), c) in hopf.antipode_basis((0, j)).terms() {
                    let term = self.sigma_delta_matrix(a as usize, m)?;
                    s_mat = linalg::mat_add(&s_mat, &linalg::mat_scale(&term, &RatFunc::constant(c.clone())));
                }
                let st = linalg::transpose(&s_mat);
                let acted = linalg::map_entries(&st, |x| delta_ratfunc(i, x).sigma_shift(j as i64));
                acc = linalg::mat_add(&acc, &acted);
            }
            family.insert(n, acc);
        }
        Ok(Self::from_parts(&self.ctx, sigma, family))
    }

    /// Checks that evaluation `V* ⊗ V → K`, `e*_i ⊗ e_j ↦ [i = j]`, is a
    /// module map: `M(h) Φ = Φ M_K(h)` for the generators `h`.
    pub fn check_evaluation(&self) -> Report {
        let field = self.field().clone();
        let mut report = Report::new("qmod", field.to_string(), None);
        let pair = match self.dual().and_then(|d| d.tensor(self)) {
            Ok(p) => p,
            Err(e) => {
                report.check("evaluation is a module map", false, || e.to_string());
                return report;
            }
        };
        let n = self.rank();
        let ev: Vec<RatFunc<C>> = (0..n * n)
            .map(|c| if c / n == c % n { one(&field) } else { RatFunc::zero(&field) })
            .collect();
        let image = linalg::mat_vec(&pair.sigma, &ev, &one(&field));
        report.check("evaluation is a module map", image == ev, || format!("sigma: {}", show_vec(&image)));
        for (k, m) in &pair.generators {
            let image = linalg::mat_vec(m, &ev, &one(&field));
            report.check("evaluation is a module map", image.iter().all(|x| x.is_zero()), || {
                format!("d_{k}: {}", show_vec(&image))
            });
        }
        report
    }

    /// `V ⊕ W`, block diagonal.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let field = self.field().clone();
        let (n, m) = (self.rank(), other.rank());
        let block = |a: &Mat<C>, b: &Mat<C>| -> Mat<C> {
            let mut out = vec![vec![RatFunc::zero(&field); n + m]; n + m];
            for r in 0..n {
                out[r][..n].clone_from_slice(&a[r]);
            }
            for r in 0..m {
                out[n + r][n..].clone_from_slice(&b[r]);
            }
            out
        };
        let mut family = BTreeMap::new();
        for &k in self.generators.keys().chain(other.generators.keys()) {
            family.insert(k, block(&self.d_matrix(k)?, &other.d_matrix(k)?));
        }
        Ok(Self::from_parts(&self.ctx, block(&self.sigma, &other.sigma), family))
    }

    /// The module whose solutions are `P x` for solutions `x` of `self`:
    /// `M'(h) = (Σ (h₁ ⇀ P) M(h₂)) P⁻¹` on the generators.
    pub fn gauge(&self, p: &Mat<C>) -> Result<Self> {
        let field = self.field().clone();
        square_of(p, self.rank(), "gauge matrix")?;
        let p_inv = linalg::inverse(p, &one(&field)).ok_or_else(|| Error::Dimension("gauge matrix is singular".into()))?;
        let sigma = self.mul(&self.mul(&entry_sigma(p, 1), &self.sigma), &p_inv);
        let mut family = BTreeMap::new();
        for &n in self.generators.keys() {
            let big = n * self.ctx.order();
            let jet = entry_jet(p, big);
            let mut acc = linalg::mat_scale(&self.identity(), &RatFunc::zero(&field));
            for (i, ji) in jet.iter().enumerate() {
                let j = big - i;
                acc = linalg::mat_add(&acc, &self.mul(&entry_sigma(ji, j as i64), &self.delta_matrix(j)?));
            }
            family.insert(n, self.mul(&acc, &p_inv));
        }
        Ok(Self::from_parts(&self.ctx, sigma, family))
    }

    /// `None` if `x` solves every generating equation, else the failed one.
    pub fn solution_failure(&self, x: &[RatFunc<C>]) -> Option<String> {
        let one = one(self.field());
        if x.len() != self.rank() {
            return Some(format!("expected {} entries, got {}", self.rank(), x.len()));
        }
        let lhs: Vec<RatFunc<C>> = x.iter().map(|e| e.sigma_shift(1)).collect();
        let rhs = linalg::mat_vec(&self.sigma, x, &one);
        if lhs != rhs {
            return Some(format!("sigma equation: {} vs {}", show_vec(&lhs), show_vec(&rhs)));
        }
        for (&n, m) in &self.generators {
            let big = n * self.ctx.order();
            let lhs: Vec<RatFunc<C>> = x.iter().map(|e| delta_ratfunc(big, e)).collect();
            let rhs = linalg::mat_vec(m, x, &one);
            if lhs != rhs {
                return Some(format!("d_{n} equation: {} vs {}", show_vec(&lhs), show_vec(&rhs)));
            }
        }
        None
    }

    /// All solutions with entries `p_i / denom`, `deg p_i ≤ deg_bound`, as a
    /// k-basis from one linear system over `k`.
    pub fn solve(&self, deg_bound: usize, denom: &Poly<C>) -> Result<SolutionSpace<C>> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let field = self.field().clone();
        let rank = self.rank();
        let per = deg_bound + 1;
        let cols = rank * per;
        let den = RatFunc::from_poly(denom.clone()).inv()?;
        let basis: Vec<RatFunc<C>> =
            (0..per).map(|m| &RatFunc::from_poly(Poly::monomial(field.one(), m)) * &den).collect();

        // One block of equations per generator: entry r of op(x) − M x.
        let mut ops: Vec<(Box<dyn Fn(&RatFunc<C>) -> RatFunc<C>>, &Mat<C>)> =
            vec![(Box::new(|f: &RatFunc<C>| f.sigma_shift(1)), &self.sigma)];
        for (&n, m) in &self.generators {
            let big = n * self.ctx.order();
            ops.push((Box::new(move |f: &RatFunc<C>| delta_ratfunc(big, f)), m));
        }
        let mut rows: Matrix<Scalar<C>> = Vec::new();
        for (op, m) in &ops {
            let images: Vec<RatFunc<C>> = basis.iter().map(&op).collect();
            for r in 0..rank {
                let column: Vec<RatFunc<C>> = (0..cols)
                    .map(|c| {
                        let (i, deg) = (c / per, c % per);
                        let own = if i == r { images[deg].clone() } else { RatFunc::zero(&field) };
                        &own - &(&m[r][i] * &basis[deg])
                    })
                    .collect();
                rows.extend(coefficient_rows(&field, &column));
            }
        }
        let kernel = linalg::nullspace(&rows, cols, &field.one());
        let vectors = kernel
            .into_iter()
            .map(|v| {
                (0..rank)
                    .map(|i| {
                        let coeffs = v[i * per..(i + 1) * per].to_vec();
                        &RatFunc::from_poly(Poly::from_coeffs(&field, coeffs)) * &den
                    })
                    .collect()
            })
            .collect();
        Ok(SolutionSpace { rank, vectors })
    }

    /// Checks that `X` is a fundamental solution matrix over `K`.
    pub fn verify_fundamental_matrix(&self, x: &Mat<C>) -> Report {
        let field = self.field();
        let mut report = Report::new("fundmat", field.to_string(), None);
        let n = self.rank();
        let square = x.len() == n && x.iter().all(|r| r.len() == n);
        report.check("X is square of the module rank", square, || format!("rank {n}, X has {} rows", x.len()));
        if !square {
            return report;
        }
        let det = linalg::det(x, &one(field));
        report.check("det X nonzero", !det.is_zero(), || "det X = 0".into());
        let cols = linalg::transpose(x);
        let mut all = true;
        for (j, col) in cols.iter().enumerate() {
            let fail = self.solution_failure(col);
            all &= fail.is_none();
            report.check("every column is a solution", fail.is_none(), || format!("column {j}: {}", fail.unwrap_or_default()));
        }
        report.check("V splits over K; columns span a k-space of dimension n", all && !det.is_zero(), || {
            "not a fundamental matrix".into()
        });
        report
    }

    pub fn to_file(&self) -> ModuleFile {
        let show = |m: &Mat<C>| linalg::map_entries(m, |x| x.to_string());
        ModuleFile {
            schema: SCHEMA_VERSION,
            characteristic: C::CHARACTERISTIC,
            order: self.field().order(),
            rank: self.rank(),
            sigma: show(&self.sigma),
            d1: show(&self.generators[&1]),
            family: self.generators.iter().filter(|(n, _)| **n != 1).map(|(n, m)| (n.to_string(), show(m))).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("module serializes");
        s.push('\n');
        s
    }

    pub fn from_file(ctx: &Arc<ScriptH<C>>, file: &ModuleFile) -> Result<Self> {
        if file.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!("unsupported schema {}", file.schema)));
        }
        if file.characteristic != C::CHARACTERISTIC {
            return Err(Error::Schema(format!(
                "characteristic {} does not match the field ({})",
                file.characteristic,
                C::CHARACTERISTIC
            )));
        }
        if file.order != ctx.field().order() {
            return Err(Error::Schema(format!("N = {} does not match the field (N = {})", file.order, ctx.field().order())));
        }
        let read = |what: &str, m: &[Vec<String>]| -> Result<Mat<C>> {
            if m.len() != file.rank || m.iter().any(|r| r.len() != file.rank) {
                return Err(Error::Schema(format!("{what} must be {0}x{0}", file.rank)));
            }
            m.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse_ratfunc_in(ctx, s).map_err(|e| Error::Schema(format!("{what}: '{s}': {e}"))))
                        .collect()
                })
                .collect()
        };
        let mut family = BTreeMap::from([(1, read("d1", &file.d1)?)]);
        for (k, m) in &file.family {
            let n: usize = k.parse().map_err(|_| Error::Schema(format!("family key '{k}' is not an index")))?;
            family.insert(n, read(&format!("d_{k}"), m)?);
        }
        Self::with_family(ctx, read("sigma", &file.sigma)?, family).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_json(ctx: &Arc<ScriptH<C>>, src: &str) -> Result<Self> {
        let file: ModuleFile = serde_json::from_str(src).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_file(ctx, &file)
    }
}

/// Splits `Σ_c x_c · column[c] = 0` (entries in `K`) into linear equations
/// over `k`, one per power of `t` after clearing denominators.
fn coefficient_rows<C: PrimeField>(field: &Arc<FieldSpec<C>>, column: &[RatFunc<C>]) -> Matrix<Scalar<C>> {
    let mut lcm = Poly::one(field);
    for x in column.iter().filter(|x| !x.is_zero()) {
        let g = lcm.gcd(x.denom());
        lcm = &lcm * &x.denom().exact_div(&g).expect("gcd divides");
    }
    let nums: Vec<Poly<C>> = column
        .iter()
        .map(|x| if x.is_zero() { Poly::zero(field) } else { x.numer() * &lcm.exact_div(x.denom()).expect("lcm") })
        .collect();
    let top = nums.iter().filter_map(|p| p.degree()).max();
    match top {
        None => Vec::new(),
        Some(top) => (0..=top).map(|d| nums.iter().map(|p| p.coeff(d)).collect()).collect(),
    }
}

fn show<C: PrimeField>(m: &Mat<C>) -> String {
    let rows: Vec<String> = m.iter().map(|r| show_vec(r)).collect();
    format!("[{}]", rows.join(", "))
}

fn show_vec<C: PrimeField>(v: &[RatFunc<C>]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

/// A k-basis of solutions in `K^n`.
#[derive(Debug, Clone)]
pub struct SolutionSpace<C: PrimeField> {
    pub rank: usize,
    pub vectors: Vec<Vec<RatFunc<C>>>,
}

impl<C: PrimeField> SolutionSpace<C> {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn within_rank_bound(&self) -> bool {
        self.dim() <= self.rank
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.vectors.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect()
    }

    pub fn to_json(&self) -> String {
        let body = serde_json::json!({
            "schema": SCHEMA_VERSION,
            "rank": self.rank,
            "dimension": self.dim(),
            "basis": self.to_strings(),
        });
        let mut s = serde_json::to_string_pretty(&body).expect("solutions serialize");
        s.push('\n');
        s
    }
}

/// On-disk module format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub schema: u32,
    pub characteristic: u64,
    #[serde(rename = "N")]
    pub order: u32,
    pub rank: usize,
    pub sigma: Vec<Vec<String>>,
    pub d1: Vec<Vec<String>>,
    /// `M(d_n)` for generators beyond `d_1` (characteristic `p` only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub family: BTreeMap<String, Vec<Vec<String>>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn ctx(n: u32) -> Arc<ScriptH<Rational>> {
        ScriptH::new(&FieldSpec::new(n).unwrap())
    }

    fn t(h: &Arc<ScriptH<Rational>>) -> RatFunc<Rational> {
        RatFunc::t(h.field())
    }

    #[test]
    fn unit_and_v_t_validate() {
        for n in [2, 3, 4] {
            let h = ctx(n);
            let unit = QDiffModule::unit(&h);
            assert!(unit.validate(2 * n as usize).passed());
            let vt = QDiffModule::v_t(&h);
            let r = vt.validate(2 * n as usize);
            assert!(r.passed(), "{}", r.to_text());
            assert_eq!(vt.delta_matrix(1).unwrap(), vec![vec![t(&h).inv().unwrap()]]);
        }
    }

    #[test]
    fn tampering_is_detected() {
        let h = ctx(3);
        let f = h.field();
        let m = QDiffModule::new(&h, vec![vec![RatFunc::one(f)]], vec![vec![t(&h)]]).unwrap();
        let r = m.validate(6);
        assert!(!r.passed());
        assert!(r.get("delta(k) sigma = q^k sigma delta(k)").unwrap().witness.is_some());
        let m = QDiffModule::new(&h, vec![vec![RatFunc::constant(f.from_i64(2))]], vec![vec![RatFunc::zero(f)]]).unwrap();
        assert!(!m.validate(6).passed());
    }

    #[test]
    fn solutions_of_basic_modules() {
        let h = ctx(3);
        let f = h.field();
        let one = Poly::one(f);
        let s = QDiffModule::unit(&h).solve(3, &one).unwrap();
        assert_eq!(s.to_strings(), vec![vec!["1".to_string()]]);
        let vt = QDiffModule::v_t(&h);
        assert_eq!(vt.solve(3, &one).unwrap().to_strings(), vec![vec!["t".to_string()]]);
        let vt2 = vt.tensor(&vt).unwrap();
        assert!(vt2.validate(6).passed());
        assert_eq!(vt2.solve(3, &one).unwrap().to_strings(), vec![vec!["t^2".to_string()]]);
        let dual = vt.dual().unwrap();
        assert!(dual.validate(6).passed());
        assert_eq!(dual.sigma()[0][0], RatFunc::constant(f.q_pow(-1)));
        let inv_t = dual.solve(0, &Poly::t(f)).unwrap();
        assert_eq!(inv_t.to_strings(), vec![vec!["1/t".to_string()]]);
    }

    fn gauge_twisted(h: &Arc<ScriptH<Rational>>) -> QDiffModule<Rational> {
        let f = h.field();
        let c = |v: i64| RatFunc::constant(f.from_i64(v));
        let p = vec![vec![&t(h) + &c(1), c(2)], vec![&t(h) * &t(h), &t(h) - &c(3)]];
        QDiffModule::v_t(h).direct_sum(&QDiffModule::unit(h)).unwrap().gauge(&p).unwrap()
    }

    #[test]
    fn gauge_twisted_constructions() {
        for n in [2, 3] {
            let h = ctx(n);
            let w = gauge_twisted(&h);
            let kb = 2 * n as usize;
            assert!(w.validate(kb).passed(), "{}", w.validate(kb).to_text());
            let sols = w.solve(3, &Poly::one(h.field())).unwrap();
            assert_eq!(sols.dim(), 2);
            let d = w.dual().unwrap();
            assert!(d.validate(kb).passed(), "{}", d.validate(kb).to_text());
            let ev = w.check_evaluation();
            assert!(ev.passed(), "{}", ev.to_text());
            assert!(w.tensor(&d).unwrap().validate(kb).passed());
        }
    }

    #[test]
    fn char_p_family() {
        let h = ScriptH::new(&FieldSpec::<crate::Fp<5>>::new(2).unwrap());
        let f = h.field();
        let vt = QDiffModule::v_t(&h);
        assert!(vt.validate(4).passed());
        assert!(vt.d_matrix(5).is_err());
        assert!(!vt.validate(10).passed());
        let zero = vec![vec![RatFunc::zero(f)]];
        let full = QDiffModule::with_family(&h, vt.sigma().clone(), BTreeMap::from([(1, zero.clone()), (5, zero)])).unwrap();
        assert!(full.validate(12).passed());
        assert_eq!(full.solve(6, &Poly::one(f)).unwrap().to_strings(), vec![vec!["t".to_string()]]);
    }

    #[test]
    fn fundamental_matrices() {
        let h = ctx(2);
        let vt = QDiffModule::v_t(&h);
        assert!(vt.verify_fundamental_matrix(&vec![vec![t(&h)]]).passed());
        let t2 = &t(&h) * &t(&h);
        let r = vt.verify_fundamental_matrix(&vec![vec![t2]]);
        assert!(!r.passed());
        assert!(r.get("every column is a solution").unwrap().witness.as_ref().unwrap().contains("sigma"));
    }

    #[test]
    fn json_round_trip() {
        let h = ctx(4);
        let vt = QDiffModule::v_t(&h);
        let m = vt.tensor(&vt.dual().unwrap()).unwrap();
        let back = QDiffModule::from_json(&h, &m.to_json()).unwrap();
        assert_eq!(back.to_file(), m.to_file());
        assert!(matches!(QDiffModule::from_json(&h, "{}"), Err(Error::Schema(_))));
        assert!(matches!(QDiffModule::from_json(&ctx(3), &m.to_json()), Err(Error::Schema(_))));
    }
}
