//! The cocycle pipeline producing a cocommutative basis `d'_n` of ℋ.
//!
//! `γ : ℋ → KG` keeps the `d_0` part. The dual cocycle is
//! `τ(d̄_n) = (γ ⊗ γ) Δ(d_n)`, and a cochain `ν` with `ν(d̄_0) = 1` is solved
//! degree by degree from
//!
//! ```text
//! τ(d̄_n) = Σ_{k+l+m=n} (ν(d̄_k) ⊗ 1) Δ(ν⁻¹(d̄_l)) (1 ⊗ ν(d̄_m)).
//! ```
//!
//! At degree `n` the unknown `z = ν(d̄_n)` enters linearly through
//! `L(z) = z ⊗ 1 + 1 ⊗ z − Δ(z)`, which is injective on `KG`. Then
//! `d'_n = Σ_{l+m=n} ν(d̄_l) d_m`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hscript::{probe_functions, ScriptH, ScriptHElem, ScriptHTensor};
use crate::linalg::{self, Matrix};
use crate::prime::PrimeField;
use crate::qcomb::binomial;
use crate::random::Sampler;
use crate::ratfunc::RatFunc;
use crate::report::Report;
use crate::scalar::FieldSpec;

/// `Σ_a x_a σ^a` in `KG`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupAlgElem<C: PrimeField> {
    coeffs: Vec<RatFunc<C>>,
}

/// `Σ x_{a,b} σ^a ⊗ σ^b` in `KG ⊗ KG`, coefficients on the first factor.
#[derive(Clone, PartialEq, Eq)]
pub struct GA2Tensor<C: PrimeField> {
    coeffs: Vec<Vec<RatFunc<C>>>,
}

impl<C: PrimeField> GroupAlgElem<C> {
    pub fn zero(field: &Arc<FieldSpec<C>>) -> Self {
        GroupAlgElem { coeffs: vec![RatFunc::zero(field); field.order() as usize] }
    }

    pub fn one(field: &Arc<FieldSpec<C>>) -> Self {
        Self::sigma(field, 0)
    }

    pub fn sigma(field: &Arc<FieldSpec<C>>, a: i64) -> Self {
        let mut out = Self::zero(field);
        let n = out.coeffs.len() as i64;
        out.coeffs[a.rem_euclid(n) as usize] = RatFunc::one(field);
        out
    }

    pub fn from_coeffs(coeffs: Vec<RatFunc<C>>) -> Self {
        GroupAlgElem { coeffs }
    }

    pub fn coeffs(&self) -> &[RatFunc<C>] {
        &self.coeffs
    }

    fn field(&self) -> &Arc<FieldSpec<C>> {
        self.coeffs[0].field()
    }

    fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Sum of the coefficients.
    pub fn counit(&self) -> RatFunc<C> {
        self.coeffs.iter().fold(RatFunc::zero(self.field()), |acc, c| &acc + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        GroupAlgElem { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        GroupAlgElem { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    /// `(x σ^a)(y σ^b) = x σ_q^a(y) σ^(a+b)`.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order();
        let mut out = Self::zero(self.field());
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let c = &out.coeffs[(a + b) % n] + &(x * &y.sigma_shift(a as i64));
                out.coeffs[(a + b) % n] = c;
            }
        }
        out
    }

    /// `Δ(x σ^a) = x σ^a ⊗ σ^a`.
    pub fn coproduct(&self) -> GA2Tensor<C> {
        let mut out = GA2Tensor::zero(self.field());
        for (a, x) in self.coeffs.iter().enumerate() {
            out.coeffs[a][a] = x.clone();
        }
        out
    }

    /// Whether every coefficient lies in `k(t^N)`.
    pub fn is_invariant(&self) -> bool {
        self.coeffs.iter().all(|c| c.sigma_shift(1) == *c)
    }

    pub fn to_script(&self, ctx: &Arc<ScriptH<C>>) -> ScriptHElem<C> {
        self.to_script_times_d(ctx, 0)
    }

    /// `self · d_m` in ℋ.
    pub fn to_script_times_d(&self, ctx: &Arc<ScriptH<C>>, m: usize) -> ScriptHElem<C> {
        let mut out = ScriptHElem::zero(ctx);
        for (a, x) in self.coeffs.iter().enumerate() {
            out = &out + &ScriptHElem::term(ctx, x.clone(), a as i64, m);
        }
        out
    }
}

impl<C: PrimeField> fmt::Display for GroupAlgElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("({c})*s^{a}"))
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl<C: PrimeField> fmt::Debug for GroupAlgElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupAlgElem({self})")
    }
}

impl<C: PrimeField> GA2Tensor<C> {
    pub fn zero(field: &Arc<FieldSpec<C>>) -> Self {
        let n = field.order() as usize;
        GA2Tensor { coeffs: vec![vec![RatFunc::zero(field); n]; n] }
    }

    pub fn one(field: &Arc<FieldSpec<C>>) -> Self {
        let mut out = Self::zero(field);
        out.coeffs[0][0] = RatFunc::one(field);
        out
    }

    pub fn coeffs(&self) -> &[Vec<RatFunc<C>>] {
        &self.coeffs
    }

    fn field(&self) -> &Arc<FieldSpec<C>> {
        self.coeffs[0][0].field()
    }

    /// `x ⊗ 1`.
    pub fn left(x: &GroupAlgElem<C>) -> Self {
        let mut out = Self::zero(x.field());
        for (a, c) in x.coeffs.iter().enumerate() {
            out.coeffs[a][0] = c.clone();
        }
        out
    }

    /// `1 ⊗ x`.
    pub fn right(x: &GroupAlgElem<C>) -> Self {
        let mut out = Self::zero(x.field());
        for (b, c) in x.coeffs.iter().enumerate() {
            out.coeffs[0][b] = c.clone();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        GA2Tensor {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-RatFunc::one(self.field())))
    }

    pub fn scale(&self, x: &RatFunc<C>) -> Self {
        GA2Tensor { coeffs: self.coeffs.iter().map(|r| r.iter().map(|c| x * c).collect()).collect() }
    }

    /// Factorwise product; the coefficients of the right factor are moved
    /// past `σ^a` of the left one.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = Self::zero(self.field());
        for a in 0..n {
            for b in 0..n {
                let x = &self.coeffs[a][b];
                if x.is_zero() {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        let y = &other.coeffs[c][d];
                        if y.is_zero() {
                            continue;
                        }
                        let cell = &mut out.coeffs[(a + c) % n][(b + d) % n];
                        *cell = &*cell + &(x * &y.sigma_shift(a as i64));
                    }
                }
            }
        }
        out
    }

    /// `(ε ⊗ ε)`.
    pub fn counit(&self) -> RatFunc<C> {
        self.coeffs.iter().flatten().fold(RatFunc::zero(self.field()), |acc, c| &acc + c)
    }

    pub fn is_invariant(&self) -> bool {
        self.coeffs.iter().flatten().all(|c| c.sigma_shift(1) == *c)
    }

    /// Conjugation `x ⊗ y ↦ σxσ⁻¹ ⊗ σyσ⁻¹`.
    pub fn conjugate(&self) -> Self {
        GA2Tensor { coeffs: self.coeffs.iter().map(|r| r.iter().map(|c| c.sigma_shift(1)).collect()).collect() }
    }
}

impl<C: PrimeField> fmt::Display for GA2Tensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, row) in self.coeffs.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    parts.push(format!("({c})*(s^{a} ⊗ s^{b})"));
                }
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl<C: PrimeField> fmt::Debug for GA2Tensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GA2Tensor({self})")
    }
}

/// `γ`: the `d_0` component.
pub fn gamma_project<C: PrimeField>(x: &ScriptHElem<C>) -> GroupAlgElem<C> {
    GroupAlgElem::from_coeffs(x.gamma())
}

/// `(γ ⊗ γ)` of a tensor in ℋ ⊗ ℋ.
fn gamma2<C: PrimeField>(x: &ScriptHTensor<C>) -> GA2Tensor<C> {
    let mut out = GA2Tensor::zero(x.field());
    for (((a, m), (b, n)), c) in x.terms() {
        if m == 0 && n == 0 {
            out.coeffs[a as usize][b as usize] = c.clone();
        }
    }
    out
}

/// `γ⁻¹(σ^a d_n)` for `n ≤ n_bound`, indexed `[n][a]`, from
/// `Σ γ⁻¹(h₁) γ(h₂) = ε(h)`. The only term of `Δ(σ^a d_n)` with a left leg
/// of filtration `n` and a right leg in `KG` is `σ^a d_n ⊗ σ^a`.
pub fn conv_inverse_gamma<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n_bound: usize) -> Result<Vec<Vec<GroupAlgElem<C>>>> {
    let field = ctx.field();
    let order = ctx.order();
    let mut table: Vec<Vec<GroupAlgElem<C>>> = Vec::new();
    for n in 0..=n_bound {
        let mut row = Vec::new();
        for a in 0..order {
            let dx = ScriptHElem::basis(ctx, a as i64, n).coproduct();
            let mut acc = if n == 0 { GroupAlgElem::one(field) } else { GroupAlgElem::zero(field) };
            let mut leading = false;
            for (((b, l), (e, m)), c) in dx.terms() {
                if m != 0 {
                    continue;
                }
                if l == n {
                    if (b as usize, e as usize) != (a, a) || !c.is_one() {
                        return Err(Error::Internal("filtration not respected".into()));
                    }
                    leading = true;
                    continue;
                }
                if l > n {
                    return Err(Error::Internal("filtration not respected".into()));
                }
                let g = table[l][b as usize].mul(&GroupAlgElem::sigma(field, e as i64));
                acc = acc.sub(&GroupAlgElem::from_coeffs(g.coeffs.iter().map(|x| c * x).collect()));
            }
            if !leading {
                return Err(Error::Internal("filtration not respected".into()));
            }
            row.push(acc.mul(&GroupAlgElem::sigma(field, -(a as i64))));
        }
        table.push(row);
    }
    Ok(table)
}

/// `Σ f(h₁) g(h₂)` over `Δ(h)`, for maps given on `σ^a d_n` as `[n][a]`.
fn convolve<C: PrimeField>(
    h: &ScriptHElem<C>,
    f: &dyn Fn(u32, usize) -> GroupAlgElem<C>,
    g: &dyn Fn(u32, usize) -> GroupAlgElem<C>,
) -> GroupAlgElem<C> {
    let mut acc = GroupAlgElem::zero(h.field());
    for (((a, l), (b, m)), c) in h.coproduct().terms() {
        let v = f(a, l).mul(&g(b, m));
        acc = acc.add(&GroupAlgElem::from_coeffs(v.coeffs.iter().map(|x| c * x).collect()));
    }
    acc
}

/// `τ(d̄_n) = (γ ⊗ γ) Δ(d_n)`, checked to have coefficients in `k(t^N)`
/// and to be conjugation invariant.
pub fn tau_cocycle<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n: usize) -> Result<GA2Tensor<C>> {
    let tau = gamma2(&ScriptHElem::d(ctx, n).coproduct());
    if !tau.is_invariant() || tau.conjugate() != tau {
        return Err(Error::Internal("tau not invariant".into()));
    }
    Ok(tau)
}

/// The cochain `ν` with `ν(d̄_0) = 1`, its convolution inverse, and `τ`.
#[derive(Clone, Debug)]
pub struct NuCochain<C: PrimeField> {
    pub nu: Vec<GroupAlgElem<C>>,
    pub nu_inv: Vec<GroupAlgElem<C>>,
    pub tau: Vec<GA2Tensor<C>>,
}

/// Matrix of `L(z) = z ⊗ 1 + 1 ⊗ z − Δ(z)` in the bases `σ^a` and
/// `σ^a ⊗ σ^b` (row `a N + b`).
pub fn l_matrix<C: PrimeField>(field: &Arc<FieldSpec<C>>) -> Matrix<RatFunc<C>> {
    let n = field.order() as usize;
    let mut m = vec![vec![RatFunc::zero(field); n]; n * n];
    let one = RatFunc::one(field);
    for a in 0..n {
        m[a * n][a] = &m[a * n][a] + &one;
        m[a][a] = &m[a][a] + &one;
        m[a * n + a][a] = &m[a * n + a][a] - &one;
    }
    m
}

/// `∂ν(d̄_n)` from the first `n + 1` values of `ν` and `ν⁻¹`.
fn coboundary<C: PrimeField>(nu: &[GroupAlgElem<C>], nu_inv: &[GroupAlgElem<C>], n: usize) -> GA2Tensor<C> {
    let field = nu[0].field();
    let mut acc = GA2Tensor::zero(field);
    for k in 0..=n {
        for l in 0..=n - k {
            let m = n - k - l;
            let term = GA2Tensor::left(&nu[k]).mul(&nu_inv[l].coproduct()).mul(&GA2Tensor::right(&nu[m]));
            acc = acc.add(&term);
        }
    }
    acc
}

/// `ν⁻¹(d̄_n) = −Σ_{l=1..n} ν(d̄_l) ν⁻¹(d̄_(n−l))`.
fn inverse_step<C: PrimeField>(nu: &[GroupAlgElem<C>], nu_inv: &[GroupAlgElem<C>], n: usize) -> GroupAlgElem<C> {
    let mut acc = GroupAlgElem::zero(nu[0].field());
    for l in 1..=n {
        acc = acc.sub(&nu[l].mul(&nu_inv[n - l]));
    }
    acc
}

/// Solves `∂ν = τ` through degree `n_max`.
pub fn solve_nu<C: PrimeField>(ctx: &Arc<ScriptH<C>>, n_max: usize) -> Result<NuCochain<C>> {
    let field = ctx.field();
    let n = ctx.order();
    let lm = l_matrix(field);
    let one = RatFunc::one(field);
    let mut nu = vec![GroupAlgElem::one(field)];
    let mut nu_inv = vec![GroupAlgElem::one(field)];
    let mut tau = vec![tau_cocycle(ctx, 0)?];
    for deg in 1..=n_max {
        let t = tau_cocycle(ctx, deg)?;
        // With ν(d̄_deg) = 0 the coboundary is the known part.
        nu.push(GroupAlgElem::zero(field));
        nu_inv.push(inverse_step(&nu, &nu_inv, deg));
        let known = coboundary(&nu, &nu_inv, deg);
        let rhs = t.sub(&known);
        let b: Vec<RatFunc<C>> = rhs.coeffs.iter().flatten().cloned().collect();
        let z = linalg::solve(&lm, &b, n, &one).ok_or(Error::CohomologySolve(deg))?;
        nu[deg] = GroupAlgElem::from_coeffs(z);
        nu_inv[deg] = inverse_step(&nu, &nu_inv, deg);
        tau.push(t);
    }
    Ok(NuCochain { nu, nu_inv, tau })
}

/// `d'_n = Σ_{l+m=n} ν(d̄_l) d_m`.
pub fn d_prime<C: PrimeField>(ctx: &Arc<ScriptH<C>>, nu: &NuCochain<C>) -> Vec<ScriptHElem<C>> {
    (0..nu.nu.len())
        .map(|n| {
            (0..=n).fold(ScriptHElem::zero(ctx), |acc, l| &acc + &nu.nu[l].to_script_times_d(ctx, n - l))
        })
        .collect()
}

/// Bounds for the `d'` suite.
#[derive(Debug, Clone, Copy)]
pub struct DPrimeSuite {
    pub n_bound: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Runs the pipeline to `n_bound` and checks every stage: `γ⁻¹`, `τ`, the
/// solve for `ν`, and the five families of `d'` identities.
pub fn verify_dprime<C: PrimeField>(ctx: &Arc<ScriptH<C>>, cfg: DPrimeSuite) -> Report {
    let field = ctx.field();
    let mut report = Report::new("dprime", field.to_string(), Some(cfg.seed));
    let nb = cfg.n_bound;

    let lm = l_matrix(field);
    let rank = linalg::rank(&lm);
    report.check("L is injective", rank == ctx.order(), || format!("rank {rank}"));

    match conv_inverse_gamma(ctx, nb) {
        Ok(inv) => {
            let gamma = |a: u32, n: usize| {
                if n == 0 {
                    GroupAlgElem::sigma(field, a as i64)
                } else {
                    GroupAlgElem::zero(field)
                }
            };
            let ginv = |a: u32, n: usize| inv[n][a as usize].clone();
            for n in 0..=nb {
                for a in 0..ctx.order() {
                    let h = ScriptHElem::basis(ctx, a as i64, n);
                    let want = if n == 0 { GroupAlgElem::one(field) } else { GroupAlgElem::zero(field) };
                    let l = convolve(&h, &ginv, &gamma);
                    report.check("gamma^-1 * gamma = eps", l == want, || format!("a={a}, n={n}: {l}"));
                    let r = convolve(&h, &gamma, &ginv);
                    report.check("gamma * gamma^-1 = eps", r == want, || format!("a={a}, n={n}: {r}"));
                }
            }
        }
        Err(e) => report.check("gamma^-1 * gamma = eps", false, || e.to_string()),
    }

    let nu = match solve_nu(ctx, nb) {
        Ok(nu) => nu,
        Err(e) => {
            report.check("nu solves the cocycle equation", false, || e.to_string());
            return report;
        }
    };
    report.check("tau(d_0) = 1 (x) 1", nu.tau[0] == GA2Tensor::one(field), || nu.tau[0].to_string());
    report.check("nu(d_0) = 1", nu.nu[0] == GroupAlgElem::one(field), || nu.nu[0].to_string());
    for n in 0..=nb {
        let eps = if n == 0 { RatFunc::one(field) } else { RatFunc::zero(field) };
        let te = nu.tau[n].counit();
        report.check("(eps (x) eps) tau = eps", te == eps, || format!("n={n}: {te}"));
        let ne = nu.nu[n].counit();
        report.check("eps nu = eps", ne == eps, || format!("n={n}: {ne}"));
        report.check("nu has coefficients in k(t^N)", nu.nu[n].is_invariant(), || format!("n={n}"));
        let cb = coboundary(&nu.nu, &nu.nu_inv, n);
        report.check("coboundary of nu is tau", cb == nu.tau[n], || format!("n={n}: {cb} vs {}", nu.tau[n]));
        let mut conv = GroupAlgElem::zero(field);
        for l in 0..=n {
            conv = conv.add(&nu.nu[l].mul(&nu.nu_inv[n - l]));
        }
        let want = if n == 0 { GroupAlgElem::one(field) } else { GroupAlgElem::zero(field) };
        report.check("nu * nu^-1 = eps", conv == want, || format!("n={n}"));
    }
    let again = solve_nu(ctx, nb).map(|x| x.nu == nu.nu).unwrap_or(false);
    report.check("nu is deterministic", again, String::new);

    let dp = d_prime(ctx, &nu);
    check_dprime_table(ctx, &dp, &mut report, cfg);
    report
}

fn check_dprime_table<C: PrimeField>(
    ctx: &Arc<ScriptH<C>>,
    dp: &[ScriptHElem<C>],
    report: &mut Report,
    cfg: DPrimeSuite,
) {
    let field = ctx.field();
    let nb = dp.len() - 1;
    let sigma = ScriptHElem::sigma(ctx, 1);
    report.check("d'_0 = 1", dp[0] == ScriptHElem::one(ctx), || dp[0].to_string());

    for (n, d) in dp.iter().enumerate() {
        let lower = d - &ScriptHElem::d(ctx, n);
        let unitri = lower.filtration().is_none_or(|f| f < n);
        report.check("d'_n = d_n modulo lower filtration", unitri, || format!("n={n}: {d}"));

        let mut want = ScriptHTensor::zero(ctx);
        for l in 0..=n {
            want = &want + &ScriptHTensor::pure(&dp[l], &dp[n - l]);
        }
        let got = d.coproduct();
        report.check("coproduct of d'_n", got == want, || format!("n={n}: {got}"));
        let eps = d.counit();
        let ok = if n == 0 { eps.is_one() } else { eps.is_zero() };
        report.check("counit of d'_n", ok, || format!("n={n}: {eps}"));

        report.check("d'_n sigma = sigma d'_n", d * &sigma == &sigma * d, || format!("n={n}"));

        for x in probe_functions(field) {
            let lhs = d * &ScriptHElem::func(ctx, x.clone());
            let mut rhs = ScriptHElem::zero(ctx);
            for l in 0..=n {
                rhs = &rhs + &dp[n - l].scale(&dp[l].act(&x));
            }
            report.check("d'_n x = sum (d'_l -> x) d'_m", lhs == rhs, || format!("n={n}, x = {x}"));
        }
    }

    for l in 0..=nb {
        for m in 0..=nb - l {
            let prod = &dp[l] * &dp[m];
            let c = RatFunc::constant(binomial(field, (l + m) as u64, l as u64));
            let diff = &prod - &dp[l + m].scale(&c);
            let ok = diff.filtration().is_none_or(|f| f < l + m);
            report.check("d'_l d'_m = binom(l+m, l) d'_(l+m) modulo lower filtration", ok, || {
                format!("l={l}, m={m}: {diff}")
            });
        }
    }

    let mut rng = Sampler::new(field, cfg.seed);
    for trial in 0..cfg.trials {
        let x = rng.ratfunc(2);
        let y = rng.ratfunc(2);
        let ax: Vec<RatFunc<C>> = dp.iter().map(|d| d.act(&x)).collect();
        let ay: Vec<RatFunc<C>> = dp.iter().map(|d| d.act(&y)).collect();
        let xy = &x * &y;
        for (n, d) in dp.iter().enumerate() {
            let lhs = d.act(&xy);
            let rhs = (0..=n).fold(RatFunc::zero(field), |acc, l| &acc + &(&ax[l] * &ay[n - l]));
            report.check("Leibniz for d'_n", lhs == rhs, || format!("trial {trial}, n={n}, x = {x}, y = {y}"));
        }
    }
}

#[derive(Serialize)]
struct NuJson {
    schema: u32,
    field: String,
    nu: Vec<Vec<String>>,
    tau: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct DPrimeJson {
    schema: u32,
    field: String,
    d_prime: Vec<String>,
}

/// JSON export of `ν` (and `τ`): coefficient strings indexed `[n][a]`.
pub fn nu_to_json<C: PrimeField>(field: &Arc<FieldSpec<C>>, nu: &NuCochain<C>) -> serde_json::Value {
    let doc = NuJson {
        schema: crate::report::SCHEMA_VERSION,
        field: field.to_string(),
        nu: nu.nu.iter().map(|g| g.coeffs.iter().map(|c| c.to_string()).collect()).collect(),
        tau: nu
            .tau
            .iter()
            .map(|t| t.coeffs.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect())
            .collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

/// JSON export of the `d'_n` in the text format of ℋ.
pub fn dprime_to_json<C: PrimeField>(field: &Arc<FieldSpec<C>>, dp: &[ScriptHElem<C>]) -> serde_json::Value {
    let doc = DPrimeJson {
        schema: crate::report::SCHEMA_VERSION,
        field: field.to_string(),
        d_prime: dp.iter().map(|d| d.to_string()).collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn ctx(n: u32) -> Arc<ScriptH<Rational>> {
        ScriptH::new(&FieldSpec::new(n).unwrap())
    }

    #[test]
    fn gamma_of_basis() {
        let h = ctx(3);
        let f = h.field().clone();
        assert_eq!(gamma_project(&ScriptHElem::sigma(&h, 2)), GroupAlgElem::sigma(&f, 2));
        assert!(gamma_project(&ScriptHElem::d(&h, 1)).is_zero());
    }

    #[test]
    fn tau_at_zero_is_unit() {
        let h = ctx(3);
        assert_eq!(tau_cocycle(&h, 0).unwrap(), GA2Tensor::one(h.field()));
        assert!(tau_cocycle(&h, 1).unwrap().is_invariant());
    }

    #[test]
    fn l_has_full_rank() {
        for n in 2..=6 {
            let f = FieldSpec::<Rational>::new(n).unwrap();
            assert_eq!(linalg::rank(&l_matrix(&f)), n as usize);
        }
    }

    #[test]
    fn nu_is_normalized() {
        let h = ctx(2);
        let nu = solve_nu(&h, 3).unwrap();
        assert_eq!(nu.nu[0], GroupAlgElem::one(h.field()));
        for n in 1..=3 {
            assert!(nu.nu[n].counit().is_zero());
        }
    }

    #[test]
    fn first_d_prime_is_primitive() {
        let h = ctx(3);
        let nu = solve_nu(&h, 1).unwrap();
        let dp = d_prime(&h, &nu);
        let one = ScriptHElem::one(&h);
        let want = &ScriptHTensor::pure(&dp[1], &one) + &ScriptHTensor::pure(&one, &dp[1]);
        assert_eq!(dp[1].coproduct(), want);
    }

    #[test]
    fn suite_passes_for_small_orders() {
        for n in [2, 3] {
            let r = verify_dprime(&ctx(n), DPrimeSuite { n_bound: 3, trials: 3, seed: 5 });
            assert!(r.passed(), "{}", r.to_text());
        }
    }
}
