//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Scale: N ∈ {2, 3, 4, 6} over Q, plus F_5 with N = 3.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use iterq::cocycle::{solve_nu, verify_dprime, DPrimeSuite};
use iterq::hopf::verify_hopf_axioms;
use iterq::hscript::{check_cocommutative, separation_check, verify_action, verify_relations, ScriptH};
use iterq::linalg;
use iterq::qcomb::verify_qcomb;
use iterq::qmod::QDiffModule;
use iterq::qop::{verify_operator_axioms, OperatorSuite};
use iterq::random::Sampler;
use iterq::report::Report;
use iterq::{FieldSpec, Fp, Poly, PrimeField, RatFunc, Rational};

const SEED: u64 = 0x5eed_2024;
const ORDERS: [u32; 4] = [2, 3, 4, 6];
const OPERATOR_BUDGET: Duration = Duration::from_secs(30);
const COCYCLE_BUDGET: Duration = Duration::from_secs(60);

/// Outcome of one criterion over every field instance.
struct Criterion {
    ok: bool,
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { ok: true, notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, note: impl FnOnce() -> String) {
        if !ok {
            self.ok = false;
            self.notes.push(note());
        }
    }

    fn report(&mut self, label: &str, report: &Report, identities: &[&str]) {
        for id in identities {
            self.require(report.get(id).is_some(), || format!("{label}: identity '{id}' not checked"));
        }
        for f in report.failures() {
            self.notes.push(format!("{label}: {} [{}]", f.identity, f.witness.clone().unwrap_or_default()));
            self.ok = false;
        }
    }
}

fn label<C: PrimeField>(n: u32) -> String {
    match C::CHARACTERISTIC {
        0 => format!("N={n}"),
        p => format!("F_{p} N={n}"),
    }
}

fn instances() -> Vec<(u64, u32)> {
    ORDERS.iter().map(|&n| (0, n)).chain([(5, 3)]).collect()
}

macro_rules! each_field {
    ($crit:expr, $f:ident) => {
        for (p, n) in instances() {
            match p {
                0 => $f::<Rational>(&FieldSpec::new(n).unwrap(), $crit),
                5 => $f::<Fp<5>>(&FieldSpec::new(n).unwrap(), $crit),
                _ => unreachable!(),
            }
        }
    };
}

fn operators<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let lab = label::<C>(field.order());
    let n = field.order() as usize;
    let start = Instant::now();
    let r = verify_operator_axioms(field, OperatorSuite { deg_bound: 5, k_bound: 2 * n, trials: 50, seed: SEED });
    let took = start.elapsed();
    c.report(
        &lab,
        &r,
        &[
            "delta(0) = id",
            "delta(1) = (sigma - 1)/((q - 1) t)",
            "sigma multiplicative",
            "twisted Leibniz",
            "iteration rule",
            "flipped Leibniz",
            "sigma^N = id",
            "k-linear",
            "additivity",
            "delta(1)(t) = 1",
            "delta(k)(t) = 0 for k > 1",
            "delta(k) sigma = q^k sigma delta(k)",
            "delta(1)^N = 0",
        ],
    );
    c.require(took < OPERATOR_BUDGET, || format!("{lab}: {took:.1?} over budget"));
    c.notes.push(format!("{lab} {:.1}s", took.as_secs_f64()));
}

fn qcomb<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let r = verify_qcomb(field, 6, 5);
    c.report(&label::<C>(field.order()), &r, &["binom(rN,sN)_q = binom(r,s)", "q-Lucas"]);
}

fn hopf<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let r = verify_hopf_axioms(field, 2 * field.order() as usize);
    c.report(
        &label::<C>(field.order()),
        &r,
        &[
            "coassociativity",
            "left counit",
            "right counit",
            "S(h1) h2 = eps(h)",
            "h1 S(h2) = eps(h)",
            "coproduct multiplicative",
            "not cocommutative at delta(1)",
        ],
    );
}

fn script_structure<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let ctx = ScriptH::new(field);
    let lab = label::<C>(field.order());
    c.report(
        &lab,
        &check_cocommutative(&ctx, 4),
        &["cocommutative", "coassociative", "left counit", "right counit", "coproduct lands in the centralizer"],
    );
    c.report(&lab, &verify_relations(&ctx), &["reduce(xi) = 0", "xi sigma = q sigma xi"]);
}

fn cocycle<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let ctx = ScriptH::new(field);
    let lab = label::<C>(field.order());
    let start = Instant::now();
    c.require(solve_nu(&ctx, 4).is_ok(), || format!("{lab}: solve_nu failed"));
    let r = verify_dprime(&ctx, DPrimeSuite { n_bound: 4, trials: 10, seed: SEED });
    let took = start.elapsed();
    c.report(
        &lab,
        &r,
        &[
            "L is injective",
            "coboundary of nu is tau",
            "coproduct of d'_n",
            "d'_n sigma = sigma d'_n",
            "d'_n x = sum (d'_l -> x) d'_m",
            "d'_l d'_m = binom(l+m, l) d'_(l+m) modulo lower filtration",
            "Leibniz for d'_n",
        ],
    );
    c.require(took < COCYCLE_BUDGET, || format!("{lab}: {took:.1?} over budget"));
    c.notes.push(format!("{lab} {:.1}s", took.as_secs_f64()));
}

fn action<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let ctx = ScriptH::new(field);
    let r = verify_action(&ctx, 50, 4, SEED);
    c.report(&label::<C>(field.order()), &r, &["d_n acts on t^(nN) as 1", "action agrees with the operators"]);
}

fn separation<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let ctx = ScriptH::new(field);
    let n = ctx.order();
    c.report(&label::<C>(field.order()), &separation_check(&ctx, 2, 3 * n), &["basis acts independently"]);
}

fn strings(v: &[Vec<RatFunc<impl PrimeField>>]) -> Vec<Vec<String>> {
    v.iter().map(|x| x.iter().map(|e| e.to_string()).collect()).collect()
}

fn is_constant<C: PrimeField>(f: &RatFunc<C>) -> bool {
    f.as_constant().is_some()
}

fn dot<C: PrimeField>(x: &[RatFunc<C>], y: &[RatFunc<C>]) -> RatFunc<C> {
    x.iter().zip(y).fold(RatFunc::zero(x[0].field()), |acc, (a, b)| &acc + &(a * b))
}

fn kron<C: PrimeField>(x: &[RatFunc<C>], y: &[RatFunc<C>]) -> Vec<RatFunc<C>> {
    x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
}

/// Unit, `V_t`, their tensor products and duals.
fn basic_modules<C: PrimeField>(field: &Arc<FieldSpec<C>>, c: &mut Criterion) {
    let ctx = ScriptH::new(field);
    let lab = label::<C>(field.order());
    let kb = 2 * ctx.order();
    let one = Poly::one(field);
    let unit = QDiffModule::unit(&ctx);
    let vt = QDiffModule::v_t(&ctx);
    c.report(&format!("{lab} unit"), &unit.validate(kb), &[]);
    c.report(&format!("{lab} V_t"), &vt.validate(kb), &[]);
    let s_unit = unit.solve(3, &one).unwrap();
    c.require(strings(&s_unit.vectors) == [["1"]], || format!("{lab}: unit solutions {:?}", s_unit.to_strings()));
    let s_vt = vt.solve(3, &one).unwrap();
    c.require(strings(&s_vt.vectors) == [["t"]], || format!("{lab}: V_t solutions {:?}", s_vt.to_strings()));

    let vt_unit = vt.tensor(&unit).unwrap();
    c.require(vt_unit.to_file() == vt.to_file(), || format!("{lab}: V_t ⊗ unit differs from V_t"));
    let vt2 = vt.tensor(&vt).unwrap();
    c.report(&format!("{lab} V_t⊗V_t"), &vt2.validate(kb), &[]);
    let t = RatFunc::t(field);
    let pointwise = kron(std::slice::from_ref(&t), std::slice::from_ref(&t));
    c.require(vt2.solution_failure(&pointwise).is_none(), || format!("{lab}: t⊗t does not solve V_t⊗V_t"));
    let s_vt2 = vt2.solve(3, &one).unwrap();
    c.require(strings(&s_vt2.vectors) == [["t^2"]], || format!("{lab}: V_t⊗V_t solutions {:?}", s_vt2.to_strings()));

    let dual = vt.dual().unwrap();
    c.report(&format!("{lab} V_t*"), &dual.validate(kb), &[]);
    c.report(&format!("{lab} V_t"), &vt.check_evaluation(), &["evaluation is a module map"]);
    c.require(dual.sigma()[0][0] == RatFunc::constant(field.q_pow(-1)), || format!("{lab}: M*(sigma) != 1/q"));
    let s_dual = dual.solve(2, &Poly::t(field)).unwrap();
    c.require(s_dual.dim() == 1, || format!("{lab}: dual solution dimension {}", s_dual.dim()));
    for y in &s_dual.vectors {
        c.require(is_constant(&dot(y, std::slice::from_ref(&t))), || format!("{lab}: pairing of {} with t not constant", y[0]));
    }
    let dd = dual.dual().unwrap();
    c.report(&format!("{lab} V_t**"), &dd.validate(kb), &[]);
    c.require(dd.solve(2, &one).unwrap().to_strings() == vt.solve(2, &one).unwrap().to_strings(), || {
        format!("{lab}: V_t** solutions differ from V_t")
    });
}

/// Ten gauge twists of `V_t ⊕ unit`, spread over the orders.
fn gauge_family(c: &mut Criterion) {
    let mut sampler_seed = SEED;
    for i in 0..10 {
        let n = ORDERS[i % ORDERS.len()];
        let field = FieldSpec::<Rational>::new(n).unwrap();
        let ctx = ScriptH::new(&field);
        let kb = 2 * n as usize;
        let lab = format!("gauge #{i} N={n}");
        let mut rng = Sampler::new(&field, sampler_seed);
        sampler_seed += 1;
        let one = RatFunc::one(&field);
        let p = loop {
            let p: Vec<Vec<RatFunc<Rational>>> =
                (0..2).map(|_| (0..2).map(|_| RatFunc::from_poly(rng.poly(1))).collect()).collect();
            if !linalg::det(&p, &one).is_zero() {
                break p;
            }
        };
        let base = QDiffModule::v_t(&ctx).direct_sum(&QDiffModule::unit(&ctx)).unwrap();
        let w = base.gauge(&p).unwrap();
        c.report(&lab, &w.validate(kb), &[]);

        // Oracle: P (t, 0) and P (0, 1) solve W.
        let t = RatFunc::t(&field);
        let zero = RatFunc::zero(&field);
        let known = [
            linalg::mat_vec(&p, &[t.clone(), zero.clone()], &one),
            linalg::mat_vec(&p, &[zero.clone(), one.clone()], &one),
        ];
        for x in &known {
            c.require(w.solution_failure(x).is_none(), || format!("{lab}: transported solution fails"));
        }
        let sols = w.solve(3, &Poly::one(&field)).unwrap();
        c.require(sols.within_rank_bound(), || format!("{lab}: dimension {} exceeds rank", sols.dim()));
        c.require(sols.dim() == 2, || format!("{lab}: expected 2 solutions, found {}", sols.dim()));

        let dual = w.dual().unwrap();
        c.report(&format!("{lab} dual"), &dual.validate(kb), &[]);
        c.report(&lab, &w.check_evaluation(), &["evaluation is a module map"]);
        let det = linalg::det(&p, &one);
        let denom = &Poly::t(&field) * det.numer();
        let dual_sols = dual.solve(2, &denom).unwrap();
        c.require(dual_sols.dim() == 2 && dual_sols.within_rank_bound(), || {
            format!("{lab}: dual solution dimension {}", dual_sols.dim())
        });
        for y in &dual_sols.vectors {
            for x in &sols.vectors {
                c.require(is_constant(&dot(y, x)), || format!("{lab}: pairing not constant"));
            }
        }

        let wt = w.tensor(&QDiffModule::v_t(&ctx)).unwrap();
        c.report(&format!("{lab} ⊗ V_t"), &wt.validate(kb), &[]);
        for x in &sols.vectors {
            let prod = kron(x, std::slice::from_ref(&t));
            c.require(wt.solution_failure(&prod).is_none(), || format!("{lab}: x⊗t does not solve W⊗V_t"));
        }
    }
}

fn determinism(c: &mut Criterion) {
    let exe = env!("CARGO_BIN_EXE_iterq");
    let run = |n: &str| {
        Command::new(exe)
            .args(["verify", "all", "--N", n, "--nmax", "2", "--trials", "5", "--format", "json"])
            .output()
            .expect("iterq runs")
    };
    for n in ["2", "3"] {
        let (a, b) = (run(n), run(n));
        c.require(a.status.success() && b.status.success(), || format!("N={n}: verify all failed"));
        c.require(!a.stdout.is_empty() && a.stdout == b.stdout, || format!("N={n}: reports differ"));
    }
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn(&mut Criterion)>)> = vec![
        ("operator suite", Box::new(|c| each_field!(c, operators))),
        ("q-combinatorics", Box::new(|c| each_field!(c, qcomb))),
        ("Hopf algebra H", Box::new(|c| each_field!(c, hopf))),
        ("structure of the quotient bialgebra", Box::new(|c| each_field!(c, script_structure))),
        ("cocycle pipeline", Box::new(|c| each_field!(c, cocycle))),
        ("action coherence", Box::new(|c| each_field!(c, action))),
        ("separation", Box::new(|c| each_field!(c, separation))),
        (
            "modules",
            Box::new(|c| {
                each_field!(c, basic_modules);
                gauge_family(c);
            }),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut c = Criterion::new();
        let start = Instant::now();
        run(&mut c);
        let status = if c.ok { "PASS" } else { "FAIL" };
        all &= c.ok;
        println!("{status} criterion {}: {name} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
        for note in &c.notes {
            println!("     {note}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
