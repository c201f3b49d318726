//! `iterq`: field setup, operator application, verification suites, the
//! `d'` basis and q-difference module operations.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use iterq::cocycle::{d_prime, dprime_to_json, nu_to_json, solve_nu, verify_dprime, DPrimeSuite};
use iterq::hopf::verify_hopf_axioms;
use iterq::hscript::{verify_hscript, ScriptH};
use iterq::parse::{parse_ratfunc_in, parse_script};
use iterq::qcomb::verify_qcomb;
use iterq::qmod::{ModuleFile, QDiffModule};
use iterq::qop::{verify_operator_axioms, OperatorSuite};
use iterq::report::Report;
use iterq::{Error, FieldSpec, Fp, PrimeField, RatFunc, Rational};

const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Parser)]
#[command(name = "iterq", version, about = "Iterative q-difference operators at a root of unity")]
struct Cli {
    /// Characteristic of the prime field: 0 or a prime up to 13.
    #[arg(long = "char", global = true, default_value_t = 0)]
    characteristic: u64,
    /// Order of the root of unity q.
    #[arg(long = "N", global = true, default_value_t = 2)]
    order: u32,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the coefficient field k = k0(q).
    Field,
    /// Apply an operator word to a rational function.
    Apply { expr: String, function: String },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Compute the cocycle solution and the cocommutative basis d'_n.
    Dprime {
        #[arg(long, default_value_t = 3)]
        nmax: usize,
    },
    /// Operations on q-difference module files.
    Module {
        #[command(subcommand)]
        action: ModuleAction,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Qcomb,
    Qop,
    Hopf,
    Hscript,
    Dprime,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Filtration bound for the ℋ and d' suites.
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    /// Random trials per randomized identity.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Degree bound for random functions.
    #[arg(long, default_value_t = 6)]
    deg: usize,
    /// Operator-order bound for the operator suite (default 2N).
    #[arg(long)]
    kmax: Option<usize>,
    /// Also write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ModuleAction {
    /// Check the defining relations on a module.
    Validate {
        file: PathBuf,
        /// Highest δ order checked (default 2N).
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Tensor product of two modules.
    Tensor {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dual module.
    Dual {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solutions with entries p_i / denom, deg p_i ≤ deg.
    Solve {
        file: PathBuf,
        #[arg(long)]
        deg: usize,
        #[arg(long, default_value = "1")]
        denom: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a candidate fundamental matrix, given as a JSON array of rows.
    Fundmat { file: PathBuf, matrix: PathBuf },
}

/// An error mapped to an exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 2, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Outcome = Result<u8, Failure>;

macro_rules! dispatch {
    ($p:expr, $f:ident, $args:tt; $($prime:literal),*) => {
        match $p {
            0 => $f::<Rational> $args,
            $($prime => $f::<Fp<$prime>> $args,)*
            p => Err(usage(format!("unsupported characteristic {p} (use 0 or a prime up to 13)"))),
        }
    };
}

macro_rules! with_field {
    ($p:expr, $f:ident, $args:tt) => {
        dispatch!($p, $f, $args; 2, 3, 5, 7, 11, 13)
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Module { action } => module_characteristic(action).and_then(|(p, n)| with_field!(p, run_module, (&cli, action, n))),
        _ => with_field!(cli.characteristic, run, (&cli)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn field_for<C: PrimeField>(order: u32) -> Result<Arc<FieldSpec<C>>, Failure> {
    Ok(FieldSpec::new(order)?)
}

fn emit(cli: &Cli, text: String, value: serde_json::Value) {
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
    }
}

fn emit_report(cli: &Cli, report: &Report) -> u8 {
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    u8::from(!report.passed())
}

fn run<C: PrimeField>(cli: &Cli) -> Outcome {
    let field = field_for::<C>(cli.order)?;
    match &cli.command {
        Command::Field => {
            let n = field.order() as i64;
            let primitive = field.q_pow(n).is_one() && (1..n).all(|j| !field.q_pow(j).is_one());
            let text = format!(
                "characteristic: {}\nN: {}\nmodulus: {}\ndegree: {}\nq primitive: {}\n",
                C::CHARACTERISTIC,
                field.order(),
                field.modulus_string(),
                field.degree(),
                if primitive { "yes" } else { "no" }
            );
            let value = json!({
                "schema": 1,
                "characteristic": C::CHARACTERISTIC,
                "N": field.order(),
                "modulus": field.modulus_string(),
                "degree": field.degree(),
                "q_primitive": primitive,
            });
            emit(cli, text, value);
            Ok(u8::from(!primitive))
        }
        Command::Apply { expr, function } => {
            let ctx = ScriptH::new(&field);
            let op = parse_script(&ctx, expr).map_err(|e| usage(format!("operator: {e}")))?;
            let f = parse_ratfunc_in(&ctx, function).map_err(|e| usage(format!("function: {e}")))?;
            let out = op.act(&f);
            emit(cli, format!("{out}\n"), json!({ "schema": 1, "result": out.to_string() }));
            Ok(0)
        }
        Command::Verify(args) => {
            let report = verify(&field, cli.seed, args);
            if let Some(path) = &args.report {
                write(path, &report.to_json())?;
            }
            Ok(emit_report(cli, &report))
        }
        Command::Dprime { nmax } => {
            let ctx = ScriptH::new(&field);
            let nu = solve_nu(&ctx, *nmax).map_err(|e| Failure { code: 1, msg: e.to_string() })?;
            let dp = d_prime(&ctx, &nu);
            let mut text = String::new();
            for (n, v) in nu.nu.iter().enumerate() {
                text.push_str(&format!("nu_{n} = {}\n", v.to_script(&ctx)));
            }
            for (n, d) in dp.iter().enumerate() {
                text.push_str(&format!("d'_{n} = {d}\n"));
            }
            let value = json!({
                "schema": 1,
                "field": field.to_string(),
                "nu": nu_to_json(&field, &nu),
                "dprime": dprime_to_json(&field, &dp),
            });
            emit(cli, text, value);
            Ok(0)
        }
        Command::Module { .. } => unreachable!("module commands dispatch on the file's field"),
    }
}

fn verify<C: PrimeField>(field: &Arc<FieldSpec<C>>, seed: u64, args: &VerifyArgs) -> Report {
    let n = field.order() as usize;
    let mut report = Report::new("all", field.to_string(), Some(seed));
    let wanted = |s: Suite| args.suite == s || args.suite == Suite::All;
    if wanted(Suite::Qcomb) {
        report.extend(verify_qcomb(field, 3, 3 * n as u64));
    }
    if wanted(Suite::Qop) {
        let cfg = OperatorSuite {
            deg_bound: args.deg,
            k_bound: args.kmax.unwrap_or(2 * n),
            trials: args.trials,
            seed,
        };
        report.extend(verify_operator_axioms(field, cfg));
    }
    if wanted(Suite::Hopf) {
        report.extend(verify_hopf_axioms(field, 2 * n + 1));
    }
    if wanted(Suite::Hscript) {
        report.extend(verify_hscript(&ScriptH::new(field), args.nmax, args.trials, seed));
    }
    if wanted(Suite::Dprime) {
        let cfg = DPrimeSuite { n_bound: args.nmax, trials: args.trials, seed };
        report.extend(verify_dprime(&ScriptH::new(field), cfg));
    }
    if args.suite != Suite::All {
        report.suite = report.records.first().map_or_else(|| "all".into(), |r| r.suite.clone());
    }
    report
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn read_module_file(path: &Path) -> Result<ModuleFile, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: schema violation: {e}", path.display())))
}

/// The field of the first module file named by the action.
fn module_characteristic(action: &ModuleAction) -> Result<(u64, u32), Failure> {
    let path = match action {
        ModuleAction::Validate { file, .. }
        | ModuleAction::Dual { file, .. }
        | ModuleAction::Solve { file, .. }
        | ModuleAction::Fundmat { file, .. } => file,
        ModuleAction::Tensor { left, .. } => left,
    };
    let f = read_module_file(path)?;
    Ok((f.characteristic, f.order))
}

fn load<C: PrimeField>(ctx: &Arc<ScriptH<C>>, path: &Path) -> Result<QDiffModule<C>, Failure> {
    let file = read_module_file(path)?;
    QDiffModule::from_file(ctx, &file).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Rejects mathematically invalid inputs with exit code 1.
fn require_valid<C: PrimeField>(m: &QDiffModule<C>, path: &Path) -> Result<(), Failure> {
    let report = m.validate(2 * m.ctx().order());
    let failure = report.failures().next().map(|r| {
        format!("{} is not a valid module: {} ({})", path.display(), r.identity, r.witness.clone().unwrap_or_default())
    });
    match failure {
        None => Ok(()),
        Some(msg) => Err(Failure { code: 1, msg }),
    }
}

fn output_module<C: PrimeField>(cli: &Cli, m: &QDiffModule<C>, output: &Option<PathBuf>) -> Outcome {
    let body = m.to_json();
    match output {
        Some(path) => {
            write(path, &body)?;
            if cli.format == Format::Text {
                println!("wrote rank {} module to {}", m.rank(), path.display());
            }
        }
        None => print!("{body}"),
    }
    Ok(0)
}

fn run_module<C: PrimeField>(cli: &Cli, action: &ModuleAction, order: u32) -> Outcome {
    let ctx = ScriptH::new(&field_for::<C>(order)?);
    match action {
        ModuleAction::Validate { file, kmax } => {
            let m = load(&ctx, file)?;
            Ok(emit_report(cli, &m.validate(kmax.unwrap_or(2 * order as usize))))
        }
        ModuleAction::Tensor { left, right, output } => {
            let (a, b) = (load(&ctx, left)?, load(&ctx, right)?);
            require_valid(&a, left)?;
            require_valid(&b, right)?;
            output_module(cli, &a.tensor(&b)?, output)
        }
        ModuleAction::Dual { file, output } => {
            let m = load(&ctx, file)?;
            require_valid(&m, file)?;
            let dual = m.dual().map_err(|e| Failure { code: 1, msg: e.to_string() })?;
            output_module(cli, &dual, output)
        }
        ModuleAction::Solve { file, deg, denom, output } => {
            let m = load(&ctx, file)?;
            require_valid(&m, file)?;
            let den = parse_ratfunc_in(&ctx, denom).map_err(|e| usage(format!("denominator: {e}")))?;
            if !den.is_poly() || den.is_zero() {
                return Err(usage("denominator must be a nonzero polynomial"));
            }
            let space = m.solve(*deg, den.numer())?;
            let body = space.to_json();
            if let Some(path) = output {
                write(path, &body)?;
            }
            match cli.format {
                Format::Json => print!("{body}"),
                Format::Text => {
                    println!("dimension {} (rank {})", space.dim(), space.rank);
                    for v in space.to_strings() {
                        println!("[{}]", v.join(", "));
                    }
                }
            }
            Ok(u8::from(!space.within_rank_bound()))
        }
        ModuleAction::Fundmat { file, matrix } => {
            let m = load(&ctx, file)?;
            let rows: Vec<Vec<String>> = serde_json::from_str(&read(matrix)?)
                .map_err(|e| usage(format!("{}: expected a JSON array of rows: {e}", matrix.display())))?;
            let x = rows
                .iter()
                .map(|r| r.iter().map(|s| parse_ratfunc_in(&ctx, s)).collect::<Result<Vec<RatFunc<C>>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(format!("{}: {e}", matrix.display())))?;
            Ok(emit_report(cli, &m.verify_fundamental_matrix(&x)))
        }
    }
}
