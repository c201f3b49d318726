//! The binary against the library: outputs must agree byte for byte, and
//! exit codes follow 0 = success, 1 = mathematical failure, 2 = usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iterq::hopf::verify_hopf_axioms;
use iterq::hscript::ScriptH;
use iterq::parse::{parse_ratfunc_in, parse_script};
use iterq::qmod::QDiffModule;
use iterq::report::Report;
use iterq::{FieldSpec, Poly, Rational};

const DEFAULT_SEED: u64 = 0x5eed_2024;

fn iterq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iterq")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn apply_examples() {
    let cases = [
        ("3", "D(1)", "t^3", "1"),
        ("4", "s", "t", "q*t"),
        // q = -1 at N = 2, so σ(t) prints as -t.
        ("2", "s", "t", "-t"),
        ("2", "d(1) - (1/((q-1)*t))*(s - 1)", "t^5", "0"),
    ];
    for (n, expr, f, want) in cases {
        let out = iterq(&["apply", "--N", n, expr, f]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), format!("{want}\n"), "apply --N {n} {expr} {f}");
    }
}

#[test]
fn apply_matches_library() {
    let ctx = ScriptH::new(&FieldSpec::<Rational>::new(3).unwrap());
    for (expr, f) in [("D(1)*t + s^2", "(t^2 + 1)/(t - q)"), ("d(2)*d(1) - u", "1/(t^3 + 2)"), ("(1/t)*D(2)", "t^7 - q*t")] {
        let want = parse_script(&ctx, expr).unwrap().act(&parse_ratfunc_in(&ctx, f).unwrap());
        let out = iterq(&["apply", "--N", "3", expr, f]);
        assert_eq!(stdout(&out), format!("{want}\n"));
    }
}

#[test]
fn usage_errors_exit_two() {
    let out = iterq(&["apply", "--N", "3", "t + * 2", "t"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 4"));
    assert_eq!(code(&iterq(&["verify", "nonsense"])), 2);
    assert_eq!(code(&iterq(&["--N", "1", "field"])), 2);
}

#[test]
fn verify_suites_pass() {
    assert_eq!(code(&iterq(&["verify", "all", "--N", "2", "--nmax", "4"])), 0);
    assert_eq!(code(&iterq(&["verify", "qop", "--N", "4", "--trials", "5"])), 0);
}

#[test]
fn verify_report_matches_library() {
    let field = FieldSpec::<Rational>::new(3).unwrap();
    let mut want = Report::new("all", field.to_string(), Some(DEFAULT_SEED));
    want.extend(verify_hopf_axioms(&field, 7));
    want.suite = "hopf".into();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = iterq(&["--format", "json", "verify", "hopf", "--N", "3", "--report", s(&path)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), want.to_json());
    assert_eq!(fs::read_to_string(&path).unwrap(), want.to_json());
}

#[test]
fn module_examples() {
    let dir = tempfile::tempdir().unwrap();
    let vt = write(dir.path(), "Vt.json", r#"{"schema":1,"characteristic":0,"N":3,"rank":1,"sigma":[["q"]],"d1":[["0"]]}"#);
    let out = iterq(&["module", "solve", s(&vt), "--deg", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "dimension 1 (rank 1)\n[t]\n");

    let vt2 = dir.path().join("Vt2.json");
    assert_eq!(code(&iterq(&["module", "tensor", s(&vt), s(&vt), "-o", s(&vt2)])), 0);
    let out = iterq(&["module", "solve", s(&vt2), "--deg", "3"]);
    assert_eq!(stdout(&out), "dimension 1 (rank 1)\n[t^2]\n");

    let unit = write(dir.path(), "unit.json", r#"{"schema":1,"characteristic":0,"N":3,"rank":1,"sigma":[["1"]],"d1":[["0"]]}"#);
    assert_eq!(code(&iterq(&["module", "validate", s(&unit)])), 0);
}

#[test]
fn module_outputs_match_library() {
    let ctx = ScriptH::new(&FieldSpec::<Rational>::new(3).unwrap());
    let vt = QDiffModule::v_t(&ctx);
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "Vt.json", &vt.to_json());
    let out = iterq(&["module", "tensor", s(&path), s(&path)]);
    assert_eq!(stdout(&out), vt.tensor(&vt).unwrap().to_json());
    let out = iterq(&["module", "dual", s(&path)]);
    assert_eq!(stdout(&out), vt.dual().unwrap().to_json());
    let out = iterq(&["--format", "json", "module", "solve", s(&path), "--deg", "2"]);
    assert_eq!(stdout(&out), vt.solve(2, &Poly::one(ctx.field())).unwrap().to_json());
    let out = iterq(&["--format", "json", "module", "validate", s(&path)]);
    assert_eq!(stdout(&out), vt.validate(6).to_json());
}

#[test]
fn invalid_modules_exit_one_and_bad_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"schema":1,"characteristic":0,"N":3,"rank":1,"sigma":[["1"]],"d1":[["t"]]}"#);
    assert_eq!(code(&iterq(&["module", "validate", s(&bad)])), 1);
    assert_eq!(code(&iterq(&["module", "tensor", s(&bad), s(&bad)])), 1);
    assert_eq!(code(&iterq(&["module", "solve", s(&bad), "--deg", "2"])), 1);

    let extra = write(dir.path(), "extra.json", r#"{"schema":1,"characteristic":0,"N":3,"rank":1,"sigma":[["1"]],"d1":[["0"]],"colour":1}"#);
    let missing = write(dir.path(), "missing.json", r#"{"schema":1,"characteristic":0,"N":3,"rank":1,"sigma":[["1"]]}"#);
    let shape = write(dir.path(), "shape.json", r#"{"schema":1,"characteristic":0,"N":3,"rank":2,"sigma":[["1"]],"d1":[["0"]]}"#);
    for p in [&extra, &missing, &shape] {
        assert_eq!(code(&iterq(&["module", "validate", s(p)])), 2, "{}", p.display());
    }
    assert_eq!(code(&iterq(&["module", "validate", s(&dir.path().join("absent.json"))])), 2);
}

#[test]
fn fundamental_matrix_check() {
    let dir = tempfile::tempdir().unwrap();
    let vt = write(dir.path(), "Vt.json", r#"{"schema":1,"characteristic":0,"N":2,"rank":1,"sigma":[["q"]],"d1":[["0"]]}"#);
    let good = write(dir.path(), "good.json", r#"[["3*t"]]"#);
    let wrong = write(dir.path(), "wrong.json", r#"[["t^2"]]"#);
    assert_eq!(code(&iterq(&["module", "fundmat", s(&vt), s(&good)])), 0);
    assert_eq!(code(&iterq(&["module", "fundmat", s(&vt), s(&wrong)])), 1);
}

#[test]
fn characteristic_five() {
    let out = iterq(&["--char", "5", "--N", "2", "apply", "D(1)", "t^2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "1\n");
    assert_eq!(code(&iterq(&["--char", "5", "--N", "5", "field"])), 2);
}
