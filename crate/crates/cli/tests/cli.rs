use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hyperlab_cli::{Report, SCHEMA};
use hyperlab_core::density::Verdict;
use hyperlab_core::dynamics::{example_dense_spectrum, example_g_theta, MatrixSemigroup};
use hyperlab_core::linalg::{Field, Matrix, Surd};
use tempfile::TempDir;

fn hyperlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_report(o: &Output) -> Report {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write_semigroup(dir: &Path, name: &str, g: &MatrixSemigroup) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(&g.to_json()).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn kronecker_a_alpha_report() {
    let o = hyperlab(&["kronecker", "--kind", "A_alpha", "--primes", "2,3", "--window", "0,1x0,1", "--eps", "0.1", "--schedule", "50,100,200"]);
    assert_eq!(code(&o), 0);
    let r = stdout_report(&o);
    assert_eq!(r.schema, SCHEMA);
    assert_eq!(r.command, "kronecker");
    assert!(!r.version.is_empty());
    // Oracle: 29, 48, 63 of 100 cells.
    assert_eq!(r.result["coverage"]["trend"], serde_json::json!([0.29, 0.48, 0.63]));
    assert_eq!(r.verdict, Some(Verdict::Inconclusive));
    assert_eq!(r.config["thresholds"]["dense"], 0.9);
    assert_eq!(r.config["seed"], 0);
}

#[test]
fn z_module_is_not_dense() {
    let o = hyperlab(&["kronecker", "--kind", "Z_module", "--gens", "1,0;√2,√3", "--expect", "NotDenseEvidence"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_report(&o).verdict, Some(Verdict::NotDenseEvidence));
}

#[test]
fn expectation_mismatch_exits_one() {
    let o = hyperlab(&["kronecker", "--kind", "Z_module", "--gens", "1,0;√2,√3", "--expect", "DenseEvidence"]);
    assert_eq!(code(&o), 1);
    let r = stdout_report(&o);
    assert_eq!(r.expected, Some(Verdict::DenseEvidence));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(code(&hyperlab(&["kronecker", "--kind", "A_alpha", "--primes", "2,2"])), 2);
    assert_eq!(code(&hyperlab(&["kronecker", "--kind", "A_alpha", "--primes", "2,3", "--schedule", "3,2,1"])), 2);
    assert_eq!(code(&hyperlab(&["kronecker", "--kind", "nope"])), 2);
    assert_eq!(code(&hyperlab(&["kronecker", "--kind", "A_alpha", "--primes", "2,3", "--mode", "fuzzy"])), 2);
    assert_eq!(code(&hyperlab(&["repro", "thm9.9"])), 2);
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("c.json");
    fs::write(&p, r#"{"command":"kronecker","set":{"kind":"A_alpha","alpha_primes":[2,3]},"extra":true}"#).unwrap();
    assert_eq!(code(&hyperlab(&["kronecker", "--config", p.to_str().unwrap()])), 2);
}

#[test]
fn rational_theta_is_a_precondition_error() {
    let o = hyperlab(&["kronecker", "--kind", "A2", "--theta1", "1/2", "--theta2", "√3"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn non_commuting_claim_exits_three() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("j.json");
    fs::write(
        &p,
        r#"{"generators":[{"field":"R","n":2,"entries":[["1","0"],["1","2"]]},{"field":"R","n":2,"entries":[["3","0"],["0","1"]]}],"field":"R","abelian":true}"#,
    )
    .unwrap();
    assert_eq!(code(&hyperlab(&["probe", "--semigroup", p.to_str().unwrap()])), 3);
}

#[test]
fn config_file_and_out_dir() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"command":"kronecker","set":{"kind":"A_alpha","alpha_primes":[2,3]},"points_csv":true}"#).unwrap();
    let out = dir.path().join("out");
    let o = hyperlab(&["kronecker", "--config", cfg.to_str().unwrap(), "--eps", "0.2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: Report = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(r.config["epsilon"], 0.2);
    assert_eq!(r.config["window"], serde_json::json!([[-2.0, 2.0], [-2.0, 2.0]]));
    let csv = fs::read_to_string(out.join("points.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    let o = hyperlab(&["orbit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["kronecker", "--kind", "B", "--radial-count", "60", "--angle-count", "120", "--window", "-1,1x-1,1"];
    let a = hyperlab(&args);
    let b = hyperlab(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn g_theta_probe() {
    let dir = TempDir::new().unwrap();
    let g = example_g_theta(2, 3, &Surd::sqrt(2)).unwrap();
    let p = write_semigroup(dir.path(), "g.json", &g);
    let o = hyperlab(&["probe", "--semigroup", &p, "--weights", "0.2,0.2,1", "--expect", "DenseEvidence"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_report(&o);
    assert!(r.result["canonical_subspace"]["error"].is_string(), "{}", r.result["canonical_subspace"]);
    assert_eq!(r.result["hypercyclic"]["evidence"], true);
}

#[test]
fn dense_spectrum_probe_on_both_fields() {
    let dir = TempDir::new().unwrap();
    for (field, name) in [(Field::Complex, "c.json"), (Field::Real, "r.json")] {
        let g = example_dense_spectrum(field).unwrap();
        let p = write_semigroup(dir.path(), name, &g);
        let o = hyperlab(&["probe", "--semigroup", &p, "--weights", "0.2,0.2,1,0.2,0.2,1", "--expect", "DenseEvidence"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let r = stdout_report(&o);
        assert_eq!(r.result["canonical_subspace"]["coverage"]["verdict"], "DenseEvidence", "{}", r.result);
    }
}

#[test]
fn identity_semigroup_is_not_dense() {
    let dir = TempDir::new().unwrap();
    let g = MatrixSemigroup::abelian(vec![Matrix::identity(Field::Real, 2)], Field::Real).unwrap();
    let p = write_semigroup(dir.path(), "i.json", &g);
    let o = hyperlab(&["probe", "--semigroup", &p, "--expect", "NotDenseEvidence"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let exact = dir.path().join("q.json");
    fs::write(&exact, r#"{"generators":[{"field":"R","n":2,"entries":[["1","0"],["0","1"]]}],"field":"R"}"#).unwrap();
    let o = hyperlab(&["orbit", "--semigroup", exact.to_str().unwrap(), "--mode", "exact", "--expect", "NotDenseEvidence"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_report(&o).result["exact"], true);
    let o = hyperlab(&["orbit", "--semigroup", &p, "--mode", "exact"]);
    let r = stdout_report(&o);
    assert_eq!(r.result["exact"], false);
    assert!(!r.flags.is_empty());
}

#[test]
fn normalform_summary() {
    let dir = TempDir::new().unwrap();
    let g = example_g_theta(2, 3, &Surd::sqrt(2)).unwrap();
    let p = write_semigroup(dir.path(), "g.json", &g);
    let o = hyperlab(&["normalform", "--semigroup", &p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_report(&o);
    assert_eq!(r.verdict, None);
    assert!(r.result.get("normal_form").is_some(), "{}", r.result);
}

#[test]
fn repro_suites_pass() {
    for id in ["rem2.6", "thm2.4", "prop2.6", "prop2.5"] {
        let o = hyperlab(&["repro", id, "--seed", "3"]);
        assert_eq!(code(&o), 0, "{id}: {}", String::from_utf8_lossy(&o.stderr));
        let r = stdout_report(&o);
        assert_eq!(r.result["passed"], true);
        assert_eq!(r.config["seed"], 3);
    }
    let o = hyperlab(&["repro", "rem2.6"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS")).count(), 6, "{err}");
}
