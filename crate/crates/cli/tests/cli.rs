use std::path::Path;
use std::process::{Command, Output};

use qglab::input::InputError;
use qglab::run::{run_suites, ConstructionChoice, RunConfig, Suite};
use qglab_core::group::GroupTable;

fn qglab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qglab"))
        .arg("verify")
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("QGLAB_MAX_DIM")
        .output()
        .unwrap()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn empty_suite_list_gives_empty_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qglab(&["--group", "Z2", "--suites", ""], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["records"].as_array().unwrap().len(), 0);
    assert_eq!(r["summary"]["total"], 0);
    assert_eq!(r["seed"], 0);
}

#[test]
fn fixed_seed_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = ["--group", "S3", "--suites", "thm33,obad", "--epsilons", "0.1", "--seed", "7", "--draws", "10"];
    assert_eq!(qglab(&args, &a).status.code(), Some(0));
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(qglab(&seq, &b).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn residuals_are_seventeen_digit_strings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    qglab(&["--group", "Z3", "--construction", "function-algebra", "--suites", "obad"], &out);
    let r = report(&out);
    for rec in r["records"].as_array().unwrap() {
        let s = rec["residual"].as_str().unwrap();
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17, "{s}");
        assert!(s.parse::<f64>().is_ok());
        assert!(!rec["anchor"].as_str().unwrap().is_empty());
    }
}

#[test]
fn group_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("z2.json");
    std::fs::write(&table, r#"{"name":"Z2file","order":2,"table":[[0,1],[1,0]]}"#).unwrap();
    let out = dir.path().join("r.json");
    let o = qglab(&["--group", table.to_str().unwrap(), "--suites", "structure"], &out);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert!(r["records"].as_array().unwrap().iter().all(|x| x["group"] == "Z2file"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name":"bad","order":2,"table":[[0,1],[1,1]]}"#).unwrap();
    for args in [
        vec!["--group", "Z99"],
        vec!["--group", bad.to_str().unwrap()],
        vec!["--suites", "nope"],
        vec!["--construction", "neither"],
        vec!["--epsilons", "0.1,x"],
    ] {
        let o = qglab(&args, &out);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!out.exists());
    }
}

#[test]
fn dimension_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_qglab"))
        .args(["verify", "--group", "Z3", "--suites", "obad", "--out"])
        .arg(&out)
        .env("QGLAB_MAX_DIM", "26")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn three_leg_cap_is_order_twelve_and_two_leg_cap_order_twenty_four() {
    let cfg = |n: usize, suite: Suite| RunConfig {
        groups: vec![GroupTable::cyclic(n)],
        construction: ConstructionChoice::FunctionAlgebra,
        suites: vec![suite],
        draws: qglab::run::Draws {
            structure: 1,
            lemma: 1,
            theta: 1,
            bound: 1,
        },
        ..RunConfig::default()
    };
    assert!(matches!(
        run_suites(&cfg(13, Suite::Lemma43)),
        Err(InputError::DimensionCap { entries: 2197, cap: 1728, .. })
    ));
    assert!(matches!(
        run_suites(&cfg(25, Suite::Structure)),
        Err(InputError::DimensionCap { entries: 625, cap: 576, .. })
    ));
    assert!(run_suites(&cfg(12, Suite::Lemma43)).unwrap().all_passed());
}

#[test]
fn negative_tolerance_fails_and_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qglab(&["--group", "Z2", "--suites", "lemma43", "--tol=-1", "--draws", "2"], &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(report(&out)["summary"]["failed"].as_u64().unwrap() > 0);
}
