//! Golden outputs for every subcommand. Set UPDATE_GOLDEN=1 to rewrite them.

use std::fs;

use ginv_cli::{EXIT_OK, EXIT_USAGE};
use serde_json::Value;

mod support;
use support::{golden_dir, input, invoke, same_json, CASES, SUBCOMMANDS};

#[test]
fn every_case_matches_its_golden_file() {
    let failures: Vec<String> = CASES.iter().filter_map(|c| support::run_case(c).err()).collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn every_subcommand_has_a_golden_case() {
    for sub in SUBCOMMANDS {
        assert!(CASES.iter().any(|c| c.args[0] == sub), "{sub}");
    }
}

#[test]
fn preorder_counterexample_reports_not_holding() {
    let case = CASES.iter().find(|c| c.name == "preorder_gd1_ST").unwrap();
    let (_, out, _) = invoke(&support::expand(case.args));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["holds"], Value::Bool(false));
}

#[test]
fn emitted_matrices_reparse() {
    for args in [
        vec!["drazin".to_string(), "--in".into(), input("B.json")],
        vec!["gd1".to_string(), "--in".into(), input("A.json"), "--inner-seed".into(), "1".into()],
        vec!["onegd".to_string(), "--in".into(), input("B.json")],
    ] {
        let (code, out, _) = invoke(&args);
        assert_eq!(code, EXIT_OK);
        let m = ginv_core::Matrix::from_json(&out).unwrap();
        let again = ginv_core::Matrix::from_json(&m.to_json()).unwrap();
        assert!(ginv_core::numeric::relative_residual(&m, &again) <= 1e-15);
    }
}

#[test]
fn out_flag_writes_the_file() {
    let path = std::env::temp_dir().join(format!("ginv-golden-{}.json", std::process::id()));
    let (code, out, _) =
        invoke(&["drazin".into(), "--in".into(), input("A.json"), "--out".into(), path.to_string_lossy().into_owned()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let written = fs::read_to_string(&path).unwrap();
    fs::remove_file(&path).ok();
    let expected: Value =
        serde_json::from_str(&fs::read_to_string(golden_dir().join("drazin_A.json")).unwrap()).unwrap();
    same_json(&serde_json::from_str(&written).unwrap(), &expected, "out").unwrap();
}

#[test]
fn usage_errors() {
    let cases: Vec<Vec<String>> = vec![
        vec![],
        vec!["transpose".into()],
        vec!["drazin".into()],
        vec!["decompose".into(), "lu".into(), "--in".into(), input("A.json")],
        vec![
            "gd1".into(),
            "--in".into(),
            input("A.json"),
            "--inner".into(),
            input("A.json"),
            "--inner-seed".into(),
            "1".into(),
        ],
        vec!["check".into(), "--theorem".into(), "no-such-theorem".into(), "--in".into(), input("A.json")],
        vec!["check".into(), "--theorem".into(), "cline".into(), "--in".into(), input("A.json")],
        vec![
            "preorder".into(),
            "--rel".into(),
            "star".into(),
            "--s".into(),
            input("S.json"),
            "--t".into(),
            input("T.json"),
        ],
        vec![
            "preorder".into(),
            "--rel".into(),
            "gd1".into(),
            "--s".into(),
            input("S.json"),
            "--t".into(),
            input("A.json"),
        ],
        vec![
            "preorder".into(),
            "--rel".into(),
            "gd1".into(),
            "--s".into(),
            input("S.json"),
            "--t".into(),
            input("T.json"),
            "--nmax".into(),
            "4".into(),
        ],
        vec!["fuzz".into(), "--dims".into(), "8..2".into()],
        vec!["fuzz".into(), "--dims".into(), "x".into()],
        vec!["fuzz".into(), "--count".into(), "0".into()],
        vec!["l2-example".into(), "--truncate".into(), "3".into()],
        vec!["--tol=-1".into(), "drazin".into(), "--in".into(), input("A.json")],
        vec!["drazin".into(), "--in".into(), input("rect.json")],
        vec!["gd1".into(), "--in".into(), input("A.json"), "--inner".into(), input("S_inner.json")],
        vec!["gd1".into(), "--in".into(), input("T.json"), "--inner".into(), input("S.json")],
    ];
    for args in cases {
        let (code, out, err) = invoke(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {out}");
        assert!(!err.is_empty(), "{args:?}");
        assert!(out.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_json_is_a_usage_error() {
    for name in ["ragged.json", "truncated.json", "wrong_type.json", "bad_im.json", "missing.json"] {
        for sub in ["drazin", "inner", "gd1"] {
            let (code, _, err) = invoke(&[sub.into(), "--in".into(), input(name)]);
            assert_eq!(code, EXIT_USAGE, "{sub} {name}");
            assert!(err.starts_with("error:"), "{err}");
        }
    }
}

#[test]
fn help_and_version_succeed() {
    for flag in ["--help", "--version"] {
        let (code, out, _) = invoke(&[flag.into()]);
        assert_eq!(code, EXIT_OK);
        assert!(!out.is_empty());
    }
}
