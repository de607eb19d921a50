//! The `ginv` executable itself: process exit codes, GINV_SEED, file output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ginv(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ginv"));
    cmd.args(args).env_remove("GINV_SEED");
    if let Some(s) = seed_env {
        cmd.env("GINV_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn input(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/inputs").join(name).to_string_lossy().into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ginv-bin-{tag}-{}.json", std::process::id()))
}

const FUZZ: [&str; 7] = ["fuzz", "--dims", "2..4", "--indices", "0..2", "--count", "3"];

#[test]
fn exit_codes() {
    assert_eq!(ginv(&["drazin", "--in", &input("A.json")], None).status.code(), Some(0));
    let violated = ginv(
        &[
            "preorder",
            "--rel",
            "gd1",
            "--s",
            &input("S.json"),
            "--t",
            &input("T.json"),
            "--inner",
            &input("S_inner.json"),
        ],
        None,
    );
    assert_eq!(violated.status.code(), Some(1));
    let bad = ginv(&["drazin", "--in", &input("truncated.json")], None);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));
    assert_eq!(ginv(&["fuzz", "--seed", "banana"], None).status.code(), Some(2));
}

#[test]
fn fuzz_report_is_byte_identical_across_runs() {
    let (a, b) = (scratch("a"), scratch("b"));
    let mut args: Vec<&str> = FUZZ.to_vec();
    let (pa, pb) = (a.to_string_lossy().into_owned(), b.to_string_lossy().into_owned());
    args.extend(["--seed", "42", "--report", &pa]);
    assert_eq!(ginv(&args, None).status.code(), Some(0));
    *args.last_mut().unwrap() = &pb;
    assert_eq!(ginv(&args, None).status.code(), Some(0));
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn seed_environment_variable_sets_the_default() {
    let mut explicit: Vec<&str> = FUZZ.to_vec();
    explicit.extend(["--seed", "7"]);
    let from_flag = ginv(&explicit, None);
    let from_env = ginv(&FUZZ, Some("7"));
    let default = ginv(&FUZZ, None);
    assert_eq!(from_flag.stdout, from_env.stdout);
    assert_ne!(from_flag.stdout, default.stdout);
    // the flag wins over the environment
    assert_eq!(ginv(&explicit, Some("8")).stdout, from_flag.stdout);
    assert_eq!(ginv(&FUZZ, Some("not-a-number")).status.code(), Some(2));
}
