//! Shared by the golden, partition and acceptance tests.
#![allow(dead_code)]

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use ginv_cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED};
use ginv_core::verify::{build_instance, check, instance_seed, REGISTRY};
use ginv_core::{InnerInverse, Matrix, ToleranceConfig, C64};
use serde_json::Value;

const NUM_TOL: f64 = 1e-9;

pub struct GoldenCase {
    pub name: &'static str,
    /// Arguments after the program name; `@x.json` names a file in `golden/inputs`.
    pub args: &'static [&'static str],
    pub code: i32,
}

pub const SUBCOMMANDS: [&str; 9] =
    ["decompose", "drazin", "gd1", "onegd", "inner", "check", "fuzz", "preorder", "l2-example"];

pub const CASES: &[GoldenCase] = &[
    GoldenCase { name: "drazin_A", args: &["drazin", "--in", "@A.json"], code: EXIT_OK },
    GoldenCase { name: "drazin_B", args: &["drazin", "--in", "@B.json"], code: EXIT_OK },
    GoldenCase { name: "decompose_core_A", args: &["decompose", "core", "--in", "@A.json"], code: EXIT_OK },
    GoldenCase {
        name: "decompose_closed_range_A",
        args: &["decompose", "closed-range", "--in", "@A.json"],
        code: EXIT_OK,
    },
    GoldenCase { name: "gd1_A", args: &["gd1", "--in", "@A.json", "--inner", "@A_inner.json"], code: EXIT_OK },
    GoldenCase { name: "gd1_A_seed7", args: &["gd1", "--in", "@A.json", "--inner-seed", "7"], code: EXIT_OK },
    GoldenCase { name: "onegd_A", args: &["onegd", "--in", "@A.json", "--inner", "@A_inner.json"], code: EXIT_OK },
    GoldenCase { name: "inner_N", args: &["inner", "--in", "@N.json"], code: EXIT_OK },
    GoldenCase { name: "inner_A_seed3", args: &["inner", "--in", "@A.json", "--inner-seed", "3"], code: EXIT_OK },
    GoldenCase {
        name: "check_t2tm_A",
        args: &["check", "--theorem", "thm-t2tm", "--in", "@A.json", "--inner", "@A_inner.json"],
        code: EXIT_OK,
    },
    GoldenCase {
        name: "check_cline_R",
        args: &["check", "--theorem", "cline", "--in", "@A.json", "--extra", "@R.json"],
        code: EXIT_OK,
    },
    // Z = 0 with Y != 0: 1GD equals T^d but T^- does not commute with T
    GoldenCase {
        name: "check_onegd_commute_D",
        args: &["check", "--theorem", "thm-onegd-commute", "--in", "@D.json", "--inner", "@D_inner.json"],
        code: EXIT_VIOLATED,
    },
    GoldenCase {
        name: "preorder_gd1_ST",
        args: &["preorder", "--rel", "gd1", "--s", "@S.json", "--t", "@T.json", "--inner", "@S_inner.json"],
        code: EXIT_VIOLATED,
    },
    GoldenCase {
        name: "preorder_drazin_SS",
        args: &["preorder", "--rel", "drazin", "--s", "@S.json", "--t", "@S.json"],
        code: EXIT_OK,
    },
    GoldenCase {
        name: "preorder_onegd_SS_po",
        args: &[
            "preorder",
            "--rel",
            "onegd",
            "--s",
            "@S.json",
            "--t",
            "@S.json",
            "--inner",
            "@S_inner.json",
            "--nmax",
            "16",
        ],
        code: EXIT_OK,
    },
    GoldenCase {
        name: "fuzz_small",
        args: &["fuzz", "--dims", "2..3", "--indices", "0..2", "--count", "2", "--seed", "42"],
        code: EXIT_OK,
    },
    GoldenCase { name: "l2_example_6", args: &["l2-example", "--truncate", "6"], code: EXIT_OK },
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn input(name: &str) -> String {
    golden_dir().join("inputs").join(name).to_string_lossy().into_owned()
}

pub fn invoke(args: &[String]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ginv".to_string()).chain(args.iter().cloned());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Structural equality with numbers compared to a relative `1e-9`.
pub fn same_json(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= NUM_TOL * 1f64.max(x.abs()).max(y.abs()) {
                Ok(())
            } else {
                Err(format!("{path}: {x} != {y}"))
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Err(format!("{path}: length {} != {}", x.len(), y.len()));
            }
            x.iter().zip(y).enumerate().try_for_each(|(i, (p, q))| same_json(p, q, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            if kx != ky {
                return Err(format!("{path}: keys {kx:?} != {ky:?}"));
            }
            x.iter().try_for_each(|(k, v)| same_json(v, &y[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} != {b}")),
    }
}

pub fn expand(args: &[&str]) -> Vec<String> {
    args.iter().map(|a| a.strip_prefix('@').map(input).unwrap_or_else(|| a.to_string())).collect()
}

/// Runs one case against its golden file, or rewrites the file when
/// UPDATE_GOLDEN is set.
pub fn run_case(case: &GoldenCase) -> Result<(), String> {
    let (code, out, err) = invoke(&expand(case.args));
    if code != case.code {
        return Err(format!("{}: exit {code}, expected {}; stderr {err}", case.name, case.code));
    }
    let path = golden_dir().join(format!("{}.json", case.name));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &out).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let got: Value = serde_json::from_str(&out).map_err(|e| format!("{}: output is not JSON: {e}", case.name))?;
    let want: Value = serde_json::from_str(&expected).map_err(|e| e.to_string())?;
    same_json(&got, &want, case.name)
}

fn write(dir: &Path, name: &str, m: &Matrix) -> String {
    let p = dir.join(name);
    fs::write(&p, m.to_json()).unwrap();
    p.to_string_lossy().into_owned()
}

fn reread(dir: &Path, name: &str) -> Matrix {
    Matrix::from_json(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

/// Runs `ginv check` on `per_theorem` fuzz instances of every statement and
/// compares the exit code with the library verdict. Every fourth instance
/// has its inner inverse corrupted so the rejection path is exercised too.
/// Returns how many invocations ended with each of the exit codes 0, 1, 2.
pub fn check_partition(master: u64, per_theorem: u64) -> Result<[usize; 3], String> {
    let cfg = ToleranceConfig::default();
    let dims: RangeInclusive<usize> = 2..=5;
    let indices: RangeInclusive<usize> = 0..=3;
    let dir = std::env::temp_dir().join(format!("ginv-partition-{}-{master}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut seen = [0usize; 3];
    for info in REGISTRY.iter() {
        for i in 0..per_theorem {
            let seed = instance_seed(master, i);
            let inst = build_instance(info, &dims, &indices, seed, &cfg).map_err(|e| e.to_string())?;
            let mut inner = inst.inner.value.clone();
            if i % 4 == 3 {
                inner.set(0, 0, inner.get(0, 0) + C64::new(0.5, 0.0));
            }
            let mut args = vec![
                "check".to_string(),
                "--theorem".into(),
                info.id.into(),
                "--in".into(),
                write(&dir, "t.json", &inst.t),
                "--inner".into(),
                write(&dir, "ti.json", &inner),
            ];
            if let Some(x) = &inst.extra {
                args.extend(["--extra".into(), write(&dir, "x.json", x)]);
            }
            let (code, _, err) = invoke(&args);
            // recompute from the written files, the decimal round trip can move the last bits
            let t = reread(&dir, "t.json");
            let x = inst.extra.as_ref().map(|_| reread(&dir, "x.json"));
            let want = match InnerInverse::from_matrix(&t, reread(&dir, "ti.json"), &cfg) {
                Err(_) => EXIT_USAGE,
                Ok(ti) if check(info.id, &t, &ti, x.as_ref(), &cfg).map_err(|e| e.to_string())?.passed => EXIT_OK,
                Ok(_) => EXIT_VIOLATED,
            };
            if code != want {
                fs::remove_dir_all(&dir).ok();
                return Err(format!("{} seed {seed}: exit {code}, expected {want}; {err}", info.id));
            }
            seen[code as usize] += 1;
        }
    }
    fs::remove_dir_all(&dir).ok();
    Ok(seen)
}
