//! The `ginv` command line: JSON in, JSON out.
//!
//! Exit codes: 0 when the command succeeded and any property it checks holds,
//! 1 when a checked property fails, 2 on usage or input errors.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginv_core::relations::{self, Relation};
use ginv_core::verify::{self, generate};
use ginv_core::{decomp, ginv, GinvError, InnerInverse, Matrix, ToleranceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable that supplies the default master seed for `fuzz`.
pub const SEED_ENV: &str = "GINV_SEED";

#[derive(Parser, Debug)]
#[command(name = "ginv", version, about = "Drazin, inner, GD1 and 1GD inverses of complex matrices")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Matrix equality tolerance (relative residual).
    #[arg(long = "tol", global = true)]
    eq_tol: Option<f64>,
    /// Relative singular value cutoff for rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Nilpotency cutoff.
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Core-nilpotent or closed-range decomposition.
    Decompose {
        kind: DecompKind,
        #[command(flatten)]
        io: Io,
    },
    /// Drazin inverse.
    Drazin {
        #[command(flatten)]
        io: Io,
    },
    /// GD1 inverse T^d T T^-.
    Gd1 {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        inner: InnerSource,
    },
    /// 1GD inverse T^- T T^d.
    Onegd {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        inner: InnerSource,
    },
    /// An inner inverse with its provenance and residual.
    Inner {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        inner: InnerSource,
    },
    /// Evaluate one registry statement on an instance.
    Check {
        #[arg(long)]
        theorem: String,
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        inner: InnerSource,
        /// Second operand for statements about two matrices.
        #[arg(long)]
        extra: Option<PathBuf>,
    },
    /// Run every registry statement over generated instances.
    Fuzz {
        /// Inclusive dimension range, e.g. `2..8`.
        #[arg(long, default_value = "2..8")]
        dims: String,
        /// Inclusive index range, e.g. `0..3`.
        #[arg(long, default_value = "0..3")]
        indices: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Master seed; defaults to $GINV_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide S <= T under one of the pre-orders.
    Preorder {
        #[arg(long)]
        rel: String,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        /// Inner inverse of S (defaults to its pseudoinverse).
        #[arg(long)]
        inner: Option<PathBuf>,
        /// Sequence length for the PO membership of (S, S^-), reported
        /// alongside the gd1 and onegd relations.
        #[arg(long, default_value_t = relations::DEFAULT_N_MAX)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite section of the sequence-space example.
    L2Example {
        #[arg(long, default_value_t = 200)]
        truncate: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DecompKind {
    Core,
    ClosedRange,
}

#[derive(Args, Debug)]
struct Io {
    /// Input matrix JSON.
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InnerSource {
    /// Inner inverse of the input as matrix JSON.
    #[arg(long, conflicts_with = "inner_seed")]
    inner: Option<PathBuf>,
    /// Sample T^+ + V - T^+ T V T T^+ with V drawn from ChaCha8 seeded by N.
    #[arg(long)]
    inner_seed: Option<u64>,
}

/// Failures that end the command with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl From<GinvError> for UsageError {
    fn from(e: GinvError) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<i32, UsageError>;

/// Runs `ginv` with `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn tolerances(args: &TolArgs) -> Result<ToleranceConfig, UsageError> {
    let d = ToleranceConfig::default();
    let cfg = ToleranceConfig::new(
        args.rank_tol.unwrap_or(d.rank_tol),
        args.eq_tol.unwrap_or(d.eq_tol),
        args.eig_tol.unwrap_or(d.eig_tol),
    )?;
    Ok(cfg)
}

fn read_matrix(path: &Path) -> Result<Matrix, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Matrix::from_json(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn inner_for(t: &Matrix, src: &InnerSource, cfg: &ToleranceConfig) -> Result<InnerInverse, UsageError> {
    if let Some(path) = &src.inner {
        return Ok(InnerInverse::from_matrix(t, read_matrix(path)?, cfg)?);
    }
    if let Some(seed) = src.inner_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(generate::random_inner_free(t, &mut rng, cfg)?);
    }
    Ok(InnerInverse::pseudoinverse(t, cfg))
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> Result<(), UsageError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| UsageError(e.to_string()))?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| UsageError(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| UsageError(e.to_string())),
    }
}

/// Parses `a..b`, `a..=b` or a single integer as an inclusive range.
pub fn parse_range(text: &str) -> Option<RangeInclusive<usize>> {
    let text = text.trim();
    match text.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            Some(lo.trim().parse().ok()?..=hi.trim().parse().ok()?)
        }
        None => {
            let v = text.parse().ok()?;
            Some(v..=v)
        }
    }
}

fn master_seed(flag: Option<u64>) -> Result<u64, UsageError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| UsageError(format!("{SEED_ENV}={v} is not a 64-bit unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_VIOLATED
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let cfg = tolerances(&cli.tol)?;
    match cli.command {
        Command::Decompose { kind, io } => {
            let t = read_matrix(&io.input)?;
            match kind {
                DecompKind::Core => emit(&decomp::core_nilpotent(&t, &cfg)?, io.out.as_deref(), out)?,
                DecompKind::ClosedRange => emit(&decomp::closed_range(&t, &cfg)?, io.out.as_deref(), out)?,
            }
            Ok(EXIT_OK)
        }
        Command::Drazin { io } => {
            let t = read_matrix(&io.input)?;
            emit(&ginv::drazin(&t, &cfg)?, io.out.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Gd1 { io, inner } => {
            let t = read_matrix(&io.input)?;
            let tm = inner_for(&t, &inner, &cfg)?;
            emit(&ginv::gd1(&t, &tm, &cfg)?, io.out.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Onegd { io, inner } => {
            let t = read_matrix(&io.input)?;
            let tm = inner_for(&t, &inner, &cfg)?;
            emit(&ginv::onegd(&t, &tm, &cfg)?, io.out.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Inner { io, inner } => {
            let t = read_matrix(&io.input)?;
            emit(&inner_for(&t, &inner, &cfg)?, io.out.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Check { theorem, io, inner, extra } => {
            verify::lookup(&theorem)?;
            let t = read_matrix(&io.input)?;
            let tm = inner_for(&t, &inner, &cfg)?;
            let extra = extra.as_deref().map(read_matrix).transpose()?;
            let report = verify::check(&theorem, &t, &tm, extra.as_ref(), &cfg)?;
            emit(&report, io.out.as_deref(), out)?;
            Ok(verdict(report.passed))
        }
        Command::Fuzz { dims, indices, count, seed, report } => {
            let dims = parse_range(&dims).ok_or_else(|| UsageError(format!("bad --dims `{dims}`")))?;
            let indices = parse_range(&indices).ok_or_else(|| UsageError(format!("bad --indices `{indices}`")))?;
            let rep = verify::fuzz(dims, indices, count, master_seed(seed)?, &cfg)?;
            emit(&rep, report.as_deref(), out)?;
            Ok(verdict(rep.passed))
        }
        Command::Preorder { rel, s, t, inner, nmax, out: path } => {
            let rel: Relation = rel.parse()?;
            let s_m = read_matrix(&s)?;
            let t_m = read_matrix(&t)?;
            let sm = inner_for(&s_m, &InnerSource { inner, inner_seed: None }, &cfg)?;
            let report = match rel {
                Relation::Gd1 => relations::below_gd1(&s_m, &t_m, &sm, &cfg)?,
                Relation::Onegd => relations::below_onegd(&s_m, &t_m, &sm, &cfg)?,
                Relation::Drazin => relations::below_drazin(&s_m, &t_m, &cfg)?,
            };
            let membership = match rel {
                Relation::Drazin => None,
                Relation::Gd1 => Some(relations::po_membership(&s_m, &sm, relations::PoVariant::Gd1, nmax, &cfg)?),
                Relation::Onegd => Some(relations::po_membership(&s_m, &sm, relations::PoVariant::Onegd, nmax, &cfg)?),
            };
            #[derive(Serialize)]
            struct PreorderOutput<'a> {
                #[serde(flatten)]
                report: &'a relations::PreorderReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                po_membership: Option<relations::PoMembership>,
            }
            emit(&PreorderOutput { report: &report, po_membership: membership }, path.as_deref(), out)?;
            Ok(verdict(report.holds))
        }
        Command::L2Example { truncate, out: path } => {
            let report = verify::l2_example(truncate, &cfg)?;
            emit(&report, path.as_deref(), out)?;
            Ok(verdict(report.passed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..8"), Some(2..=8));
        assert_eq!(parse_range("2..=8"), Some(2..=8));
        assert_eq!(parse_range("3"), Some(3..=3));
        assert_eq!(parse_range("a..3"), None);
        assert_eq!(parse_range(""), None);
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["ginv", "frobnicate"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["ginv", "drazin"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["ginv", "drazin", "--in", "/nonexistent.json"], &mut o, &mut e), EXIT_USAGE);
        assert!(!e.is_empty());
    }

    #[test]
    fn help_exits_0() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["ginv", "--help"], &mut o, &mut e), EXIT_OK);
        assert!(String::from_utf8(o).unwrap().contains("drazin"));
    }
}
