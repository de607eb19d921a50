//! Seeded fuzz campaigns over the registry.
//!
//! Instance `i` of every statement is seeded with the `i`-th output of a
//! ChaCha8 stream keyed by the master seed (`seed_from_u64(master)` with the
//! word stream set to `i`), so each instance can be rebuilt alone from its
//! reported seed and evaluation order does not matter.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decomp;
use crate::error::{GinvError, Result};
use crate::ginv::InnerInverse;
use crate::matrix::Matrix;
use crate::relations;
use crate::tolerance::ToleranceConfig;
use crate::verify::generate::{self, BlockShape, InstanceSpec, MAX_DIMENSION};
use crate::verify::registry::{self, ExtraKind, Fingerprint, Fixture, TheoremCheckReport, TheoremInfo, REGISTRY};

const RADII: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub id: String,
    pub passed: bool,
    pub residuals: BTreeMap<String, f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzFailure {
    pub id: String,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub instances: usize,
    pub passed: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<FuzzFailure>,
    pub summary: BTreeMap<String, TheoremSummary>,
}

impl FuzzReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Seed of instance `i` under `master`.
pub fn instance_seed(master: u64, i: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(i);
    rng.next_u64()
}

/// One generated input for a statement.
pub struct Instance {
    pub t: Matrix,
    pub inner: InnerInverse,
    pub extra: Option<Matrix>,
    pub fingerprint: Fingerprint,
}

/// Rebuilds the instance that `fuzz` evaluates for `info` under `seed`.
pub fn build_instance(
    info: &TheoremInfo,
    dims: &RangeInclusive<usize>,
    indices: &RangeInclusive<usize>,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dimension = rng.random_range(dims.clone());
    let target_index = rng.random_range(indices.clone()).min(dimension);
    let radius = RADII[rng.random_range(0..RADII.len())];
    let spec = InstanceSpec { dimension, target_index, core_spectral_radius: radius, seed: rng.next_u64() };
    let (t, spec) = match info.fixture {
        Fixture::Generic => (generate::random_with_index(&spec)?, spec),
        Fixture::Contractive(_) => {
            let t = generate::random_contractive_drazin(dimension, target_index, spec.seed)?;
            (t, InstanceSpec { core_spectral_radius: 1.2, ..spec })
        }
    };
    let dec = decomp::core_nilpotent(&t, cfg)?;
    let inner = match info.fixture {
        Fixture::Generic if rng.random_bool(0.5) => generate::random_inner_free(&t, &mut rng, cfg)?,
        Fixture::Generic => generate::random_inner_block(&dec, BlockShape::default(), &mut rng, cfg)?,
        Fixture::Contractive(shape) => generate::random_inner_block(&dec, shape, &mut rng, cfg)?,
    };
    let n = t.rows();
    let structured = rng.random_bool(0.5);
    let extra = match info.extra {
        ExtraKind::None => None,
        ExtraKind::Factor => Some(generate::gaussian(n, n, &mut rng)),
        _ if !structured => Some(generate::gaussian(n, n, &mut rng)),
        ExtraKind::AboveGd1 | ExtraKind::AboveOnegd | ExtraKind::AboveDrazin => {
            let s = dec.nil_dim();
            let x4 = generate::gaussian(s, s, &mut rng);
            let (y, z, _) = crate::ginv::block_params(&dec, &inner.value)?;
            Some(match info.extra {
                ExtraKind::AboveGd1 => relations::construct_above_gd1(&dec, &y, &x4)?,
                ExtraKind::AboveOnegd => relations::construct_above_onegd(&dec, &z, &x4)?,
                _ => {
                    let r = dec.core_dim();
                    dec.from_blocks(&dec.t1, &Matrix::zeros(r, s), &Matrix::zeros(s, r), &x4)?
                }
            })
        }
    };
    let fingerprint = Fingerprint {
        seed,
        dimension: spec.dimension,
        target_index: spec.target_index,
        core_spectral_radius: spec.core_spectral_radius,
    };
    Ok(Instance { t, inner, extra, fingerprint })
}

fn run_one(
    info: &TheoremInfo,
    dims: &RangeInclusive<usize>,
    indices: &RangeInclusive<usize>,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<TheoremCheckReport> {
    let inst = build_instance(info, dims, indices, seed, cfg)?;
    let mut report = registry::check(info.id, &inst.t, &inst.inner, inst.extra.as_ref(), cfg)?;
    report.fingerprint = Some(inst.fingerprint);
    Ok(report)
}

fn validate_range(name: &str, r: &RangeInclusive<usize>, lo: usize) -> Result<()> {
    if r.is_empty() || *r.start() < lo || *r.end() > MAX_DIMENSION {
        return Err(GinvError::InvalidSpec(format!(
            "{name} range {}..{} must be non-empty within {lo}..{MAX_DIMENSION}",
            r.start(),
            r.end()
        )));
    }
    Ok(())
}

/// Runs every registry statement on `count` instances. Both ranges are
/// inclusive; a drawn index above the drawn dimension is clamped to it.
pub fn fuzz(
    dims: RangeInclusive<usize>,
    indices: RangeInclusive<usize>,
    count: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<FuzzReport> {
    cfg.validate()?;
    if count == 0 {
        return Err(GinvError::InvalidSpec("count must be at least 1".into()));
    }
    validate_range("dims", &dims, 1)?;
    validate_range("indices", &indices, 0)?;
    let seeds: Vec<u64> = (0..count as u64).map(|i| instance_seed(seed, i)).collect();
    let jobs: Vec<(&TheoremInfo, u64)> =
        REGISTRY.iter().flat_map(|info| seeds.iter().map(move |&s| (info, s))).collect();
    let results: Vec<Result<TheoremCheckReport>> =
        jobs.par_iter().map(|(info, s)| run_one(info, &dims, &indices, *s, cfg)).collect();

    let mut checks = Vec::with_capacity(jobs.len());
    let mut failures = Vec::new();
    let mut summary: BTreeMap<String, TheoremSummary> = BTreeMap::new();
    for ((info, s), result) in jobs.iter().zip(results) {
        let entry =
            summary.entry(info.id.to_string()).or_insert(TheoremSummary { instances: 0, passed: 0, max_residual: 0.0 });
        entry.instances += 1;
        match result {
            Ok(report) => {
                let residuals: BTreeMap<String, f64> =
                    report.residuals.iter().map(|(k, r)| (k.clone(), r.value)).collect();
                entry.max_residual = residuals.values().copied().fold(entry.max_residual, f64::max);
                if report.passed {
                    entry.passed += 1;
                } else {
                    failures.push(FuzzFailure {
                        id: info.id.to_string(),
                        seed: *s,
                        reason: report.failures().join("; "),
                    });
                }
                checks.push(CheckSummary { id: info.id.to_string(), passed: report.passed, residuals, seed: *s });
            }
            Err(e) => {
                failures.push(FuzzFailure { id: info.id.to_string(), seed: *s, reason: e.to_string() });
                checks.push(CheckSummary {
                    id: info.id.to_string(),
                    passed: false,
                    residuals: BTreeMap::new(),
                    seed: *s,
                });
            }
        }
    }
    Ok(FuzzReport { passed: failures.is_empty(), checks, failures, summary })
}
