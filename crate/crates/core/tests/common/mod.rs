#![allow(dead_code)]

use ginv_core::decomp;
use ginv_core::verify::generate::{self, BlockShape, InstanceSpec};
use ginv_core::{InnerInverse, Matrix, ToleranceConfig, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), rows * cols)
        .prop_map(move |v| Matrix::new(rows, cols, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap())
}

pub fn any_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| matrix(r, c))
}

/// Rank-deficient square matrix `G1 G2` with inner dimension below `n`.
pub fn low_rank_square() -> impl Strategy<Value = Matrix> {
    (2usize..=8)
        .prop_flat_map(|n| (1..n).prop_flat_map(move |r| (matrix(n, r), matrix(r, n))))
        .prop_map(|(a, b)| &a * &b)
}

pub fn spec() -> impl Strategy<Value = InstanceSpec> {
    (2usize..=8, 0usize..=3, 0usize..3, any::<u64>()).prop_map(|(n, k, r, seed)| InstanceSpec {
        dimension: n,
        target_index: k.min(n),
        core_spectral_radius: [0.5, 1.0, 2.0][r],
        seed,
    })
}

pub struct Case {
    pub spec: InstanceSpec,
    pub t: Matrix,
    pub inner: InnerInverse,
    pub rng: ChaCha8Rng,
}

impl std::fmt::Debug for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} inner {:?}", self.spec, self.inner.provenance)
    }
}

/// Random `T` with prescribed index and an inner inverse drawn from either
/// constructor.
pub fn case() -> impl Strategy<Value = Case> {
    (spec(), any::<u64>(), any::<bool>()).prop_map(|(spec, seed, block)| build(spec, seed, block))
}

pub fn build(spec: InstanceSpec, seed: u64, block: bool) -> Case {
    let cfg = cfg();
    let t = generate::random_with_index(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = if block {
        let dec = decomp::core_nilpotent(&t, &cfg).unwrap();
        generate::random_inner_block(&dec, BlockShape::default(), &mut rng, &cfg).unwrap()
    } else {
        generate::random_inner_free(&t, &mut rng, &cfg).unwrap()
    };
    Case { spec, t, inner, rng }
}

pub fn close(a: &Matrix, b: &Matrix) -> bool {
    ginv_core::numeric::relative_residual(a, b) <= cfg().eq_tol
}
