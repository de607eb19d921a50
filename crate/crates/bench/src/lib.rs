//! Fixed inputs for the criterion benches.

use ginv_core::verify::{generate, InstanceSpec};
use ginv_core::{InnerInverse, Matrix, ToleranceConfig};

pub const SIZES: [usize; 3] = [4, 16, 64];

/// A seeded `n x n` matrix of index `min(3, n)` and its pseudoinverse.
pub fn fixture(n: usize) -> (Matrix, InnerInverse) {
    let spec =
        InstanceSpec { dimension: n, target_index: n.min(3), core_spectral_radius: 1.0, seed: 0xbe5c + n as u64 };
    let t = generate::random_with_index(&spec).expect("valid bench spec");
    let tm = InnerInverse::pseudoinverse(&t, &ToleranceConfig::default());
    (t, tm)
}
