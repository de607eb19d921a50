//! Seeded random instances with a prescribed Drazin index, and random inner
//! inverses for them.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::decomp::{self, CoreNilpotentDecomposition};
use crate::error::{GinvError, Result};
use crate::ginv::{self, InnerInverse};
use crate::matrix::{Matrix, C64};
use crate::numeric;
use crate::tolerance::ToleranceConfig;

pub const MAX_DIMENSION: usize = 64;
const MAX_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dimension: usize,
    pub target_index: usize,
    pub core_spectral_radius: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIMENSION).contains(&self.dimension) {
            return Err(GinvError::InvalidSpec(format!(
                "dimension must lie in 1..={MAX_DIMENSION}, got {}",
                self.dimension
            )));
        }
        if self.target_index > self.dimension {
            return Err(GinvError::InvalidSpec(format!(
                "target index {} exceeds dimension {}",
                self.target_index, self.dimension
            )));
        }
        if !(self.core_spectral_radius.is_finite() && self.core_spectral_radius > 0.0) {
            return Err(GinvError::InvalidSpec(format!(
                "core spectral radius must be finite and positive, got {}",
                self.core_spectral_radius
            )));
        }
        Ok(())
    }

    /// Size of the nilpotent block the generator will use.
    fn nilpotent_size(&self, rng: &mut ChaCha8Rng) -> usize {
        let (n, k) = (self.dimension, self.target_index);
        if k == 0 {
            0
        } else if k == n {
            n
        } else {
            rng.random_range(k..n)
        }
    }
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let entries = (0..rows * cols)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect::<Vec<_>>();
    Matrix::wrap(DMatrix::from_vec(rows, cols, entries))
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let g = gaussian(n, n, rng);
    Matrix::wrap(g.into_dmatrix().qr().q())
}

fn unit_phase(rng: &mut impl Rng) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Upper-triangular core conjugated by a random unitary. Eigenvalue moduli
/// are drawn from `[lo, hi]` and the first one is pinned to `hi`.
fn random_core(size: usize, lo: f64, hi: f64, coupling: f64, rng: &mut impl Rng) -> Matrix {
    let mut r = Matrix::zeros(size, size);
    for i in 0..size {
        let modulus = if i == 0 { hi } else { rng.random_range(lo..=hi) };
        r.set(i, i, unit_phase(rng) * modulus);
        for j in i + 1..size {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            r.set(i, j, C64::new(re, im) * coupling);
        }
    }
    let u = random_unitary(size, rng);
    &u * r * u.adjoint()
}

/// Jordan blocks at 0 with random nonzero superdiagonal, the first block of
/// size `k` and the rest of size at most `k`.
fn random_nilpotent(size: usize, k: usize, rng: &mut impl Rng) -> Matrix {
    let mut n = Matrix::zeros(size, size);
    let mut start = 0;
    let mut first = true;
    while start < size {
        let len = if first { k.min(size) } else { rng.random_range(1..=k.min(size - start)) };
        first = false;
        for i in start..start + len - 1 {
            n.set(i, i + 1, unit_phase(rng) * rng.random_range(0.5..=1.5));
        }
        start += len;
    }
    n
}

/// `T = Q blockdiag(C, N) Q⁻¹` with `index(T) = spec.target_index`.
///
/// `C` has spectral radius `core_spectral_radius` (eigenvalue moduli in the
/// upper half of that), `N` is nilpotent of order exactly `target_index`,
/// and `Q = U1 diag(s) U2` with `s` in `[1, 4]`, so `cond(Q) <= 4`.
pub fn random_with_index(spec: &InstanceSpec) -> Result<Matrix> {
    spec.validate()?;
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_ATTEMPTS {
        let n = spec.dimension;
        let m = spec.nilpotent_size(&mut rng);
        let rho = spec.core_spectral_radius;
        let c = random_core(n - m, 0.5 * rho, rho, 0.1 * rho, &mut rng);
        let nil = random_nilpotent(m, spec.target_index, &mut rng);

        let u1 = random_unitary(n, &mut rng);
        let u2 = random_unitary(n, &mut rng);
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=4.0)).collect();
        let inv_s: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
        let q = &u1 * Matrix::diag_real(&s) * &u2;
        let q_inv = u2.adjoint() * Matrix::diag_real(&inv_s) * u1.adjoint();
        let t = &q * Matrix::block_diag(&c, &nil) * &q_inv;
        if decomp::index(&t, &cfg)? == spec.target_index {
            return Ok(t);
        }
    }
    Err(GinvError::NumericalBreakdown(format!(
        "no instance with index {} after {MAX_ATTEMPTS} attempts",
        spec.target_index
    )))
}

/// An instance whose core is normal with eigenvalue moduli in `[1, 1.2]`
/// under a unitary similarity, so `||T^d||_2 <= 1` and powers of the core
/// grow slowly enough for the limit sequences to be resolved numerically.
pub fn random_contractive_drazin(dimension: usize, target_index: usize, seed: u64) -> Result<Matrix> {
    let spec = InstanceSpec { dimension, target_index, core_spectral_radius: 1.2, seed };
    spec.validate()?;
    let cfg = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let m = spec.nilpotent_size(&mut rng);
        let c = random_core(dimension - m, 1.0, 1.2, 0.0, &mut rng);
        let nil = random_nilpotent(m, target_index, &mut rng);
        let u = random_unitary(dimension, &mut rng);
        let t = &u * Matrix::block_diag(&c, &nil) * u.adjoint();
        if decomp::index(&t, &cfg)? == target_index {
            return Ok(t);
        }
    }
    Err(GinvError::NumericalBreakdown(format!("no contractive instance with index {target_index}")))
}

/// Pseudoinverse of a block of `T`, with the rank decided at the scale of the
/// whole decomposition so rounding noise in an exactly-zero block stays zero.
pub(crate) fn block_pinv(dec: &CoreNilpotentDecomposition, m: &Matrix, cfg: &ToleranceConfig) -> Matrix {
    let scale = 1f64.max(numeric::spectral_norm(&dec.t1)).max(numeric::spectral_norm(&dec.t2));
    numeric::pinv_truncated(m, numeric::rank_above(m, cfg.rank_tol * scale))
}

/// Which block parameters of a sampled inner inverse are forced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockShape {
    pub zero_y: bool,
    pub zero_z: bool,
}

/// Random admissible `(Y, Z, T2^-)` for `dec`: `Y` is projected onto the
/// left null space of `T2`, `Z` onto its null space, and `T2^-` is drawn
/// from the free-parameter family of `T2`.
pub fn random_block_params(
    dec: &CoreNilpotentDecomposition,
    shape: BlockShape,
    rng: &mut impl Rng,
    cfg: &ToleranceConfig,
) -> (Matrix, Matrix, Matrix) {
    let (r, s) = (dec.core_dim(), dec.nil_dim());
    let t2 = &dec.t2;
    let t2p = block_pinv(dec, t2, cfg);
    let id = Matrix::identity(s);
    let left_null = &id - t2 * &t2p;
    let right_null = &id - &t2p * t2;
    let y = if shape.zero_y { Matrix::zeros(r, s) } else { gaussian(r, s, rng) * left_null };
    let z = if shape.zero_z { Matrix::zeros(s, r) } else { right_null * gaussian(s, r, rng) };
    let v = gaussian(s, s, rng);
    let w = &t2p + &v - &t2p * t2 * &v * t2 * &t2p;
    (y, z, w)
}

pub fn random_inner_block(
    dec: &CoreNilpotentDecomposition,
    shape: BlockShape,
    rng: &mut impl Rng,
    cfg: &ToleranceConfig,
) -> Result<InnerInverse> {
    let (y, z, w) = random_block_params(dec, shape, rng, cfg);
    ginv::inner_block(dec, &y, &z, &w, cfg)
}

pub fn random_inner_free(t: &Matrix, rng: &mut impl Rng, cfg: &ToleranceConfig) -> Result<InnerInverse> {
    let v = gaussian(t.cols(), t.rows(), rng);
    ginv::inner_sample(t, &v, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dimension: usize, target_index: usize, seed: u64) -> InstanceSpec {
        InstanceSpec { dimension, target_index, core_spectral_radius: 1.0, seed }
    }

    /// Rank of powers computed independently of `decomp::index`: smallest `k`
    /// where the number of singular values of `T^k` above `1e-9 * ||T||^k`
    /// stops changing.
    fn oracle_index(t: &Matrix) -> usize {
        let norm = numeric::spectral_norm(t);
        let mut prev = t.rows();
        let mut p = Matrix::identity(t.rows());
        for k in 0..=t.rows() {
            p = &p * t;
            let r = numeric::singular_values(&p).iter().filter(|&&s| s > 1e-9 * norm.powi(k as i32 + 1)).count();
            if r == prev {
                return k;
            }
            prev = r;
        }
        unreachable!()
    }

    #[test]
    fn generator_examples() {
        let t = random_with_index(&spec(4, 0, 1)).unwrap();
        assert_eq!(decomp::index(&t, &ToleranceConfig::default()).unwrap(), 0);
        assert!(numeric::inverse(&t).is_ok());

        let t = random_with_index(&spec(2, 2, 7)).unwrap();
        assert_eq!(oracle_index(&t), 2);
        assert!(decomp::is_nilpotent(&t, &ToleranceConfig::default()).unwrap());

        let t = random_with_index(&spec(3, 1, 11)).unwrap();
        assert_eq!(oracle_index(&t), 1);
    }

    #[test]
    fn generator_hits_every_index() {
        for n in 1..=8 {
            for k in 0..=n.min(4) {
                for seed in 0..3 {
                    let t = random_with_index(&spec(n, k, seed)).unwrap();
                    assert_eq!(oracle_index(&t), k, "n={n} k={k} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = random_with_index(&spec(5, 2, 99)).unwrap();
        let b = random_with_index(&spec(5, 2, 99)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_with_index(&spec(5, 2, 100)).unwrap());
    }

    #[test]
    fn invalid_specs() {
        for bad in [spec(0, 0, 0), spec(65, 0, 0), spec(3, 4, 0)] {
            assert!(matches!(random_with_index(&bad), Err(GinvError::InvalidSpec(_))));
        }
        let bad = InstanceSpec { core_spectral_radius: -1.0, ..spec(3, 1, 0) };
        assert!(matches!(random_with_index(&bad), Err(GinvError::InvalidSpec(_))));
    }

    #[test]
    fn contractive_instances_have_small_drazin_norm() {
        let cfg = ToleranceConfig::default();
        for seed in 0..10 {
            let t = random_contractive_drazin(5, 2, seed).unwrap();
            let d = ginv::drazin(&t, &cfg).unwrap();
            assert!(numeric::spectral_norm(&d) <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn sampled_inner_inverses_are_inner() {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..20 {
            let t = random_with_index(&spec(6, (seed % 4) as usize, seed)).unwrap();
            let dec = decomp::core_nilpotent(&t, &cfg).unwrap();
            let x = random_inner_block(&dec, BlockShape::default(), &mut rng, &cfg).unwrap();
            assert!(x.residual < 1e-10, "block residual {}", x.residual);
            let x = random_inner_free(&t, &mut rng, &cfg).unwrap();
            assert!(x.residual < 1e-10, "free residual {}", x.residual);
        }
    }
}
