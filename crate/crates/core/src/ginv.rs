//! Drazin, inner, GD1 and 1GD inverses.
//!
//! The Drazin inverse is read off the core-nilpotent decomposition,
//! `T^d = Q · blockdiag(T1⁻¹, 0) · Q⁻¹`. [`drazin_oracle`] evaluates the
//! classical `T^k (T^{2k+1})^+ T^k` formula instead and exists to cross-check
//! it. GD1 and 1GD inverses are `T^d T T^-` and `T^- T T^d` for a fixed inner
//! inverse `T^-`.

use serde::Serialize;

use crate::decomp::{self, CoreNilpotentDecomposition};
use crate::error::{GinvError, Result};
use crate::matrix::Matrix;
use crate::numeric::{self, relative_residual};
use crate::tolerance::ToleranceConfig;

/// How an inner inverse was produced.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Pseudoinverse,
    /// `Q [[T1⁻¹, y], [z, t2_inner]] Q⁻¹` in a core-nilpotent basis.
    Block {
        y: Matrix,
        z: Matrix,
        t2_inner: Matrix,
    },
    /// `T^+ + V - T^+ T V T T^+`.
    FreeParameter {
        v: Matrix,
    },
}

/// A matrix `X` with `T X T = T`, together with how it was built.
#[derive(Debug, Clone, Serialize)]
pub struct InnerInverse {
    pub value: Matrix,
    pub provenance: Provenance,
    /// `||T X T - T||_F / max(1, ||T||_F)` at construction time.
    pub residual: f64,
}

pub fn inner_residual(t: &Matrix, x: &Matrix) -> f64 {
    let txt = t * x * t;
    (&txt - t).frobenius_norm() / 1f64.max(t.frobenius_norm())
}

impl InnerInverse {
    pub fn pseudoinverse(t: &Matrix, cfg: &ToleranceConfig) -> InnerInverse {
        let value = numeric::pinv(t, cfg);
        let residual = inner_residual(t, &value);
        InnerInverse { value, provenance: Provenance::Pseudoinverse, residual }
    }

    /// Adopts an externally supplied `X`. Any inner inverse is reproduced by
    /// the free-parameter family with `V = X`, so that is the provenance
    /// recorded.
    pub fn from_matrix(t: &Matrix, x: Matrix, cfg: &ToleranceConfig) -> Result<InnerInverse> {
        require_inner_shape(t, &x)?;
        let residual = inner_residual(t, &x);
        if residual > cfg.eq_tol {
            return Err(GinvError::InvalidInnerInverse { residual });
        }
        Ok(InnerInverse { value: x.clone(), provenance: Provenance::FreeParameter { v: x }, residual })
    }

    /// Re-checks `T X T = T` against a (possibly different) `T`.
    pub fn validate_for(&self, t: &Matrix, cfg: &ToleranceConfig) -> Result<()> {
        require_inner_shape(t, &self.value)?;
        let residual = inner_residual(t, &self.value);
        if residual > cfg.eq_tol {
            return Err(GinvError::InvalidInnerInverse { residual });
        }
        Ok(())
    }
}

fn require_inner_shape(t: &Matrix, x: &Matrix) -> Result<()> {
    if x.shape() != (t.cols(), t.rows()) {
        return Err(GinvError::ShapeMismatch(format!(
            "inner inverse of a {}x{} matrix must be {}x{}, got {}x{}",
            t.rows(),
            t.cols(),
            t.cols(),
            t.rows(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

pub fn drazin_from(dec: &CoreNilpotentDecomposition) -> Result<Matrix> {
    let r = dec.core_dim();
    let s = dec.nil_dim();
    let t1_inv = numeric::inverse(&dec.t1)?;
    dec.from_blocks(&t1_inv, &Matrix::zeros(r, s), &Matrix::zeros(s, r), &Matrix::zeros(s, s))
}

pub fn drazin(t: &Matrix, cfg: &ToleranceConfig) -> Result<Matrix> {
    drazin_from(&decomp::core_nilpotent(t, cfg)?)
}

/// Drazin inverse with ranks decided relative to `scale`, for matrices built
/// from a larger operand (see `decomp::index_at_scale`).
pub fn drazin_at_scale(t: &Matrix, scale: f64, cfg: &ToleranceConfig) -> Result<Matrix> {
    drazin_from(&decomp::core_nilpotent_at_scale(t, scale, cfg)?)
}

/// `T^k (T^{2k+1})^+ T^k` with `k = ind(T)`.
///
/// Any `k >= ind(T)` gives the Drazin inverse in exact arithmetic, but the
/// core part of `T^{2k+1}` sinks below rounding noise quickly as `k` grows,
/// so the smallest admissible `k` is used. `T` is first divided by
/// `||T^k||_2^{1/k}`, which puts the core part of the powers at unit scale
/// even when the nilpotent part dominates `||T||`. The pseudoinverse is
/// truncated to `rank(T^k)`, which equals `rank(T^{2k+1})` for such `k`.
pub fn drazin_oracle(t: &Matrix, cfg: &ToleranceConfig) -> Result<Matrix> {
    t.require_square()?;
    let n = t.rows();
    let k = decomp::index(t, cfg)?;
    if k == 0 {
        return numeric::inverse(t);
    }
    // rank decision on T / ||T||_2, as in `index`
    let norm = numeric::spectral_norm(t);
    if norm == 0.0 {
        return Ok(Matrix::zeros(n, n));
    }
    let r = numeric::rank_above(&t.scale(1.0 / norm).pow(k)?, cfg.rank_tol);
    if r == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let core_scale = numeric::spectral_norm(&t.pow(k)?).powf(1.0 / k as f64);
    let unit = t.scale(1.0 / core_scale);
    let tk = unit.pow(k)?;
    let middle = numeric::pinv_truncated(&unit.pow(2 * k + 1)?, r);
    Ok((&tk * middle * &tk).scale(1.0 / core_scale))
}

/// General solution of `T X T = T`: `X = T^+ + V - T^+ T V T T^+`.
pub fn inner_sample(t: &Matrix, v: &Matrix, cfg: &ToleranceConfig) -> Result<InnerInverse> {
    require_inner_shape(t, v)?;
    let tp = numeric::pinv(t, cfg);
    let value = &tp + v - &tp * t * v * t * &tp;
    let residual = inner_residual(t, &value);
    Ok(InnerInverse { value, provenance: Provenance::FreeParameter { v: v.clone() }, residual })
}

/// `Q [[T1⁻¹, y], [z, t2_inner]] Q⁻¹`, subject to `y T2 = 0`, `T2 z = 0`
/// and `T2 t2_inner T2 = T2`.
pub fn inner_block(
    dec: &CoreNilpotentDecomposition,
    y: &Matrix,
    z: &Matrix,
    t2_inner: &Matrix,
    cfg: &ToleranceConfig,
) -> Result<InnerInverse> {
    let (r, s) = (dec.core_dim(), dec.nil_dim());
    for (m, shape, name) in [(y, (r, s), "Y"), (z, (s, r), "Z"), (t2_inner, (s, s), "T2 inner")] {
        if m.shape() != shape {
            return Err(GinvError::ShapeMismatch(format!("{name} is {:?}, expected {:?}", m.shape(), shape)));
        }
    }
    let t2 = &dec.t2;
    let annihilates = |prod: Matrix, a: &Matrix, b: &Matrix| {
        prod.frobenius_norm() <= cfg.eq_tol * 1f64.max(a.frobenius_norm() * b.frobenius_norm())
    };
    if !annihilates(y * t2, y, t2) {
        return Err(GinvError::ConstraintViolated("R(T2) ⊆ N(Y) fails: Y T2 != 0".into()));
    }
    if !annihilates(t2 * z, t2, z) {
        return Err(GinvError::ConstraintViolated("R(Z) ⊆ N(T2) fails: T2 Z != 0".into()));
    }
    if relative_residual(&(t2 * t2_inner * t2), t2) > cfg.eq_tol {
        return Err(GinvError::ConstraintViolated("T2 inner block is not an inner inverse of T2".into()));
    }
    let value = dec.from_blocks(&numeric::inverse(&dec.t1)?, y, z, t2_inner)?;
    let t = &dec.core + &dec.quasinilpotent_part;
    let residual = inner_residual(&t, &value);
    Ok(InnerInverse {
        value,
        provenance: Provenance::Block { y: y.clone(), z: z.clone(), t2_inner: t2_inner.clone() },
        residual,
    })
}

/// Block parameters `(Y, Z, T2^-)` of an inner inverse in the basis of `dec`.
/// Every inner inverse has this form; the `(1,1)` block is always `T1⁻¹`.
pub fn block_params(dec: &CoreNilpotentDecomposition, x: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    let [_, y, z, w] = dec.to_blocks(x)?;
    Ok((y, z, w))
}

/// The Drazin inverse, the chosen inner inverse, and the GD1 and 1GD
/// inverses built from them.
#[derive(Debug, Clone, Serialize)]
pub struct GD1Result {
    pub drazin: Matrix,
    pub inner: InnerInverse,
    pub gd1: Matrix,
    pub onegd: Matrix,
}

impl GD1Result {
    pub fn compute(t: &Matrix, tm: &InnerInverse, cfg: &ToleranceConfig) -> Result<GD1Result> {
        t.require_square()?;
        tm.validate_for(t, cfg)?;
        let drazin = drazin(t, cfg)?;
        let gd1 = &drazin * t * &tm.value;
        let onegd = &tm.value * t * &drazin;
        Ok(GD1Result { drazin, inner: tm.clone(), gd1, onegd })
    }
}

/// `T^{GD-} = T^d T T^-`.
pub fn gd1(t: &Matrix, tm: &InnerInverse, cfg: &ToleranceConfig) -> Result<Matrix> {
    t.require_square()?;
    tm.validate_for(t, cfg)?;
    Ok(drazin(t, cfg)? * t * &tm.value)
}

/// `T^{-GD} = T^- T T^d`.
pub fn onegd(t: &Matrix, tm: &InnerInverse, cfg: &ToleranceConfig) -> Result<Matrix> {
    t.require_square()?;
    tm.validate_for(t, cfg)?;
    Ok(&tm.value * t * drazin(t, cfg)?)
}

/// `(T^{GD-})^m` through the closed form `(T^d)^{m-1} T^-`.
pub fn gd1_power(t: &Matrix, tm: &InnerInverse, m: usize, cfg: &ToleranceConfig) -> Result<Matrix> {
    if m < 2 {
        return Err(GinvError::InvalidExponent(m));
    }
    t.require_square()?;
    tm.validate_for(t, cfg)?;
    Ok(drazin(t, cfg)?.pow(m - 1)? * &tm.value)
}

/// `(ST)^d` through Cline's formula `S ((TS)^d)^2 T`.
pub fn cline(s: &Matrix, t: &Matrix, cfg: &ToleranceConfig) -> Result<Matrix> {
    if s.cols() != t.rows() || t.cols() != s.rows() {
        return Err(GinvError::ShapeMismatch(format!(
            "Cline's formula needs S: m x n and T: n x m, got {:?} and {:?}",
            s.shape(),
            t.shape()
        )));
    }
    let ts_d = drazin(&(t * s), cfg)?;
    Ok(s * &ts_d * &ts_d * t)
}

/// `(T^2 T^-)^d`, which coincides with `T^{GD-}`.
pub fn t2tm_drazin(t: &Matrix, tm: &InnerInverse, cfg: &ToleranceConfig) -> Result<Matrix> {
    t.require_square()?;
    tm.validate_for(t, cfg)?;
    let norm = numeric::spectral_norm(t);
    let scale = norm * norm * numeric::spectral_norm(&tm.value);
    drazin_at_scale(&(t * t * &tm.value), scale, cfg)
}
