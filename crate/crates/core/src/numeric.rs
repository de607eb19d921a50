//! Rank, pseudoinverse, subspace bases and projectors.
//!
//! Everything here is SVD based. Rank decisions use a cutoff relative to the
//! largest singular value unless a caller supplies an explicit scale.

use faer::Mat;
use nalgebra::DMatrix;

use crate::error::{GinvError, Result};
use crate::matrix::{Matrix, C64};
use crate::tolerance::ToleranceConfig;

/// Full SVD `M = U diag(s) V^*` with `U`, `V` square and `s` descending.
pub(crate) struct FullSvd {
    pub u: DMatrix<C64>,
    pub s: Vec<f64>,
    pub v: DMatrix<C64>,
}

// nalgebra's complex SVD loses accuracy on some rank-deficient inputs, so
// every factorization goes through faer.
fn to_faer(m: &Matrix) -> Mat<C64> {
    let d = m.as_dmatrix();
    Mat::from_fn(d.nrows(), d.ncols(), |i, j| d[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub(crate) fn full_svd(m: &Matrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let failed =
        || FullSvd { u: DMatrix::identity(rows, rows), s: vec![f64::NAN; k], v: DMatrix::identity(cols, cols) };
    if !m.is_finite() {
        return failed();
    }
    match to_faer(m).svd() {
        Ok(svd) => FullSvd { u: from_faer(svd.U()), s: (0..k).map(|i| svd.S()[i].re).collect(), v: from_faer(svd.V()) },
        Err(_) => failed(),
    }
}

/// Singular values in descending order. Empty for zero-sized input.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    if !m.is_finite() {
        return vec![f64::NAN; m.rows().min(m.cols())];
    }
    to_faer(m).singular_values().unwrap_or_else(|_| vec![f64::NAN; m.rows().min(m.cols())])
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rank_tol * sigma_max`.
pub fn rank(m: &Matrix, cfg: &ToleranceConfig) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > cfg.rank_tol * top).count(),
        _ => 0,
    }
}

/// Number of singular values strictly above an absolute cutoff.
pub fn rank_above(m: &Matrix, cutoff: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > cutoff).count()
}

pub fn relative_residual(a: &Matrix, b: &Matrix) -> f64 {
    let diff = (a - b).frobenius_norm();
    diff / 1f64.max(a.frobenius_norm()).max(b.frobenius_norm())
}

/// `||A - B||_F <= eq_tol * max(1, ||A||_F, ||B||_F)`.
pub fn approx_eq(a: &Matrix, b: &Matrix, cfg: &ToleranceConfig) -> Result<bool> {
    a.require_same_shape(b)?;
    Ok(relative_residual(a, b) <= cfg.eq_tol)
}

pub fn pinv(m: &Matrix, cfg: &ToleranceConfig) -> Matrix {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Matrix::zeros(cols, rows);
    }
    let top = spectral_norm(m);
    let r = if top > 0.0 { rank_above(m, cfg.rank_tol * top) } else { 0 };
    pinv_truncated(m, r)
}

/// Pseudoinverse restricted to the `r` largest singular values.
pub fn pinv_truncated(m: &Matrix, r: usize) -> Matrix {
    let (rows, cols) = m.shape();
    if m.is_empty() || r == 0 {
        return Matrix::zeros(cols, rows);
    }
    let svd = full_svd(m);
    let mut out = DMatrix::<C64>::zeros(cols, rows);
    for (i, &s) in svd.s.iter().enumerate().take(r) {
        if s > 0.0 {
            // v_i * (1/s) * u_i^*
            out += (svd.v.column(i) * svd.u.column(i).adjoint()).map(|z| z / s);
        }
    }
    Matrix::wrap(out)
}

/// Inverse of a square matrix; `NumericalBreakdown` if it is singular to
/// working precision.
pub fn inverse(m: &Matrix) -> Result<Matrix> {
    m.require_square()?;
    if m.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    let inv = m
        .as_dmatrix()
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| GinvError::NumericalBreakdown("matrix is singular".into()))?;
    let inv = Matrix::wrap(inv);
    if !inv.is_finite() {
        return Err(GinvError::NumericalBreakdown("inverse is not finite".into()));
    }
    Ok(inv)
}

/// Rotates each column so its largest-magnitude entry is real and positive.
/// Makes SVD-derived bases independent of the solver's phase choices.
pub(crate) fn normalize_phases(basis: &mut Matrix) {
    for j in 0..basis.cols() {
        let col: Vec<C64> = (0..basis.rows()).map(|i| basis.get(i, j)).collect();
        let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = col.iter().find(|z| z.norm() >= max * (1.0 - 1e-8)).copied().unwrap_or(C64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for (i, z) in col.into_iter().enumerate() {
            basis.set(i, j, z * phase);
        }
    }
}

/// Orthonormal basis of the range, keeping left singular vectors whose
/// singular value exceeds `cutoff`.
pub fn orth_above(m: &Matrix, cutoff: f64) -> Matrix {
    if m.is_empty() {
        return Matrix::zeros(m.rows(), 0);
    }
    let svd = full_svd(m);
    let r = svd.s.iter().filter(|&&s| s > cutoff).count();
    let mut basis = Matrix::wrap(svd.u.columns(0, r).into_owned());
    normalize_phases(&mut basis);
    basis
}

/// Orthonormal basis of the null space: right singular vectors beyond the
/// numerical rank determined by `cutoff`.
pub fn null_above(m: &Matrix, cutoff: f64) -> Matrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    if rows == 0 {
        return Matrix::identity(cols);
    }
    let svd = full_svd(m);
    let r = svd.s.iter().filter(|&&s| s > cutoff).count();
    let mut basis = Matrix::wrap(svd.v.columns(r, cols - r).into_owned());
    normalize_phases(&mut basis);
    basis
}

fn relative_cutoff(m: &Matrix, cfg: &ToleranceConfig) -> f64 {
    let top = spectral_norm(m);
    if top > 0.0 {
        cfg.rank_tol * top
    } else {
        0.0
    }
}

pub fn orth(m: &Matrix, cfg: &ToleranceConfig) -> Matrix {
    orth_above(m, relative_cutoff(m, cfg))
}

pub fn null_space(m: &Matrix, cfg: &ToleranceConfig) -> Matrix {
    null_above(m, relative_cutoff(m, cfg))
}

/// Orthogonal projector onto the column space of `basis`.
pub fn range_projector(m: &Matrix, cfg: &ToleranceConfig) -> Matrix {
    let q = orth(m, cfg);
    &q * q.adjoint()
}

/// Distance between the column spaces of `a` and `b`, measured as the
/// Frobenius norm of the difference of their orthogonal projectors.
pub fn subspace_distance(a: &Matrix, b: &Matrix, cfg: &ToleranceConfig) -> Result<f64> {
    if a.rows() != b.rows() {
        return Err(GinvError::ShapeMismatch(format!("subspaces of C^{} and C^{}", a.rows(), b.rows())));
    }
    Ok((range_projector(a, cfg) - range_projector(b, cfg)).frobenius_norm())
}

/// Relative size of the part of `x`'s columns lying outside `R(span)`.
/// Zero exactly when `R(x) ⊆ R(span)`.
pub fn range_excess(x: &Matrix, span: &Matrix, cfg: &ToleranceConfig) -> Result<f64> {
    if x.rows() != span.rows() {
        return Err(GinvError::ShapeMismatch(format!("{:?} vs {:?}", x.shape(), span.shape())));
    }
    let p = range_projector(span, cfg);
    let outside = x - &p * x;
    Ok(outside.frobenius_norm() / 1f64.max(x.frobenius_norm()))
}

/// Idempotent `P` with range `span(range_basis)` and null space
/// `span(null_basis)`, solved from `P [R N] = [R 0]`.
pub fn oblique_projector(range_basis: &Matrix, null_basis: &Matrix, cfg: &ToleranceConfig) -> Result<Matrix> {
    let n = range_basis.rows();
    if null_basis.rows() != n {
        return Err(GinvError::ShapeMismatch(format!(
            "range basis lives in C^{n}, null basis in C^{}",
            null_basis.rows()
        )));
    }
    let r = orth(range_basis, cfg);
    let k = orth(null_basis, cfg);
    if r.cols() + k.cols() != n {
        return Err(GinvError::NonComplementarySubspaces(format!(
            "dimensions {} + {} do not add up to {n}",
            r.cols(),
            k.cols()
        )));
    }
    let joint = Matrix::hcat(&r, &k)?;
    if rank(&joint, cfg) != n || singular_values(&joint).last().copied().unwrap_or(1.0) <= cfg.rank_tol {
        return Err(GinvError::NonComplementarySubspaces("subspaces intersect nontrivially".into()));
    }
    let target = Matrix::hcat(&r, &Matrix::zeros(n, k.cols()))?;
    let p = target * inverse(&joint)?;

    let idem = relative_residual(&(&p * &p), &p);
    let on_range = relative_residual(&(&p * &r), &r);
    let on_null = (&p * &k).frobenius_norm() / 1f64.max(p.frobenius_norm());
    let worst = idem.max(on_range).max(on_null);
    if worst > cfg.eq_tol {
        return Err(GinvError::NonComplementarySubspaces(format!(
            "projector residual {worst:.3e} exceeds tolerance; subspaces are nearly dependent"
        )));
    }
    Ok(p)
}
