//! Drazin index, core-nilpotent and closed-range decompositions, and a
//! nilpotency test.
//!
//! Rank decisions on powers `T^j` are made on `T / ||T||_2`, so the cutoff is
//! `rank_tol * ||T||_2^j` rather than relative to the (possibly tiny) largest
//! singular value of the power itself. Rounding noise in the nilpotent part
//! of `T^j` would otherwise count as rank.

use serde::Serialize;

use crate::error::{GinvError, Result};
use crate::matrix::Matrix;
use crate::numeric::{self, relative_residual};
use crate::tolerance::ToleranceConfig;

/// `T = Q · blockdiag(T1, T2) · Q⁻¹` with `T1` invertible and `T2` nilpotent.
///
/// The first `t1.rows()` columns of `q` span `N(P)` (equivalently `R(T^k)`),
/// the remaining ones span `R(P)` (equivalently `N(T^k)`).
#[derive(Debug, Clone, Serialize)]
pub struct CoreNilpotentDecomposition {
    pub q: Matrix,
    #[serde(skip)]
    pub q_inv: Matrix,
    pub t1: Matrix,
    pub t2: Matrix,
    /// Spectral projector at 0, `I - T T^d`.
    pub p: Matrix,
    pub k: usize,
    /// `C_T = T^2 T^d`.
    pub core: Matrix,
    /// `Q_T = T P`.
    pub quasinilpotent_part: Matrix,
}

impl CoreNilpotentDecomposition {
    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    /// Dimension of the invertible block.
    pub fn core_dim(&self) -> usize {
        self.t1.rows()
    }

    /// Dimension of the nilpotent block.
    pub fn nil_dim(&self) -> usize {
        self.t2.rows()
    }

    /// Blocks `[[X11, X12], [X21, X22]]` of `Q⁻¹ X Q`.
    pub fn to_blocks(&self, x: &Matrix) -> Result<[Matrix; 4]> {
        if x.shape() != self.q.shape() {
            return Err(GinvError::ShapeMismatch(format!("operand {:?} does not act on C^{}", x.shape(), self.dim())));
        }
        Ok((&self.q_inv * x * &self.q).split(self.core_dim()))
    }

    /// `Q [[a, b], [c, d]] Q⁻¹`.
    pub fn from_blocks(&self, a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix> {
        let (r, s) = (self.core_dim(), self.nil_dim());
        let expect = [(a, (r, r), "(1,1)"), (b, (r, s), "(1,2)"), (c, (s, r), "(2,1)"), (d, (s, s), "(2,2)")];
        for (m, shape, name) in expect {
            if m.shape() != shape {
                return Err(GinvError::ShapeMismatch(format!(
                    "{name} block is {:?}, the split needs {:?}",
                    m.shape(),
                    shape
                )));
            }
        }
        Ok(&self.q * Matrix::from_blocks(a, b, c, d)? * &self.q_inv)
    }
}

/// `T = [U W] · [[A1, A2], [0, 0]] · [U W]*` over `R(T) ⊕ N(T*)`.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedRangeDecomposition {
    pub u: Matrix,
    pub w: Matrix,
    pub a1: Matrix,
    pub a2: Matrix,
    /// `A1 A1* + A2 A2*`, positive definite on `R(T)`.
    pub d: Matrix,
}

impl ClosedRangeDecomposition {
    pub fn basis(&self) -> Matrix {
        Matrix::hcat(&self.u, &self.w).expect("u and w share a row count")
    }

    /// Blocks of `[U W]* X [U W]`.
    pub fn to_blocks(&self, x: &Matrix) -> [Matrix; 4] {
        let b = self.basis();
        (b.adjoint() * x * &b).split(self.u.cols())
    }

    pub fn from_blocks(&self, a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix> {
        let basis = self.basis();
        Ok(&basis * Matrix::from_blocks(a, b, c, d)? * basis.adjoint())
    }
}

fn normalized(t: &Matrix, scale: f64) -> Matrix {
    if scale > 0.0 && scale.is_finite() {
        t.scale(1.0 / scale)
    } else {
        t.clone()
    }
}

/// Smallest `k` with `rank(T^k) = rank(T^{k+1})`.
pub fn index(t: &Matrix, cfg: &ToleranceConfig) -> Result<usize> {
    index_at_scale(t, numeric::spectral_norm(t), cfg)
}

/// `index` with ranks decided relative to `scale` instead of `||T||_2`. Use
/// it for matrices derived from a larger operand, where a block that is zero
/// in exact arithmetic holds rounding noise of that operand's size.
pub fn index_at_scale(t: &Matrix, scale: f64, cfg: &ToleranceConfig) -> Result<usize> {
    t.require_square()?;
    let n = t.rows();
    let unit = normalized(t, scale.max(numeric::spectral_norm(t)));
    let mut power = Matrix::identity(n);
    let mut prev = n;
    for k in 0..=n {
        power = &power * &unit;
        let r = numeric::rank_above(&power, cfg.rank_tol);
        if r == prev {
            return Ok(k);
        }
        prev = r;
    }
    // rank cannot strictly decrease more than n times
    unreachable!("rank sequence of a {n}x{n} matrix failed to stabilize")
}

pub fn core_nilpotent(t: &Matrix, cfg: &ToleranceConfig) -> Result<CoreNilpotentDecomposition> {
    core_nilpotent_at_scale(t, numeric::spectral_norm(t), cfg)
}

/// `core_nilpotent` with ranks decided relative to `scale`; see `index_at_scale`.
pub fn core_nilpotent_at_scale(t: &Matrix, scale: f64, cfg: &ToleranceConfig) -> Result<CoreNilpotentDecomposition> {
    t.require_square()?;
    let n = t.rows();
    let scale = scale.max(numeric::spectral_norm(t));
    let k = index_at_scale(t, scale, cfg)?;

    let (q, q_inv, r) = if k == 0 {
        (Matrix::identity(n), Matrix::identity(n), n)
    } else {
        let power = normalized(t, scale).pow(k)?;
        let range = numeric::orth_above(&power, cfg.rank_tol);
        let null = numeric::null_above(&power, cfg.rank_tol);
        if range.cols() + null.cols() != n {
            return Err(GinvError::NumericalBreakdown(format!(
                "range and null space of T^{k} have dimensions {} + {} != {n}",
                range.cols(),
                null.cols()
            )));
        }
        let q = Matrix::hcat(&range, &null)?;
        let q_inv = numeric::inverse(&q)?;
        (q, q_inv, range.cols())
    };
    let [t1, off12, off21, t2] = (&q_inv * t * &q).split(r);

    let scale = 1f64.max(t.frobenius_norm());
    let leak = off12.frobenius_norm().max(off21.frobenius_norm()) / scale;
    if leak > cfg.eq_tol {
        return Err(GinvError::NumericalBreakdown(format!(
            "invariant subspaces leak: off-diagonal blocks have relative size {leak:.3e}"
        )));
    }
    if r > 0 {
        let smallest = numeric::singular_values(&t1).last().copied().unwrap_or(0.0);
        if smallest <= cfg.rank_tol * numeric::spectral_norm(t) {
            return Err(GinvError::NumericalBreakdown(format!(
                "core block is numerically singular (sigma_min = {smallest:.3e})"
            )));
        }
    }

    let zero_r = Matrix::zeros(r, r);
    let zero_s = Matrix::zeros(n - r, n - r);
    let lift = |m: Matrix| &q * m * &q_inv;
    let core = lift(Matrix::block_diag(&t1, &zero_s));
    let quasinilpotent_part = lift(Matrix::block_diag(&zero_r, &t2));
    let p = lift(Matrix::block_diag(&zero_r, &Matrix::identity(n - r)));

    let rebuilt = &core + &quasinilpotent_part;
    let residual = relative_residual(&rebuilt, t);
    if residual > cfg.eq_tol {
        return Err(GinvError::NumericalBreakdown(format!("reconstruction residual {residual:.3e} exceeds eq_tol")));
    }

    Ok(CoreNilpotentDecomposition { q, q_inv, t1, t2, p, k, core, quasinilpotent_part })
}

pub fn closed_range(t: &Matrix, cfg: &ToleranceConfig) -> Result<ClosedRangeDecomposition> {
    t.require_square()?;
    let n = t.rows();
    let r = numeric::rank(t, cfg);
    let (mut u, mut w) = if n == 0 {
        (Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    } else {
        let full = Matrix::wrap(numeric::full_svd(t).u);
        (full.columns(0, r), full.columns(r, n - r))
    };
    numeric::normalize_phases(&mut u);
    numeric::normalize_phases(&mut w);
    let a1 = u.adjoint() * t * &u;
    let a2 = u.adjoint() * t * &w;
    let d = &a1 * a1.adjoint() + &a2 * a2.adjoint();
    Ok(ClosedRangeDecomposition { u, w, a1, a2, d })
}

/// Outcome of a staircase deflation: repeatedly split off the numerical null
/// space of the current block by a unitary change of basis and recurse on the
/// compressed remainder. The input is nilpotent when the remainder vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct NilpotencyReport {
    pub nilpotent: bool,
    /// Frobenius norm of everything discarded, relative to `max(1, ||M||_F)`.
    /// When `nilpotent` holds, `M` is this close to a matrix whose spectrum
    /// is exactly `{0}`.
    pub backward_error: f64,
    /// Null-space dimension peeled off at each step.
    pub steps: Vec<usize>,
}

pub fn nilpotency(m: &Matrix, cfg: &ToleranceConfig) -> Result<NilpotencyReport> {
    m.require_square()?;
    let scale = 1f64.max(m.frobenius_norm());
    let cutoff = cfg.eig_tol * scale;
    let mut current = m.clone();
    let mut dropped = 0.0f64;
    let mut steps = Vec::new();
    while current.rows() > 0 {
        let n = current.rows();
        let svd = numeric::full_svd(&current);
        let d = svd.s.iter().filter(|&&s| s <= cutoff).count();
        if d == 0 {
            let smallest = svd.s[n - 1];
            return Ok(NilpotencyReport {
                nilpotent: false,
                backward_error: (dropped + smallest * smallest).sqrt() / scale,
                steps,
            });
        }
        dropped += svd.s.iter().skip(n - d).map(|s| s * s).sum::<f64>();
        steps.push(d);
        let v = Matrix::wrap(svd.v);
        let keep = v.columns(0, n - d);
        current = keep.adjoint() * &current * &keep;
    }
    let backward_error = dropped.sqrt() / scale;
    Ok(NilpotencyReport { nilpotent: backward_error <= cfg.eig_tol, backward_error, steps })
}

/// True iff `M` is within `eig_tol * max(1, ||M||_F)` of a matrix whose
/// eigenvalues are all zero.
pub fn is_nilpotent(m: &Matrix, cfg: &ToleranceConfig) -> Result<bool> {
    Ok(nilpotency(m, cfg)?.nilpotent)
}
