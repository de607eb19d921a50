//! Finite sections of the block operator `A (+) D` on sequence space, where
//! `A` is the 3x3 index-1 example and `D e_n = ((2n - 1)/n) e_n` for `n >= 4`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GinvError, Result};
use crate::ginv;
use crate::matrix::Matrix;
use crate::numeric::relative_residual;
use crate::tolerance::ToleranceConfig;
use crate::verify::generate;
use crate::verify::registry::{Residual, TheoremCheckReport};

const SAMPLES: usize = 3;
const SAMPLE_SEED: u64 = 0x12;

pub fn l2_block_a() -> Matrix {
    Matrix::from_real_rows(&[[1.0, 2.0, 3.0], [0.0, 2.0, 0.0], [0.0, 1.0, 0.0]])
}

/// The Drazin inverse of the 3x3 block, in closed form.
pub fn l2_block_a_drazin() -> Matrix {
    Matrix::from_real_rows(&[[1.0, -13.0 / 4.0, 3.0], [0.0, 0.5, 0.0], [0.0, 0.25, 0.0]])
}

/// `blockdiag(A, diag((2n - 1)/n : n = 4..=N))`, an `N x N` matrix.
pub fn l2_section(n: usize) -> Result<Matrix> {
    if n < 4 {
        return Err(GinvError::InvalidSpec(format!("truncation {n} must be at least 4")));
    }
    let d: Vec<f64> = (4..=n).map(|k| (2 * k - 1) as f64 / k as f64).collect();
    Ok(Matrix::block_diag(&l2_block_a(), &Matrix::diag_real(&d)))
}

/// Checks the Drazin inverse of the `N`-th section against the closed form
/// and the block pattern `[[A^d A A^-, 0], [X3, D^-1]]` with `X3 A = 0` of the
/// GD1 inverse for a few sampled inner inverses.
pub fn l2_example(n: usize, cfg: &ToleranceConfig) -> Result<TheoremCheckReport> {
    cfg.validate()?;
    let t = l2_section(n)?;
    let m = n - 3;
    let d_inv = Matrix::diag_real(&(4..=n).map(|k| k as f64 / (2 * k - 1) as f64).collect::<Vec<_>>());
    let ad = l2_block_a_drazin();
    let a = l2_block_a();

    let mut residuals = BTreeMap::new();
    let mut put = |name: String, value: f64| {
        residuals.insert(name, Residual { value, tol: cfg.eq_tol });
    };
    let block_zero = |m: &Matrix| m.frobenius_norm() / 1f64.max(t.frobenius_norm());

    let td = ginv::drazin(&t, cfg)?;
    let [d11, d12, d21, d22] = td.split(3);
    put("drazin: A^d block".into(), relative_residual(&d11, &ad));
    put("drazin: D^-1 block".into(), relative_residual(&d22, &d_inv));
    put("drazin: off-diagonal blocks".into(), block_zero(&d12).max(block_zero(&d21)));

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for s in 0..SAMPLES {
        let inner = generate::random_inner_free(&t, &mut rng, cfg)?;
        let x = ginv::gd1(&t, &inner, cfg)?;
        let [x11, x12, x21, x22] = x.split(3);
        let a_inner = inner.value.block(0, 0, 3, 3);
        put(format!("sample {s}: (1,1) block = A^d A A^-"), relative_residual(&x11, &(&ad * &a * &a_inner)));
        put(format!("sample {s}: (1,2) block = 0"), block_zero(&x12));
        put(format!("sample {s}: X3 A = 0"), block_zero(&(&x21 * &a)));
        put(format!("sample {s}: (2,2) block = D^-1"), relative_residual(&x22, &d_inv));
    }

    let mut diagnostics = BTreeMap::new();
    if m > 0 {
        let ratios: Vec<f64> = (4..=n).map(|k| (2 * k - 1) as f64 / k as f64).collect();
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        diagnostics.insert("D condition number".to_string(), hi / lo);
    }
    diagnostics.insert("truncation".to_string(), n as f64);
    let passed = residuals.values().all(|r: &Residual| r.value <= r.tol);
    Ok(TheoremCheckReport {
        theorem_id: "l2-example".into(),
        passed,
        residuals,
        claims: Vec::new(),
        diagnostics,
        fingerprint: None,
        notes: format!("finite section of size {n}; {SAMPLES} sampled inner inverses"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric;

    #[test]
    fn printed_drazin_block_is_the_drazin_inverse() {
        // independent check of the closed form through the defining equations
        let (a, ad) = (l2_block_a(), l2_block_a_drazin());
        assert!(relative_residual(&(&ad * &a * &ad), &ad) < 1e-15);
        assert!(relative_residual(&(&a * &ad), &(&ad * &a)) < 1e-15);
        assert!(relative_residual(&(&a * &a * &ad), &a) < 1e-15);
        assert_eq!(numeric::rank(&a, &ToleranceConfig::default()), 2);
    }

    #[test]
    fn sections() {
        let cfg = ToleranceConfig::default();
        for n in [4, 10] {
            let r = l2_example(n, &cfg).unwrap();
            assert!(r.passed, "{n}: {:?}", r.failures());
        }
        let t = ginv::drazin(&l2_section(4).unwrap(), &cfg).unwrap();
        assert!((t.get(3, 3).re - 4.0 / 7.0).abs() < 1e-10);
        let t = ginv::drazin(&l2_section(10).unwrap(), &cfg).unwrap();
        for k in 4..=10 {
            assert!((t.get(k - 1, k - 1).re - k as f64 / (2 * k - 1) as f64).abs() < 1e-10);
        }
        assert!(matches!(l2_example(3, &cfg), Err(GinvError::InvalidSpec(_))));
    }
}
