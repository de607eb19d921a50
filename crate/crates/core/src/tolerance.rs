use serde::{Deserialize, Serialize};

use crate::error::{GinvError, Result};

/// Numerical cutoffs shared by every routine in the crate.
///
/// * `rank_tol` - relative singular-value cutoff for rank decisions.
/// * `eq_tol` - relative Frobenius residual accepted as matrix equality.
/// * `eig_tol` - relative cutoff for treating a spectrum as `{0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub rank_tol: f64,
    pub eq_tol: f64,
    pub eig_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { rank_tol: 1e-10, eq_tol: 1e-8, eig_tol: 1e-8 }
    }
}

impl ToleranceConfig {
    pub fn new(rank_tol: f64, eq_tol: f64, eig_tol: f64) -> Result<Self> {
        let cfg = ToleranceConfig { rank_tol, eq_tol, eig_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("rank_tol", self.rank_tol), ("eq_tol", self.eq_tol), ("eig_tol", self.eig_tol)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(GinvError::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    pub fn with_eq_tol(self, eq_tol: f64) -> Self {
        ToleranceConfig { eq_tol, ..self }
    }
}
