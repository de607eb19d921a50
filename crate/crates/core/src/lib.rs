//! Generalized inverses of dense complex matrices.
//!
//! The crate computes Drazin inverses through the core-nilpotent
//! decomposition, parameterizes inner inverses, and builds the GD1
//! (`T^d T T^-`) and 1GD (`T^- T T^d`) inverses on top of them. The
//! [`relations`] module implements the pre-orders induced by these inverses,
//! and [`verify`] turns their algebraic properties into executable checks.

pub mod decomp;
pub mod error;
pub mod ginv;
pub mod matrix;
pub mod numeric;
pub mod relations;
pub mod tolerance;
pub mod verify;

pub use decomp::{
    closed_range, core_nilpotent, index, is_nilpotent, ClosedRangeDecomposition, CoreNilpotentDecomposition,
};
pub use error::{GinvError, Result};
pub use ginv::{
    cline, drazin, drazin_oracle, gd1, gd1_power, inner_block, inner_sample, onegd, t2tm_drazin, InnerInverse,
    Provenance,
};
pub use matrix::{Matrix, C64};
pub use numeric::{approx_eq, oblique_projector, pinv, rank};
pub use tolerance::ToleranceConfig;
