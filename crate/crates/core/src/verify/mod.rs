//! Instance generation, the statement registry, fuzz campaigns and the
//! finite-section sequence-space example.

pub mod fuzz;
pub mod generate;
pub mod l2;
pub mod registry;

pub use fuzz::{build_instance, fuzz, instance_seed, CheckSummary, FuzzFailure, FuzzReport, Instance, TheoremSummary};
pub use generate::{random_contractive_drazin, random_with_index, BlockShape, InstanceSpec};
pub use l2::l2_example;
pub use registry::{check, lookup, theorem_ids, Arity, Claim, ClaimKind, TheoremCheckReport, TheoremInfo, REGISTRY};
