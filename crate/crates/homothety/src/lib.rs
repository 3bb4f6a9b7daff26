//! Orbit-closure analysis for finitely generated groups of scalar
//! affine maps `x -> lambda*x + t` on R^n.
//!
//! The crate computes, in exact radical arithmetic, the invariants that
//! classify such an action (the ratio group and its closure, the
//! invariant affine subspace `E_G`, the translation subgroup `H_G`),
//! emits a symbolic description of every orbit closure, and cross-checks
//! the description against brute-force orbit enumeration.

pub mod affine;
pub mod closure;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod scalar;

pub use affine::{AffineMap, FixedPoints, Kind, Vector, Word};
pub use closure::OrbitClosureDesc;
pub use invariants::{AffineSubspace, Case, GroupSpec, ScaleSet};
pub use lattice::AdditiveClosure;
pub use scalar::Scalar;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("the generated group is abelian; the classification requires a non abelian group")]
    AbelianGroup,
    #[error("operation requires case {expected:?} but the group is in the other case")]
    WrongCase { expected: Case },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator index {index} out of range ({count} generators)")]
    GeneratorIndex { index: usize, count: usize },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}
