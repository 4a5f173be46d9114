//! Lie groupoids given by explicit charts: axioms, the Lie algebroid,
//! right and left invariant lifts of bundle maps `U: TM → A`, the
//! differential δ on cochains of degree −1 and 0, and the checks around
//! multiplicative Nijenhuis structures.

pub mod delta;
pub mod lift;
pub mod presentation;
pub mod theorem;

pub use delta::{base_projection, delta_0, delta_minus1, multiplicative_check, Cochain1, DeltaU};
pub use lift::{algebroid_of, left_lift, left_lift_frame, right_lift, right_lift_frame, right_lift_2form, GroupoidAlgebroid};
pub use presentation::{check_axioms, GroupoidPresentation, TripleChart};
pub use theorem::{lemma_check, theorem2_check};

use njk_algebroid::AlgebroidError;
use njk_tensorcalc::TensorError;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GroupoidError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error("ker ds along the units has rank {got}, expected {expected}")]
    KernelRank { expected: usize, got: usize },
    #[error("tangent vectors are not composable: {0}")]
    NotComposable(String),
    #[error("relatedness fails: {0}")]
    NotRelated(String),
}
