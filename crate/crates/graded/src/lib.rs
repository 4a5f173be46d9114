//! Degree-1 graded manifolds `A[1]`: graded functions, vector fields and
//! (1,1) tensors, homological fields of Lie algebroids and the vertical
//! endomorphism.

pub mod field;
pub mod function;
pub mod tensor;
pub mod theorem;

pub use field::{check_homological, de_rham, euler_field, graded_commutator, homological_field, GradedVectorField};
pub use function::{GradedChart, GradedFunction};
pub use tensor::{
    body_rank, chart_of, core_lift, graded_fn_11, graded_lie_derivative, linear_lift, vertical_endomorphism, GradedTensor11,
    GradedTwoForm, LIFT_CONVENTION, SIGN_CONVENTION,
};
pub use theorem::{euler_check, euler_condition, iota_v, theorem1_check, transport_to_tangent};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GradedError {
    #[error("graded objects live on different charts")]
    ChartMismatch,
    #[error("duplicate coordinate name {0}")]
    DuplicateCoordinate(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
}
