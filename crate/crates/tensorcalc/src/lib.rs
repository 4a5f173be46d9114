//! Tensor calculus on a single coordinate chart: vector fields, scalar
//! and vector-valued forms, the Lie and Frölicher–Nijenhuis brackets,
//! Nijenhuis torsion, pushforward and relatedness.

pub mod chart;
pub mod combin;
pub mod form;
pub mod linalg;
pub mod vvform;

pub use chart::{Chart, SmoothMap};
pub use form::ScalarForm;
pub use linalg::Matrix;
pub use vvform::{
    bracket_components, check_inverse, fn_bracket, lie_bracket, lie_derivative, nijenhuis_torsion,
    pushforward, related_check, relatedness_defect, VVForm,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TensorError {
    #[error("chart mismatch: {left} vs {right}")]
    ChartMismatch { left: String, right: String },
    #[error("chart `{0}` has no coordinates")]
    EmptyChart(String),
    #[error("chart `{chart}` repeats coordinate `{coord}`")]
    DuplicateCoordinate { chart: String, coord: String },
    #[error("{0}")]
    Shape(String),
    #[error("supplied inverse does not invert the map: {0}")]
    InverseCheck(String),
}
