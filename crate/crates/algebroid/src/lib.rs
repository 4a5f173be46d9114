//! Lie algebroids on a trivialized bundle over one chart: brackets and
//! axioms, the deformed algebroid `(TM)_N`, the algebroid Lie derivative,
//! A-torsion, and linear (1,1) tensors as `(D, ℓ, T^M)` triples.

pub mod data;
pub mod im;

pub use data::{
    a_torsion, algebroid_lie_derivative, check_lie_algebroid, deformed_structure, AValued2Form, AlgebroidData,
    BundleMapU, Section,
};
pub use im::{im_check, lemma_triple, tangent_lift_triple, IMTriple, LIE_CONVENTION};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebroidError {
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Tensor(#[from] njk_tensorcalc::TensorError),
}
