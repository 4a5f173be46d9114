//! Prebuilt presentations and operators for the standard examples, each
//! carrying the closed-form answers the generic pipeline must reproduce.

mod build;
pub mod entries;
pub mod verify;

use njk_algebroid::{AlgebroidData, AlgebroidError, BundleMapU};
use njk_graded::GradedError;
use njk_groupoid::{GroupoidError, GroupoidPresentation};
use njk_symexpr::{Scalar, SymbolTable};
use njk_tensorcalc::{TensorError, VVForm};

pub use entries::{
    broken_nijenhuis, diagonal_nijenhuis, double_tangent, flow_groupoid, pair_groupoid, prelie, projection_groupoid,
    tm_plus, FlowCase, PreLie,
};
pub use verify::verify_entry;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
    #[error("bad parameter: {0}")]
    Parameter(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// Whether the checks of an entry are meant to hold or to fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    /// Negative control: the entry's defect checks must come out nonzero.
    Negative,
}

/// Quantities with a closed form attached to an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantity {
    RightLift,
    LeftLift,
    DeltaU,
    /// The Nijenhuis operator on M, i.e. `ρ∘U` or the input operator.
    Nijenhuis,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::RightLift => "→U",
            Quantity::LeftLift => "←U",
            Quantity::DeltaU => "δU",
            Quantity::Nijenhuis => "N",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Quantity::RightLift => "right_lift",
            Quantity::LeftLift => "left_lift",
            Quantity::DeltaU => "delta_u",
            Quantity::Nijenhuis => "nijenhuis",
        }
    }

    pub fn from_key(k: &str) -> Option<Quantity> {
        [Quantity::RightLift, Quantity::LeftLift, Quantity::DeltaU, Quantity::Nijenhuis].into_iter().find(|q| q.key() == k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expected {
    pub quantity: Quantity,
    pub tensor: VVForm,
}

/// A scalar that must vanish, e.g. the flow equation or an axiom instance.
#[derive(Clone, Debug, PartialEq)]
pub struct SideCondition {
    pub name: String,
    pub expr: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    /// Builder parameters as given, for reports.
    pub params: Vec<(String, String)>,
    /// Unspecified function symbols (name, arity) beyond the standard table.
    pub generic: Vec<(String, usize)>,
    pub polarity: Polarity,
    pub presentation: Option<GroupoidPresentation>,
    /// The Lie algebroid: of the presentation when there is one, otherwise
    /// the object under study.
    pub algebroid: Option<AlgebroidData>,
    pub u: Option<BundleMapU>,
    /// Nijenhuis operator (or broken candidate) on the base.
    pub nijenhuis: Option<VVForm>,
    pub expected: Vec<Expected>,
    pub side_conditions: Vec<SideCondition>,
    /// Entries with transcendental data are only decided by sampling.
    pub sampled: bool,
}

impl CatalogEntry {
    /// Parser table for the entry's expressions.
    pub fn symbol_table(&self) -> SymbolTable {
        let decls: Vec<(&str, usize)> = self.generic.iter().map(|(n, a)| (n.as_str(), *a)).collect();
        SymbolTable::standard().with_generic(&decls).expect("catalog symbols are distinct")
    }

    pub fn expected(&self, q: Quantity) -> Option<&VVForm> {
        self.expected.iter().find(|e| e.quantity == q).map(|e| &e.tensor)
    }
}

/// Names accepted by [`lookup`], with default parameters.
pub const NAMES: &[&str] = &[
    "tm_plus",
    "pair_groupoid",
    "flow_groupoid",
    "flow_translation",
    "double_tangent",
    "projection_groupoid",
    "prelie",
    "diagonal_nijenhuis",
    "broken_nijenhuis",
];

/// `name` or `name:k` for the dimension-parametrized builders
/// (`tm_plus:3`, `double_tangent:2`, `projection_groupoid:1x2`).
pub fn lookup(spec: &str) -> Result<CatalogEntry, CatalogError> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let dim = |default: usize| -> Result<usize, CatalogError> {
        match arg {
            None => Ok(default),
            Some(a) => a.parse().map_err(|_| CatalogError::Parameter(format!("`{a}` is not a dimension"))),
        }
    };
    let no_arg = || match arg {
        None => Ok(()),
        Some(a) => Err(CatalogError::Parameter(format!("{name} takes no parameter, got `{a}`"))),
    };
    match name {
        "tm_plus" => tm_plus(dim(2)?),
        "pair_groupoid" => pair_groupoid(dim(2)?),
        "flow_groupoid" => no_arg().and_then(|_| flow_groupoid(FlowCase::linear())),
        "flow_translation" => no_arg().and_then(|_| flow_groupoid(FlowCase::translation())),
        "double_tangent" => double_tangent(dim(1)?),
        "projection_groupoid" => {
            let (p, q) = match arg {
                None => (1, 1),
                Some(a) => {
                    let (p, q) = a.split_once('x').ok_or_else(|| CatalogError::Parameter(format!("expected PxQ, got `{a}`")))?;
                    let parse = |s: &str| s.parse::<usize>().map_err(|_| CatalogError::Parameter(format!("`{s}` is not a dimension")));
                    (parse(p)?, parse(q)?)
                }
            };
            projection_groupoid(p, q)
        }
        "prelie" => no_arg().and_then(|_| prelie(&PreLie::nilpotent_2d())),
        "diagonal_nijenhuis" => no_arg().and_then(|_| diagonal_nijenhuis()),
        "broken_nijenhuis" => no_arg().and_then(|_| broken_nijenhuis()),
        _ => Err(CatalogError::Unknown(spec.to_string())),
    }
}
