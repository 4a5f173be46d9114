use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use njk_symexpr::{Scalar, Var};

use crate::TensorError;

/// Ordered coordinate system. Two charts are the same chart when their
/// coordinate lists agree; the name is only for messages.
#[derive(Clone)]
pub struct Chart {
    name: Arc<str>,
    coords: Arc<[Var]>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Chart) -> bool {
        self.coords == other.coords
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Chart {
    pub fn new<S: AsRef<str>>(name: &str, coords: &[S]) -> Result<Chart, TensorError> {
        if coords.is_empty() {
            return Err(TensorError::EmptyChart(name.to_owned()));
        }
        let vars: Vec<Var> = coords.iter().map(|c| Var::new(c.as_ref())).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(TensorError::DuplicateCoordinate { chart: name.to_owned(), coord: v.name().to_owned() });
            }
        }
        Ok(Chart { name: name.into(), coords: vars.into() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Var] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> Var {
        self.coords[i]
    }

    pub fn coord_scalar(&self, i: usize) -> Scalar {
        Scalar::var(self.coords[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|v| v.name() == name)
    }

    pub(crate) fn same(&self, other: &Chart) -> Result<(), TensorError> {
        if self == other {
            Ok(())
        } else {
            Err(TensorError::ChartMismatch { left: format!("{self:?}"), right: format!("{other:?}") })
        }
    }
}

/// Smooth map between charts, one component per target coordinate, each
/// written in the source coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap {
    pub source: Chart,
    pub target: Chart,
    pub comps: Vec<Scalar>,
}

impl SmoothMap {
    pub fn new(source: &Chart, target: &Chart, comps: Vec<Scalar>) -> Result<SmoothMap, TensorError> {
        if comps.len() != target.dim() {
            return Err(TensorError::Shape(format!(
                "map {}→{} needs {} components, got {}",
                source.name(),
                target.name(),
                target.dim(),
                comps.len()
            )));
        }
        for c in &comps {
            if let Some(v) = c.free_vars().into_iter().find(|v| !source.coords().contains(v)) {
                return Err(TensorError::Shape(format!(
                    "component `{c}` of map {}→{} uses `{v}`, not a coordinate of {}",
                    source.name(),
                    target.name(),
                    source.name()
                )));
            }
        }
        Ok(SmoothMap { source: source.clone(), target: target.clone(), comps })
    }

    pub fn identity(chart: &Chart) -> SmoothMap {
        let comps = (0..chart.dim()).map(|i| chart.coord_scalar(i)).collect();
        SmoothMap { source: chart.clone(), target: chart.clone(), comps }
    }

    /// Substitution taking target coordinates to the map's components.
    pub fn pullback_map(&self) -> BTreeMap<Var, Scalar> {
        self.target.coords().iter().copied().zip(self.comps.iter().cloned()).collect()
    }

    /// `f ∘ self` for a function `f` on the target.
    pub fn pull(&self, f: &Scalar) -> Scalar {
        f.substitute(&self.pullback_map())
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &SmoothMap) -> Result<SmoothMap, TensorError> {
        inner.target.same(&self.source)?;
        let comps = self.comps.iter().map(|c| inner.pull(c)).collect();
        Ok(SmoothMap { source: inner.source.clone(), target: self.target.clone(), comps })
    }

    /// `J[i][j] = ∂ comps[i] / ∂ source_j`.
    pub fn jacobian(&self) -> Vec<Vec<Scalar>> {
        self.comps
            .iter()
            .map(|c| self.source.coords().iter().map(|v| c.diff(*v)).collect())
            .collect()
    }

    /// Image of a tangent vector at a source point: `J · v`.
    pub fn push_vector(&self, v: &[Scalar]) -> Vec<Scalar> {
        crate::linalg::mat_vec(&self.jacobian(), v)
    }
}
