mod controls;
mod double_tangent;
mod flow;
mod prelie;
mod projection;
mod tangent;

pub use controls::{broken_nijenhuis, diagonal_nijenhuis};
pub use double_tangent::double_tangent;
pub use flow::{flow_groupoid, FlowCase};
pub use prelie::{prelie, PreLie};
pub use projection::projection_groupoid;
pub use tangent::{pair_groupoid, tm_plus};

use crate::CatalogError;

fn positive_dim(what: &str, n: usize) -> Result<(), CatalogError> {
    if n == 0 {
        return Err(CatalogError::Parameter(format!("{what} must be at least 1")));
    }
    Ok(())
}
