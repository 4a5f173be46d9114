use njk_algebroid::{deformed_structure, BundleMapU};
use njk_symexpr::{parse_with, Scalar, SymbolTable};
use njk_tensorcalc::linalg;
use njk_tensorcalc::{Chart, VVForm};

use crate::{CatalogEntry, CatalogError, Expected, Polarity, Quantity};

/// `N = diag(f(x1), g(x2))` with unspecified `f`, `g`.
pub fn diagonal_nijenhuis() -> Result<CatalogEntry, CatalogError> {
    let table = SymbolTable::standard().with_generic(&[("f", 1), ("g", 1)]).expect("fresh names");
    let m = Chart::new("R2", &["x1", "x2"])?;
    let f = parse_with("f(x1)", &table).expect("valid");
    let g = parse_with("g(x2)", &table).expect("valid");
    let n = VVForm::from_matrix(&m, &vec![vec![f, Scalar::zero()], vec![Scalar::zero(), g]])?;
    Ok(CatalogEntry {
        name: "diagonal_nijenhuis".into(),
        summary: "diagonal operator diag(f(x1), g(x2)) with unspecified f, g".into(),
        params: vec![],
        generic: vec![("f".into(), 1), ("g".into(), 1)],
        polarity: Polarity::Positive,
        presentation: None,
        algebroid: Some(deformed_structure(&n)?),
        u: Some(BundleMapU::identity(&m)),
        nijenhuis: Some(n.clone()),
        expected: vec![Expected { quantity: Quantity::Nijenhuis, tensor: n }],
        side_conditions: vec![],
        sampled: false,
    })
}

/// Negative control `N = x2 dx1⊗∂x1`. Its torsion is `T(∂1, ∂2) = x2 ∂1`,
/// so the deformed bracket fails Jacobi. `u` is `𝕀 + N` as a map
/// `TM → TM`, the transported control on the tangent algebroid.
pub fn broken_nijenhuis() -> Result<CatalogEntry, CatalogError> {
    let m = Chart::new("R2", &["x1", "x2"])?;
    let x2 = Scalar::named("x2");
    let nm = vec![vec![x2, Scalar::zero()], vec![Scalar::zero(), Scalar::zero()]];
    let n = VVForm::from_matrix(&m, &nm)?;
    let u = linalg::mat_add(&linalg::identity(2), &nm);
    Ok(CatalogEntry {
        name: "broken_nijenhuis".into(),
        summary: "negative control: x2 dx1⊗∂x1 has nonzero torsion".into(),
        params: vec![],
        generic: vec![],
        polarity: Polarity::Negative,
        presentation: None,
        algebroid: Some(deformed_structure(&n)?),
        u: Some(BundleMapU::new(&m, 2, u)?),
        nijenhuis: Some(n.clone()),
        expected: vec![Expected { quantity: Quantity::Nijenhuis, tensor: n }],
        side_conditions: vec![],
        sampled: false,
    })
}
