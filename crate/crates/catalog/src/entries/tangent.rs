use njk_algebroid::{AlgebroidData, BundleMapU};
use njk_groupoid::{GroupoidPresentation, TripleChart};
use njk_symexpr::Scalar;
use njk_tensorcalc::linalg;
use njk_tensorcalc::{Chart, VVForm};

use super::positive_dim;
use crate::build::{add, chart, map, names, neg, tensor, vars, zeros};
use crate::{CatalogEntry, CatalogError, Expected, Polarity, Quantity};

/// `TM` as a bundle of abelian groups: `s = t = τ`, `m` is fibrewise
/// addition. Coordinates `(x, xd)`; composable pairs `(x, a, b)`.
pub fn tm_plus(n: usize) -> Result<CatalogEntry, CatalogError> {
    positive_dim("n", n)?;
    let (xn, xdn, an, bn, cn) = (names("x", n), names("xd", n), names("a", n), names("b", n), names("c", n));
    let (x, xd, a, b, c) = (vars(&xn), vars(&xdn), vars(&an), vars(&bn), vars(&cn));
    let z = zeros(n);
    let m = chart("M", &[&xn])?;
    let g = chart("TM", &[&xn, &xdn])?;
    let g2 = chart("TM2", &[&xn, &an, &bn])?;
    let g3 = chart("TM3", &[&xn, &an, &bn, &cn])?;
    let p = GroupoidPresentation {
        name: format!("(TM)+, n = {n}"),
        s: map(&g, &m, &[&x])?,
        t: map(&g, &m, &[&x])?,
        u: map(&m, &g, &[&x, &z])?,
        i: map(&g, &g, &[&x, &neg(&xd)])?,
        p1: map(&g2, &g, &[&x, &a])?,
        p2: map(&g2, &g, &[&x, &b])?,
        mult: map(&g2, &g, &[&x, &add(&a, &b)])?,
        left_unit: map(&g, &g2, &[&x, &z, &xd])?,
        right_unit: map(&g, &g2, &[&x, &xd, &z])?,
        inverse_pair: map(&g, &g2, &[&x, &xd, &neg(&xd)])?,
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &[&x, &a, &b])?,
            q23: map(&g3, &g2, &[&x, &b, &c])?,
            left: map(&g3, &g2, &[&x, &add(&a, &b), &c])?,
            right: map(&g3, &g2, &[&x, &a, &add(&b, &c)])?,
            chart: g3,
        }),
        g: g.clone(),
        m: m.clone(),
        g2,
    };
    let v = vertical(&g, n)?;
    let abelian = AlgebroidData::new(&m, n, linalg::zeros(n, n), vec![zeros(n); n * n.saturating_sub(1) / 2])?;
    Ok(CatalogEntry {
        name: "tm_plus".into(),
        summary: "tangent bundle with fibrewise addition, integrating the abelian algebroid (TM)_0".into(),
        params: vec![("n".into(), n.to_string())],
        generic: vec![],
        polarity: Polarity::Positive,
        presentation: Some(p),
        algebroid: Some(abelian),
        u: Some(BundleMapU::identity(&m)),
        nijenhuis: Some(VVForm::zero(&m, 1)),
        expected: vec![
            Expected { quantity: Quantity::RightLift, tensor: v.clone() },
            Expected { quantity: Quantity::LeftLift, tensor: v.scale(&Scalar::int(-1)) },
            Expected { quantity: Quantity::DeltaU, tensor: VVForm::zero(&g, 1) },
            Expected { quantity: Quantity::Nijenhuis, tensor: VVForm::zero(&m, 1) },
        ],
        side_conditions: vec![],
        sampled: false,
    })
}

/// `dxⁱ ⊗ ∂xdⁱ` on a chart ordered `(x, xd)`.
fn vertical(g: &Chart, n: usize) -> Result<VVForm, CatalogError> {
    Ok(tensor(g, &(0..n).map(|i| (i, n + i, Scalar::one())).collect::<Vec<_>>())?)
}

/// `M × M` with `t` the first factor and `s` the second; composable
/// pairs `(x, y, z) ↦ ((x, y), (y, z))`.
pub fn pair_groupoid(n: usize) -> Result<CatalogEntry, CatalogError> {
    positive_dim("n", n)?;
    let (xn, yn, zn, wn) = (names("x", n), names("y", n), names("z", n), names("w", n));
    let (x, y, z, w) = (vars(&xn), vars(&yn), vars(&zn), vars(&wn));
    let m = chart("M", &[&xn])?;
    let g = chart("MxM", &[&xn, &yn])?;
    let g2 = chart("MxM2", &[&xn, &yn, &zn])?;
    let g3 = chart("MxM3", &[&xn, &yn, &zn, &wn])?;
    let p = GroupoidPresentation {
        name: format!("pair groupoid, n = {n}"),
        s: map(&g, &m, &[&y])?,
        t: map(&g, &m, &[&x])?,
        u: map(&m, &g, &[&x, &x])?,
        i: map(&g, &g, &[&y, &x])?,
        p1: map(&g2, &g, &[&x, &y])?,
        p2: map(&g2, &g, &[&y, &z])?,
        mult: map(&g2, &g, &[&x, &z])?,
        left_unit: map(&g, &g2, &[&x, &x, &y])?,
        right_unit: map(&g, &g2, &[&x, &y, &y])?,
        inverse_pair: map(&g, &g2, &[&x, &y, &x])?,
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &[&x, &y, &z])?,
            q23: map(&g3, &g2, &[&y, &z, &w])?,
            left: map(&g3, &g2, &[&x, &z, &w])?,
            right: map(&g3, &g2, &[&x, &y, &w])?,
            chart: g3,
        }),
        g: g.clone(),
        m: m.clone(),
        g2,
    };
    let first = tensor(&g, &(0..n).map(|i| (i, i, Scalar::one())).collect::<Vec<_>>())?;
    let second = tensor(&g, &(0..n).map(|i| (n + i, n + i, Scalar::one())).collect::<Vec<_>>())?;
    Ok(CatalogEntry {
        name: "pair_groupoid".into(),
        summary: "pair groupoid M × M, integrating the tangent algebroid".into(),
        params: vec![("n".into(), n.to_string())],
        generic: vec![],
        polarity: Polarity::Positive,
        presentation: Some(p),
        algebroid: Some(AlgebroidData::tangent(&m)),
        u: Some(BundleMapU::identity(&m)),
        nijenhuis: Some(VVForm::identity(&m)),
        expected: vec![
            Expected { quantity: Quantity::RightLift, tensor: first },
            Expected { quantity: Quantity::LeftLift, tensor: second },
            Expected { quantity: Quantity::DeltaU, tensor: VVForm::identity(&g) },
            Expected { quantity: Quantity::Nijenhuis, tensor: VVForm::identity(&m) },
        ],
        side_conditions: vec![],
        sampled: false,
    })
}
