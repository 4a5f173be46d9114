use njk_algebroid::BundleMapU;
use njk_groupoid::{GroupoidPresentation, TripleChart};
use njk_symexpr::Scalar;
use njk_tensorcalc::linalg;

use super::positive_dim;
use crate::build::{add, chart, map, names, neg, tensor, vars, zeros};
use crate::{CatalogEntry, CatalogError, Expected, Polarity, Quantity, SideCondition};

/// `M ×_B M ×_B TB ⇉ M` for the integrable projection `P = duᵅ⊗∂uᵅ` on
/// fibred coordinates `(x, u)`. Arrows are `(x, us, ut, xd)`: source fibre
/// point, target fibre point and a tangent vector to `B`.
pub fn projection_groupoid(p_dim: usize, q_dim: usize) -> Result<CatalogEntry, CatalogError> {
    positive_dim("base dimension", p_dim)?;
    positive_dim("fibre dimension", q_dim)?;
    let (p, q) = (p_dim, q_dim);
    let (xn, un, usn, utn, xdn) = (names("x", p), names("u", q), names("us", q), names("ut", q), names("xd", p));
    let (an, bn, cn, dn) = (names("a", q), names("b", q), names("c", q), names("d", q));
    let (vn, wn) = (names("v", p), names("w", p));
    let (v1n, v2n, v3n) = (names("va", p), names("vb", p), names("vc", p));
    let (x, us, ut, xd) = (vars(&xn), vars(&usn), vars(&utn), vars(&xdn));
    let u = vars(&un);
    let (a, b, c, d) = (vars(&an), vars(&bn), vars(&cn), vars(&dn));
    let (v, w) = (vars(&vn), vars(&wn));
    let (v1, v2, v3) = (vars(&v1n), vars(&v2n), vars(&v3n));
    let o = zeros(p);

    let m = chart("M", &[&xn, &un])?;
    let g = chart("MxBMxBTB", &[&xn, &usn, &utn, &xdn])?;
    // (x, a, b, c, v, w): first arrow (x, b, c, v), second (x, a, b, w)
    let g2 = chart("G2", &[&xn, &an, &bn, &cn, &vn, &wn])?;
    // triple (x, c, d, va), (x, b, c, vb), (x, a, b, vc)
    let g3 = chart("G3", &[&xn, &an, &bn, &cn, &dn, &v1n, &v2n, &v3n])?;
    let pres = GroupoidPresentation {
        name: format!("projection groupoid, dim B = {p}, fibre {q}"),
        s: map(&g, &m, &[&x, &us])?,
        t: map(&g, &m, &[&x, &ut])?,
        u: map(&m, &g, &[&x, &u, &u, &o])?,
        i: map(&g, &g, &[&x, &ut, &us, &neg(&xd)])?,
        p1: map(&g2, &g, &[&x, &b, &c, &v])?,
        p2: map(&g2, &g, &[&x, &a, &b, &w])?,
        mult: map(&g2, &g, &[&x, &a, &c, &add(&v, &w)])?,
        left_unit: map(&g, &g2, &[&x, &us, &ut, &ut, &o, &xd])?,
        right_unit: map(&g, &g2, &[&x, &us, &us, &ut, &xd, &o])?,
        inverse_pair: map(&g, &g2, &[&x, &ut, &us, &ut, &xd, &neg(&xd)])?,
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &[&x, &b, &c, &d, &v1, &v2])?,
            q23: map(&g3, &g2, &[&x, &a, &b, &c, &v2, &v3])?,
            left: map(&g3, &g2, &[&x, &a, &b, &d, &add(&v1, &v2), &v3])?,
            right: map(&g3, &g2, &[&x, &a, &c, &d, &v1, &add(&v2, &v3)])?,
            chart: g3,
        }),
        g: g.clone(),
        m: m.clone(),
        g2,
    };

    let one = Scalar::one();
    let (ix, ius, iut, ixd) = (0, p, p + q, p + 2 * q);
    let mut right = Vec::new();
    let mut left = Vec::new();
    let mut delta = Vec::new();
    for al in 0..q {
        right.push((iut + al, iut + al, one.clone()));
        left.push((ius + al, ius + al, one.clone()));
        delta.push((ius + al, ius + al, one.clone()));
        delta.push((iut + al, iut + al, one.clone()));
    }
    for i in 0..p {
        right.push((ix + i, ixd + i, one.clone()));
        left.push((ix + i, ixd + i, Scalar::int(-1)));
    }
    let proj = tensor(&m, &(0..q).map(|al| (p + al, p + al, one.clone())).collect::<Vec<_>>())?;

    // kernel frame at the units: (∂ut, ∂xd); U = (P, π_*) sends ∂uᵅ to the
    // ∂utᵅ slot and ∂xⁱ to the ∂xdⁱ slot
    let mut um = linalg::zeros(p + q, p + q);
    for al in 0..q {
        um[al][p + al] = one.clone();
    }
    for i in 0..p {
        um[q + i][i] = one.clone();
    }
    let p2 = proj.compose(&proj)?.sub(&proj)?;
    let side_conditions = p2
        .matrix()
        .iter()
        .enumerate()
        .flat_map(|(r, row)| {
            let m = &m;
            row.iter().enumerate().map(move |(c, e)| SideCondition {
                name: format!("P² = P at d{}⊗∂{}", m.coord(c), m.coord(r)),
                expr: e.clone(),
            })
        })
        .collect();
    Ok(CatalogEntry {
        name: "projection_groupoid".into(),
        summary: "semidirect product M ×_B M ×_B TB integrating the algebroid of an integrable projection".into(),
        params: vec![("base".into(), p.to_string()), ("fibre".into(), q.to_string())],
        generic: vec![],
        polarity: Polarity::Positive,
        presentation: Some(pres),
        algebroid: None,
        u: Some(BundleMapU::new(&m, p + q, um)?),
        nijenhuis: Some(proj.clone()),
        expected: vec![
            Expected { quantity: Quantity::RightLift, tensor: tensor(&g, &right)? },
            Expected { quantity: Quantity::LeftLift, tensor: tensor(&g, &left)? },
            Expected { quantity: Quantity::DeltaU, tensor: tensor(&g, &delta)? },
            Expected { quantity: Quantity::Nijenhuis, tensor: proj },
        ],
        side_conditions,
        sampled: false,
    })
}
