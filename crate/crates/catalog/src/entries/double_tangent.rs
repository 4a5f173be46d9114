use njk_algebroid::BundleMapU;
use njk_groupoid::{GroupoidPresentation, TripleChart};
use njk_symexpr::Scalar;
use njk_tensorcalc::linalg;

use super::positive_dim;
use crate::build::{add, chart, map, names, neg, sub, tensor, vars, zeros};
use crate::{CatalogEntry, CatalogError, Expected, Polarity, Quantity};

/// `TTB ⇉ TB` with `s = τ − τ'`, `t = τ + τ'`, integrating the vertical
/// endomorphism of `TB`. Coordinates `(z, zd, zp, zdp)` stand for
/// `(z, ż, z', ż')`; the second arrow of a composable pair is fixed by its
/// primed part `(wp, wdp)`.
pub fn double_tangent(b: usize) -> Result<CatalogEntry, CatalogError> {
    positive_dim("b", b)?;
    let (zn, zdn, zpn, zdpn) = (names("z", b), names("zd", b), names("zp", b), names("zdp", b));
    let (wpn, wdpn, vpn, vdpn) = (names("wp", b), names("wdp", b), names("vp", b), names("vdp", b));
    let (z, zd, zp, zdp) = (vars(&zn), vars(&zdn), vars(&zpn), vars(&zdpn));
    let (wp, wdp, vp, vdp) = (vars(&wpn), vars(&wdpn), vars(&vpn), vars(&vdpn));
    let o = zeros(b);

    let m = chart("TB", &[&zn, &zdn])?;
    let g = chart("TTB", &[&zn, &zdn, &zpn, &zdpn])?;
    let g2 = chart("TTB2", &[&zn, &zdn, &zpn, &zdpn, &wpn, &wdpn])?;
    let g3 = chart("TTB3", &[&zn, &zdn, &zpn, &zdpn, &wpn, &wdpn, &vpn, &vdpn])?;
    let zd_second = sub(&sub(&zd, &zp), &wp);
    let p = GroupoidPresentation {
        name: format!("double tangent groupoid, b = {b}"),
        s: map(&g, &m, &[&z, &sub(&zd, &zp)])?,
        t: map(&g, &m, &[&z, &add(&zd, &zp)])?,
        u: map(&m, &g, &[&z, &zd, &o, &o])?,
        i: map(&g, &g, &[&z, &zd, &neg(&zp), &neg(&zdp)])?,
        p1: map(&g2, &g, &[&z, &zd, &zp, &zdp])?,
        p2: map(&g2, &g, &[&z, &zd_second, &wp, &wdp])?,
        mult: map(&g2, &g, &[&z, &sub(&zd, &wp), &add(&zp, &wp), &add(&zdp, &wdp)])?,
        left_unit: map(&g, &g2, &[&z, &add(&zd, &zp), &o, &o, &zp, &zdp])?,
        right_unit: map(&g, &g2, &[&z, &zd, &zp, &zdp, &o, &o])?,
        inverse_pair: map(&g, &g2, &[&z, &zd, &zp, &zdp, &neg(&zp), &neg(&zdp)])?,
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &[&z, &zd, &zp, &zdp, &wp, &wdp])?,
            q23: map(&g3, &g2, &[&z, &zd_second, &wp, &wdp, &vp, &vdp])?,
            left: map(&g3, &g2, &[&z, &sub(&zd, &wp), &add(&zp, &wp), &add(&zdp, &wdp), &vp, &vdp])?,
            right: map(&g3, &g2, &[&z, &zd, &zp, &zdp, &add(&wp, &vp), &add(&wdp, &vdp)])?,
            chart: g3,
        }),
        g: g.clone(),
        m: m.clone(),
        g2,
    };

    // index blocks of the TTB chart
    let (iz, izd, izp, izdp) = (0, b, 2 * b, 3 * b);
    let one = Scalar::one();
    let half = Scalar::ratio(1, 2);
    let mut v_ttb = Vec::new();
    let mut kv = Vec::new();
    for k in 0..b {
        // V_TTB = dz⊗∂zp + dzd⊗∂zdp, ϰ*V_TTB = dz⊗∂zd + dzp⊗∂zdp
        v_ttb.push((iz + k, izp + k, one.clone()));
        v_ttb.push((izd + k, izdp + k, one.clone()));
        kv.push((iz + k, izd + k, one.clone()));
        kv.push((izp + k, izdp + k, one.clone()));
    }
    let v_ttb = tensor(&g, &v_ttb)?;
    let kv = tensor(&g, &kv)?;
    let right = kv.add(&v_ttb)?.scale(&half);
    let left = kv.sub(&v_ttb)?.scale(&half);
    let v_tb = tensor(&m, &(0..b).map(|k| (k, b + k, one.clone())).collect::<Vec<_>>())?;

    // the kernel frame at the units is (∂zd + ∂zp, ∂zdp), so U = ½(V ⊕ 𝕀)
    // is half the identity in it
    let u = BundleMapU::new(&m, 2 * b, linalg::mat_scale(&linalg::identity(2 * b), &half))?;
    Ok(CatalogEntry {
        name: "double_tangent".into(),
        summary: "double tangent groupoid TTB ⇉ TB integrating the vertical endomorphism of TB".into(),
        params: vec![("b".into(), b.to_string())],
        generic: vec![],
        polarity: Polarity::Positive,
        presentation: Some(p),
        algebroid: None,
        u: Some(u),
        nijenhuis: Some(v_tb.clone()),
        expected: vec![
            Expected { quantity: Quantity::RightLift, tensor: right },
            Expected { quantity: Quantity::LeftLift, tensor: left },
            Expected { quantity: Quantity::DeltaU, tensor: kv },
            Expected { quantity: Quantity::Nijenhuis, tensor: v_tb },
        ],
        side_conditions: vec![],
        sampled: false,
    })
}
