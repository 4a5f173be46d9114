use njk_symexpr::{all_zero, Check, Report, Scalar, VerifyConfig};
use njk_tensorcalc::{linalg, Chart, SmoothMap};

use crate::GroupoidError;

/// Chart of composable triples with the maps realizing both bracketings.
/// `q12`, `q23`: `(g₁,g₂,g₃) ↦ (g₁,g₂), (g₂,g₃)`; `left`: `↦ (g₁g₂, g₃)`;
/// `right`: `↦ (g₁, g₂g₃)`; all into the G2 chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleChart {
    pub chart: Chart,
    pub q12: SmoothMap,
    pub q23: SmoothMap,
    pub left: SmoothMap,
    pub right: SmoothMap,
}

/// `G ⇉ M` on charts. Composable pairs are parametrized by `g2` through
/// `p1, p2` with product `mult`. The embeddings `left_unit`, `right_unit`
/// and `inverse_pair` send `g` to `(u(t(g)), g)`, `(g, u(s(g)))` and
/// `(g, i(g))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidPresentation {
    pub name: String,
    pub g: Chart,
    pub m: Chart,
    pub s: SmoothMap,
    pub t: SmoothMap,
    pub u: SmoothMap,
    pub i: SmoothMap,
    pub g2: Chart,
    pub p1: SmoothMap,
    pub p2: SmoothMap,
    pub mult: SmoothMap,
    pub left_unit: SmoothMap,
    pub right_unit: SmoothMap,
    pub inverse_pair: SmoothMap,
    pub g3: Option<TripleChart>,
}

fn expect_shape(map: &SmoothMap, name: &str, src: &Chart, tgt: &Chart) -> Result<(), GroupoidError> {
    if map.source != *src || map.target != *tgt {
        return Err(GroupoidError::Shape(format!(
            "{name} must map {} → {}, got {} → {}",
            src.name(),
            tgt.name(),
            map.source.name(),
            map.target.name()
        )));
    }
    Ok(())
}

impl GroupoidPresentation {
    /// Checks that every map goes between the right charts.
    pub fn validate(&self) -> Result<(), GroupoidError> {
        let (g, m, g2) = (&self.g, &self.m, &self.g2);
        expect_shape(&self.s, "s", g, m)?;
        expect_shape(&self.t, "t", g, m)?;
        expect_shape(&self.u, "u", m, g)?;
        expect_shape(&self.i, "i", g, g)?;
        for (name, map) in [("p1", &self.p1), ("p2", &self.p2), ("m", &self.mult)] {
            expect_shape(map, name, g2, g)?;
        }
        for (name, map) in [("left_unit", &self.left_unit), ("right_unit", &self.right_unit), ("inverse_pair", &self.inverse_pair)] {
            expect_shape(map, name, g, g2)?;
        }
        if let Some(t3) = &self.g3 {
            for (name, map) in [("q12", &t3.q12), ("q23", &t3.q23), ("left", &t3.left), ("right", &t3.right)] {
                expect_shape(map, name, &t3.chart, g2)?;
            }
        }
        if g.dim() < m.dim() {
            return Err(GroupoidError::Shape("dim G < dim M".into()));
        }
        Ok(())
    }

    pub fn dim_g(&self) -> usize {
        self.g.dim()
    }

    pub fn dim_m(&self) -> usize {
        self.m.dim()
    }
}

fn compose(a: &SmoothMap, b: &SmoothMap) -> SmoothMap {
    a.after(b).expect("charts validated")
}

/// `a = b` as maps, component by component.
fn map_eq(name: &str, a: &SmoothMap, b: &SmoothMap, cfg: &VerifyConfig) -> Check {
    let diffs: Vec<(String, Scalar)> =
        a.comps.iter().zip(&b.comps).enumerate().map(|(k, (x, y))| (a.target.coord(k).to_string(), x - y)).collect();
    Check::identity(name, all_zero(diffs.iter().map(|(l, e)| (l.clone(), e)), cfg))
}

/// Structure map identities on the supplied charts.
pub fn check_axioms(p: &GroupoidPresentation, cfg: &VerifyConfig) -> Result<Report, GroupoidError> {
    p.validate()?;
    let mut rep = Report::new(format!("groupoid axioms: {}", p.name));
    let id_g = SmoothMap::identity(&p.g);
    let id_m = SmoothMap::identity(&p.m);
    rep.push(map_eq("s∘p1 = t∘p2", &compose(&p.s, &p.p1), &compose(&p.t, &p.p2), cfg));
    rep.push(map_eq("s∘u = id", &compose(&p.s, &p.u), &id_m, cfg));
    rep.push(map_eq("t∘u = id", &compose(&p.t, &p.u), &id_m, cfg));
    for (name, map) in [("s", &p.s), ("t", &p.t)] {
        let red = linalg::rref(&map.jacobian(), cfg);
        rep.push(Check::rank(format!("{name} is a submersion"), p.dim_m(), red.rank(), red.locus()));
    }
    rep.push(map_eq("s∘m = s∘p2", &compose(&p.s, &p.mult), &compose(&p.s, &p.p2), cfg));
    rep.push(map_eq("t∘m = t∘p1", &compose(&p.t, &p.mult), &compose(&p.t, &p.p1), cfg));

    let ut = compose(&p.u, &p.t);
    let us = compose(&p.u, &p.s);
    rep.push(map_eq("left unit pair: p1 = u∘t", &compose(&p.p1, &p.left_unit), &ut, cfg));
    rep.push(map_eq("left unit pair: p2 = id", &compose(&p.p2, &p.left_unit), &id_g, cfg));
    rep.push(map_eq("m(u(t(g)), g) = g", &compose(&p.mult, &p.left_unit), &id_g, cfg));
    rep.push(map_eq("right unit pair: p1 = id", &compose(&p.p1, &p.right_unit), &id_g, cfg));
    rep.push(map_eq("right unit pair: p2 = u∘s", &compose(&p.p2, &p.right_unit), &us, cfg));
    rep.push(map_eq("m(g, u(s(g))) = g", &compose(&p.mult, &p.right_unit), &id_g, cfg));

    rep.push(map_eq("s∘i = t", &compose(&p.s, &p.i), &p.t, cfg));
    rep.push(map_eq("t∘i = s", &compose(&p.t, &p.i), &p.s, cfg));
    rep.push(map_eq("i∘i = id", &compose(&p.i, &p.i), &id_g, cfg));
    rep.push(map_eq("inverse pair: p1 = id", &compose(&p.p1, &p.inverse_pair), &id_g, cfg));
    rep.push(map_eq("inverse pair: p2 = i", &compose(&p.p2, &p.inverse_pair), &p.i, cfg));
    rep.push(map_eq("m(g, i(g)) = u(t(g))", &compose(&p.mult, &p.inverse_pair), &ut, cfg));

    match &p.g3 {
        None => rep.push(Check::skipped("associativity", "no chart of composable triples supplied")),
        Some(t3) => {
            rep.push(map_eq("triples: p2∘q12 = p1∘q23", &compose(&p.p2, &t3.q12), &compose(&p.p1, &t3.q23), cfg));
            rep.push(map_eq("(g1g2)g3: first = m∘q12", &compose(&p.p1, &t3.left), &compose(&p.mult, &t3.q12), cfg));
            rep.push(map_eq("(g1g2)g3: second = p2∘q23", &compose(&p.p2, &t3.left), &compose(&p.p2, &t3.q23), cfg));
            rep.push(map_eq("g1(g2g3): first = p1∘q12", &compose(&p.p1, &t3.right), &compose(&p.p1, &t3.q12), cfg));
            rep.push(map_eq("g1(g2g3): second = m∘q23", &compose(&p.p2, &t3.right), &compose(&p.mult, &t3.q23), cfg));
            rep.push(map_eq("associativity", &compose(&p.mult, &t3.left), &compose(&p.mult, &t3.right), cfg));
        }
    }
    Ok(rep)
}
