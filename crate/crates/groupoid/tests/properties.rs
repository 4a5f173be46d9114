use njk_algebroid::BundleMapU;
use njk_groupoid::{
    algebroid_of, delta_0, delta_minus1, lemma_check, right_lift, right_lift_frame, theorem2_check,
    GroupoidPresentation, TripleChart,
};
use njk_symexpr::{Scalar, Status, VerifyConfig};
use njk_tensorcalc::{Chart, SmoothMap};
use proptest::prelude::*;

fn chart(name: &str, coords: &[&str]) -> Chart {
    Chart::new(name, coords).unwrap()
}

fn map(src: &Chart, tgt: &Chart, comps: &[&str]) -> SmoothMap {
    SmoothMap::new(src, tgt, comps.iter().map(|c| njk_symexpr::parse(c).unwrap()).collect()).unwrap()
}

fn pair2() -> GroupoidPresentation {
    let m = chart("M", &["x1", "x2"]);
    let g = chart("G", &["x1", "x2", "y1", "y2"]);
    let g2 = chart("G2", &["x1", "x2", "y1", "y2", "z1", "z2"]);
    let g3 = chart("G3", &["x1", "x2", "y1", "y2", "z1", "z2", "w1", "w2"]);
    GroupoidPresentation {
        name: "pair".into(),
        s: map(&g, &m, &["y1", "y2"]),
        t: map(&g, &m, &["x1", "x2"]),
        u: map(&m, &g, &["x1", "x2", "x1", "x2"]),
        i: map(&g, &g, &["y1", "y2", "x1", "x2"]),
        p1: map(&g2, &g, &["x1", "x2", "y1", "y2"]),
        p2: map(&g2, &g, &["y1", "y2", "z1", "z2"]),
        mult: map(&g2, &g, &["x1", "x2", "z1", "z2"]),
        left_unit: map(&g, &g2, &["x1", "x2", "x1", "x2", "y1", "y2"]),
        right_unit: map(&g, &g2, &["x1", "x2", "y1", "y2", "y1", "y2"]),
        inverse_pair: map(&g, &g2, &["x1", "x2", "y1", "y2", "x1", "x2"]),
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &["x1", "x2", "y1", "y2", "z1", "z2"]),
            q23: map(&g3, &g2, &["y1", "y2", "z1", "z2", "w1", "w2"]),
            left: map(&g3, &g2, &["x1", "x2", "z1", "z2", "w1", "w2"]),
            right: map(&g3, &g2, &["x1", "x2", "y1", "y2", "w1", "w2"]),
            chart: g3,
        }),
        g,
        m,
        g2,
    }
}

/// Polynomial of degree ≤ 2 in x1, x2.
fn poly() -> impl Strategy<Value = Scalar> {
    proptest::collection::vec(-2i64..=2, 6).prop_map(|cs| {
        let (x, y) = (Scalar::named("x1"), Scalar::named("x2"));
        let terms = [Scalar::one(), x.clone(), y.clone(), &x * &x, &x * &y, &y * &y];
        cs.iter().zip(&terms).map(|(c, t)| &Scalar::int(*c) * t).sum()
    })
}

fn bundle_map() -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    proptest::collection::vec(proptest::collection::vec(poly(), 2), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lifts_and_delta_square(m in bundle_map()) {
        let p = pair2();
        let cfg = VerifyConfig::default();
        let a = algebroid_of(&p, &cfg).unwrap();
        let u = BundleMapU::new(&p.m, 2, m).unwrap();
        prop_assert_eq!(right_lift(&p, &a, &u, &cfg).unwrap(), right_lift_frame(&p, &a, &u).unwrap());
        let du = delta_minus1(&p, &a, &u, &cfg).unwrap();
        prop_assert!(delta_0(&p, &du.tensor, &cfg).unwrap().is_zero());
        prop_assert!(lemma_check(&p, &u, &cfg).unwrap().passed());
    }

    // T_→U = →(T^A_U) for every U, and the torsion items agree with each other
    #[test]
    fn torsion_lifts(m in bundle_map()) {
        let p = pair2();
        let cfg = VerifyConfig::default();
        let u = BundleMapU::new(&p.m, 2, m).unwrap();
        let rep = theorem2_check(&p, &u, &cfg).unwrap();
        prop_assert_eq!(rep.get("(4) T_→U = →(T^A_U)").unwrap().status(), Status::Pass);
        let ta = rep.get("(4) T^A_U = 0").unwrap().status();
        prop_assert_eq!(rep.get("(3) T_N = 0").unwrap().status(), ta);
        prop_assert_eq!(rep.get("(2) [→U,→U]^fn = 0").unwrap().status(), ta);
    }
}
