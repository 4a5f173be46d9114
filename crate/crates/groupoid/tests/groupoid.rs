use njk_algebroid::{check_lie_algebroid, BundleMapU};
use njk_groupoid::{
    algebroid_of, check_axioms, delta_0, delta_minus1, left_lift, left_lift_frame, lemma_check,
    multiplicative_check, right_lift, right_lift_frame, theorem2_check, GroupoidError, GroupoidPresentation,
    TripleChart,
};
use njk_symexpr::{parse, Outcome, Scalar, Status, VerifyConfig};
use njk_tensorcalc::{linalg, Chart, SmoothMap, VVForm};

fn s(e: &str) -> Scalar {
    parse(e).unwrap()
}

fn map(src: &Chart, tgt: &Chart, comps: &[String]) -> SmoothMap {
    SmoothMap::new(src, tgt, comps.iter().map(|c| s(c)).collect()).unwrap()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn cat(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn neg(v: &[String]) -> Vec<String> {
    v.iter().map(|x| format!("-{x}")).collect()
}

fn sum(a: &[String], b: &[String]) -> Vec<String> {
    a.iter().zip(b).map(|(x, y)| format!("{x}+{y}")).collect()
}

fn zeros(n: usize) -> Vec<String> {
    vec!["0".to_string(); n]
}

/// TM with fibrewise addition.
fn tm_plus(n: usize) -> GroupoidPresentation {
    let (x, xd, a, b, c) = (names("x", n), names("xd", n), names("a", n), names("b", n), names("c", n));
    let m = Chart::new("M", &x).unwrap();
    let g = Chart::new("G", &cat(&[&x, &xd])).unwrap();
    let g2 = Chart::new("G2", &cat(&[&x, &a, &b])).unwrap();
    let g3 = Chart::new("G3", &cat(&[&x, &a, &b, &c])).unwrap();
    GroupoidPresentation {
        name: format!("TM+ (n = {n})"),
        s: map(&g, &m, &x),
        t: map(&g, &m, &x),
        u: map(&m, &g, &cat(&[&x, &zeros(n)])),
        i: map(&g, &g, &cat(&[&x, &neg(&xd)])),
        p1: map(&g2, &g, &cat(&[&x, &a])),
        p2: map(&g2, &g, &cat(&[&x, &b])),
        mult: map(&g2, &g, &cat(&[&x, &sum(&a, &b)])),
        left_unit: map(&g, &g2, &cat(&[&x, &zeros(n), &xd])),
        right_unit: map(&g, &g2, &cat(&[&x, &xd, &zeros(n)])),
        inverse_pair: map(&g, &g2, &cat(&[&x, &xd, &neg(&xd)])),
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &cat(&[&x, &a, &b])),
            q23: map(&g3, &g2, &cat(&[&x, &b, &c])),
            left: map(&g3, &g2, &cat(&[&x, &sum(&a, &b), &c])),
            right: map(&g3, &g2, &cat(&[&x, &a, &sum(&b, &c)])),
            chart: g3,
        }),
        g,
        m,
        g2,
    }
}

/// M × M with `t` the first factor.
fn pair(n: usize) -> GroupoidPresentation {
    let (x, y, z, w) = (names("x", n), names("y", n), names("z", n), names("w", n));
    let m = Chart::new("M", &x).unwrap();
    let g = Chart::new("G", &cat(&[&x, &y])).unwrap();
    let g2 = Chart::new("G2", &cat(&[&x, &y, &z])).unwrap();
    let g3 = Chart::new("G3", &cat(&[&x, &y, &z, &w])).unwrap();
    GroupoidPresentation {
        name: format!("pair groupoid (n = {n})"),
        s: map(&g, &m, &y),
        t: map(&g, &m, &x),
        u: map(&m, &g, &cat(&[&x, &x])),
        i: map(&g, &g, &cat(&[&y, &x])),
        p1: map(&g2, &g, &cat(&[&x, &y])),
        p2: map(&g2, &g, &cat(&[&y, &z])),
        mult: map(&g2, &g, &cat(&[&x, &z])),
        left_unit: map(&g, &g2, &cat(&[&x, &x, &y])),
        right_unit: map(&g, &g2, &cat(&[&x, &y, &y])),
        inverse_pair: map(&g, &g2, &cat(&[&x, &y, &x])),
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &cat(&[&x, &y, &z])),
            q23: map(&g3, &g2, &cat(&[&y, &z, &w])),
            left: map(&g3, &g2, &cat(&[&x, &z, &w])),
            right: map(&g3, &g2, &cat(&[&x, &y, &w])),
            chart: g3,
        }),
        g,
        m,
        g2,
    }
}

fn cfg() -> VerifyConfig {
    VerifyConfig::default()
}

fn tensor(chart: &Chart, rows: &[&[&str]]) -> VVForm {
    let m: linalg::Matrix = rows.iter().map(|r| r.iter().map(|e| s(e)).collect()).collect();
    VVForm::from_matrix(chart, &m).unwrap()
}

fn block(n: usize, f: impl Fn(usize, usize) -> &'static str) -> Vec<Vec<&'static str>> {
    (0..2 * n).map(|i| (0..2 * n).map(|j| f(i, j)).collect()).collect()
}

fn tensor_of(chart: &Chart, rows: Vec<Vec<&str>>) -> VVForm {
    let refs: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
    tensor(chart, &refs)
}

#[test]
fn axioms_hold_for_both_examples() {
    for p in [tm_plus(1), tm_plus(2), pair(1), pair(2)] {
        let rep = check_axioms(&p, &cfg()).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.get("associativity").unwrap().status(), Status::Pass);
    }
}

#[test]
fn corrupted_multiplication_breaks_unit_law() {
    let mut p = tm_plus(1);
    p.mult = map(&p.g2, &p.g, &["x1".into(), "a1+2*b1".into()]);
    let rep = check_axioms(&p, &cfg()).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.get("m(u(t(g)), g) = g").unwrap().status(), Status::Fail);
    assert_eq!(rep.get("m(g, u(s(g))) = g").unwrap().status(), Status::Pass);
}

#[test]
fn missing_triples_skip_associativity() {
    let mut p = pair(1);
    p.g3 = None;
    let rep = check_axioms(&p, &cfg()).unwrap();
    assert_eq!(rep.get("associativity").unwrap().status(), Status::Skip);
}

#[test]
fn mismatched_charts_are_rejected() {
    let mut p = pair(1);
    p.s = SmoothMap::identity(&p.g);
    assert!(matches!(check_axioms(&p, &cfg()), Err(GroupoidError::Shape(_))));
}

#[test]
fn algebroids_of_the_examples() {
    let a = algebroid_of(&tm_plus(2), &cfg()).unwrap();
    assert_eq!(a.data.rank, 2);
    assert!(a.data.anchor.iter().flatten().all(Scalar::is_zero));
    assert!(a.data.structure.iter().flatten().all(Scalar::is_zero));

    let a = algebroid_of(&pair(2), &cfg()).unwrap();
    // ker ds at the diagonal is spanned by ∂x, and dt sends it to ∂x
    assert_eq!(a.data.anchor, linalg::identity(2));
    assert!(a.data.structure.iter().flatten().all(Scalar::is_zero));
    assert!(check_lie_algebroid(&a.data, &cfg()).passed());
}

#[test]
fn invariant_fields_of_the_pair_groupoid() {
    let p = pair(1);
    let a = algebroid_of(&p, &cfg()).unwrap();
    assert_eq!(a.right, vec![vec![s("1")], vec![s("0")]]);
    // di sends ∂x at the diagonal to ∂y
    assert_eq!(a.left, vec![vec![s("0")], vec![s("1")]]);
}

#[test]
fn lifts_on_tm_plus_are_plus_minus_vertical() {
    let p = tm_plus(2);
    let a = algebroid_of(&p, &cfg()).unwrap();
    let u = BundleMapU::identity(&p.m);
    let v = tensor_of(&p.g, block(2, |i, j| if i == j + 2 { "1" } else { "0" }));
    assert_eq!(right_lift(&p, &a, &u, &cfg()).unwrap(), v);
    assert_eq!(left_lift(&p, &a, &u, &cfg()).unwrap(), v.scale(&Scalar::int(-1)));
    let du = delta_minus1(&p, &a, &u, &cfg()).unwrap();
    assert!(du.tensor.is_zero());
    assert!(du.base.is_zero());
}

#[test]
fn lifts_on_pair_groupoid_are_the_projections() {
    let p = pair(2);
    let a = algebroid_of(&p, &cfg()).unwrap();
    let u = BundleMapU::identity(&p.m);
    let first = tensor_of(&p.g, block(2, |i, j| if i == j && i < 2 { "1" } else { "0" }));
    let second = tensor_of(&p.g, block(2, |i, j| if i == j && i >= 2 { "1" } else { "0" }));
    assert_eq!(right_lift(&p, &a, &u, &cfg()).unwrap(), first);
    assert_eq!(left_lift(&p, &a, &u, &cfg()).unwrap(), second);
    let du = delta_minus1(&p, &a, &u, &cfg()).unwrap();
    assert_eq!(du.tensor, VVForm::identity(&p.g));
    assert_eq!(du.base, VVForm::identity(&p.m));
}

#[test]
fn frame_formula_matches_translation() {
    for p in [pair(2), tm_plus(2)] {
        let a = algebroid_of(&p, &cfg()).unwrap();
        let u = BundleMapU::new(&p.m, 2, vec![vec![s("x1*x2"), s("1+x1")], vec![s("x2^2"), s("3")]]).unwrap();
        assert_eq!(right_lift(&p, &a, &u, &cfg()).unwrap(), right_lift_frame(&p, &a, &u).unwrap());
        assert_eq!(left_lift(&p, &a, &u, &cfg()).unwrap(), left_lift_frame(&p, &a, &u).unwrap());
    }
}

#[test]
fn delta_of_delta_vanishes() {
    let p = pair(2);
    let a = algebroid_of(&p, &cfg()).unwrap();
    let u = BundleMapU::new(&p.m, 2, vec![vec![s("x2"), s("0")], vec![s("0"), s("x1")]]).unwrap();
    let du = delta_minus1(&p, &a, &u, &cfg()).unwrap();
    assert!(delta_0(&p, &du.tensor, &cfg()).unwrap().is_zero());
    let rep = multiplicative_check(&p, &du.tensor, &cfg()).unwrap();
    assert!(rep.passed(), "{rep}");
}

#[test]
fn multiplicative_identity_and_a_mutation() {
    let p = pair(1);
    let rep = multiplicative_check(&p, &VVForm::identity(&p.g), &cfg()).unwrap();
    assert!(rep.passed(), "{rep}");
    assert!(rep.notes.iter().any(|n| n == "direct and δ routes agree"));

    // x1 dx1⊗∂x1 + dy1⊗∂y1 projects to 𝕀 along s but not along t
    let bad = tensor(&p.g, &[&["x1", "0"], &["0", "1"]]);
    let rep = multiplicative_check(&p, &bad, &cfg()).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.get("s-related to T^M").unwrap().status(), Status::Pass);
    assert_eq!(rep.get("t-related to T^M").unwrap().status(), Status::Fail);

    // T = diag(2, 1) is related to nothing consistent along s and t
    let bad = tensor(&p.g, &[&["2", "0"], &["0", "1"]]);
    let rep = multiplicative_check(&p, &bad, &cfg()).unwrap();
    assert_eq!(rep.get("δT = 0").unwrap().status(), Status::Fail);
    assert!(rep.notes.iter().any(|n| n == "direct and δ routes agree"));
}

#[test]
fn theorem_and_lemma_on_the_examples() {
    for p in [tm_plus(1), tm_plus(2), pair(1), pair(2)] {
        let u = BundleMapU::identity(&p.m);
        let rep = theorem2_check(&p, &u, &cfg()).unwrap();
        assert!(rep.passed(), "{rep}");
        let rep = lemma_check(&p, &u, &cfg()).unwrap();
        assert!(rep.passed(), "{rep}");
    }
}

#[test]
fn non_nijenhuis_u_fails_the_torsion_items() {
    // pair groupoid, U = 𝕀 + x2 dx1⊗∂1, whose torsion is nonzero
    let p = pair(2);
    let u = BundleMapU::new(&p.m, 2, vec![vec![s("1+x2"), s("0")], vec![s("0"), s("1")]]).unwrap();
    let rep = theorem2_check(&p, &u, &cfg()).unwrap();
    assert_eq!(rep.get("(1c) rank →U = dim M").unwrap().status(), Status::Pass);
    assert_eq!(rep.get("(4) T^A_U = 0").unwrap().status(), Status::Fail);
    assert_eq!(rep.get("(3) T_N = 0").unwrap().status(), Status::Fail);
    assert_eq!(rep.get("(4) T_→U = →(T^A_U)").unwrap().status(), Status::Pass);
    assert_eq!(rep.get("(2) [→U,→U]^fn = 0").unwrap().status(), Status::Fail);
}

#[test]
fn dimension_mismatch_is_an_error_entry() {
    // the unit groupoid M ⇉ M
    let x = names("x", 1);
    let m = Chart::new("M", &x).unwrap();
    let g = Chart::new("G", &x).unwrap();
    let g2 = Chart::new("G2", &x).unwrap();
    let id = |a: &Chart, b: &Chart| map(a, b, &x);
    let p = GroupoidPresentation {
        name: "unit".into(),
        s: id(&g, &m),
        t: id(&g, &m),
        u: id(&m, &g),
        i: id(&g, &g),
        p1: id(&g2, &g),
        p2: id(&g2, &g),
        mult: id(&g2, &g),
        left_unit: id(&g, &g2),
        right_unit: id(&g, &g2),
        inverse_pair: id(&g, &g2),
        g3: None,
        g,
        m,
        g2,
    };
    assert!(check_axioms(&p, &cfg()).unwrap().passed());
    let rep = theorem2_check(&p, &BundleMapU::zero(&p.m, 0), &cfg()).unwrap();
    assert!(matches!(rep.get("dimension").unwrap().outcome, Outcome::Error { .. }));
}
