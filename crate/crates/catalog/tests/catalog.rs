use njk_catalog::{lookup, prelie, verify_entry, CatalogError, PreLie, Polarity, Quantity, NAMES};
use njk_symexpr::{Expect, ModePreference, Scalar, Status, VerifyConfig};

fn run(name: &str) {
    let e = lookup(name).unwrap();
    let t = std::time::Instant::now();
    let rep = verify_entry(&e, &VerifyConfig::default()).unwrap();
    eprintln!("{name}: {:?}", t.elapsed());
    assert!(rep.passed(), "{rep}");
}

#[test]
fn every_entry_behaves_as_declared() {
    for n in NAMES {
        run(n);
    }
}

fn constants(dim: usize, nonzero: &[(usize, usize, usize, i64)]) -> Vec<Vec<Vec<Scalar>>> {
    let mut c = vec![vec![vec![Scalar::zero(); dim]; dim]; dim];
    for &(i, j, k, v) in nonzero {
        c[i][j][k] = Scalar::int(v);
    }
    c
}

#[test]
fn lookup_parses_dimensions() {
    assert_eq!(lookup("tm_plus:1").unwrap().presentation.unwrap().g.dim(), 2);
    assert_eq!(lookup("double_tangent:2").unwrap().presentation.unwrap().g.dim(), 8);
    let p = lookup("projection_groupoid:1x2").unwrap();
    assert_eq!(p.presentation.unwrap().m.dim(), 3);
    assert!(matches!(lookup("nope"), Err(CatalogError::Unknown(_))));
    assert!(matches!(lookup("tm_plus:x"), Err(CatalogError::Parameter(_))));
    assert!(matches!(lookup("tm_plus:0"), Err(CatalogError::Parameter(_))));
    assert!(matches!(lookup("prelie:2"), Err(CatalogError::Parameter(_))));
    assert!(matches!(lookup("projection_groupoid:12"), Err(CatalogError::Parameter(_))));
}

#[test]
fn parametrized_entries_verify() {
    for n in ["tm_plus:1", "tm_plus:3", "pair_groupoid:1", "double_tangent:2", "projection_groupoid:2x1"] {
        run(n);
    }
}

#[test]
fn polarity_and_expectations() {
    for n in NAMES {
        let e = lookup(n).unwrap();
        let want = if *n == "broken_nijenhuis" { Polarity::Negative } else { Polarity::Positive };
        assert_eq!(e.polarity, want, "{n}");
        if e.presentation.is_some() {
            for q in [Quantity::RightLift, Quantity::LeftLift, Quantity::DeltaU, Quantity::Nijenhuis] {
                assert!(e.expected(q).is_some(), "{n} lacks {}", q.label());
                assert_eq!(Quantity::from_key(q.key()), Some(q));
            }
        }
    }
}

#[test]
fn non_prelie_product_is_rejected() {
    // e1▷e2 = e1 alone fails left symmetry of the associator
    let alg = PreLie::new(2, constants(2, &[(0, 1, 0, 1)])).unwrap();
    match prelie(&alg) {
        Err(CatalogError::Rejected(msg)) => assert!(msg.contains("e1"), "{msg}"),
        other => panic!("expected rejection, got {other:?}"),
    }
    assert!(matches!(PreLie::new(2, constants(1, &[])), Err(CatalogError::Parameter(_))));
}

#[test]
fn non_abelian_prelie_checks_at_algebroid_level() {
    // e2▷e1 = e1: pre-Lie with [e2, e1] = e1
    let alg = PreLie::new(2, constants(2, &[(1, 0, 0, 1)])).unwrap();
    let e = prelie(&alg).unwrap();
    assert!(e.presentation.is_none());
    let rep = verify_entry(&e, &VerifyConfig::default()).unwrap();
    assert!(rep.passed(), "{rep}");
    assert_eq!(rep.get("T^A_U = 0").map(|c| c.status()), Some(Status::Pass));
}

#[test]
fn flow_entry_in_sample_mode_is_reproducible() {
    let e = lookup("flow_groupoid").unwrap();
    assert!(e.sampled);
    let cfg = VerifyConfig { mode: ModePreference::Sample, seed: 7, ..Default::default() };
    let a = verify_entry(&e, &cfg).unwrap();
    let b = verify_entry(&e, &cfg).unwrap();
    assert!(a.passed(), "{a}");
    assert_eq!(a.to_string(), b.to_string());
}

#[test]
fn broken_control_reports_nonzero_torsion() {
    let rep = verify_entry(&lookup("broken_nijenhuis").unwrap(), &VerifyConfig::default()).unwrap();
    assert!(rep.passed(), "{rep}");
    let c = rep.get("T_N ≠ 0").unwrap();
    assert!(matches!(c.expect, Expect::Nonzero));
}
