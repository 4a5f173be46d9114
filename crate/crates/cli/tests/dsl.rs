use proptest::prelude::*;

use njk_catalog::{lookup, NAMES};
use njk_cli::{entry_document, parse_document, to_dsl, ErrorKind, TaskExpect, TaskKind, Value};
use njk_symexpr::Scalar;
use njk_tensorcalc::{Chart, VVForm};

#[test]
fn minimal_document() {
    let doc = parse_document(
        "chart M = (x, y)   # a plane\n\
         tensor N on M = [[x, 0],\n                 [0, y]]\n\
         task torsion N\n",
    )
    .unwrap();
    let Some(Value::Tensor(n)) = doc.get("N") else { panic!("N is not a tensor") };
    let c = Chart::new("M", &["x", "y"]).unwrap();
    let want = VVForm::from_matrix(&c, &vec![vec![c.coord_scalar(0), Scalar::zero()], vec![Scalar::zero(), c.coord_scalar(1)]]).unwrap();
    assert_eq!(n, &want);
    assert_eq!(doc.tasks.len(), 1);
    assert_eq!(doc.tasks[0].kind, TaskKind::Torsion);
    assert_eq!(doc.tasks[0].expect, TaskExpect::Pass);
}

#[test]
fn errors_carry_positions_and_kinds() {
    let e = parse_document("chart M = (x)\ntensor N on Q = [[x]]\n").unwrap_err();
    assert_eq!((e.line, e.col, e.kind), (2, 13, ErrorKind::Unresolved));
    assert!(e.to_string().starts_with("2:13: unresolved reference"), "{e}");

    let e = parse_document("chart M = (x)\ntensor N on M = [[z]]\n").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(e.to_string().contains("`z` is not a coordinate of M"), "{e}");

    let e = parse_document("chart M = (x, y)\ntensor N on M = [[x]]\n").unwrap_err();
    assert_eq!(e.kind, ErrorKind::Dimension);

    let e = parse_document("chart M = (x)\ntask torsion M\n").unwrap_err();
    assert_eq!(e.line, 2);

    let e = parse_document("task catalog no_such_entry\n").unwrap_err();
    assert_eq!(e.line, 1);
}

#[test]
fn generic_symbols_need_declaring() {
    assert!(parse_document("chart M = (x)\nscalar S = f(x)\n").is_err());
    let doc = parse_document("symbol f/1\nchart M = (x)\nscalar S = f(x) - f(x)\ntask identity S\n").unwrap();
    assert!(matches!(doc.get("S"), Some(Value::Scalar(s)) if s.is_zero()));
}

#[test]
fn catalog_entries_round_trip_through_the_dsl() {
    let mut names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(["pair_groupoid:3", "double_tangent:2", "projection_groupoid:1x2"].map(String::from));
    for name in names {
        let e = lookup(&name).unwrap();
        let doc = entry_document(&e);
        let text = to_dsl(&doc).unwrap();
        let back = parse_document(&text).unwrap_or_else(|err| panic!("{name}: {err}\n{text}"));
        assert_eq!(back, doc, "{name}");
        // written output is a fixed point
        assert_eq!(to_dsl(&back).unwrap(), text, "{name}");
        if let Some(p) = &e.presentation {
            assert!(matches!(back.get("G"), Some(Value::Groupoid(g)) if g == p), "{name}");
        }
        if let Some(u) = &e.u {
            assert!(matches!(back.get("U"), Some(Value::Bundle(b)) if b == u), "{name}");
        }
        if let Some(a) = &e.algebroid {
            assert!(matches!(back.get("A"), Some(Value::Algebroid(b)) if b == a), "{name}");
        }
    }
}

fn poly() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-4i64..=4, 0u32..3, 0u32..3), 1..4).prop_map(|terms| {
        let c = Chart::new("M", &["x", "y"]).unwrap();
        terms.into_iter().fold(Scalar::zero(), |acc, (k, a, b)| {
            let t = &(&Scalar::int(k) * &c.coord_scalar(0).pow(a as i64)) * &c.coord_scalar(1).pow(b as i64);
            &acc + &t
        })
    })
}

proptest! {
    #[test]
    fn random_tensors_round_trip(m in prop::collection::vec(prop::collection::vec(poly(), 2), 2)) {
        let c = Chart::new("M", &["x", "y"]).unwrap();
        let n = VVForm::from_matrix(&c, &m).unwrap();
        let src = format!("chart M = (x, y)\ntensor N on M = {}\n", matrix_text(&m));
        let doc = parse_document(&src).unwrap();
        prop_assert_eq!(doc.get("N"), Some(&Value::Tensor(n)));
        prop_assert_eq!(parse_document(&to_dsl(&doc).unwrap()).unwrap(), doc);
    }
}

fn matrix_text(m: &[Vec<Scalar>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", r.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", rows.join(", "))
}
