use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use njk_symexpr::verify::reevaluate;
use njk_symexpr::{is_zero, parse, ModePreference, Scalar, Var, Verdict, VerifyConfig};

/// Independent expression tree: rendered to text for the parser and
/// evaluated directly with rational arithmetic as the oracle.
#[derive(Clone, Debug)]
enum Tree {
    Int(i64),
    Var(usize),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, u32),
}

const NAMES: [&str; 3] = ["x", "y", "z"];

impl Tree {
    fn render(&self) -> String {
        match self {
            Tree::Int(n) => format!("({n})"),
            Tree::Var(i) => NAMES[*i].to_string(),
            Tree::Add(a, b) => format!("({} + {})", a.render(), b.render()),
            Tree::Sub(a, b) => format!("({} - {})", a.render(), b.render()),
            Tree::Mul(a, b) => format!("({} * {})", a.render(), b.render()),
            Tree::Div(a, b) => format!("({} / {})", a.render(), b.render()),
            Tree::Pow(a, e) => format!("({})^{e}", a.render()),
        }
    }

    /// Same expression with every commutative operation flipped.
    fn mirrored(&self) -> Tree {
        match self {
            Tree::Add(a, b) => Tree::Add(Box::new(b.mirrored()), Box::new(a.mirrored())),
            Tree::Mul(a, b) => Tree::Mul(Box::new(b.mirrored()), Box::new(a.mirrored())),
            Tree::Sub(a, b) => Tree::Sub(Box::new(a.mirrored()), Box::new(b.mirrored())),
            Tree::Div(a, b) => Tree::Div(Box::new(a.mirrored()), Box::new(b.mirrored())),
            Tree::Pow(a, e) => Tree::Pow(Box::new(a.mirrored()), *e),
            t => t.clone(),
        }
    }

    fn eval(&self, pt: &[BigRational; 3]) -> Option<BigRational> {
        Some(match self {
            Tree::Int(n) => BigRational::from_integer(BigInt::from(*n)),
            Tree::Var(i) => pt[*i].clone(),
            Tree::Add(a, b) => a.eval(pt)? + b.eval(pt)?,
            Tree::Sub(a, b) => a.eval(pt)? - b.eval(pt)?,
            Tree::Mul(a, b) => a.eval(pt)? * b.eval(pt)?,
            Tree::Div(a, b) => {
                let d = b.eval(pt)?;
                if d.is_zero() {
                    return None;
                }
                a.eval(pt)? / d
            }
            Tree::Pow(a, e) => num_traits::pow(a.eval(pt)?, *e as usize),
        })
    }
}

fn tree(with_div: bool) -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![(-5i64..=5).prop_map(Tree::Int), (0usize..3).prop_map(Tree::Var)];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let mut ops = vec![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Add(Box::new(a), Box::new(b))).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Sub(Box::new(a), Box::new(b))).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Mul(Box::new(a), Box::new(b))).boxed(),
            (inner.clone(), 0u32..4).prop_map(|(a, e)| Tree::Pow(Box::new(a), e)).boxed(),
        ];
        if with_div {
            ops.push((inner.clone(), inner).prop_map(|(a, b)| Tree::Div(Box::new(a), Box::new(b))).boxed());
        }
        proptest::strategy::Union::new(ops)
    })
}

fn point() -> impl Strategy<Value = [BigRational; 3]> {
    proptest::array::uniform3((-20i64..=20, 1i64..=7).prop_map(|(n, d)| BigRational::new(n.into(), d.into())))
}

fn bind(pt: &[BigRational; 3]) -> BTreeMap<Var, BigRational> {
    NAMES.iter().zip(pt).map(|(n, v)| (Var::new(n), v.clone())).collect()
}

fn exact() -> VerifyConfig {
    VerifyConfig { mode: ModePreference::Exact, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // the parsed canonical form agrees with direct evaluation of the tree
    #[test]
    fn canonical_form_evaluates_like_tree(t in tree(true), pt in point()) {
        let Ok(s) = parse(&t.render()) else { return Ok(()) };
        if let (Some(want), Ok(got)) = (t.eval(&pt), s.eval(&bind(&pt), 64)) {
            prop_assert_eq!(want, got);
        }
    }

    #[test]
    fn canonical_form_is_sound(t in tree(true)) {
        let Ok(s) = parse(&t.render()) else { return Ok(()) };
        let reparsed = parse(&s.to_string()).unwrap();
        prop_assert_eq!(is_zero(&(&s - &reparsed), &exact()).verdict, Verdict::ProvedZero);
        prop_assert_eq!(&s, &reparsed);
    }

    #[test]
    fn canonical_form_is_unique(t in tree(true)) {
        let Ok(a) = parse(&t.render()) else { return Ok(()) };
        let b = parse(&t.mirrored().render()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn derivative_matches_finite_difference(t in tree(true), pt in point(), which in 0usize..3) {
        let Ok(s) = parse(&t.render()) else { return Ok(()) };
        let v = Var::new(NAMES[which]);
        let d = s.diff(v);
        let h = BigRational::new(1.into(), BigInt::from(10).pow(12));
        let mut lo = pt.clone();
        let mut hi = pt.clone();
        lo[which] -= &h;
        hi[which] += &h;
        let (Some(a), Some(b)) = (t.eval(&hi), t.eval(&lo)) else { return Ok(()) };
        let Ok(exact_d) = d.eval(&bind(&pt), 64) else { return Ok(()) };
        let fd = (a - b) / (BigRational::from_integer(2.into()) * &h);
        let err = (fd - &exact_d).abs();
        let scale = exact_d.abs().max(BigRational::from_integer(1.into()));
        prop_assert!(err <= scale * BigRational::new(1.into(), BigInt::from(1_000_000)));
    }

    #[test]
    fn derivative_commutes_with_constant_substitution(t in tree(true), n in -9i64..=9, m in 1i64..=5) {
        let Ok(s) = parse(&t.render()) else { return Ok(()) };
        let (x, y) = (Var::new("x"), Var::new("y"));
        let c = Scalar::ratio(n, m);
        // skip substitutions that land on a pole
        prop_assume!(!Scalar::from_poly(s.denom().clone()).substitute_one(y, &c).is_zero());
        let lhs = s.substitute_one(y, &c).diff(x);
        let rhs = s.diff(x).substitute_one(y, &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in tree(false), b in tree(false)) {
        let (Ok(p), Ok(q)) = (parse(&a.render()), parse(&b.render())) else { return Ok(()) };
        let x = Var::new("x");
        prop_assert_eq!((&p + &q).diff(x), &p.diff(x) + &q.diff(x));
        prop_assert_eq!((&p * &q).diff(x), &(&p.diff(x) * &q) + &(&p * &q.diff(x)));
    }

    #[test]
    fn sampled_witness_is_reproducible(t in tree(false), seed in 0u64..1000) {
        let Ok(p) = parse(&t.render()) else { return Ok(()) };
        let e = &parse("exp(x)").unwrap() + &p;
        let cfg = VerifyConfig { seed, samples: 5, ..Default::default() };
        let r1 = is_zero(&e, &cfg);
        let r2 = is_zero(&e, &cfg);
        prop_assert_eq!(&r1, &r2);
        if let Verdict::SampledNonzero { witness } = &r1.verdict {
            let again = reevaluate(&e, witness, cfg.precision).unwrap();
            prop_assert_eq!(&again, &witness.exact_value);
            prop_assert!(!again.is_zero());
        }
    }
}

#[test]
fn spec_examples() {
    assert_eq!(parse("x^2 + 2*x*y").unwrap().to_string(), "x^2 + 2*x*y");
    assert!(parse("0.5*(u - u)").unwrap().is_zero());
    let x = Var::new("x");
    assert_eq!(parse("x^2*y").unwrap().diff(x), parse("2*x*y").unwrap());
    let t = Var::new("t");
    assert_eq!(parse("exp(2*t)").unwrap().diff(t), parse("2*exp(2*t)").unwrap());
    let swap: BTreeMap<Var, Scalar> =
        [(Var::new("x"), Scalar::named("y")), (Var::new("y"), Scalar::named("x"))].into();
    assert_eq!(parse("x + y").unwrap().substitute(&swap), parse("x + y").unwrap());
    let shifted = parse("x^2").unwrap().substitute_one(x, &parse("x + h").unwrap());
    assert!((shifted - parse("x^2 + 2*x*h + h^2").unwrap()).is_zero());
}

#[test]
fn exp_product_is_sampled_zero() {
    let cfg = VerifyConfig { samples: 20, tol: 1e-9, ..Default::default() };
    let r = is_zero(&parse("exp(a)*exp(-a) - 1").unwrap(), &cfg);
    assert_eq!(r.verdict, Verdict::SampledZero { n_points: 20, tolerance: 1e-9 });
}

#[test]
fn symbol_rules_are_closed() {
    use njk_symexpr::{SymbolDecl, SymbolError, SymbolTable};
    let bad = SymbolTable::standard().with(vec![SymbolDecl {
        name: "f".into(),
        arity: 1,
        derivatives: vec!["g(_0)".into()],
        eval: None,
    }]);
    assert!(matches!(bad, Err(SymbolError::NotClosed { .. })));
    // mutually referential rules are fine
    let ok = SymbolTable::empty().with(vec![
        SymbolDecl { name: "s".into(), arity: 1, derivatives: vec!["c(_0)".into()], eval: None },
        SymbolDecl { name: "c".into(), arity: 1, derivatives: vec!["-s(_0)".into()], eval: None },
    ]);
    assert!(ok.is_ok());
}
