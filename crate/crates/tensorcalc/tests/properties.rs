use njk_symexpr::{Scalar, Var};
use njk_tensorcalc::{
    bracket_components, fn_bracket, lie_bracket, lie_derivative, nijenhuis_torsion, Chart, Matrix, ScalarForm,
    VVForm,
};
use proptest::prelude::*;

const NAMES: [&str; 3] = ["x", "y", "z"];

fn chart(n: usize) -> Chart {
    Chart::new("R", &NAMES[..n]).unwrap()
}

/// Polynomial of degree ≤ 2 in the first `n` coordinates.
fn poly(n: usize) -> impl Strategy<Value = Scalar> {
    let monos = 1 + n + n * (n + 1) / 2;
    proptest::collection::vec(-3i64..=3, monos).prop_map(move |cs| {
        let v: Vec<Scalar> = NAMES[..n].iter().map(|s| Scalar::named(s)).collect();
        let mut terms = vec![Scalar::one()];
        terms.extend(v.iter().cloned());
        for i in 0..n {
            for j in i..n {
                terms.push(&v[i] * &v[j]);
            }
        }
        cs.iter().zip(&terms).map(|(c, t)| &Scalar::int(*c) * t).sum()
    })
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    proptest::collection::vec(poly(n), n)
}

fn tensor(n: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(proptest::collection::vec(poly(n), n), n)
}

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn torsion_is_half_fn_self_bracket((n, m) in dims().prop_flat_map(|n| (Just(n), tensor(n)))) {
        let c = chart(n);
        let t = VVForm::from_matrix(&c, &m).unwrap();
        let half = fn_bracket(&t, &t).unwrap().scale(&Scalar::ratio(1, 2));
        prop_assert_eq!(half, nijenhuis_torsion(&t).unwrap());
    }

    // the stored torsion table, evaluated on arbitrary fields, matches the
    // defining formula computed with genuine brackets
    #[test]
    fn torsion_matches_defining_formula((n, m, x, y) in dims().prop_flat_map(|n| (Just(n), tensor(n), vector(n), vector(n)))) {
        let c = chart(n);
        let t = VVForm::from_matrix(&c, &m).unwrap();
        let br = |a: &[Scalar], b: &[Scalar]| bracket_components(&c, a, b);
        let (nx, ny) = (t.apply(&x), t.apply(&y));
        let xy = br(&x, &y);
        let lhs: Vec<Scalar> = (0..n)
            .map(|i| {
                let a = &br(&nx, &ny)[i] + &t.apply(&t.apply(&xy))[i];
                &(&a - &t.apply(&br(&nx, &y))[i]) - &t.apply(&br(&x, &ny))[i]
            })
            .collect();
        let rhs = nijenhuis_torsion(&t).unwrap().eval(&[x, y]);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fn_bracket_symmetric_on_11((n, a, b) in dims().prop_flat_map(|n| (Just(n), tensor(n), tensor(n)))) {
        let c = chart(n);
        let k = VVForm::from_matrix(&c, &a).unwrap();
        let l = VVForm::from_matrix(&c, &b).unwrap();
        prop_assert_eq!(fn_bracket(&k, &l).unwrap(), fn_bracket(&l, &k).unwrap());
    }

    #[test]
    fn bracket_antisymmetry_and_jacobi((n, x, y, z) in dims().prop_flat_map(|n| (Just(n), vector(n), vector(n), vector(n)))) {
        let c = chart(n);
        let (x, y, z) = (VVForm::vector(&c, x).unwrap(), VVForm::vector(&c, y).unwrap(), VVForm::vector(&c, z).unwrap());
        let xy = lie_bracket(&x, &y).unwrap();
        prop_assert_eq!(xy.add(&lie_bracket(&y, &x).unwrap()).unwrap().is_zero(), true);
        let j = lie_bracket(&x, &lie_bracket(&y, &z).unwrap()).unwrap()
            .add(&lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap()).unwrap()
            .add(&lie_bracket(&z, &xy).unwrap()).unwrap();
        prop_assert!(j.is_zero());
    }

    #[test]
    fn lie_derivative_is_derivation_over_evaluation((n, m, x, y) in dims().prop_flat_map(|n| (Just(n), tensor(n), vector(n), vector(n)))) {
        let c = chart(n);
        let t = VVForm::from_matrix(&c, &m).unwrap();
        let xf = VVForm::vector(&c, x.clone()).unwrap();
        let lt = lie_derivative(&xf, &t).unwrap();
        let lhs = bracket_components(&c, &x, &t.apply(&y));
        let xy = bracket_components(&c, &x, &y);
        let rhs: Vec<Scalar> = lt.apply(&y).iter().zip(t.apply(&xy)).map(|(a, b)| a + &b).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exterior_calculus((n, cs, x) in dims().prop_flat_map(|n| (Just(n), proptest::collection::vec(poly(n), n), vector(n)))) {
        let c = chart(n);
        let a = ScalarForm::from_coeffs(&c, 1, cs).unwrap();
        prop_assert!(a.d().d().is_zero());
        // oracle: (L_X α)_a = X(α_a) + α(∂_a X)
        let vars: Vec<Var> = c.coords().to_vec();
        let want: Vec<Scalar> = (0..n)
            .map(|i| {
                let mut acc: Scalar = (0..n).map(|j| &x[j] * &a.coeffs[i].diff(vars[j])).sum();
                for j in 0..n {
                    acc = &acc + &(&a.coeffs[j] * &x[j].diff(vars[i]));
                }
                acc
            })
            .collect();
        prop_assert_eq!(a.lie(&x).coeffs, want);
    }
}

#[test]
fn fn_bracket_degree_rule_for_mixed_degrees() {
    // [X, K] = −(−1)^{0·1}[K, X] for a vector field X and (1,1) tensor K
    let c = chart(2);
    let s = |e: &str| njk_symexpr::parse(e).unwrap();
    let x = VVForm::vector(&c, vec![s("x*y"), s("x^2")]).unwrap();
    let k = VVForm::from_matrix(&c, &vec![vec![s("y"), s("1")], vec![s("x"), s("x*y")]]).unwrap();
    let sum = fn_bracket(&x, &k).unwrap().add(&fn_bracket(&k, &x).unwrap()).unwrap();
    assert!(sum.is_zero());
}
