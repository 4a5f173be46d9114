use std::collections::BTreeMap;

use njk_algebroid::{AlgebroidData, BundleMapU};
use njk_groupoid::{GroupoidPresentation, TripleChart};
use njk_symexpr::{parse, Scalar, Var};
use njk_tensorcalc::{Chart, SmoothMap, VVForm};

use crate::build::tensor;
use crate::{CatalogEntry, CatalogError, Expected, Polarity, Quantity, SideCondition};

/// A complete vector field `F ∂θ` on the line with its flow `φ(ε, θ)`.
/// The flow is supplied, never solved for; the entry checks the flow
/// equation instead.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowCase {
    pub label: String,
    /// `F`, a function of `theta`.
    pub f: Scalar,
    /// `φ`, a function of `eps` and `theta`.
    pub phi: Scalar,
    /// Whether `φ` leaves the rational fragment.
    pub transcendental: bool,
}

impl FlowCase {
    /// `F = 1`, `φ = θ + ε`.
    pub fn translation() -> FlowCase {
        FlowCase { label: "F = 1".into(), f: Scalar::one(), phi: parse("theta + eps").unwrap(), transcendental: false }
    }

    /// `F = θ`, `φ = θ·exp(ε)`.
    pub fn linear() -> FlowCase {
        FlowCase {
            label: "F = theta".into(),
            f: Scalar::named("theta"),
            phi: parse("theta*exp(eps)").unwrap(),
            transcendental: true,
        }
    }
}

fn at(e: &Scalar, eps: &Scalar, theta: &Scalar) -> Scalar {
    let mut sub = BTreeMap::new();
    sub.insert(Var::new("eps"), eps.clone());
    sub.insert(Var::new("theta"), theta.clone());
    e.substitute(&sub)
}

/// The flow groupoid `D^X ⇉ ℝ` of `X = F ∂θ` on the chart `(eps, theta)`:
/// `s = θ`, `t = φ`, `(ε̄, φ_ε(θ))·(ε, θ) = (ε̄ + ε, θ)`.
pub fn flow_groupoid(case: FlowCase) -> Result<CatalogEntry, CatalogError> {
    let v = |n: &str| Scalar::named(n);
    let (eps2, eps1, eps, theta) = (v("eps2"), v("eps1"), v("eps"), v("theta"));
    let zero = Scalar::zero();
    let phi = &case.phi;
    let f = &case.f;
    let phi_at = |a: &Scalar, b: &Scalar| at(phi, a, b);
    let f_at = |b: &Scalar| at(f, &zero, b);

    let m = Chart::new("R", &["theta"])?;
    let g = Chart::new("DX", &["eps", "theta"])?;
    let g2 = Chart::new("DX2", &["eps1", "eps", "theta"])?;
    let g3 = Chart::new("DX3", &["eps2", "eps1", "eps", "theta"])?;
    let mk = |src: &Chart, tgt: &Chart, comps: Vec<Scalar>| SmoothMap::new(src, tgt, comps);
    let p = GroupoidPresentation {
        name: format!("flow groupoid, {}", case.label),
        s: mk(&g, &m, vec![theta.clone()])?,
        t: mk(&g, &m, vec![phi.clone()])?,
        u: mk(&m, &g, vec![zero.clone(), theta.clone()])?,
        i: mk(&g, &g, vec![-&eps, phi.clone()])?,
        p1: mk(&g2, &g, vec![eps1.clone(), phi.clone()])?,
        p2: mk(&g2, &g, vec![eps.clone(), theta.clone()])?,
        mult: mk(&g2, &g, vec![&eps1 + &eps, theta.clone()])?,
        left_unit: mk(&g, &g2, vec![zero.clone(), eps.clone(), theta.clone()])?,
        right_unit: mk(&g, &g2, vec![eps.clone(), zero.clone(), theta.clone()])?,
        inverse_pair: mk(&g, &g2, vec![eps.clone(), -&eps, phi.clone()])?,
        g3: Some(TripleChart {
            q12: mk(&g3, &g2, vec![eps2.clone(), eps1.clone(), phi.clone()])?,
            q23: mk(&g3, &g2, vec![eps1.clone(), eps.clone(), theta.clone()])?,
            left: mk(&g3, &g2, vec![&eps2 + &eps1, eps.clone(), theta.clone()])?,
            right: mk(&g3, &g2, vec![eps2.clone(), &eps1 + &eps, theta.clone()])?,
            chart: g3,
        }),
        g: g.clone(),
        m: m.clone(),
        g2,
    };

    let (ve, vt) = (Var::new("eps"), Var::new("theta"));
    let (phi_e, phi_t) = (phi.diff(ve), phi.diff(vt));
    let f_phi = f_at(phi);
    // i*(∂φ/∂ε)
    let phi_e_inv = at(&phi_e, &-&eps, phi);
    let right = tensor(&g, &[(0, 0, phi_e.clone()), (1, 0, phi_t.clone())])?;
    let left = tensor(&g, &[(1, 1, phi_e_inv), (1, 0, Scalar::int(-1))])?;
    let delta = tensor(&g, &[(0, 0, f_phi.clone()), (1, 0, &phi_t - &Scalar::one()), (1, 1, f.clone())])?;
    let n = VVForm::from_matrix(&m, &vec![vec![f.clone()]])?;

    let side_conditions = vec![
        SideCondition { name: "∂φ/∂ε = F∘φ".into(), expr: &phi_e - &f_phi },
        SideCondition { name: "φ(0, θ) = θ".into(), expr: &phi_at(&zero, &theta) - &theta },
    ];
    Ok(CatalogEntry {
        name: if case.transcendental { "flow_groupoid".into() } else { "flow_translation".into() },
        summary: "flow groupoid of a complete vector field on the line, integrating the rank one algebroid with anchor F".into(),
        params: vec![("F".into(), case.f.to_string()), ("phi".into(), case.phi.to_string())],
        generic: vec![],
        polarity: Polarity::Positive,
        presentation: Some(p),
        algebroid: Some(AlgebroidData::new(&m, 1, vec![vec![f.clone()]], vec![])?),
        u: Some(BundleMapU::new(&m, 1, vec![vec![Scalar::one()]])?),
        nijenhuis: Some(n.clone()),
        expected: vec![
            Expected { quantity: Quantity::RightLift, tensor: right },
            Expected { quantity: Quantity::LeftLift, tensor: left },
            Expected { quantity: Quantity::DeltaU, tensor: delta },
            Expected { quantity: Quantity::Nijenhuis, tensor: n },
        ],
        side_conditions,
        sampled: case.transcendental,
    })
}
