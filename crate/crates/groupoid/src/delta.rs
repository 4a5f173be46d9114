use njk_algebroid::BundleMapU;
use njk_symexpr::{all_zero, Check, Report, Scalar, VerificationResult, VerifyConfig};
use njk_tensorcalc::linalg::{self, Matrix};
use njk_tensorcalc::{related_check, Chart, SmoothMap, VVForm};

use crate::lift::{jac_at, left_lift, pull_matrix, right_lift, vstack, GroupoidAlgebroid};
use crate::presentation::GroupoidPresentation;
use crate::GroupoidError;

/// `δU = →U + ←U` together with its projection `ρ∘U`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaU {
    pub tensor: VVForm,
    pub base: VVForm,
}

/// Degree-1 cochain: `table[k][j]` is the `∂g_k` component of the value on
/// the tangent vector `∂w_j` of the G2 chart, over `p1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain1 {
    pub g2: Chart,
    pub g: Chart,
    pub table: Matrix,
}

impl Cochain1 {
    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(Scalar::is_zero)
    }

    pub fn labeled_entries(&self) -> Vec<(String, &Scalar)> {
        let mut out = Vec::new();
        for (k, row) in self.table.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out.push((format!("d{} ⊗ ∂{}", self.g2.coord(j), self.g.coord(k)), e));
            }
        }
        out
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        all_zero(self.labeled_entries(), cfg)
    }
}

/// `(dφ∘u) · (T∘u) · du` for `φ ∈ {s, t}`: the only candidate for a tensor
/// on M that T projects to along φ, since `du` splits `dφ` at the units.
pub fn base_projection(p: &GroupoidPresentation, t: &VVForm, via: &SmoothMap) -> Result<VVForm, GroupoidError> {
    if t.chart != p.g || t.k != 1 {
        return Err(GroupoidError::Shape("expected a (1,1) tensor on G".into()));
    }
    let m = linalg::mat_mul(&linalg::mat_mul(&jac_at(via, &p.u), &pull_matrix(&t.matrix(), &p.u)), &p.u.jacobian());
    Ok(VVForm::from_matrix(&p.m, &m)?)
}

fn related(p: &GroupoidPresentation, t: &VVForm, base: &VVForm, cfg: &VerifyConfig) -> Result<(VerificationResult, VerificationResult), GroupoidError> {
    Ok((related_check(&p.s, t, base, cfg)?, related_check(&p.t, t, base, cfg)?))
}

/// `δU = →U + ←U`; fails unless it is s- and t-related to `ρ∘U`.
pub fn delta_minus1(p: &GroupoidPresentation, a: &GroupoidAlgebroid, u: &BundleMapU, cfg: &VerifyConfig) -> Result<DeltaU, GroupoidError> {
    let tensor = right_lift(p, a, u, cfg)?.add(&left_lift(p, a, u, cfg)?)?;
    let base = VVForm::from_matrix(&p.m, &linalg::mat_mul(&a.data.anchor, &u.u))?;
    let (rs, rt) = related(p, &tensor, &base, cfg)?;
    for (name, r) in [("s", rs), ("t", rt)] {
        if !r.is_zero() {
            return Err(GroupoidError::NotRelated(format!("δU is not {name}-related to ρ∘U: {r}")));
        }
    }
    Ok(DeltaU { tensor, base })
}

/// `δT(v₁,v₂) = T(v₁) − T(v₁v₂)·T(v₂)⁻¹` on the tangent vectors of the G2
/// chart. The product with the inverse is the unique `Z` over `g₁` with
/// `Z·T(v₂) = T(v₁v₂)`, found by solving against `(dp2, dm)`.
pub fn delta_0(p: &GroupoidPresentation, t: &VVForm, cfg: &VerifyConfig) -> Result<Cochain1, GroupoidError> {
    if t.chart != p.g || t.k != 1 {
        return Err(GroupoidError::Shape("δ on degree 0 needs a (1,1) tensor on G".into()));
    }
    let tm = t.matrix();
    let (jp1, jp2, jm) = (p.p1.jacobian(), p.p2.jacobian(), p.mult.jacobian());
    let along = |map: &SmoothMap, j: &Matrix| linalg::mat_mul(&pull_matrix(&tm, map), j);
    let a = vstack(&jp2, &jm);
    let b = vstack(&along(&p.p2, &jp2), &along(&p.mult, &jm));
    let w = linalg::solve(&a, &b, cfg).ok_or_else(|| {
        GroupoidError::NotComposable("T(v₁v₂) and T(v₂) do not determine a tangent product; T is not projectable".into())
    })?;
    let table = linalg::mat_sub(&along(&p.p1, &jp1), &linalg::mat_mul(&jp1, &w));
    Ok(Cochain1 { g2: p.g2.clone(), g: p.g.clone(), table })
}

/// Multiplicativity of a (1,1) tensor on G, directly through tangent
/// products and through `δT = 0`.
pub fn multiplicative_check(p: &GroupoidPresentation, t: &VVForm, cfg: &VerifyConfig) -> Result<Report, GroupoidError> {
    let mut rep = Report::new(format!("multiplicative (1,1) tensor on {}", p.name));
    let base = base_projection(p, t, &p.s)?;
    let (rs, rt) = related(p, t, &base, cfg)?;
    rep.push(Check::identity("s-related to T^M", rs));
    rep.push(Check::identity("t-related to T^M", rt));

    let (jp1, jp2, jm) = (p.p1.jacobian(), p.p2.jacobian(), p.mult.jacobian());
    let tm = t.matrix();
    let along = |map: &SmoothMap, j: &Matrix| linalg::mat_mul(&pull_matrix(&tm, map), j);
    let direct = match linalg::solve(&vstack(&jp1, &jp2), &vstack(&along(&p.p1, &jp1), &along(&p.p2, &jp2)), cfg) {
        Some(w) => {
            let defect = linalg::mat_sub(&along(&p.mult, &jm), &linalg::mat_mul(&jm, &w));
            let c = Cochain1 { g2: p.g2.clone(), g: p.g.clone(), table: defect };
            Some(c.verify_zero(cfg))
        }
        None => None,
    };
    match &direct {
        Some(r) => rep.push(Check::identity("T(dm(v,w)) = dm(Tv,Tw)", r.clone())),
        None => rep.push(Check::error("T(dm(v,w)) = dm(Tv,Tw)", "(Tv, Tw) is not a composable pair")),
    }
    let via_delta = delta_0(p, t, cfg).map(|c| c.verify_zero(cfg));
    match &via_delta {
        Ok(r) => rep.push(Check::identity("δT = 0", r.clone())),
        Err(e) => rep.push(Check::error("δT = 0", e.to_string())),
    }
    // a non-composable pair or a failed solve both mean "not multiplicative"
    let direct_ok = matches!(&direct, Some(r) if r.is_zero());
    let delta_ok = matches!(&via_delta, Ok(r) if r.is_zero());
    let agree = direct_ok == delta_ok;
    rep.note(if agree { "direct and δ routes agree" } else { "direct and δ routes DISAGREE" });
    Ok(rep)
}
