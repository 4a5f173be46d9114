use njk_algebroid::{AValued2Form, AlgebroidData, BundleMapU};
use njk_symexpr::{Scalar, VerifyConfig};
use njk_tensorcalc::combin::subsets;
use njk_tensorcalc::linalg::{self, Matrix};
use njk_tensorcalc::{bracket_components, SmoothMap, VVForm};

use crate::presentation::GroupoidPresentation;
use crate::GroupoidError;

/// The Lie algebroid of a presentation with the invariant frames that
/// realize it.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidAlgebroid {
    pub data: AlgebroidData,
    /// `frame[k][α]`: frame of `ker ds` along the units, functions on M.
    pub frame: Matrix,
    /// The frame at `t(g)`, functions on G.
    pub frame_t: Matrix,
    /// `di` of the frame at `u(s(g))`, functions on G.
    pub frame_s_inv: Matrix,
    /// Right invariant fields `→u_α`, one column each.
    pub right: Matrix,
    /// Left invariant fields `←u_α`.
    pub left: Matrix,
    /// Pivots of the kernel computation that must not vanish.
    pub locus: Vec<String>,
}

/// Jacobian of `map` evaluated along `at`.
pub(crate) fn jac_at(map: &SmoothMap, at: &SmoothMap) -> Matrix {
    pull_matrix(&map.jacobian(), at)
}

pub(crate) fn pull_matrix(m: &Matrix, at: &SmoothMap) -> Matrix {
    let sub = at.pullback_map();
    m.iter().map(|r| r.iter().map(|x| x.substitute(&sub)).collect()).collect()
}

pub(crate) fn vstack(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().chain(b.iter()).cloned().collect()
}

/// `dm(W)` for the tangent vectors `W` at `embed(g)` with `dp1 W = first`
/// and `dp2 W = second`, column by column.
pub(crate) fn translate(
    p: &GroupoidPresentation,
    embed: &SmoothMap,
    first: &Matrix,
    second: &Matrix,
    cfg: &VerifyConfig,
) -> Result<Matrix, GroupoidError> {
    let a = vstack(&jac_at(&p.p1, embed), &jac_at(&p.p2, embed));
    let w = linalg::solve(&a, &vstack(first, second), cfg)
        .ok_or_else(|| GroupoidError::NotComposable(format!("no tangent vector of {} with the given projections", p.g2.name())))?;
    Ok(linalg::mat_mul(&jac_at(&p.mult, embed), &w))
}

fn column(m: &Matrix, a: usize) -> Vec<Scalar> {
    m.iter().map(|r| r[a].clone()).collect()
}

/// Frame of `ker ds` at the units by symbolic elimination, brackets of the
/// right invariant extensions restricted to the units, anchor `dt`.
pub fn algebroid_of(p: &GroupoidPresentation, cfg: &VerifyConfig) -> Result<GroupoidAlgebroid, GroupoidError> {
    p.validate()?;
    let (n, big) = (p.dim_m(), p.dim_g());
    let (basis, red) = linalg::nullspace(&jac_at(&p.s, &p.u), cfg);
    let r = basis.len();
    if r != big - n {
        return Err(GroupoidError::KernelRank { expected: big - n, got: r });
    }
    let frame: Matrix = (0..big).map(|k| basis.iter().map(|v| v[k].clone()).collect()).collect();
    let frame_t = pull_matrix(&frame, &p.t);
    let right = translate(p, &p.left_unit, &frame_t, &linalg::zeros(big, r), cfg)?;
    let us = p.u.after(&p.s)?;
    let frame_s_inv = linalg::mat_mul(&jac_at(&p.i, &us), &pull_matrix(&frame, &p.s));
    let left = translate(p, &p.right_unit, &linalg::zeros(big, r), &frame_s_inv, cfg)?;

    let anchor = linalg::mat_mul(&jac_at(&p.t, &p.u), &frame);
    let mut structure = Vec::new();
    for pair in subsets(r, 2) {
        let br = bracket_components(&p.g, &column(&right, pair[0]), &column(&right, pair[1]));
        let at_units: Matrix = br.iter().map(|x| vec![p.u.pull(x)]).collect();
        let c = linalg::solve(&frame, &at_units, cfg).ok_or_else(|| {
            GroupoidError::Shape("bracket of right invariant fields is not tangent to the s-fibres at the units".into())
        })?;
        structure.push(c.into_iter().map(|row| row[0].clone()).collect());
    }
    let data = AlgebroidData::new(&p.m, r, anchor, structure)?;
    Ok(GroupoidAlgebroid { data, frame, frame_t, frame_s_inv, right, left, locus: red.locus() })
}

fn check_u(p: &GroupoidPresentation, a: &GroupoidAlgebroid, u: &BundleMapU) -> Result<(), GroupoidError> {
    if u.chart != p.m || u.rank != a.data.rank {
        return Err(GroupoidError::Shape(format!("U must map TM to the rank {} algebroid over {}", a.data.rank, p.m.name())));
    }
    Ok(())
}

/// `→U_g = dR_g ∘ U_{t(g)} ∘ dt`, with `dR_g` the first-slot differential
/// of m at `(u(t(g)), g)`.
pub fn right_lift(p: &GroupoidPresentation, a: &GroupoidAlgebroid, u: &BundleMapU, cfg: &VerifyConfig) -> Result<VVForm, GroupoidError> {
    check_u(p, a, u)?;
    let ut = pull_matrix(&u.u, &p.t);
    let first = linalg::mat_mul(&linalg::mat_mul(&a.frame_t, &ut), &p.t.jacobian());
    let m = translate(p, &p.left_unit, &first, &linalg::zeros(p.dim_g(), p.dim_g()), cfg)?;
    Ok(VVForm::from_matrix(&p.g, &m)?)
}

/// `←U_g = dL_g ∘ di ∘ U_{s(g)} ∘ ds`, with `dL_g` the second-slot
/// differential of m at `(g, u(s(g)))`.
pub fn left_lift(p: &GroupoidPresentation, a: &GroupoidAlgebroid, u: &BundleMapU, cfg: &VerifyConfig) -> Result<VVForm, GroupoidError> {
    check_u(p, a, u)?;
    let us = pull_matrix(&u.u, &p.s);
    let second = linalg::mat_mul(&linalg::mat_mul(&a.frame_s_inv, &us), &p.s.jacobian());
    let m = translate(p, &p.right_unit, &linalg::zeros(p.dim_g(), p.dim_g()), &second, cfg)?;
    Ok(VVForm::from_matrix(&p.g, &m)?)
}

/// `→U = t*(U^α) ⊗ →u_α`.
pub fn right_lift_frame(p: &GroupoidPresentation, a: &GroupoidAlgebroid, u: &BundleMapU) -> Result<VVForm, GroupoidError> {
    check_u(p, a, u)?;
    let m = linalg::mat_mul(&linalg::mat_mul(&a.right, &pull_matrix(&u.u, &p.t)), &p.t.jacobian());
    Ok(VVForm::from_matrix(&p.g, &m)?)
}

/// `←U = s*(U^α) ⊗ ←u_α`.
pub fn left_lift_frame(p: &GroupoidPresentation, a: &GroupoidAlgebroid, u: &BundleMapU) -> Result<VVForm, GroupoidError> {
    check_u(p, a, u)?;
    let m = linalg::mat_mul(&linalg::mat_mul(&a.left, &pull_matrix(&u.u, &p.s)), &p.s.jacobian());
    Ok(VVForm::from_matrix(&p.g, &m)?)
}

/// Right invariant lift `t*(w^α) ⊗ →u_α` of an A-valued 2-form.
pub fn right_lift_2form(p: &GroupoidPresentation, a: &GroupoidAlgebroid, w: &AValued2Form) -> Result<VVForm, GroupoidError> {
    if w.chart != p.m || w.rank != a.data.rank {
        return Err(GroupoidError::Shape("A-valued form does not match the algebroid".into()));
    }
    let (n, big) = (p.dim_m(), p.dim_g());
    let jt = p.t.jacobian();
    let vals: Vec<Vec<Scalar>> =
        subsets(n, 2).iter().map(|ij| w.value(ij[0], ij[1]).iter().map(|x| p.t.pull(x)).collect()).collect();
    let table = subsets(big, 2)
        .iter()
        .map(|kl| {
            let (k, l) = (kl[0], kl[1]);
            let mut coeff = vec![Scalar::zero(); a.data.rank];
            for (ij, v) in subsets(n, 2).iter().zip(&vals) {
                let (i, j) = (ij[0], ij[1]);
                let minor = &(&jt[i][k] * &jt[j][l]) - &(&jt[i][l] * &jt[j][k]);
                if minor.is_zero() {
                    continue;
                }
                for (c, x) in coeff.iter_mut().zip(v) {
                    *c = &*c + &(&minor * x);
                }
            }
            linalg::mat_vec(&a.right, &coeff)
        })
        .collect();
    Ok(VVForm::from_table(&p.g, 2, table)?)
}
