use njk_algebroid::{a_torsion, algebroid_lie_derivative, BundleMapU};
use njk_symexpr::{all_zero, Check, Report, Scalar, VerifyConfig};
use njk_tensorcalc::linalg;
use njk_tensorcalc::{fn_bracket, lie_derivative, nijenhuis_torsion, VVForm};

use crate::delta::{base_projection, delta_minus1};
use crate::lift::{algebroid_of, right_lift, right_lift_2form};
use crate::presentation::{check_axioms, GroupoidPresentation};
use crate::GroupoidError;

/// `→U` as a multiplicative Nijenhuis almost tangent structure, and the
/// A-torsion route to the same conclusion.
pub fn theorem2_check(p: &GroupoidPresentation, u: &BundleMapU, cfg: &VerifyConfig) -> Result<Report, GroupoidError> {
    let mut rep = Report::new(format!("right invariant lift on {}", p.name));
    rep.absorb("axioms", check_axioms(p, cfg)?);
    let (n, big) = (p.dim_m(), p.dim_g());
    if big != 2 * n {
        rep.push(Check::error("dimension", format!("dim G = {big} ≠ 2·dim M = {}; kernel and image cannot coincide", 2 * n)));
        return Ok(rep);
    }
    let a = algebroid_of(p, cfg)?;
    let ru = right_lift(p, &a, u, cfg)?;
    let rm = ru.matrix();

    let ds_ru = linalg::mat_mul(&p.s.jacobian(), &rm);
    rep.push(Check::identity("(1a) ds∘→U = 0", all_zero(labeled(&ds_ru, "ds∘→U"), cfg)));
    let (kt, _) = linalg::nullspace(&p.t.jacobian(), cfg);
    let kt_cols: linalg::Matrix = (0..big).map(|k| kt.iter().map(|v| v[k].clone()).collect()).collect();
    let on_kt = linalg::mat_mul(&rm, &kt_cols);
    rep.push(Check::identity("(1b) →U vanishes on ker dt", all_zero(labeled(&on_kt, "→U∘j"), cfg)));
    let red = linalg::rref(&rm, cfg);
    rep.push(Check::rank("(1c) rank →U = dim M", n, red.rank(), red.locus()));

    let fnb = fn_bracket(&ru, &ru)?;
    rep.push(Check::identity("(2) [→U,→U]^fn = 0", fnb.verify_zero(cfg)));

    match delta_minus1(p, &a, u, cfg) {
        Ok(du) => {
            let ns = base_projection(p, &du.tensor, &p.s)?;
            let nt = base_projection(p, &du.tensor, &p.t)?;
            rep.push(Check::identity("(3) s_*δU = t_*δU", ns.verify_eq(&nt, cfg)?));
            rep.push(Check::identity("(3) s_*δU = ρ∘U", ns.verify_eq(&du.base, cfg)?));
            rep.push(Check::identity("(3) T_N = 0", nijenhuis_torsion(&ns)?.verify_zero(cfg)));
            rep.note(format!("N = {}", ns));
        }
        Err(e) => rep.push(Check::error("(3) s_*δU = t_*δU", e.to_string())),
    }

    let ta = a_torsion(&a.data, u)?;
    rep.push(Check::identity("(4) T^A_U = 0", ta.verify_zero(cfg)));
    let lifted = right_lift_2form(p, &a, &ta)?;
    rep.push(Check::identity("(4) T_→U = →(T^A_U)", nijenhuis_torsion(&ru)?.verify_eq(&lifted, cfg)?));
    Ok(rep)
}

fn labeled<'a>(m: &'a linalg::Matrix, what: &str) -> Vec<(String, &'a Scalar)> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out.push((format!("{what}[{i}][{j}]"), e));
        }
    }
    out
}

/// Groupoid half of the triple identities for `δU`: the D part
/// `L_{→a} δU = →(L^A_a U)` on frame sections, the ℓ part
/// `δU(→a)|_M = Uρ(a)` and the projection `ρ∘U`.
pub fn lemma_check(p: &GroupoidPresentation, u: &BundleMapU, cfg: &VerifyConfig) -> Result<Report, GroupoidError> {
    let a = algebroid_of(p, cfg)?;
    let du = delta_minus1(p, &a, u, cfg)?;
    let mut rep = Report::new(format!("δU triple on {}", p.name));
    let names = &a.data.frame_names;
    let u_rho = linalg::mat_mul(&u.u, &a.data.anchor);
    for al in 0..a.data.rank {
        let field: Vec<Scalar> = a.right.iter().map(|r| r[al].clone()).collect();
        let lhs = lie_derivative(&VVForm::vector(&p.g, field.clone())?, &du.tensor)?;
        let lu = algebroid_lie_derivative(&a.data, &a.data.frame(al), u)?;
        let rhs = right_lift(p, &a, &lu, cfg)?;
        rep.push(Check::identity(format!("L_→{} δU = →(L^A_{} U)", names[al], names[al]), lhs.verify_eq(&rhs, cfg)?));

        let at_units: Vec<Scalar> = du.tensor.apply(&field).iter().map(|x| p.u.pull(x)).collect();
        let want = linalg::mat_vec(&a.frame, &u_rho.iter().map(|r| r[al].clone()).collect::<Vec<_>>());
        let diff: Vec<(String, Scalar)> =
            at_units.iter().zip(&want).enumerate().map(|(k, (x, y))| (format!("∂{}", p.g.coord(k)), x - y)).collect();
        rep.push(Check::identity(
            format!("δU(→{})|_M = Uρ({})", names[al], names[al]),
            all_zero(diff.iter().map(|(l, e)| (l.clone(), e)), cfg),
        ));
    }
    let ns = base_projection(p, &du.tensor, &p.s)?;
    rep.push(Check::identity("T^M = ρ∘U", ns.verify_eq(&du.base, cfg)?));
    Ok(rep)
}
