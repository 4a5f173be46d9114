use njk_algebroid::{lemma_triple, AlgebroidData, BundleMapU};
use njk_symexpr::{is_zero, Check, Report, VerificationResult, VerifyConfig};
use njk_tensorcalc::combin::subsets;
use njk_tensorcalc::linalg;
use njk_tensorcalc::Chart;

use crate::field::{check_homological, de_rham, euler_field, graded_commutator, homological_field, homological_field_on, GradedVectorField};
use crate::function::GradedChart;
use crate::tensor::{body_rank, chart_of, core_lift, graded_fn_11, graded_lie_derivative, linear_lift, vertical_endomorphism, LIFT_CONVENTION, SIGN_CONVENTION};
use crate::GradedError;

/// `ι_Q V`, the left contraction of a degree-1 field into `V`.
pub fn iota_v(q: &GradedVectorField) -> Result<GradedVectorField, GradedError> {
    Ok(vertical_endomorphism(&q.chart)?.apply_left(q))
}

/// `ι_{d_dR} V = E` on `T[1]M`.
pub fn euler_check(base: &Chart, cfg: &VerifyConfig) -> VerificationResult {
    euler_condition(&de_rham(base), cfg).expect("T[1]M has n = r")
}

/// `ι_Q V − E`; vanishes exactly when the anchor part of `Q` is the
/// identity.
pub fn euler_condition(q: &GradedVectorField, cfg: &VerifyConfig) -> Result<VerificationResult, GradedError> {
    Ok(iota_v(q)?.sub(&euler_field(&q.chart))?.verify_zero(cfg))
}

/// `A` transported to `TM` along `U`: anchor `ρU`,
/// `c'_{ij} = U⁻¹[U∂ᵢ, U∂ⱼ]_A`. `None` if `U` is not invertible.
pub fn transport_to_tangent(a: &AlgebroidData, u: &BundleMapU, cfg: &VerifyConfig) -> Result<Option<AlgebroidData>, GradedError> {
    let n = a.dim();
    if a.rank != n || u.rank != n || u.chart != a.chart {
        return Err(GradedError::Shape("transport needs rank(A) = dim M and a matching U".into()));
    }
    let Some(inv) = linalg::inverse(&u.u, cfg) else {
        return Ok(None);
    };
    let anchor = linalg::mat_mul(&a.anchor, &u.u);
    let structure = subsets(n, 2)
        .iter()
        .map(|p| linalg::mat_vec(&inv, &a.bracket(&u.column(p[0]), &u.column(p[1]))))
        .collect();
    let t = AlgebroidData::new(&a.chart, n, anchor, structure).map_err(|e| GradedError::Shape(e.to_string()))?;
    let names = a.chart.coords().iter().map(|v| format!("∂{v}")).collect();
    Ok(Some(t.with_frame_names(names)))
}

/// The almost tangent structure `U↑` against `A`, in both formulations.
pub fn theorem1_check(a: &AlgebroidData, u: &BundleMapU, cfg: &VerifyConfig) -> Result<Report, GradedError> {
    let n = a.dim();
    if a.rank != n {
        return Err(GradedError::Shape(format!("rank(A) = {} but dim M = {n}", a.rank)));
    }
    if u.chart != a.chart || u.rank != a.rank {
        return Err(GradedError::Shape("U does not match A".into()));
    }
    let mut rep = Report::new("almost tangent structure");
    rep.note("A[1] is identified with T[1]M through U; (d) is evaluated in those coordinates");
    rep.note(SIGN_CONVENTION);
    rep.note(LIFT_CONVENTION);
    let chart = chart_of(a);
    let q = homological_field(a);
    let up = core_lift(&chart, u)?;

    rep.push(Check::identity("A is a Lie algebroid: [d_A,d_A] = 0", check_homological(&q, cfg)?));

    let det = linalg::det(&u.u);
    rep.push(Check::nonzero("(a) U invertible: det U ≠ 0", is_zero(&det, cfg)));

    rep.push(Check::identity("(b) U↑∘U↑ = 0", up.compose(&up)?.verify_zero(cfg)));
    let (rk, locus) = body_rank(&up, cfg);
    rep.push(Check::rank("(b) rank U↑ = n", n, rk, locus));
    rep.push(Check::identity("(b) [U↑,U↑] = 0", graded_fn_11(&up, &up)?.verify_zero(cfg)));

    let ldu = graded_lie_derivative(&q, &up)?;
    rep.push(Check::identity("(c) [[d_A,U↑],U↑] = 0", graded_fn_11(&ldu, &up)?.verify_zero(cfg)));

    match transport_to_tangent(a, u, cfg)? {
        Some(t) => {
            let tan = GradedChart::tangent(&a.chart);
            let qt = homological_field_on(&tan, &t);
            let c = graded_commutator(&de_rham(&a.chart), &qt)?;
            rep.push(Check::identity("(d) [d_dR,d_A] = 0", c.verify_zero(cfg)));
        }
        None => rep.push(Check::error("(d) [d_dR,d_A] = 0", "U is not invertible, no identification with T[1]M")),
    }

    let lift = linear_lift(&chart, &lemma_triple(a, u).map_err(|e| GradedError::Shape(e.to_string()))?)?;
    rep.push(Check::identity("(e) L_{d_A}U↑ = lift(D, ℓ, T^M)", ldu.verify_eq(&lift, cfg)?));
    Ok(rep)
}
