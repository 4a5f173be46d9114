use njk_symexpr::{all_zero, Check, Report, Scalar, VerifyConfig};
use njk_tensorcalc::linalg::{self, Matrix};
use njk_tensorcalc::{lie_derivative, VVForm};

use crate::data::{algebroid_lie_derivative, shapes, AlgebroidData, BundleMapU, Section};
use crate::AlgebroidError;

/// Module structure used for `L_a` on A-valued 1-forms.
pub const LIE_CONVENTION: &str =
    "L_a on A-valued 1-forms: (L_a ω)(X) = [a, ω(X)]_A − ω([ρ(a), X]), i.e. L_a(θ⊗b) = L_{ρ(a)}θ⊗b + θ⊗[a,b]_A";

/// Linear (1,1) tensor on A as `(D, ℓ, T^M)`. `d[β]` is `D(u_β)`; `ell`
/// is the r×r matrix of ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct IMTriple {
    pub d: Vec<BundleMapU>,
    pub ell: Matrix,
    pub tm: VVForm,
}

impl IMTriple {
    pub fn zero(a: &AlgebroidData) -> IMTriple {
        IMTriple {
            d: (0..a.rank).map(|_| BundleMapU::zero(&a.chart, a.rank)).collect(),
            ell: linalg::zeros(a.rank, a.rank),
            tm: VVForm::zero(&a.chart, 1),
        }
    }

    pub fn rank(&self) -> usize {
        self.ell.len()
    }

    pub fn ell_of(&self, s: &[Scalar]) -> Section {
        linalg::mat_vec(&self.ell, s)
    }

    /// D on a general section through the Leibniz rule
    /// `D(fa) = f D(a) + df ⊗ ℓ(a) − ⟨df, T^M⟩ ⊗ a`.
    pub fn d_of(&self, s: &[Scalar]) -> BundleMapU {
        let chart = &self.tm.chart;
        let n = chart.dim();
        let r = self.rank();
        let mut out = linalg::zeros(r, n);
        let tm = self.tm.matrix();
        for (al, f) in s.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let grads: Vec<Scalar> = (0..n).map(|k| f.diff(chart.coord(k))).collect();
            for i in 0..n {
                // (T^M ∂ᵢ)(f)
                let tf: Scalar = (0..n).map(|k| &tm[k][i] * &grads[k]).sum();
                for g in 0..r {
                    let mut e = &out[g][i] + &(f * &self.d[al].u[g][i]);
                    e = &e + &(&grads[i] * &self.ell[g][al]);
                    if g == al {
                        e = &e - &tf;
                    }
                    out[g][i] = e;
                }
            }
        }
        BundleMapU { chart: chart.clone(), rank: r, u: out }
    }
}

/// `([−, T]^fn, T, T)` on the tangent algebroid frame `∂ᵢ`.
pub fn tangent_lift_triple(t: &VVForm) -> Result<IMTriple, AlgebroidError> {
    if t.k != 1 {
        return Err(AlgebroidError::Shape("tangent lift needs a (1,1) tensor".into()));
    }
    let c = &t.chart;
    let d = (0..c.dim())
        .map(|b| {
            let lt = lie_derivative(&VVForm::coordinate_field(c, b), t)?;
            Ok(BundleMapU { chart: c.clone(), rank: c.dim(), u: lt.matrix() })
        })
        .collect::<Result<Vec<_>, AlgebroidError>>()?;
    Ok(IMTriple { d, ell: t.matrix(), tm: t.clone() })
}

/// `D(a) = L^A_a U`, `ℓ = U∘ρ_A`, `T^M = ρ_A∘U`.
pub fn lemma_triple(a: &AlgebroidData, u: &BundleMapU) -> Result<IMTriple, AlgebroidError> {
    shapes(a, u)?;
    let d = (0..a.rank).map(|b| algebroid_lie_derivative(a, &a.frame(b), u)).collect::<Result<Vec<_>, _>>()?;
    let ell = linalg::mat_mul(&u.u, &a.anchor);
    let tm = VVForm::from_matrix(&a.chart, &linalg::mat_mul(&a.anchor, &u.u))?;
    Ok(IMTriple { d, ell, tm })
}

/// The four IM identities on frame sections.
pub fn im_check(a: &AlgebroidData, t: &IMTriple, cfg: &VerifyConfig) -> Result<Report, AlgebroidError> {
    if t.rank() != a.rank || t.tm.chart != a.chart {
        return Err(AlgebroidError::Shape("triple does not match the algebroid".into()));
    }
    let mut rep = Report::new("IM identities");
    rep.note(LIE_CONVENTION);
    let r = a.rank;
    let n = a.dim();
    let names = &a.frame_names;
    // ordered pairs: the first two identities are not symmetric in (a, b)
    for x in 0..r {
        for y in 0..r {
            let (ua, ub) = (a.frame(x), a.frame(y));
            if x < y {
                let lhs = t.d_of(&a.bracket(&ua, &ub));
                let rhs1 = algebroid_lie_derivative(a, &ua, &t.d[y])?;
                let rhs2 = algebroid_lie_derivative(a, &ub, &t.d[x])?;
                let defect = lhs.sub(&rhs1.sub(&rhs2));
                rep.push(Check::identity(format!("D[{},{}]", names[x], names[y]), defect.verify_zero(cfg)));
            }
            // ℓ[a,b] − [a, ℓ b] + ι_{ρ(b)} D(a)
            let lhs = t.ell_of(&a.bracket(&ua, &ub));
            let br = a.bracket(&ua, &t.ell_of(&ub));
            let iota = t.d[x].apply(&a.anchor_of(&ub));
            let defect: Section = (0..r).map(|g| &(&lhs[g] - &br[g]) + &iota[g]).collect();
            rep.push(Check::identity(format!("ℓ[{},{}]", names[x], names[y]), a.verify_section_zero(&defect, cfg)));
        }
    }
    for x in 0..r {
        let rho_a = VVForm::vector(&a.chart, a.anchor_of(&a.frame(x)))?;
        let lhs = lie_derivative(&rho_a, &t.tm)?;
        let rhs = VVForm::from_matrix(&a.chart, &linalg::mat_mul(&a.anchor, &t.d[x].u))?;
        rep.push(Check::identity(format!("L_ρ({}) T^M", names[x]), lhs.verify_eq(&rhs, cfg)?));
    }
    let lhs = linalg::mat_mul(&t.tm.matrix(), &a.anchor);
    let rhs = linalg::mat_mul(&a.anchor, &t.ell);
    let diff = linalg::mat_sub(&lhs, &rhs);
    let mut entries = Vec::new();
    for i in 0..n {
        for (al, e) in diff[i].iter().enumerate() {
            entries.push((format!("∂{} ⊗ {}*", a.chart.coord(i), names[al]), e));
        }
    }
    rep.push(Check::identity("T^M∘ρ = ρ∘ℓ", all_zero(entries, cfg)));
    Ok(rep)
}
