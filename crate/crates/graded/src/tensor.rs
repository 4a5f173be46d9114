use njk_algebroid::{AlgebroidData, BundleMapU, IMTriple};
use njk_symexpr::{all_zero, Scalar, VerificationResult, VerifyConfig};
use njk_tensorcalc::linalg::{self, Matrix};

use crate::field::{graded_commutator, parity, GradedVectorField};
use crate::function::{dotted, mask_label, GradedChart, GradedFunction};
use crate::GradedError;

/// Sign of the D block in `linear_lift`: `T(∂xᵏ) ∋ +ẋ^α D(u_α)(∂ₖ)^β ∂ẋ^β`.
pub const LIFT_CONVENTION: &str = "linear lift: T(∂x^k) = T^M(∂_k)^m ∂x^m + ẋ^α D(u_α)(∂_k)^β ∂ẋ^β, T(∂ẋ^k) = ℓ(u_k)^β ∂ẋ^β";

/// Koszul signs for tensors and brackets.
pub const SIGN_CONVENTION: &str = "tensors store left contractions T(∂_y); T applied to a field X of degree |X| carries (−1)^{|X||T|}; ∂ẋ acts from the left";

/// The graded chart `A[1]` for an algebroid, identified with `T[1]M` when
/// the frame is the coordinate frame.
pub fn chart_of(a: &AlgebroidData) -> GradedChart {
    let odd: Vec<String> = a.frame_names.iter().map(|s| dotted(s.strip_prefix('∂').unwrap_or(s))).collect();
    GradedChart::new(&a.chart, &odd).unwrap_or_else(|_| {
        let fallback: Vec<String> = (1..=a.rank).map(|i| format!("ξ{i}")).collect();
        GradedChart::new(&a.chart, &fallback).expect("ξ names are fresh")
    })
}

/// Homogeneous graded (1,1) tensor; `cols[y] = T(∂_y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedTensor11 {
    pub chart: GradedChart,
    pub degree: i32,
    pub cols: Vec<GradedVectorField>,
}

impl GradedTensor11 {
    pub fn new(chart: &GradedChart, degree: i32, cols: Vec<GradedVectorField>) -> Result<GradedTensor11, GradedError> {
        if cols.len() != chart.size() {
            return Err(GradedError::Shape(format!("expected {} columns", chart.size())));
        }
        for (y, c) in cols.iter().enumerate() {
            if c.chart != *chart {
                return Err(GradedError::ChartMismatch);
            }
            if !c.is_zero() && c.degree != degree + chart.field_degree(y) {
                return Err(GradedError::Degree(format!("value on {} has the wrong degree", chart.frame_label(y))));
            }
        }
        Ok(GradedTensor11 { chart: chart.clone(), degree, cols })
    }

    pub fn zero(chart: &GradedChart, degree: i32) -> GradedTensor11 {
        let cols = (0..chart.size()).map(|y| GradedVectorField::zero(chart, degree + chart.field_degree(y))).collect();
        GradedTensor11 { chart: chart.clone(), degree, cols }
    }

    pub fn identity(chart: &GradedChart) -> GradedTensor11 {
        let cols = (0..chart.size()).map(|y| GradedVectorField::coordinate(chart, y)).collect();
        GradedTensor11 { chart: chart.clone(), degree: 0, cols }
    }

    /// `Σ X^y T(∂_y)`.
    pub fn apply_left(&self, x: &GradedVectorField) -> GradedVectorField {
        let mut out = GradedVectorField::zero(&self.chart, x.degree + self.degree);
        for (c, col) in x.comps.iter().zip(&self.cols) {
            if c.is_zero() || col.is_zero() {
                continue;
            }
            let term = col.left_mul(c);
            out.comps = out.comps.iter().zip(&term.comps).map(|(a, b)| a.add(b)).collect();
        }
        out
    }

    /// `T(X)` with the Koszul sign for passing `T` across `X`.
    pub fn apply(&self, x: &GradedVectorField) -> GradedVectorField {
        self.apply_left(x).signed(parity(x.degree * self.degree))
    }

    /// `(K∘L)(∂_y) = K(L(∂_y))`.
    pub fn compose(&self, o: &GradedTensor11) -> Result<GradedTensor11, GradedError> {
        if self.chart != o.chart {
            return Err(GradedError::ChartMismatch);
        }
        let cols = o.cols.iter().map(|c| self.apply_left(c)).collect();
        Ok(GradedTensor11 { chart: self.chart.clone(), degree: self.degree + o.degree, cols })
    }

    pub fn sub(&self, o: &GradedTensor11) -> Result<GradedTensor11, GradedError> {
        if self.chart != o.chart {
            return Err(GradedError::ChartMismatch);
        }
        let cols = self.cols.iter().zip(&o.cols).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>, _>>()?;
        let degree = if self.is_zero() { o.degree } else { self.degree };
        Ok(GradedTensor11 { chart: self.chart.clone(), degree, cols })
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(GradedVectorField::is_zero)
    }

    /// Odd-free part as a matrix, `m[z][y]` the `∂_z` component of `T(∂_y)`.
    pub fn body(&self) -> Matrix {
        let s = self.chart.size();
        (0..s).map(|z| (0..s).map(|y| self.cols[y].comps[z].body()).collect()).collect()
    }

    pub fn labeled_entries(&self) -> Vec<(String, &Scalar)> {
        let mut out = Vec::new();
        for (y, col) in self.cols.iter().enumerate() {
            let dy = format!("d{}", self.chart.coordinate_label(y));
            for (z, f) in col.comps.iter().enumerate() {
                for (m, s) in f.terms() {
                    out.push((format!("{dy} ⊗ {} {}", mask_label(&self.chart, *m), self.chart.frame_label(z)), s));
                }
            }
        }
        out
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        all_zero(self.labeled_entries(), cfg)
    }

    pub fn verify_eq(&self, o: &GradedTensor11, cfg: &VerifyConfig) -> Result<VerificationResult, GradedError> {
        Ok(self.sub(o)?.verify_zero(cfg))
    }
}

impl std::fmt::Display for GradedTensor11 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (y, col) in self.cols.iter().enumerate() {
            writeln!(f, "d{} ↦ {col}", self.chart.coordinate_label(y))?;
        }
        Ok(())
    }
}

/// `U↑ = U^α_i dxⁱ ⊗ ∂ẋ^α`, degree −1.
pub fn core_lift(chart: &GradedChart, u: &BundleMapU) -> Result<GradedTensor11, GradedError> {
    if u.chart != chart.base || u.rank != chart.r() {
        return Err(GradedError::Shape("bundle map does not match the graded chart".into()));
    }
    let n = chart.n();
    let mut t = GradedTensor11::zero(chart, -1);
    for i in 0..n {
        for a in 0..u.rank {
            t.cols[i].comps[n + a] = GradedFunction::even(u.u[a][i].clone());
        }
    }
    Ok(t)
}

/// `V = dxⁱ ⊗ ∂ẋⁱ`.
pub fn vertical_endomorphism(chart: &GradedChart) -> Result<GradedTensor11, GradedError> {
    if chart.n() != chart.r() {
        return Err(GradedError::Shape(format!("vertical endomorphism needs n = r, got {} and {}", chart.n(), chart.r())));
    }
    core_lift(chart, &BundleMapU::identity(&chart.base))
}

/// Degree-0 tensor of a linear triple `(D, ℓ, T^M)`, see [`LIFT_CONVENTION`].
pub fn linear_lift(chart: &GradedChart, t: &IMTriple) -> Result<GradedTensor11, GradedError> {
    let (n, r) = (chart.n(), chart.r());
    if t.tm.chart != chart.base || t.rank() != r {
        return Err(GradedError::Shape("triple does not match the graded chart".into()));
    }
    let tm = t.tm.matrix();
    let mut out = GradedTensor11::zero(chart, 0);
    for k in 0..n {
        let col = &mut out.cols[k];
        for m in 0..n {
            col.comps[m] = GradedFunction::even(tm[m][k].clone());
        }
        for b in 0..r {
            let mut f = GradedFunction::zero();
            for a in 0..r {
                f = f.add(&GradedFunction::monomial(1 << a, t.d[a].u[b][k].clone()));
            }
            col.comps[n + b] = f;
        }
    }
    for k in 0..r {
        for b in 0..r {
            out.cols[n + k].comps[n + b] = GradedFunction::even(t.ell[b][k].clone());
        }
    }
    Ok(out)
}

/// `(L_Q T)(X) = [Q, TX] − (−1)^{|Q||T|} T[Q, X]` on the coordinate frame.
pub fn graded_lie_derivative(q: &GradedVectorField, t: &GradedTensor11) -> Result<GradedTensor11, GradedError> {
    if q.chart != t.chart {
        return Err(GradedError::ChartMismatch);
    }
    let c = &t.chart;
    let deg = q.degree + t.degree;
    let cols = (0..c.size())
        .map(|y| {
            let x = GradedVectorField::coordinate(c, y);
            let a = graded_commutator(q, &t.apply(&x))?;
            let b = t.apply(&graded_commutator(q, &x)?);
            let koszul = a.sub(&b.signed(parity(q.degree * t.degree)))?;
            // back to the stored left contraction
            Ok(koszul.signed(parity(x.degree * deg)))
        })
        .collect::<Result<Vec<_>, GradedError>>()?;
    Ok(GradedTensor11 { chart: c.clone(), degree: deg, cols })
}

/// Graded vector-valued 2-form, values on every ordered pair of frame
/// fields.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedTwoForm {
    pub chart: GradedChart,
    pub values: Vec<Vec<GradedVectorField>>,
}

impl GradedTwoForm {
    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(GradedVectorField::is_zero)
    }

    pub fn labeled_entries(&self) -> Vec<(String, &Scalar)> {
        let c = &self.chart;
        let mut out = Vec::new();
        for (y, row) in self.values.iter().enumerate() {
            for (z, v) in row.iter().enumerate() {
                for (label, s) in v.labeled_entries() {
                    out.push((format!("({},{}) {label}", c.frame_label(y), c.frame_label(z)), s));
                }
            }
        }
        out
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        all_zero(self.labeled_entries(), cfg)
    }
}

/// Graded Frölicher–Nijenhuis bracket of two vector-valued 1-forms on
/// coordinate pairs, where `[X,Y]` vanishes. Koszul signs follow the
/// degrees of the symbols that are transposed.
pub fn graded_fn_11(k: &GradedTensor11, l: &GradedTensor11) -> Result<GradedTwoForm, GradedError> {
    if k.chart != l.chart {
        return Err(GradedError::ChartMismatch);
    }
    let c = &k.chart;
    let (dk, dl) = (k.degree, l.degree);
    let br = graded_commutator;
    let mut values = Vec::with_capacity(c.size());
    for y in 0..c.size() {
        let mut row = Vec::with_capacity(c.size());
        for z in 0..c.size() {
            let (x, w) = (GradedVectorField::coordinate(c, y), GradedVectorField::coordinate(c, z));
            let (dx, dw) = (x.degree, w.degree);
            let terms = [
                (parity(dl * dx), br(&k.apply(&x), &l.apply(&w))?),
                (-parity(dl * dw + dx * dw), br(&k.apply(&w), &l.apply(&x))?),
                (-parity(dk * dl), l.apply(&br(&k.apply(&x), &w)?)),
                (parity(dk * dl + dx * dw), l.apply(&br(&k.apply(&w), &x)?)),
                (-parity(dl * dx), k.apply(&br(&x, &l.apply(&w))?)),
                (parity(dl * dw + dx * dw), k.apply(&br(&w, &l.apply(&x))?)),
            ];
            let mut acc = GradedVectorField::zero(c, dk + dl + dx + dw);
            for (s, t) in terms {
                acc = acc.add(&t.signed(s))?;
            }
            row.push(acc);
        }
        values.push(row);
    }
    Ok(GradedTwoForm { chart: c.clone(), values })
}

/// Rank of the body of a tensor together with the pivot locus.
pub fn body_rank(t: &GradedTensor11, cfg: &VerifyConfig) -> (usize, Vec<String>) {
    let r = linalg::rref(&t.body(), cfg);
    (r.rank(), r.locus())
}
