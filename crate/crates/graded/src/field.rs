use njk_algebroid::AlgebroidData;
use njk_symexpr::{all_zero, Scalar, VerificationResult, VerifyConfig};
use njk_tensorcalc::combin::subsets;
use njk_tensorcalc::Chart;

use crate::function::{mask_label, GradedChart, GradedFunction};
use crate::GradedError;

pub(crate) fn parity(d: i32) -> i64 {
    if d.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Homogeneous vector field `Σ comps[y] ∂_y` over the frame
/// `∂x¹..∂xⁿ, ∂ẋ¹..∂ẋʳ`, coefficients on the left. `comps[y]` is also the
/// value of the field on the coordinate `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedVectorField {
    pub chart: GradedChart,
    pub degree: i32,
    pub comps: Vec<GradedFunction>,
}

impl GradedVectorField {
    pub fn new(chart: &GradedChart, degree: i32, comps: Vec<GradedFunction>) -> Result<GradedVectorField, GradedError> {
        if comps.len() != chart.size() {
            return Err(GradedError::Shape(format!("expected {} components, got {}", chart.size(), comps.len())));
        }
        for (y, f) in comps.iter().enumerate() {
            let want = degree - chart.field_degree(y);
            let ok = f.terms().keys().all(|m| m.count_ones() as i32 == want);
            if !ok {
                return Err(GradedError::Degree(format!(
                    "component along {} must have odd degree {want}",
                    chart.frame_label(y)
                )));
            }
        }
        Ok(GradedVectorField { chart: chart.clone(), degree, comps })
    }

    pub fn zero(chart: &GradedChart, degree: i32) -> GradedVectorField {
        GradedVectorField { chart: chart.clone(), degree, comps: vec![GradedFunction::zero(); chart.size()] }
    }

    /// The coordinate field `∂_y`.
    pub fn coordinate(chart: &GradedChart, y: usize) -> GradedVectorField {
        let mut v = GradedVectorField::zero(chart, chart.field_degree(y));
        v.comps[y] = GradedFunction::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(GradedFunction::is_zero)
    }

    pub fn apply(&self, f: &GradedFunction) -> GradedFunction {
        let n = self.chart.n();
        let mut out = GradedFunction::zero();
        for (y, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let df = if y < n { f.diff_even(self.chart.base.coord(y)) } else { f.diff_odd(y - n) };
            out = out.add(&c.mul(&df));
        }
        out
    }

    fn same(&self, o: &GradedVectorField) -> Result<(), GradedError> {
        if self.chart != o.chart {
            return Err(GradedError::ChartMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &GradedVectorField) -> Result<GradedVectorField, GradedError> {
        self.same(o)?;
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(GradedError::Degree("sum of fields of different degrees".into()));
        }
        let degree = if self.is_zero() { o.degree } else { self.degree };
        let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect();
        Ok(GradedVectorField { chart: self.chart.clone(), degree, comps })
    }

    pub fn sub(&self, o: &GradedVectorField) -> Result<GradedVectorField, GradedError> {
        self.add(&o.signed(-1))
    }

    pub fn signed(&self, sign: i64) -> GradedVectorField {
        GradedVectorField {
            chart: self.chart.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.signed(sign)).collect(),
        }
    }

    /// Left multiplication `f·X`; `f` must be homogeneous.
    pub fn left_mul(&self, f: &GradedFunction) -> GradedVectorField {
        let d = f.degree().unwrap_or(0) as i32;
        GradedVectorField {
            chart: self.chart.clone(),
            degree: self.degree + d,
            comps: self.comps.iter().map(|c| f.mul(c)).collect(),
        }
    }

    /// `(label, coefficient)` for every nonzero scalar, e.g. `ẋ1ẋ2 ∂ẋ1`.
    pub fn labeled_entries(&self) -> Vec<(String, &Scalar)> {
        let mut out = Vec::new();
        for (y, c) in self.comps.iter().enumerate() {
            for (m, s) in c.terms() {
                out.push((format!("{} {}", mask_label(&self.chart, *m), self.chart.frame_label(y)), s));
            }
        }
        out
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        all_zero(self.labeled_entries(), cfg)
    }
}

impl std::fmt::Display for GradedVectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (y, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{}] {}", c.display(&self.chart), self.chart.frame_label(y))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `[Q₁,Q₂] = Q₁Q₂ − (−1)^{d₁d₂} Q₂Q₁`, evaluated on coordinates.
pub fn graded_commutator(a: &GradedVectorField, b: &GradedVectorField) -> Result<GradedVectorField, GradedError> {
    a.same(b)?;
    let sign = parity(a.degree * b.degree);
    let comps = (0..a.chart.size())
        .map(|z| a.apply(&b.comps[z]).sub(&b.apply(&a.comps[z]).signed(sign)))
        .collect();
    Ok(GradedVectorField { chart: a.chart.clone(), degree: a.degree + b.degree, comps })
}

/// `d_A = ρⁱ_j ẋʲ ∂xⁱ − ½ c^k_{ij} ẋⁱẋʲ ∂ẋᵏ` on the chart with one odd
/// coordinate per frame section of A.
pub fn homological_field(a: &AlgebroidData) -> GradedVectorField {
    homological_field_on(&crate::tensor::chart_of(a), a)
}

pub(crate) fn homological_field_on(chart: &GradedChart, a: &AlgebroidData) -> GradedVectorField {
    let (n, r) = (a.dim(), a.rank);
    let mut comps = vec![GradedFunction::zero(); n + r];
    for i in 0..n {
        for j in 0..r {
            comps[i] = comps[i].add(&GradedFunction::monomial(1 << j, a.anchor[i][j].clone()));
        }
    }
    for p in subsets(r, 2) {
        let (i, j) = (p[0], p[1]);
        let c = a.c(i, j);
        for k in 0..r {
            comps[n + k] = comps[n + k].add(&GradedFunction::monomial((1 << i) | (1 << j), -&c[k]));
        }
    }
    GradedVectorField { chart: chart.clone(), degree: 1, comps }
}

/// `d_dR = ẋⁱ ∂xⁱ` on `T[1]M`.
pub fn de_rham(base: &Chart) -> GradedVectorField {
    homological_field_on(&GradedChart::tangent(base), &AlgebroidData::tangent(base))
}

/// Euler field `ẋ^α ∂ẋ^α`.
pub fn euler_field(chart: &GradedChart) -> GradedVectorField {
    let n = chart.n();
    let mut v = GradedVectorField::zero(chart, 0);
    for a in 0..chart.r() {
        v.comps[n + a] = GradedFunction::odd(a);
    }
    v
}

/// `[Q,Q] = 0`, entry by entry.
pub fn check_homological(q: &GradedVectorField, cfg: &VerifyConfig) -> Result<VerificationResult, GradedError> {
    if q.degree != 1 {
        return Err(GradedError::Degree("homological fields have degree 1".into()));
    }
    Ok(graded_commutator(q, q)?.verify_zero(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn de_rham_squares_to_zero() {
        let c = Chart::new("R", &["x", "y", "z"]).unwrap();
        let d = de_rham(&c);
        assert!(graded_commutator(&d, &d).unwrap().is_zero());
        // d(x ẏ) = ẋẏ
        let f = GradedFunction::monomial(0b010, Scalar::named("x"));
        assert_eq!(d.apply(&f), GradedFunction::monomial(0b011, Scalar::one()));
    }

    #[test]
    fn degree_validation() {
        let c = GradedChart::tangent(&Chart::new("R", &["x"]).unwrap());
        assert!(GradedVectorField::new(&c, 1, vec![GradedFunction::one(), GradedFunction::zero()]).is_err());
        assert!(GradedVectorField::new(&c, 1, vec![GradedFunction::odd(0), GradedFunction::zero()]).is_ok());
    }
}
