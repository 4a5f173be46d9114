use std::fmt;

use njk_symexpr::{Scalar, Var};

use crate::chart::Chart;
use crate::combin::{merge_sign, rank, sort_sign, subsets};
use crate::TensorError;

/// Scalar k-form. `coeffs[rank(I)] = α(∂_{i1}, …, ∂_{ik})` for increasing
/// `I`, so `dx ∧ dy` has coefficient 1 on `(x, y)`.
#[derive(Clone, PartialEq)]
pub struct ScalarForm {
    pub chart: Chart,
    pub k: usize,
    pub coeffs: Vec<Scalar>,
}

impl ScalarForm {
    pub fn zero(chart: &Chart, k: usize) -> ScalarForm {
        let len = crate::combin::binomial(chart.dim(), k);
        ScalarForm { chart: chart.clone(), k, coeffs: vec![Scalar::zero(); len] }
    }

    pub fn function(chart: &Chart, f: Scalar) -> ScalarForm {
        ScalarForm { chart: chart.clone(), k: 0, coeffs: vec![f] }
    }

    /// `dxⁱ`.
    pub fn dx(chart: &Chart, i: usize) -> ScalarForm {
        let mut f = ScalarForm::zero(chart, 1);
        f.coeffs[i] = Scalar::one();
        f
    }

    pub fn from_coeffs(chart: &Chart, k: usize, coeffs: Vec<Scalar>) -> Result<ScalarForm, TensorError> {
        let want = crate::combin::binomial(chart.dim(), k);
        if coeffs.len() != want {
            return Err(TensorError::Shape(format!("{k}-form on {} needs {want} coefficients", chart.name())));
        }
        Ok(ScalarForm { chart: chart.clone(), k, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Value on coordinate fields in any order; repeated slots give 0.
    pub fn value(&self, idx: &[usize]) -> Scalar {
        match sort_sign(idx) {
            None => Scalar::zero(),
            Some((s, sign)) => {
                let c = &self.coeffs[rank(self.dim(), &s)];
                if sign < 0 {
                    -c
                } else {
                    c.clone()
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &ScalarForm) -> ScalarForm {
        debug_assert_eq!(self.k, o.k);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        ScalarForm { chart: self.chart.clone(), k: self.k, coeffs }
    }

    pub fn sub(&self, o: &ScalarForm) -> ScalarForm {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, f: &Scalar) -> ScalarForm {
        ScalarForm { chart: self.chart.clone(), k: self.k, coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    pub fn wedge(&self, o: &ScalarForm) -> ScalarForm {
        let n = self.dim();
        let k = self.k + o.k;
        let mut out = ScalarForm::zero(&self.chart, k);
        if k > n {
            return out;
        }
        let left = subsets(n, self.k);
        let right = subsets(n, o.k);
        for (a, ca) in left.iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in right.iter().zip(&o.coeffs) {
                if cb.is_zero() {
                    continue;
                }
                if let Some((m, sign)) = merge_sign(a, b) {
                    let t = ca * cb;
                    let slot = &mut out.coeffs[rank(n, &m)];
                    *slot = if sign < 0 { &*slot - &t } else { &*slot + &t };
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> ScalarForm {
        let n = self.dim();
        let mut out = ScalarForm::zero(&self.chart, self.k + 1);
        if self.k + 1 > n {
            return out;
        }
        for (j, set) in subsets(n, self.k + 1).iter().enumerate() {
            let mut acc = Scalar::zero();
            for p in 0..set.len() {
                let rest: Vec<usize> = set.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, v)| *v).collect();
                let t = self.coeffs[rank(n, &rest)].diff(self.chart.coord(set[p]));
                acc = if p % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            out.coeffs[j] = acc;
        }
        out
    }

    /// Contraction `ι_X α` with `X` given by its components.
    pub fn interior(&self, x: &[Scalar]) -> ScalarForm {
        let n = self.dim();
        if self.k == 0 {
            return ScalarForm::zero(&self.chart, 0);
        }
        let mut out = ScalarForm::zero(&self.chart, self.k - 1);
        for (i, set) in subsets(n, self.k - 1).iter().enumerate() {
            let mut acc = Scalar::zero();
            for (j, xj) in x.iter().enumerate() {
                if xj.is_zero() {
                    continue;
                }
                let mut idx = vec![j];
                idx.extend_from_slice(set);
                acc = &acc + &(xj * &self.value(&idx));
            }
            out.coeffs[i] = acc;
        }
        out
    }

    /// Lie derivative along a vector field, by Cartan's formula.
    pub fn lie(&self, x: &[Scalar]) -> ScalarForm {
        let a = self.d().interior(x);
        if self.k == 0 {
            return a;
        }
        a.add(&self.interior(x).d())
    }

    /// Lie derivative along a coordinate field: differentiate coefficients.
    pub fn lie_coord(&self, v: Var) -> ScalarForm {
        ScalarForm { chart: self.chart.clone(), k: self.k, coeffs: self.coeffs.iter().map(|c| c.diff(v)).collect() }
    }
}

impl fmt::Debug for ScalarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ScalarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (set, c) in subsets(self.dim(), self.k).iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if !set.is_empty() {
                write!(f, " {}", basis_label(&self.chart, set))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `dx∧dy` style label for an increasing index tuple.
pub fn basis_label(chart: &Chart, set: &[usize]) -> String {
    set.iter().map(|&i| format!("d{}", chart.coord(i))).collect::<Vec<_>>().join("∧")
}

#[cfg(test)]
mod tests {
    use super::*;
    use njk_symexpr::parse;

    fn chart() -> Chart {
        Chart::new("R3", &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn d_of_x_dy() {
        let c = chart();
        let a = ScalarForm::dx(&c, 1).scale(&parse("x").unwrap());
        let da = a.d();
        assert_eq!(da, ScalarForm::dx(&c, 0).wedge(&ScalarForm::dx(&c, 1)));
        assert!(ScalarForm::dx(&c, 0).d().is_zero());
    }

    #[test]
    fn contraction() {
        let c = chart();
        let w = ScalarForm::dx(&c, 0).wedge(&ScalarForm::dx(&c, 1));
        let ex = [Scalar::one(), Scalar::zero(), Scalar::zero()];
        assert_eq!(w.interior(&ex), ScalarForm::dx(&c, 1));
        let ey = [Scalar::zero(), Scalar::one(), Scalar::zero()];
        assert_eq!(w.interior(&ey), ScalarForm::dx(&c, 0).scale(&Scalar::int(-1)));
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let c = chart();
        let a = ScalarForm::dx(&c, 2).scale(&parse("x*y").unwrap());
        let b = ScalarForm::dx(&c, 0).add(&ScalarForm::dx(&c, 1));
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(&Scalar::int(-1)));
    }
}
