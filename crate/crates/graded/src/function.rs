use std::collections::BTreeMap;
use std::fmt;

use njk_symexpr::{Scalar, Var};
use njk_tensorcalc::Chart;

use crate::GradedError;

/// Dotted name: a combining dot on the first character, so `x1` → `ẋ1`.
pub fn dotted(name: &str) -> String {
    let mut cs = name.chars();
    match cs.next() {
        Some(c) => format!("{c}\u{307}{}", cs.as_str()),
        None => String::new(),
    }
}

/// Degree-1 graded chart: even coordinates from `base`, `r` odd ones.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedChart {
    pub base: Chart,
    pub odd: Vec<String>,
}

impl GradedChart {
    pub fn new<S: AsRef<str>>(base: &Chart, odd: &[S]) -> Result<GradedChart, GradedError> {
        let odd: Vec<String> = odd.iter().map(|s| s.as_ref().to_string()).collect();
        if odd.len() > 63 {
            return Err(GradedError::Shape("at most 63 odd coordinates".into()));
        }
        let mut seen: Vec<String> = base.coords().iter().map(|v| v.to_string()).collect();
        for o in &odd {
            if seen.contains(o) {
                return Err(GradedError::DuplicateCoordinate(o.clone()));
            }
            seen.push(o.clone());
        }
        Ok(GradedChart { base: base.clone(), odd })
    }

    /// `T[1]M`: one odd coordinate `ẋⁱ` per base coordinate.
    pub fn tangent(base: &Chart) -> GradedChart {
        let odd: Vec<String> = base.coords().iter().map(|v| dotted(&v.to_string())).collect();
        GradedChart::new(base, &odd).expect("dotted names never clash with plain ones")
    }

    pub fn n(&self) -> usize {
        self.base.dim()
    }

    pub fn r(&self) -> usize {
        self.odd.len()
    }

    /// Number of frame fields `∂x¹..∂xⁿ, ∂ẋ¹..∂ẋʳ`.
    pub fn size(&self) -> usize {
        self.n() + self.r()
    }

    /// Degree of the coordinate field with frame index `y`.
    pub fn field_degree(&self, y: usize) -> i32 {
        if y < self.n() {
            0
        } else {
            -1
        }
    }

    pub fn frame_label(&self, y: usize) -> String {
        if y < self.n() {
            format!("∂{}", self.base.coord(y))
        } else {
            format!("∂{}", self.odd[y - self.n()])
        }
    }

    pub fn coordinate_label(&self, y: usize) -> String {
        if y < self.n() {
            self.base.coord(y).to_string()
        } else {
            self.odd[y - self.n()].clone()
        }
    }
}

/// Polynomial in the odd coordinates with coefficients in the even ones.
/// Bit `α` of a key stands for `ẋ^α`; a monomial is the product in
/// increasing index order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedFunction {
    terms: BTreeMap<u64, Scalar>,
}

/// Sign of `ẋ^A ẋ^B` relative to `ẋ^{A∪B}`; `None` if they share a factor.
pub fn merge_sign(a: u64, b: u64) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

fn signed(s: &Scalar, sign: i64) -> Scalar {
    if sign < 0 {
        -s
    } else {
        s.clone()
    }
}

impl GradedFunction {
    pub fn zero() -> GradedFunction {
        GradedFunction::default()
    }

    pub fn even(s: Scalar) -> GradedFunction {
        GradedFunction::monomial(0, s)
    }

    pub fn one() -> GradedFunction {
        GradedFunction::even(Scalar::one())
    }

    pub fn odd(alpha: usize) -> GradedFunction {
        GradedFunction::monomial(1 << alpha, Scalar::one())
    }

    pub fn monomial(mask: u64, s: Scalar) -> GradedFunction {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(mask, s);
        }
        GradedFunction { terms }
    }

    pub fn terms(&self) -> &BTreeMap<u64, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, mask: u64) -> Scalar {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree if every term has the same number of odd factors.
    pub fn degree(&self) -> Option<u32> {
        let mut ds = self.terms.keys().map(|m| m.count_ones());
        let d = ds.next()?;
        ds.all(|e| e == d).then_some(d)
    }

    fn add_term(&mut self, mask: u64, s: Scalar) {
        if s.is_zero() {
            return;
        }
        let e = self.terms.entry(mask).or_default();
        *e = &*e + &s;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn add(&self, o: &GradedFunction) -> GradedFunction {
        let mut out = self.clone();
        for (m, s) in &o.terms {
            out.add_term(*m, s.clone());
        }
        out
    }

    pub fn sub(&self, o: &GradedFunction) -> GradedFunction {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> GradedFunction {
        GradedFunction { terms: self.terms.iter().map(|(m, s)| (*m, -s)).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> GradedFunction {
        let mut out = GradedFunction::zero();
        for (m, s) in &self.terms {
            out.add_term(*m, s * c);
        }
        out
    }

    pub fn signed(&self, sign: i64) -> GradedFunction {
        if sign < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, o: &GradedFunction) -> GradedFunction {
        let mut out = GradedFunction::zero();
        for (a, s) in &self.terms {
            for (b, t) in &o.terms {
                if let Some(sign) = merge_sign(*a, *b) {
                    out.add_term(a | b, signed(&(s * t), sign));
                }
            }
        }
        out
    }

    pub fn diff_even(&self, v: Var) -> GradedFunction {
        let mut out = GradedFunction::zero();
        for (m, s) in &self.terms {
            out.add_term(*m, s.diff(v));
        }
        out
    }

    /// Left derivative `∂/∂ẋ^α`.
    pub fn diff_odd(&self, alpha: usize) -> GradedFunction {
        let bit = 1u64 << alpha;
        let mut out = GradedFunction::zero();
        for (m, s) in &self.terms {
            if m & bit != 0 {
                let before = (m & (bit - 1)).count_ones();
                out.add_term(m & !bit, signed(s, if before % 2 == 0 { 1 } else { -1 }));
            }
        }
        out
    }

    /// Body: the term free of odd coordinates.
    pub fn body(&self) -> Scalar {
        self.coeff(0)
    }

    /// `(label, coefficient)` pairs, labels like `ẋ1ẋ2`.
    pub fn labeled_terms(&self, chart: &GradedChart) -> Vec<(String, &Scalar)> {
        self.terms.iter().map(|(m, s)| (mask_label(chart, *m), s)).collect()
    }

    pub fn display<'a>(&'a self, chart: &'a GradedChart) -> impl fmt::Display + 'a {
        DisplayGF { f: self, chart }
    }
}

pub fn mask_label(chart: &GradedChart, mask: u64) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..chart.r()).filter(|a| mask >> a & 1 == 1).map(|a| chart.odd[a].as_str()).collect()
}

struct DisplayGF<'a> {
    f: &'a GradedFunction,
    chart: &'a GradedChart,
}

impl fmt::Display for DisplayGF<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, s)) in self.f.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *m == 0 {
                write!(f, "{s}")?;
            } else {
                write!(f, "({s})*{}", mask_label(self.chart, *m))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_coordinates_anticommute() {
        let (a, b) = (GradedFunction::odd(0), GradedFunction::odd(1));
        assert_eq!(a.mul(&b), b.mul(&a).neg());
        assert!(a.mul(&a).is_zero());
        assert_eq!(a.mul(&b).degree(), Some(2));
    }

    #[test]
    fn odd_derivative_is_a_left_derivation() {
        // ∂/∂ẋ² (ẋ¹ẋ²) = −ẋ¹
        let f = GradedFunction::odd(0).mul(&GradedFunction::odd(1));
        assert_eq!(f.diff_odd(1), GradedFunction::odd(0).neg());
        assert_eq!(f.diff_odd(0), GradedFunction::odd(1));
        // graded Leibniz on odd · odd
        let (p, q) = (GradedFunction::odd(0).add(&GradedFunction::odd(2)), GradedFunction::odd(1));
        for al in 0..3 {
            let lhs = p.mul(&q).diff_odd(al);
            let rhs = p.diff_odd(al).mul(&q).sub(&p.mul(&q.diff_odd(al)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dotted_names() {
        assert_eq!(dotted("x1"), "x\u{307}1");
        let c = GradedChart::tangent(&Chart::new("R", &["x", "y"]).unwrap());
        assert_eq!(c.frame_label(3), "∂y\u{307}");
    }
}
