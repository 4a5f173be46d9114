//! Canonical rational functions over atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::{gcd, App, Atom, Poly};
use crate::symbol::{slot_var, OpaqueSymbol, Var};

/// Exact symbolic scalar, always held in canonical form: a reduced
/// fraction of expanded polynomials whose denominator has leading
/// coefficient one. Structural equality is mathematical equality on the
/// rational fragment.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl std::fmt::Debug for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Pole,
    MissingEvaluator(String),
    Unbound(String),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Scalar {
        Scalar::int(1)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn rational(c: BigRational) -> Scalar {
        Scalar { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn var(v: Var) -> Scalar {
        Scalar { num: Poly::atom(Atom::Var(v)), den: Poly::one() }
    }

    pub fn named(name: &str) -> Scalar {
        Scalar::var(Var::new(name))
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar { num: p, den: Poly::one() }
    }

    /// Applies an opaque symbol. Panics on an arity mismatch.
    pub fn apply(sym: &Arc<OpaqueSymbol>, args: Vec<Scalar>) -> Scalar {
        assert_eq!(sym.arity(), args.len(), "arity mismatch for {}", sym.name());
        // exp(0) and cos(0) fold to 1; sin(0) stays opaque so that a
        // substitution never turns a denominator into zero
        if sym.evaluator().is_some() && args[0].is_zero() && matches!(sym.name(), "exp" | "cos") {
            return Scalar::one();
        }
        let app = App { sym: sym.clone(), args };
        Scalar::from_poly(Poly::atom(Atom::App(Arc::new(app))))
    }

    pub fn from_parts(num: Poly, den: Poly) -> Option<Scalar> {
        if den.is_zero() {
            return None;
        }
        Some(Scalar::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.as_constant() {
            return Scalar { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let lc = den.leading_coeff().recip();
        Scalar { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// True when no opaque application occurs anywhere.
    pub fn is_rational_fragment(&self) -> bool {
        !self.num.has_apps() && !self.den.has_apps()
    }

    /// Free variables, including those inside application arguments.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for p in [&self.num, &self.den] {
            for a in p.atoms() {
                match a {
                    Atom::Var(v) => {
                        out.insert(v);
                    }
                    Atom::App(app) => {
                        for arg in &app.args {
                            arg.collect_vars(out);
                        }
                    }
                }
            }
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.free_vars().contains(&v)
    }

    pub fn recip(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(Scalar::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        other.recip().map(|r| self * &r)
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.recip().expect("negative power of zero").pow(-e);
        }
        let e = e as u32;
        Scalar { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Partial derivative in canonical form.
    pub fn diff(&self, v: Var) -> Scalar {
        let dn = poly_diff(&self.num, v);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_diff(&self.den, v);
        if dd.is_zero() {
            return &dn / &Scalar::from_poly(self.den.clone());
        }
        let n = Scalar::from_poly(self.num.clone());
        let d = Scalar::from_poly(self.den.clone());
        &(&(&dn * &d) - &(&n * &dd)) / &(&d * &d)
    }

    /// Simultaneous substitution; unbound variables stay as they are.
    pub fn substitute(&self, map: &BTreeMap<Var, Scalar>) -> Scalar {
        if map.is_empty() {
            return self.clone();
        }
        let mut cache: BTreeMap<Atom, Scalar> = BTreeMap::new();
        let n = poly_compose(&self.num, map, &mut cache);
        if self.den.is_one() {
            return n;
        }
        let d = poly_compose(&self.den, map, &mut cache);
        &n / &d
    }

    pub fn substitute_one(&self, v: Var, by: &Scalar) -> Scalar {
        let mut map = BTreeMap::new();
        map.insert(v, by.clone());
        self.substitute(&map)
    }

    /// Exact rational evaluation; opaque symbols are evaluated to about
    /// `prec` bits.
    pub fn eval(&self, point: &BTreeMap<Var, BigRational>, prec: u32) -> Result<BigRational, EvalError> {
        let d = eval_poly(&self.den, point, prec)?;
        if d.is_zero() {
            return Err(EvalError::Pole);
        }
        let n = eval_poly(&self.num, point, prec)?;
        Ok(n / d)
    }
}

fn eval_poly(p: &Poly, point: &BTreeMap<Var, BigRational>, prec: u32) -> Result<BigRational, EvalError> {
    let mut err = None;
    let r = p.eval_with(|a| match a {
        Atom::Var(v) => match point.get(v) {
            Some(x) => Some(x.clone()),
            None => {
                err = Some(EvalError::Unbound(v.name().to_owned()));
                None
            }
        },
        Atom::App(app) => {
            let Some(f) = app.sym.evaluator() else {
                err = Some(EvalError::MissingEvaluator(app.sym.name().to_owned()));
                return None;
            };
            let mut xs = Vec::with_capacity(app.args.len());
            for arg in &app.args {
                match arg.eval(point, prec) {
                    Ok(x) => xs.push(x),
                    Err(e) => {
                        err = Some(e);
                        return None;
                    }
                }
            }
            match f(&xs, prec) {
                Some(y) => Some(y),
                None => {
                    err = Some(EvalError::Pole);
                    None
                }
            }
        }
    });
    match r {
        Some(x) => Ok(x),
        None => Err(err.unwrap_or(EvalError::Pole)),
    }
}

fn atom_diff(a: &Atom, v: Var) -> Scalar {
    match a {
        Atom::Var(w) => {
            if *w == v {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
        Atom::App(app) => {
            let mut total = Scalar::zero();
            let mut slots: Option<BTreeMap<Var, Scalar>> = None;
            for (k, arg) in app.args.iter().enumerate() {
                let da = arg.diff(v);
                if da.is_zero() {
                    continue;
                }
                let map = slots.get_or_insert_with(|| {
                    app.args.iter().enumerate().map(|(j, x)| (slot_var(j), x.clone())).collect()
                });
                let rule = app.sym.derivatives()[k].substitute(map);
                total = &total + &(&rule * &da);
            }
            total
        }
    }
}

fn poly_diff(p: &Poly, v: Var) -> Scalar {
    let mut derivs: BTreeMap<Atom, Scalar> = BTreeMap::new();
    for a in p.atoms() {
        let d = atom_diff(&a, v);
        if !d.is_zero() {
            derivs.insert(a, d);
        }
    }
    if derivs.is_empty() {
        return Scalar::zero();
    }
    let mut poly_part = Poly::zero();
    let mut rest = Scalar::zero();
    for (m, c) in p.terms() {
        for (a, e) in m.factors() {
            let Some(da) = derivs.get(a) else { continue };
            let (_, others) = m.split_off(a);
            let reduced = others.with_power(a, e - 1);
            let coeff = c * BigRational::from_integer(BigInt::from(*e));
            if da.den.is_one() {
                poly_part = poly_part.add(&da.num.mul_term(&reduced, &coeff));
            } else {
                let t = Scalar::from_poly(Poly::term(reduced, coeff));
                rest = &rest + &(&t * da);
            }
        }
    }
    &Scalar::from_poly(poly_part) + &rest
}

fn atom_image(a: &Atom, map: &BTreeMap<Var, Scalar>, cache: &mut BTreeMap<Atom, Scalar>) -> Scalar {
    if let Some(s) = cache.get(a) {
        return s.clone();
    }
    let s = match a {
        Atom::Var(v) => map.get(v).cloned().unwrap_or_else(|| Scalar::var(*v)),
        Atom::App(app) => {
            let args = app.args.iter().map(|x| x.substitute(map)).collect();
            Scalar::apply(&app.sym, args)
        }
    };
    cache.insert(a.clone(), s.clone());
    s
}

fn poly_compose(p: &Poly, map: &BTreeMap<Var, Scalar>, cache: &mut BTreeMap<Atom, Scalar>) -> Scalar {
    let atoms = p.atoms();
    let images: Vec<Scalar> = atoms.iter().map(|a| atom_image(a, map, cache)).collect();
    if images.iter().all(|s| s.den.is_one()) {
        let mut powers: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let mut t = Poly::constant(c.clone());
            for (a, e) in m.factors() {
                let k = atoms.binary_search(a).unwrap();
                let pw = powers.entry((k, *e)).or_insert_with(|| images[k].num.pow(*e));
                t = t.mul(pw);
            }
            out = out.add(&t);
        }
        return Scalar::from_poly(out);
    }
    let lookup: BTreeMap<&Atom, &Scalar> = atoms.iter().zip(images.iter()).collect();
    let mut out = Scalar::zero();
    for (m, c) in p.terms() {
        let mut t = Scalar::rational(c.clone());
        for (a, e) in m.factors() {
            t = &t * &lookup[a].pow(*e as i64);
        }
        out = &out + &t;
    }
    out
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Scalar::from_poly(self.num.add(&rhs.num));
            }
            return Scalar::normalize(self.num.add(&rhs.num), self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = rhs.den.div_exact(&g).unwrap();
        let num = self.num.mul(&b).add(&rhs.num.mul(&a));
        Scalar::normalize(num, a.mul(&rhs.den))
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(self.num.mul(&rhs.num));
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = rhs.den.div_exact(&g1).unwrap();
        let n2 = rhs.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let lc = den.leading_coeff().recip();
        Scalar { num: num.scale(&lc), den: den.scale(&lc) }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar { (&self).$f(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &Scalar) -> Scalar { (&self).$f(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar { self.$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Scalar {
        Scalar::rational(c)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> Scalar {
        parse(s).unwrap()
    }

    #[test]
    fn fractions_reduce() {
        assert_eq!(p("(x^2 - y^2)/(x - y)"), p("x + y"));
        assert_eq!(p("(2*x + 2)/(4*x + 4)"), p("1/2"));
        assert_eq!(p("1/x + 1/y"), p("(x + y)/(x*y)"));
    }

    #[test]
    fn quotient_rule() {
        assert_eq!(p("x/(1 + x^2)").diff(Var::new("x")), p("(1 - x^2)/(1 + x^2)^2"));
    }

    #[test]
    fn chain_rule_through_exp() {
        assert_eq!(p("exp(2*t)").diff(Var::new("t")), p("2*exp(2*t)"));
        assert_eq!(p("sin(t^2)").diff(Var::new("t")), p("2*t*cos(t^2)"));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut m = BTreeMap::new();
        m.insert(Var::new("x"), p("y"));
        m.insert(Var::new("y"), p("x"));
        assert_eq!(p("x - 2*y").substitute(&m), p("y - 2*x"));
        assert_eq!(p("exp(x)*y").substitute(&m), p("exp(y)*x"));
    }

    #[test]
    fn evaluation_and_poles() {
        let mut pt = BTreeMap::new();
        pt.insert(Var::new("x"), BigRational::new(1.into(), 2.into()));
        assert_eq!(p("1/(2*x - 1)").eval(&pt, 64), Err(EvalError::Pole));
        assert_eq!(p("x^2 + 1").eval(&pt, 64).unwrap(), BigRational::new(5.into(), 4.into()));
    }
}
