//! Canonical printing. `parse(s.to_string()) == s` for every scalar.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::poly::{Atom, Monomial, Poly};
use crate::scalar::Scalar;

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (k, (a, e)) in m.factors().iter().enumerate() {
        if k > 0 {
            f.write_str("*")?;
        }
        match a {
            Atom::Var(v) => write!(f, "{v}")?,
            Atom::App(app) => {
                write!(f, "{}(", app.sym.name())?;
                for (j, x) in app.args.iter().enumerate() {
                    if j > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")?;
            }
        }
        if *e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        match (k, neg) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        if m.is_one() {
            write_coeff(f, &a)?;
        } else {
            if !a.is_one() {
                write_coeff(f, &a)?;
                f.write_str("*")?;
            }
            write_monomial(f, m)?;
        }
    }
    Ok(())
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            return write_poly(f, self.numer());
        }
        f.write_str("(")?;
        write_poly(f, self.numer())?;
        f.write_str(")/(")?;
        write_poly(f, self.denom())?;
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use crate::parse::parse;

    #[test]
    fn prints_canonically() {
        assert_eq!(parse("2*x*y + x^2").unwrap().to_string(), "x^2 + 2*x*y");
        assert_eq!(parse("-(1/2)*x + 3").unwrap().to_string(), "-1/2*x + 3");
        assert_eq!(parse("1/(2*x)").unwrap().to_string(), "(1/2)/(x)");
        assert_eq!(parse("exp(2*t)*t").unwrap().to_string(), "t*exp(2*t)");
    }

    #[test]
    fn round_trips() {
        for s in ["x^2 + 2*x*y", "(x - y)/(x^2 + 1)", "-3/7*a*exp(-b/2)", "0", "sin(cos(x))^3"] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s}");
        }
    }
}
