//! Expression grammar (see `docs/grammar.md`) and its expression tree.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::scalar::Scalar;
use crate::symbol::{OpaqueSymbol, SymbolTable, Var};

/// Parse tree, kept so callers can inspect what was written before
/// canonicalization.
#[derive(Clone, Debug)]
pub enum Expr {
    Num(BigRational),
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Byte offset of the divisor, for error reporting.
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Arc<OpaqueSymbol>, Vec<Expr>),
}

impl Expr {
    /// Canonical form. Fails with the divisor's offset only on division
    /// by something that canonicalizes to zero.
    pub fn to_scalar(&self) -> Result<Scalar, ParseError> {
        self.canon(0)
    }

    fn canon(&self, at: usize) -> Result<Scalar, ParseError> {
        Ok(match self {
            Expr::Num(c) => Scalar::rational(c.clone()),
            Expr::Var(v) => Scalar::var(*v),
            Expr::Add(a, b) => &a.canon(at)? + &b.canon(at)?,
            Expr::Sub(a, b) => &a.canon(at)? - &b.canon(at)?,
            Expr::Mul(a, b) => &a.canon(at)? * &b.canon(at)?,
            Expr::Div(a, b, off) => a
                .canon(at)?
                .checked_div(&b.canon(*off)?)
                .ok_or(ParseError::DivisionByZero { offset: *off })?,
            Expr::Neg(a) => -&a.canon(at)?,
            Expr::Pow(a, e) => {
                let base = a.canon(at)?;
                if *e < 0 && base.is_zero() {
                    return Err(ParseError::DivisionByZero { offset: at });
                }
                base.pow(*e)
            }
            Expr::Call(sym, args) => {
                let xs = args.iter().map(|a| a.canon(at)).collect::<Result<Vec<_>, _>>()?;
                Scalar::apply(sym, xs)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("`{name}` expects {expected} argument(s), got {got} (byte {offset})")]
    Arity { offset: usize, name: String, expected: usize, got: usize },
    #[error("exponent at byte {offset} is not an integer")]
    NonIntegerExponent { offset: usize },
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::NonIntegerExponent { offset }
            | ParseError::DivisionByZero { offset } => *offset,
        }
    }
}

/// Parses with the standard symbol table (`exp`, `sin`, `cos`).
pub fn parse(text: &str) -> Result<Scalar, ParseError> {
    parse_with(text, &SymbolTable::standard())
}

pub fn parse_with(text: &str, table: &SymbolTable) -> Result<Scalar, ParseError> {
    parse_expr(text, table)?.to_scalar()
}

pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text, pos: 0, table };
    p.parse_all()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    table: &'a SymbolTable,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.pos, msg: msg.into() })
    }

    fn parse_all(&mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return self.err(format!("unexpected `{}`", self.peek().unwrap()));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                self.skip_ws();
                let off = self.pos;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), off);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let paren = self.eat('(');
        let neg = self.eat('-');
        self.skip_ws();
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(ParseError::NonIntegerExponent { offset: start });
        }
        if self.peek() == Some('.') {
            return Err(ParseError::NonIntegerExponent { offset: start });
        }
        let n: i64 = self.src[digits_start..self.pos]
            .parse()
            .map_err(|_| ParseError::NonIntegerExponent { offset: start })?;
        if paren && !self.eat(')') {
            return Err(ParseError::NonIntegerExponent { offset: start });
        }
        Ok(if neg { -n } else { n })
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut int = String::new();
        let mut frac = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            int.push(c);
            self.pos += 1;
        }
        if self.peek() == Some('.') {
            self.pos += 1;
            while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
                frac.push(c);
                self.pos += 1;
            }
        }
        if int.is_empty() && frac.is_empty() {
            self.pos = start;
            return self.err("expected a number");
        }
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = BigRational::new(n, d);
        // scientific suffix such as 1e-9, still exact
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                if self.peek() == Some('+') {
                    self.pos += 1;
                }
                false
            };
            let ds = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == ds {
                self.pos = save;
            } else {
                let k: usize = self.src[ds..self.pos].parse().unwrap_or(0);
                let p = BigRational::from_integer(num_traits::pow(BigInt::from(10), k));
                value = if neg { value / p } else { value * p };
            }
        }
        if value.is_zero() {
            value = BigRational::zero();
        }
        Ok(Expr::Num(value))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if is_ident_start(c) => {
                while self.peek().is_some_and(is_ident_char) {
                    self.pos += self.peek().unwrap().len_utf8();
                }
                let name = &self.src[start..self.pos];
                if self.eat('(') {
                    let Some(sym) = self.table.resolve(name) else {
                        return Err(ParseError::UnknownFunction { offset: start, name: name.to_owned() });
                    };
                    let mut args = Vec::new();
                    if !self.eat(')') {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(',') {
                                continue;
                            }
                            if self.eat(')') {
                                break;
                            }
                            return self.err("expected `,` or `)`");
                        }
                    }
                    if args.len() != sym.arity() {
                        return Err(ParseError::Arity {
                            offset: start,
                            name: name.to_owned(),
                            expected: sym.arity(),
                            got: args.len(),
                        });
                    }
                    Ok(Expr::Call(sym, args))
                } else {
                    Ok(Expr::Var(Var::new(name)))
                }
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.5").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(parse("1.25e-2").unwrap(), Scalar::ratio(1, 80));
        assert!(parse("0.5*(u - u)").unwrap().is_zero());
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("-x^2").unwrap(), -parse("x*x").unwrap());
        assert_eq!(parse("2^-1").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(parse("1 - 2 - 3").unwrap(), Scalar::int(-4));
        assert_eq!(parse("8/2/2").unwrap(), Scalar::int(2));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse("x^y"), Err(ParseError::NonIntegerExponent { offset: 2 }));
        assert_eq!(parse("x^0.5"), Err(ParseError::NonIntegerExponent { offset: 2 }));
        assert_eq!(
            parse("1 + foo(x)"),
            Err(ParseError::UnknownFunction { offset: 4, name: "foo".into() })
        );
        assert_eq!(parse("(x + 1").unwrap_err().offset(), 6);
        assert_eq!(parse("x/(y - y)").unwrap_err(), ParseError::DivisionByZero { offset: 2 });
        assert!(matches!(parse("x + * y"), Err(ParseError::Syntax { offset: 4, .. })));
    }

    #[test]
    fn exp_is_an_application() {
        let e = parse_expr("exp(2*t)", &SymbolTable::standard()).unwrap();
        assert!(matches!(e, Expr::Call(ref s, _) if s.name() == "exp"));
        assert!(!parse("exp(2*t)").unwrap().is_rational_fragment());
    }
}
