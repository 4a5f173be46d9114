//! Exact symbolic scalars: rational functions over variables and opaque
//! function applications, kept in a canonical reduced form.

pub mod numeric;
pub mod parse;
pub mod poly;
mod print;
pub mod scalar;
pub mod symbol;
pub mod verify;

pub use num_rational::BigRational;
pub use parse::{parse, parse_expr, parse_with, Expr, ParseError};
pub use scalar::{EvalError, Scalar};
pub use symbol::{EvalFn, OpaqueSymbol, SymbolDecl, SymbolError, SymbolTable, Var};
pub use verify::{
    all_zero, is_zero, Check, Expect, Mode, ModePreference, Outcome, Report, Status,
    VerificationResult, Verdict, VerifyConfig, Witness,
};
