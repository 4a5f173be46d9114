//! Zero testing with an honest record of how each verdict was reached,
//! plus the named-check reports every verification module returns.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::numeric::to_decimal;
use crate::scalar::{EvalError, Scalar};
use crate::symbol::Var;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModePreference {
    Exact,
    Sample,
    Auto,
}

impl std::str::FromStr for ModePreference {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(ModePreference::Exact),
            "sample" => Ok(ModePreference::Sample),
            "auto" => Ok(ModePreference::Auto),
            other => Err(format!("unknown mode `{other}` (expected exact, sample or auto)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub mode: ModePreference,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Bits used when evaluating opaque symbols.
    pub precision: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { mode: ModePreference::Auto, samples: 25, tol: 1e-9, seed: 0, precision: 128 }
    }
}

/// Bounds for sample coordinates: numerator in `[-NUM_BOUND, NUM_BOUND]`,
/// denominator in `[1, DEN_BOUND]`.
pub const NUM_BOUND: i64 = 9;
pub const DEN_BOUND: i64 = 8;
pub const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sample,
}

/// Concrete point where an expression was observed to be nonzero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Which entry of a multi-entry identity failed.
    pub entry: Option<String>,
    pub point: Vec<(String, String)>,
    pub value: String,
    #[serde(skip)]
    pub exact_point: Vec<(Var, BigRational)>,
    #[serde(skip)]
    pub exact_value: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    ProvedZero,
    ProvedNonzero { witness: Option<Witness> },
    SampledZero { n_points: usize, tolerance: f64 },
    SampledNonzero { witness: Witness },
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationResult {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub mode: Mode,
}

impl VerificationResult {
    pub fn proved_zero() -> Self {
        VerificationResult { verdict: Verdict::ProvedZero, mode: Mode::Exact }
    }

    pub fn unknown(reason: impl Into<String>, mode: Mode) -> Self {
        VerificationResult { verdict: Verdict::Unknown { reason: reason.into() }, mode }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.verdict, Verdict::ProvedZero | Verdict::SampledZero { .. })
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self.verdict, Verdict::ProvedNonzero { .. } | Verdict::SampledNonzero { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.verdict, Verdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::ProvedNonzero { witness } => witness.as_ref(),
            Verdict::SampledNonzero { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.verdict {
            Verdict::ProvedZero => "ProvedZero",
            Verdict::ProvedNonzero { .. } => "ProvedNonzero",
            Verdict::SampledZero { .. } => "SampledZero",
            Verdict::SampledNonzero { .. } => "SampledNonzero",
            Verdict::Unknown { .. } => "Unknown",
        }
    }

    fn with_entry(mut self, entry: &str) -> Self {
        match &mut self.verdict {
            Verdict::ProvedNonzero { witness: Some(w) } | Verdict::SampledNonzero { witness: w } => {
                w.entry = Some(entry.to_owned());
            }
            Verdict::Unknown { reason } => *reason = format!("{entry}: {reason}"),
            _ => {}
        }
        self
    }
}

impl std::fmt::Display for VerificationResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mode = match self.mode {
            Mode::Exact => "exact",
            Mode::Sample => "sample",
        };
        match &self.verdict {
            Verdict::SampledZero { n_points, tolerance } => {
                write!(f, "SampledZero(n={n_points}, tol={tolerance:e}) [{mode}]")
            }
            Verdict::Unknown { reason } => write!(f, "Unknown({reason}) [{mode}]"),
            v => {
                write!(f, "{}", self.label())?;
                if let Some(w) = self.witness() {
                    write!(f, " at ")?;
                    if let Some(e) = &w.entry {
                        write!(f, "{e} ")?;
                    }
                    let pts: Vec<String> = w.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    write!(f, "{{{}}} value {}", pts.join(", "), w.value)?;
                }
                let _ = v;
                write!(f, " [{mode}]")
            }
        }
    }
}

fn draw(rng: &mut ChaCha8Rng) -> BigRational {
    let n = rng.gen_range(-NUM_BOUND..=NUM_BOUND);
    let d = rng.gen_range(1..=DEN_BOUND);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn make_witness(point: &BTreeMap<Var, BigRational>, value: BigRational) -> Witness {
    Witness {
        entry: None,
        point: point
            .iter()
            .map(|(k, v)| (k.name().to_owned(), v.to_string()))
            .collect(),
        value: if value.denom().to_string().len() <= 6 && value.numer().to_string().len() <= 12 {
            value.to_string()
        } else {
            to_decimal(&value, 17)
        },
        exact_point: point.iter().map(|(k, v)| (*k, v.clone())).collect(),
        exact_value: value,
    }
}

/// Deterministic sequence of pole-free sample points for `e`.
pub struct Sampler {
    rng: ChaCha8Rng,
    vars: Vec<Var>,
    redraws: usize,
}

impl Sampler {
    pub fn new(e: &Scalar, seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), vars: e.free_vars().into_iter().collect(), redraws: 0 }
    }

    fn next_point(&mut self) -> BTreeMap<Var, BigRational> {
        self.vars.iter().map(|v| (*v, draw(&mut self.rng))).collect()
    }
}

/// Finds a point where a canonically nonzero rational expression is
/// nonzero, so exact disproofs still come with a witness.
fn exact_witness(e: &Scalar, seed: u64) -> Option<Witness> {
    let mut s = Sampler::new(e, seed);
    for _ in 0..200 {
        let pt = s.next_point();
        if let Ok(v) = e.eval(&pt, 64) {
            if !v.is_zero() {
                return Some(make_witness(&pt, v));
            }
        }
    }
    None
}

fn sample(e: &Scalar, cfg: &VerifyConfig) -> VerificationResult {
    let tol = BigRational::from_float(cfg.tol).unwrap_or_else(BigRational::zero);
    let mut s = Sampler::new(e, cfg.seed);
    let mut accepted = 0;
    while accepted < cfg.samples {
        let pt = s.next_point();
        match e.eval(&pt, cfg.precision) {
            Ok(v) => {
                if v.abs() > tol {
                    return VerificationResult {
                        verdict: Verdict::SampledNonzero { witness: make_witness(&pt, v) },
                        mode: Mode::Sample,
                    };
                }
                accepted += 1;
            }
            Err(EvalError::Pole) => {
                s.redraws += 1;
                if s.redraws > MAX_REDRAWS {
                    return VerificationResult::unknown(
                        format!("no pole-free sample point after {MAX_REDRAWS} redraws"),
                        Mode::Sample,
                    );
                }
            }
            Err(EvalError::MissingEvaluator(name)) => {
                return VerificationResult::unknown(format!("no numeric evaluator for `{name}`"), Mode::Sample);
            }
            Err(EvalError::Unbound(name)) => {
                return VerificationResult::unknown(format!("unbound variable `{name}`"), Mode::Sample);
            }
        }
    }
    VerificationResult { verdict: Verdict::SampledZero { n_points: cfg.samples, tolerance: cfg.tol }, mode: Mode::Sample }
}

/// Decides whether `e` vanishes identically. Exact proofs are only ever
/// issued for the rational fragment.
pub fn is_zero(e: &Scalar, cfg: &VerifyConfig) -> VerificationResult {
    let rational = e.is_rational_fragment();
    match cfg.mode {
        ModePreference::Sample => sample(e, cfg),
        ModePreference::Exact if !rational => VerificationResult::unknown(
            "expression contains opaque symbols and exact mode was requested",
            Mode::Exact,
        ),
        _ if rational => {
            if e.is_zero() {
                VerificationResult::proved_zero()
            } else {
                VerificationResult {
                    verdict: Verdict::ProvedNonzero { witness: exact_witness(e, cfg.seed) },
                    mode: Mode::Exact,
                }
            }
        }
        _ => sample(e, cfg),
    }
}

/// Joint verdict for a family of named expressions that must all vanish.
/// The first nonzero entry decides a failure; any sampled entry makes the
/// joint verdict a sampled one.
pub fn all_zero<'a, I>(entries: I, cfg: &VerifyConfig) -> VerificationResult
where
    I: IntoIterator<Item = (String, &'a Scalar)>,
{
    let mut sampled = false;
    let mut unknown: Option<VerificationResult> = None;
    for (label, e) in entries {
        // structural zero needs no sampling even when opaque atoms occur
        // elsewhere in the family
        if e.is_zero() && cfg.mode != ModePreference::Sample {
            continue;
        }
        let r = is_zero(e, cfg);
        if r.is_nonzero() {
            return r.with_entry(&label);
        }
        if r.is_unknown() {
            if unknown.is_none() {
                unknown = Some(r.with_entry(&label));
            }
            continue;
        }
        if r.mode == Mode::Sample {
            sampled = true;
        }
    }
    if let Some(u) = unknown {
        return u;
    }
    if sampled {
        VerificationResult {
            verdict: Verdict::SampledZero { n_points: cfg.samples, tolerance: cfg.tol },
            mode: Mode::Sample,
        }
    } else {
        VerificationResult::proved_zero()
    }
}

/// Re-evaluates a witness exactly; used to confirm sampled disproofs are
/// reproducible.
pub fn reevaluate(e: &Scalar, w: &Witness, prec: u32) -> Option<BigRational> {
    let pt: BTreeMap<Var, BigRational> = w.exact_point.iter().cloned().collect();
    e.eval(&pt, prec).ok()
}

/// Approximate magnitude of a witness value, for display.
pub fn witness_f64(w: &Witness) -> f64 {
    w.exact_value.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    /// The identity must hold.
    Zero,
    /// The expression must be shown nonzero (negative controls, or
    /// nondegeneracy conditions such as an invertible determinant).
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Identity(VerificationResult),
    Rank { expected: usize, computed: usize, pivot_denominators: Vec<String> },
    Skipped { reason: String },
    Error { message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expect: Expect,
    pub outcome: Outcome,
}

impl Check {
    pub fn identity(name: impl Into<String>, r: VerificationResult) -> Check {
        Check { name: name.into(), expect: Expect::Zero, outcome: Outcome::Identity(r) }
    }

    pub fn nonzero(name: impl Into<String>, r: VerificationResult) -> Check {
        Check { name: name.into(), expect: Expect::Nonzero, outcome: Outcome::Identity(r) }
    }

    pub fn rank(name: impl Into<String>, expected: usize, computed: usize, pivots: Vec<String>) -> Check {
        Check {
            name: name.into(),
            expect: Expect::Zero,
            outcome: Outcome::Rank { expected, computed, pivot_denominators: pivots },
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Check {
        Check { name: name.into(), expect: Expect::Zero, outcome: Outcome::Skipped { reason: reason.into() } }
    }

    pub fn error(name: impl Into<String>, message: impl Into<String>) -> Check {
        Check { name: name.into(), expect: Expect::Zero, outcome: Outcome::Error { message: message.into() } }
    }

    /// Flips the expectation, turning a check into a negative control.
    pub fn expecting(mut self, e: Expect) -> Check {
        self.expect = e;
        self
    }

    pub fn status(&self) -> Status {
        match &self.outcome {
            Outcome::Identity(r) => {
                let ok = match self.expect {
                    Expect::Zero => r.is_zero(),
                    Expect::Nonzero => r.is_nonzero(),
                };
                if ok {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
            Outcome::Rank { expected, computed, .. } => {
                let eq = expected == computed;
                if eq == (self.expect == Expect::Zero) {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
            Outcome::Skipped { .. } => Status::Skip,
            Outcome::Error { .. } => Status::Fail,
        }
    }

    pub fn result(&self) -> Option<&VerificationResult> {
        match &self.outcome {
            Outcome::Identity(r) => Some(r),
            _ => None,
        }
    }
}

/// Ordered list of named checks with free-form notes (conventions used,
/// extracted objects).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub title: String,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status() != Status::Fail)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status() == Status::Fail).collect()
    }

    /// Appends another report's checks under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for n in other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.checks.push(c);
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Identity(r) => write!(f, "{r}"),
            Outcome::Rank { expected, computed, pivot_denominators } => {
                write!(f, "rank {computed} (expected {expected})")?;
                if !pivot_denominators.is_empty() {
                    write!(f, ", generic away from {}", pivot_denominators.join(", "))?;
                }
                Ok(())
            }
            Outcome::Skipped { reason } => write!(f, "skipped: {reason}"),
            Outcome::Error { message } => write!(f, "error: {message}"),
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.title)?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for c in &self.checks {
            let st = c.status();
            let exp = match c.expect {
                Expect::Zero => "",
                Expect::Nonzero => " (expect nonzero)",
            };
            let detail = &c.outcome;
            writeln!(f, "  [{st}] {}{exp}: {detail}", c.name)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn cfg() -> VerifyConfig {
        VerifyConfig::default()
    }

    #[test]
    fn exact_verdicts() {
        let z = is_zero(&parse("(x+y)^2 - x^2 - 2*x*y - y^2").unwrap(), &cfg());
        assert_eq!(z.verdict, Verdict::ProvedZero);
        let nz = is_zero(&parse("x - y").unwrap(), &cfg());
        assert!(matches!(nz.verdict, Verdict::ProvedNonzero { witness: Some(_) }));
        assert_eq!(nz.mode, Mode::Exact);
    }

    #[test]
    fn sampled_verdicts() {
        let c = VerifyConfig { samples: 20, ..cfg() };
        let r = is_zero(&parse("exp(a)*exp(-a) - 1").unwrap(), &c);
        assert_eq!(r.verdict, Verdict::SampledZero { n_points: 20, tolerance: 1e-9 });
        let r = is_zero(&parse("exp(a) - 1 - a").unwrap(), &c);
        assert!(matches!(r.verdict, Verdict::SampledNonzero { .. }));
    }

    #[test]
    fn exact_mode_refuses_opaque() {
        let c = VerifyConfig { mode: ModePreference::Exact, ..cfg() };
        assert!(is_zero(&parse("exp(a)").unwrap(), &c).is_unknown());
    }

    #[test]
    fn sampling_is_deterministic() {
        let e = parse("exp(a) - 1 - a").unwrap();
        let c = VerifyConfig { seed: 7, ..cfg() };
        assert_eq!(is_zero(&e, &c), is_zero(&e, &c));
    }

    #[test]
    fn missing_evaluator_is_unknown() {
        use crate::symbol::{SymbolDecl, SymbolTable};
        let t = SymbolTable::standard()
            .with(vec![SymbolDecl { name: "phi".into(), arity: 2, derivatives: vec!["1".into(), "0".into()], eval: None }])
            .unwrap();
        let e = crate::parse::parse_with("phi(a, b) - a", &t).unwrap();
        let r = is_zero(&e, &cfg());
        assert!(r.is_unknown());
    }
}
