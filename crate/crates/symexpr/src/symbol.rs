use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::{Arc, LazyLock, OnceLock, RwLock};

use num_rational::BigRational;

use crate::numeric;
use crate::scalar::Scalar;

static INTERNER: LazyLock<RwLock<HashSet<&'static str>>> =
    LazyLock::new(|| RwLock::new(HashSet::new()));

/// Interned variable name. Ordering is by the name itself, so canonical
/// forms never depend on the order in which names were first seen.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(&'static str);

impl Var {
    pub fn new(name: &str) -> Var {
        if let Some(s) = INTERNER.read().unwrap().get(name) {
            return Var(s);
        }
        let mut w = INTERNER.write().unwrap();
        if let Some(s) = w.get(name) {
            return Var(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        w.insert(leaked);
        Var(leaked)
    }

    pub fn name(&self) -> &'static str {
        self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// Numeric evaluator: arguments are exact rationals, the result is a
/// rational approximation good to roughly `prec` bits. `None` means the
/// point is outside the domain and should be treated like a pole.
pub type EvalFn = fn(&[BigRational], u32) -> Option<BigRational>;

/// Placeholder variable standing for argument slot `k` inside derivative
/// templates. The `#` keeps it out of the parser's identifier space.
pub fn slot_var(k: usize) -> Var {
    Var::new(&format!("#{k}"))
}

/// A registered function symbol whose applications are treated as opaque
/// atoms by the canonical form.
pub struct OpaqueSymbol {
    name: String,
    arity: usize,
    derivatives: OnceLock<Vec<Scalar>>,
    eval: Option<EvalFn>,
    generic: Option<Generic>,
}

/// An unspecified smooth function: its partial derivatives are further
/// unspecified functions, named by how often each slot was differentiated
/// so that mixed partials agree.
#[derive(Clone, Debug)]
struct Generic {
    base: String,
    counts: Vec<u32>,
}

fn generic_name(base: &str, counts: &[u32]) -> String {
    if counts.iter().all(|&c| c == 0) {
        return base.to_owned();
    }
    let parts: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    format!("D{}{}", parts.join("_"), base)
}

fn generic_symbol(base: &str, counts: Vec<u32>) -> Arc<OpaqueSymbol> {
    Arc::new(OpaqueSymbol {
        name: generic_name(base, &counts),
        arity: counts.len(),
        derivatives: OnceLock::new(),
        eval: None,
        generic: Some(Generic { base: base.to_owned(), counts }),
    })
}

impl OpaqueSymbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn evaluator(&self) -> Option<EvalFn> {
        self.eval
    }

    /// Partial derivative templates, one per slot, written in the slot
    /// variables `#0, #1, ...`.
    pub fn derivatives(&self) -> &[Scalar] {
        if let Some(g) = &self.generic {
            return self.derivatives.get_or_init(|| {
                let slots: Vec<Scalar> = (0..self.arity).map(|k| Scalar::var(slot_var(k))).collect();
                (0..self.arity)
                    .map(|k| {
                        let mut counts = g.counts.clone();
                        counts[k] += 1;
                        Scalar::apply(&generic_symbol(&g.base, counts), slots.clone())
                    })
                    .collect()
            });
        }
        self.derivatives
            .get()
            .map(|v| v.as_slice())
            .expect("derivative rule set when the symbol table was built")
    }

    pub fn is_generic(&self) -> bool {
        self.generic.is_some()
    }
}

impl fmt::Debug for OpaqueSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SymbolError {
    #[error("symbol `{0}` is already registered")]
    Duplicate(String),
    #[error("derivative rule for `{name}` slot {slot}: {msg}")]
    BadRule { name: String, slot: usize, msg: String },
    #[error("derivative rule for `{name}` mentions unregistered symbol `{other}`")]
    NotClosed { name: String, other: String },
    #[error("`{name}` has arity {arity} but {given} derivative rules were given")]
    RuleCount { name: String, arity: usize, given: usize },
}

/// Declaration used to build a [`SymbolTable`]; derivative rules are
/// written in the expression grammar using `_0, _1, ...` for the slots.
#[derive(Clone, Debug)]
pub struct SymbolDecl {
    pub name: String,
    pub arity: usize,
    pub derivatives: Vec<String>,
    pub eval: Option<EvalFn>,
}

/// Set of opaque symbols visible to the parser. Derivative rules are
/// closed over the table: every symbol a rule mentions is in the table.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Arc<OpaqueSymbol>>,
}

static STANDARD: LazyLock<SymbolTable> = LazyLock::new(|| {
    SymbolTable::empty()
        .with(vec![
            SymbolDecl {
                name: "exp".into(),
                arity: 1,
                derivatives: vec!["exp(_0)".into()],
                eval: Some(numeric::exp_fn),
            },
            SymbolDecl {
                name: "sin".into(),
                arity: 1,
                derivatives: vec!["cos(_0)".into()],
                eval: Some(numeric::sin_fn),
            },
            SymbolDecl {
                name: "cos".into(),
                arity: 1,
                derivatives: vec!["-sin(_0)".into()],
                eval: Some(numeric::cos_fn),
            },
        ])
        .expect("standard symbols are well formed")
});

impl SymbolTable {
    pub fn empty() -> SymbolTable {
        SymbolTable::default()
    }

    /// `exp`, `sin` and `cos`, all with evaluators.
    pub fn standard() -> SymbolTable {
        STANDARD.clone()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<OpaqueSymbol>> {
        self.symbols.get(name)
    }

    /// Looks up a name, also accepting derivative names such as `D2f` or
    /// `D1_0g` of registered generic functions.
    pub fn resolve(&self, name: &str) -> Option<Arc<OpaqueSymbol>> {
        if let Some(s) = self.symbols.get(name) {
            return Some(s.clone());
        }
        let rest = name.strip_prefix('D')?;
        let mut counts = Vec::new();
        let mut tail = rest;
        loop {
            let digits = tail.bytes().take_while(|b| b.is_ascii_digit()).count();
            if digits == 0 {
                return None;
            }
            counts.push(tail[..digits].parse::<u32>().ok()?);
            tail = &tail[digits..];
            match tail.strip_prefix('_') {
                Some(t) if t.starts_with(|c: char| c.is_ascii_digit()) => tail = t,
                _ => break,
            }
        }
        let base = self.symbols.get(tail)?;
        if !base.is_generic() || base.arity != counts.len() {
            return None;
        }
        let sym = generic_symbol(tail, counts);
        (sym.name == name).then_some(sym)
    }

    /// Registers unspecified smooth functions of the given arities. They
    /// have no numeric evaluator, so identities involving them are only
    /// ever decided by exact cancellation.
    pub fn with_generic(mut self, decls: &[(&str, usize)]) -> Result<SymbolTable, SymbolError> {
        for (name, arity) in decls {
            if self.symbols.contains_key(*name) {
                return Err(SymbolError::Duplicate((*name).to_owned()));
            }
            self.symbols.insert((*name).to_owned(), generic_symbol(name, vec![0; *arity]));
        }
        Ok(self)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.symbols.keys().map(|s| s.as_str())
    }

    /// Extends the table with new symbols. Rules may refer to each other
    /// and to anything already present.
    pub fn with(mut self, decls: Vec<SymbolDecl>) -> Result<SymbolTable, SymbolError> {
        let mut fresh = Vec::new();
        for d in &decls {
            if self.symbols.contains_key(&d.name) {
                return Err(SymbolError::Duplicate(d.name.clone()));
            }
            if d.derivatives.len() != d.arity {
                return Err(SymbolError::RuleCount {
                    name: d.name.clone(),
                    arity: d.arity,
                    given: d.derivatives.len(),
                });
            }
            let sym = Arc::new(OpaqueSymbol {
                name: d.name.clone(),
                arity: d.arity,
                derivatives: OnceLock::new(),
                eval: d.eval,
                generic: None,
            });
            self.symbols.insert(d.name.clone(), sym.clone());
            fresh.push(sym);
        }
        for (d, sym) in decls.iter().zip(&fresh) {
            let mut rules = Vec::with_capacity(d.arity);
            for (slot, text) in d.derivatives.iter().enumerate() {
                let e = crate::parse::parse_with(text, &self).map_err(|e| match e {
                    crate::parse::ParseError::UnknownFunction { name, .. } => {
                        SymbolError::NotClosed { name: d.name.clone(), other: name }
                    }
                    other => SymbolError::BadRule {
                        name: d.name.clone(),
                        slot,
                        msg: other.to_string(),
                    },
                })?;
                let map: BTreeMap<Var, Scalar> = (0..d.arity)
                    .map(|k| (Var::new(&format!("_{k}")), Scalar::var(slot_var(k))))
                    .collect();
                rules.push(e.substitute(&map));
            }
            let _ = sym.derivatives.set(rules);
        }
        Ok(self)
    }
}
