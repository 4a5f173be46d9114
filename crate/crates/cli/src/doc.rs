use njk_algebroid::{AlgebroidData, BundleMapU};
use njk_groupoid::GroupoidPresentation;
use njk_symexpr::{Scalar, SymbolTable};
use njk_tensorcalc::{Chart, SmoothMap, VVForm};

/// A parsed definition file. Declarations share one namespace and keep
/// their file order; tasks refer to them by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    /// Generic function symbols `(name, arity)` in declaration order.
    pub symbols: Vec<(String, usize)>,
    pub decls: Vec<Decl>,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Chart(Chart),
    Scalar(Scalar),
    Tensor(VVForm),
    Map(SmoothMap),
    Bundle(BundleMapU),
    Algebroid(AlgebroidData),
    Groupoid(GroupoidPresentation),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Chart(_) => "chart",
            Value::Scalar(_) => "scalar",
            Value::Tensor(_) => "tensor",
            Value::Map(_) => "map",
            Value::Bundle(_) => "bundle",
            Value::Algebroid(_) => "algebroid",
            Value::Groupoid(_) => "groupoid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskKind {
    Torsion,
    AlgebroidCheck,
    Theorem1,
    Theorem2,
    Lemma,
    Multiplicative,
    Identity,
    Catalog,
}

impl TaskKind {
    pub const ALL: [TaskKind; 8] = [
        TaskKind::Torsion,
        TaskKind::AlgebroidCheck,
        TaskKind::Theorem1,
        TaskKind::Theorem2,
        TaskKind::Lemma,
        TaskKind::Multiplicative,
        TaskKind::Identity,
        TaskKind::Catalog,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            TaskKind::Torsion => "torsion",
            TaskKind::AlgebroidCheck => "algebroid-check",
            TaskKind::Theorem1 => "theorem1",
            TaskKind::Theorem2 => "theorem2",
            TaskKind::Lemma => "lemma",
            TaskKind::Multiplicative => "multiplicative",
            TaskKind::Identity => "identity",
            TaskKind::Catalog => "catalog",
        }
    }

    pub fn from_keyword(s: &str) -> Option<TaskKind> {
        TaskKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    /// Declaration kinds of the arguments, in order. Catalog tasks take a
    /// catalog name rather than a declaration.
    pub fn arg_kinds(self) -> &'static [&'static str] {
        match self {
            TaskKind::Torsion => &["tensor"],
            TaskKind::AlgebroidCheck => &["algebroid"],
            TaskKind::Theorem1 => &["algebroid", "bundle"],
            TaskKind::Theorem2 | TaskKind::Lemma => &["groupoid", "bundle"],
            TaskKind::Multiplicative => &["groupoid", "tensor"],
            TaskKind::Identity => &["scalar"],
            TaskKind::Catalog => &["catalog entry"],
        }
    }
}

/// Declared outcome of a task: negative controls are written `expect fail`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskExpect {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub kind: TaskKind,
    pub args: Vec<String>,
    pub expect: TaskExpect,
}

impl Document {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.decls.iter().find(|d| d.name == name).map(|d| &d.value)
    }

    /// Standard functions plus the declared generic symbols.
    pub fn symbol_table(&self) -> SymbolTable {
        let decls: Vec<(&str, usize)> = self.symbols.iter().map(|(n, a)| (n.as_str(), *a)).collect();
        SymbolTable::standard().with_generic(&decls).expect("symbols are checked when declared")
    }

    pub fn chart(&self, name: &str) -> Option<&Chart> {
        match self.get(name) {
            Some(Value::Chart(c)) => Some(c),
            _ => None,
        }
    }
}
