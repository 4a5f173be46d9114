use std::fmt::Write as _;

use njk_algebroid::{deformed_structure, AlgebroidData};
use njk_catalog::{CatalogEntry, Polarity};
use njk_groupoid::GroupoidPresentation;
use njk_symexpr::Scalar;
use njk_tensorcalc::combin::subsets;
use njk_tensorcalc::{Chart, SmoothMap};

use crate::doc::{Decl, Document, Task, TaskExpect, TaskKind, Value};
use crate::dsl::is_ident;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum WriteError {
    #[error("`{0}` is not an identifier")]
    BadName(String),
    #[error("no chart declared before `{0}` matches its coordinates")]
    MissingChart(String),
}

fn row(xs: &[Scalar]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn matrix(m: &[Vec<Scalar>]) -> String {
    if m.len() == 1 {
        return format!("[{}]", row(&m[0]));
    }
    let mut s = String::from("[\n");
    for r in m {
        let _ = writeln!(s, "  {},", row(r));
    }
    s.push(']');
    s
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

struct Writer<'a> {
    doc: &'a Document,
    seen: usize,
    out: String,
}

impl Writer<'_> {
    /// Name of the latest chart declared so far with these coordinates,
    /// preferring one whose name matches the chart's own.
    fn chart_name(&self, c: &Chart, user: &str) -> Result<String, WriteError> {
        let earlier = &self.doc.decls[..self.seen];
        let mut hit = None;
        for d in earlier {
            if let Value::Chart(ch) = &d.value {
                if ch == c {
                    if d.name == c.name() {
                        return Ok(d.name.clone());
                    }
                    hit.get_or_insert(d.name.clone());
                }
            }
        }
        hit.ok_or_else(|| WriteError::MissingChart(user.to_owned()))
    }

    fn decl(&mut self, d: &Decl) -> Result<(), WriteError> {
        let name = &d.name;
        if !is_ident(name) {
            return Err(WriteError::BadName(name.clone()));
        }
        let out = match &d.value {
            Value::Chart(c) => {
                let coords: Vec<String> = c.coords().iter().map(|v| v.to_string()).collect();
                format!("chart {name} = ({})", coords.join(", "))
            }
            Value::Scalar(s) => format!("scalar {name} = {s}"),
            Value::Tensor(t) => format!("tensor {name} on {} = {}", self.chart_name(&t.chart, name)?, matrix(&t.matrix())),
            Value::Map(m) => format!(
                "map {name}: {} -> {} = {}",
                self.chart_name(&m.source, name)?,
                self.chart_name(&m.target, name)?,
                row(&m.comps)
            ),
            Value::Bundle(u) => format!("bundle {name} on {} rank {} = {}", self.chart_name(&u.chart, name)?, u.rank, matrix(&u.u)),
            Value::Algebroid(a) => self.algebroid(name, a)?,
            Value::Groupoid(p) => self.groupoid(name, p)?,
        };
        self.out.push_str(&out);
        self.out.push('\n');
        Ok(())
    }

    fn algebroid(&self, name: &str, a: &AlgebroidData) -> Result<String, WriteError> {
        let mut s = format!("algebroid {name} on {} rank {}\n", self.chart_name(&a.chart, name)?, a.rank);
        let _ = writeln!(s, "  frames = ({})", a.frame_names.join(", "));
        let _ = writeln!(s, "  anchor = {}", matrix(&a.anchor).replace('\n', "\n  "));
        for (k, pair) in subsets(a.rank, 2).iter().enumerate() {
            let c = &a.structure[k];
            if c.iter().all(Scalar::is_zero) {
                continue;
            }
            let _ = writeln!(s, "  bracket {} {} = {}", a.frame_names[pair[0]], a.frame_names[pair[1]], row(c));
        }
        s.push_str("end");
        Ok(s)
    }

    fn groupoid(&self, name: &str, p: &GroupoidPresentation) -> Result<String, WriteError> {
        let mut s = format!("groupoid {name}\n");
        if p.name != name {
            let _ = writeln!(s, "  label = {}", quote(&p.name));
        }
        let mut charts = vec![("G", &p.g), ("M", &p.m), ("G2", &p.g2)];
        if let Some(t3) = &p.g3 {
            charts.push(("G3", &t3.chart));
        }
        for (role, c) in charts {
            let _ = writeln!(s, "  {role} = {}", self.chart_name(c, name)?);
        }
        let mut maps: Vec<(&str, &SmoothMap)> = vec![
            ("s", &p.s),
            ("t", &p.t),
            ("u", &p.u),
            ("i", &p.i),
            ("p1", &p.p1),
            ("p2", &p.p2),
            ("m", &p.mult),
            ("left_unit", &p.left_unit),
            ("right_unit", &p.right_unit),
            ("inverse_pair", &p.inverse_pair),
        ];
        if let Some(t3) = &p.g3 {
            maps.extend([("q12", &t3.q12), ("q23", &t3.q23), ("left", &t3.left), ("right", &t3.right)]);
        }
        for (role, m) in maps {
            let _ = writeln!(s, "  {role} = {}", row(&m.comps));
        }
        s.push_str("end");
        Ok(s)
    }
}

/// Renders a document in the definition language. Parsing the output
/// gives back an equal document.
pub fn to_dsl(doc: &Document) -> Result<String, WriteError> {
    let mut w = Writer { doc, seen: 0, out: String::new() };
    for (name, arity) in &doc.symbols {
        if !is_ident(name) {
            return Err(WriteError::BadName(name.clone()));
        }
        let _ = writeln!(w.out, "symbol {name}/{arity}");
    }
    let block = |v: &Value| matches!(v, Value::Algebroid(_) | Value::Groupoid(_));
    for (k, d) in doc.decls.iter().enumerate() {
        w.seen = k;
        let prev = if k > 0 { Some(&doc.decls[k - 1].value) } else { None };
        let gap = match prev {
            Some(p) => block(p) || block(&d.value) || p.kind() != d.value.kind(),
            None => !doc.symbols.is_empty(),
        };
        if gap {
            w.out.push('\n');
        }
        w.decl(d)?;
    }
    if !doc.tasks.is_empty() {
        w.out.push('\n');
    }
    for t in &doc.tasks {
        let _ = write!(w.out, "task {}", t.kind.keyword());
        for a in &t.args {
            let _ = write!(w.out, " {a}");
        }
        if t.expect == TaskExpect::Fail {
            w.out.push_str(" expect fail");
        }
        w.out.push('\n');
    }
    Ok(w.out)
}

/// Identifier form of a chart name, unique among `taken`.
fn fresh(base: &str, taken: &[String]) -> String {
    let mut b: String = base.chars().map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if !is_ident(&b) {
        b = format!("C{b}");
    }
    let mut name = b.clone();
    let mut k = 2;
    while taken.contains(&name) {
        name = format!("{b}_{k}");
        k += 1;
    }
    name
}

/// A catalog entry as a document: its charts, structures and expected
/// tensors, the side conditions as scalars, and the tasks that exercise
/// them. Negative entries get `expect fail` on the tasks they break.
pub fn entry_document(e: &CatalogEntry) -> Document {
    let mut doc = Document { symbols: e.generic.clone(), ..Default::default() };
    let mut charts: Vec<Chart> = Vec::new();
    let mut add_chart = |c: &Chart| {
        if !charts.contains(c) {
            charts.push(c.clone());
        }
    };
    if let Some(p) = &e.presentation {
        add_chart(&p.m);
        add_chart(&p.g);
        add_chart(&p.g2);
        if let Some(t3) = &p.g3 {
            add_chart(&t3.chart);
        }
    }
    for c in e.algebroid.iter().map(|a| &a.chart).chain(e.u.iter().map(|u| &u.chart)).chain(e.nijenhuis.iter().map(|n| &n.chart)) {
        add_chart(c);
    }
    for x in &e.expected {
        add_chart(&x.tensor.chart);
    }
    // names the entry's other declarations use
    let mut names: Vec<String> = ["N", "A", "U", "G", "TM"].iter().map(|s| s.to_string()).collect();
    names.extend((1..=e.side_conditions.len()).map(|k| format!("side_{k}")));
    names.extend(e.expected.iter().map(|x| format!("expected_{}", x.quantity.key())));
    for c in &charts {
        let n = fresh(c.name(), &names);
        names.push(n.clone());
        // rename so that the writer finds the chart under this name
        let renamed = Chart::new(&n, &c.coords().iter().map(|v| v.to_string()).collect::<Vec<_>>()).expect("valid chart");
        doc.decls.push(Decl { name: n, value: Value::Chart(renamed) });
    }
    let negative = e.polarity == Polarity::Negative;
    let expect = if negative { TaskExpect::Fail } else { TaskExpect::Pass };
    let push = |doc: &mut Document, name: &str, value: Value| doc.decls.push(Decl { name: name.to_owned(), value });
    for (k, sc) in e.side_conditions.iter().enumerate() {
        push(&mut doc, &format!("side_{}", k + 1), Value::Scalar(sc.expr.clone()));
    }
    if let Some(n) = &e.nijenhuis {
        push(&mut doc, "N", Value::Tensor(n.clone()));
        doc.tasks.push(Task { kind: TaskKind::Torsion, args: vec!["N".into()], expect });
    }
    if let Some(a) = &e.algebroid {
        push(&mut doc, "A", Value::Algebroid(a.clone()));
        // the algebroid of a negative entry is the deformed bracket of the
        // broken operator, which is not a Lie algebroid
        let broken = negative && e.nijenhuis.as_ref().and_then(|n| deformed_structure(n).ok()).as_ref() == Some(a);
        let ex = if broken { TaskExpect::Fail } else { TaskExpect::Pass };
        doc.tasks.push(Task { kind: TaskKind::AlgebroidCheck, args: vec!["A".into()], expect: ex });
    }
    if let Some(u) = &e.u {
        push(&mut doc, "U", Value::Bundle(u.clone()));
    }
    if let Some(p) = &e.presentation {
        push(&mut doc, "G", Value::Groupoid(p.clone()));
    }
    for x in &e.expected {
        push(&mut doc, &format!("expected_{}", x.quantity.key()), Value::Tensor(x.tensor.clone()));
    }
    match (&e.algebroid, &e.u) {
        (Some(_), Some(_)) if negative => {
            // theorem 1 on the transported tangent algebroid of 𝕀 + N
            let n = e.nijenhuis.as_ref().expect("negative entries carry N");
            let tm = AlgebroidData::tangent(&n.chart);
            push(&mut doc, "TM", Value::Algebroid(tm));
            doc.tasks.push(Task { kind: TaskKind::Theorem1, args: vec!["TM".into(), "U".into()], expect: TaskExpect::Fail });
        }
        (Some(_), Some(_)) => doc.tasks.push(Task { kind: TaskKind::Theorem1, args: vec!["A".into(), "U".into()], expect }),
        _ => {}
    }
    if e.presentation.is_some() && e.u.is_some() {
        for kind in [TaskKind::Theorem2, TaskKind::Lemma] {
            doc.tasks.push(Task { kind, args: vec!["G".into(), "U".into()], expect });
        }
        if e.expected.iter().any(|x| x.quantity.key() == "delta_u") {
            doc.tasks.push(Task { kind: TaskKind::Multiplicative, args: vec!["G".into(), "expected_delta_u".into()], expect });
        }
    }
    for k in 0..e.side_conditions.len() {
        doc.tasks.push(Task { kind: TaskKind::Identity, args: vec![format!("side_{}", k + 1)], expect: TaskExpect::Pass });
    }
    doc
}

/// Charts of a document renamed by the writer are equal to the originals
/// (charts compare by coordinates), so structures survive unchanged.
pub fn entry_dsl(e: &CatalogEntry) -> Result<String, WriteError> {
    let doc = entry_document(e);
    let mut s = format!("# catalog entry {}: {}\n", e.name, e.summary.replace('\n', " "));
    s.push_str(&to_dsl(&doc)?);
    Ok(s)
}
