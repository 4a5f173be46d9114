use std::collections::BTreeMap;
use std::fmt;

use njk_algebroid::{AlgebroidData, BundleMapU};
use njk_groupoid::{GroupoidPresentation, TripleChart};
use njk_symexpr::{parse_with, ParseError, Scalar, SymbolTable, Var};
use njk_tensorcalc::combin::{rank, subsets};
use njk_tensorcalc::{Chart, SmoothMap, VVForm};

use crate::doc::{Decl, Document, Task, TaskExpect, TaskKind, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Unresolved,
    Dimension,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Unresolved => "unresolved reference",
            ErrorKind::Dimension => "dimension mismatch",
        })
    }
}

/// Parse failure at a 1-based line and column (columns count characters).
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{line}:{col}: {kind}: {msg}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub kind: ErrorKind,
    pub msg: String,
}

/// A statement after comment stripping and bracket continuation. `segs`
/// maps byte offsets back to physical positions.
struct Logical {
    text: String,
    segs: Vec<(usize, usize)>,
    raw: Vec<String>,
}

impl Logical {
    fn pos(&self, off: usize) -> (usize, usize) {
        let k = self.segs.iter().rposition(|(start, _)| *start <= off).unwrap_or(0);
        let (start, line) = self.segs[k];
        let raw = &self.raw[k];
        let upto = (off - start).min(raw.len());
        let col = raw.get(..upto).map_or(upto, |s| s.chars().count()) + 1;
        (line, col)
    }
}

fn bracket_depth(s: &str) -> i64 {
    s.chars().fold(0, |d, c| match c {
        '[' | '(' => d + 1,
        ']' | ')' => d - 1,
        _ => d,
    })
}

fn strip_comment(line: &str) -> &str {
    // `#` never occurs inside expressions; labels are quoted and may hold one
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        if in_str {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_str = false,
                _ => {}
            }
        } else if c == '"' {
            in_str = true;
        } else if c == '#' {
            return &line[..i];
        }
    }
    line
}

fn logical_lines(src: &str) -> Vec<Logical> {
    let mut out = Vec::new();
    let mut cur: Option<Logical> = None;
    let mut depth = 0;
    for (i, raw) in src.lines().enumerate() {
        let body = strip_comment(raw).trim_end();
        match cur.as_mut() {
            None => {
                if body.trim().is_empty() {
                    continue;
                }
                depth = bracket_depth(body);
                cur = Some(Logical { text: body.to_owned(), segs: vec![(0, i + 1)], raw: vec![body.to_owned()] });
            }
            Some(l) => {
                l.text.push(' ');
                l.segs.push((l.text.len(), i + 1));
                l.text.push_str(body);
                l.raw.push(body.to_owned());
                depth += bracket_depth(body);
            }
        }
        if depth <= 0 {
            out.extend(cur.take());
        }
    }
    out.extend(cur);
    out
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(is_ident_start) && cs.all(is_ident_char)
}

/// Cursor over one logical line.
struct Cur<'a> {
    l: &'a Logical,
    pos: usize,
}

impl<'a> Cur<'a> {
    fn new(l: &'a Logical) -> Cur<'a> {
        Cur { l, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.l.text[self.pos..]
    }

    fn err(&self, off: usize, kind: ErrorKind, msg: impl Into<String>) -> DslError {
        let (line, col) = self.l.pos(off);
        DslError { line, col, kind, msg: msg.into() }
    }

    fn here(&self, kind: ErrorKind, msg: impl Into<String>) -> DslError {
        self.err(self.pos, kind, msg)
    }

    fn ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn at_end(&mut self) -> bool {
        self.ws();
        self.pos >= self.l.text.len()
    }

    fn end(&mut self) -> Result<(), DslError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.here(ErrorKind::Syntax, format!("unexpected `{}`", self.rest().trim())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), DslError> {
        self.ws();
        let start = self.pos;
        let r = self.rest();
        let mut n = 0;
        for (i, c) in r.char_indices() {
            let ok = if i == 0 { is_ident_start(c) } else { is_ident_char(c) };
            if !ok {
                break;
            }
            n = i + c.len_utf8();
        }
        if n == 0 {
            return Err(self.here(ErrorKind::Syntax, format!("expected {what}")));
        }
        self.pos += n;
        Ok((r[..n].to_owned(), start))
    }

    /// A run of non-space characters (task keywords, catalog names).
    fn word(&mut self, what: &str) -> Result<(String, usize), DslError> {
        self.ws();
        let start = self.pos;
        let r = self.rest();
        let n = r.find(char::is_whitespace).unwrap_or(r.len());
        if n == 0 {
            return Err(self.here(ErrorKind::Syntax, format!("expected {what}")));
        }
        self.pos += n;
        Ok((r[..n].to_owned(), start))
    }

    /// Frame name in a `bracket` line: anything up to whitespace or `=`.
    fn frame(&mut self) -> Result<(String, usize), DslError> {
        self.ws();
        let start = self.pos;
        let r = self.rest();
        let n = r.find(|c: char| c.is_whitespace() || c == '=').unwrap_or(r.len());
        if n == 0 {
            return Err(self.here(ErrorKind::Syntax, "expected a frame name"));
        }
        self.pos += n;
        Ok((r[..n].to_owned(), start))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        self.ws();
        let start = self.pos;
        match self.ident(&format!("`{kw}`")) {
            Ok((w, _)) if w == kw => Ok(()),
            _ => Err(self.err(start, ErrorKind::Syntax, format!("expected `{kw}`"))),
        }
    }

    fn punct(&mut self, p: &str) -> Result<(), DslError> {
        self.ws();
        if self.rest().starts_with(p) {
            self.pos += p.len();
            Ok(())
        } else {
            Err(self.here(ErrorKind::Syntax, format!("expected `{p}`")))
        }
    }

    fn peek(&mut self, p: &str) -> bool {
        self.ws();
        self.rest().starts_with(p)
    }

    fn usize(&mut self, what: &str) -> Result<usize, DslError> {
        self.ws();
        let start = self.pos;
        let n = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            return Err(self.here(ErrorKind::Syntax, format!("expected {what}")));
        }
        self.pos += n;
        self.l.text[start..self.pos].parse().map_err(|_| self.err(start, ErrorKind::Syntax, format!("{what} is too large")))
    }

    /// Items of a bracketed list, split at top-level commas. A trailing
    /// comma is allowed.
    fn list(&mut self, open: char, close: char) -> Result<Vec<(&'a str, usize)>, DslError> {
        self.ws();
        if !self.rest().starts_with(open) {
            return Err(self.here(ErrorKind::Syntax, format!("expected `{open}`")));
        }
        let text = &self.l.text;
        let body_start = self.pos + 1;
        let mut depth = 0i64;
        let mut items = Vec::new();
        let mut item_start = body_start;
        let mut end = None;
        for (i, c) in text[body_start..].char_indices() {
            let at = body_start + i;
            match c {
                '[' | '(' => depth += 1,
                ']' | ')' if depth > 0 => depth -= 1,
                ',' if depth == 0 => {
                    items.push((item_start, at));
                    item_start = at + 1;
                }
                c2 if c2 == close && depth == 0 => {
                    items.push((item_start, at));
                    end = Some(at);
                    break;
                }
                ']' | ')' => return Err(self.err(at, ErrorKind::Syntax, format!("unbalanced `{c}`"))),
                _ => {}
            }
        }
        let Some(end) = end else {
            return Err(self.here(ErrorKind::Syntax, format!("unclosed `{open}`")));
        };
        self.pos = end + 1;
        let mut out = Vec::new();
        let n = items.len();
        for (k, (a, b)) in items.into_iter().enumerate() {
            let raw = &text[a..b];
            let lead = raw.len() - raw.trim_start().len();
            let item = raw.trim();
            if item.is_empty() {
                if k + 1 == n && (n > 1 || out.is_empty()) {
                    // trailing comma, or an empty list
                    continue;
                }
                return Err(self.err(a + lead, ErrorKind::Syntax, "empty list item"));
            }
            out.push((item, a + lead));
        }
        Ok(out)
    }

    fn string(&mut self) -> Result<String, DslError> {
        self.ws();
        if !self.rest().starts_with('"') {
            return Err(self.here(ErrorKind::Syntax, "expected a quoted string"));
        }
        let start = self.pos;
        let mut out = String::new();
        let mut escaped = false;
        for (i, c) in self.rest().char_indices().skip(1) {
            if escaped {
                out.push(c);
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                self.pos += i + 1;
                return Ok(out);
            } else {
                out.push(c);
            }
        }
        Err(self.err(start, ErrorKind::Syntax, "unterminated string"))
    }
}

/// Parses a definition file. Every reference is resolved and every shape
/// checked here, so a `Document` is always runnable.
pub fn parse_document(src: &str) -> Result<Document, DslError> {
    let lines = logical_lines(src);
    let mut p = Parser { doc: Document::default(), table: SymbolTable::standard(), scalars: BTreeMap::new(), lines: &lines, at: 0 };
    while p.at < lines.len() {
        let l = &lines[p.at];
        p.at += 1;
        p.statement(l)?;
    }
    Ok(p.doc)
}

struct Parser<'a> {
    doc: Document,
    table: SymbolTable,
    scalars: BTreeMap<Var, Scalar>,
    lines: &'a [Logical],
    at: usize,
}

const GROUPOID_CHARTS: [&str; 4] = ["G", "M", "G2", "G3"];
const GROUPOID_MAPS: [(&str, &str, &str); 14] = [
    ("s", "G", "M"),
    ("t", "G", "M"),
    ("u", "M", "G"),
    ("i", "G", "G"),
    ("p1", "G2", "G"),
    ("p2", "G2", "G"),
    ("m", "G2", "G"),
    ("left_unit", "G", "G2"),
    ("right_unit", "G", "G2"),
    ("inverse_pair", "G", "G2"),
    ("q12", "G3", "G2"),
    ("q23", "G3", "G2"),
    ("left", "G3", "G2"),
    ("right", "G3", "G2"),
];

impl<'a> Parser<'a> {
    fn statement(&mut self, l: &'a Logical) -> Result<(), DslError> {
        let mut c = Cur::new(l);
        let (kw, kw_at) = c.ident("a section keyword")?;
        match kw.as_str() {
            "symbol" => self.symbol(&mut c),
            "chart" => self.chart(&mut c),
            "scalar" => self.scalar(&mut c),
            "tensor" => self.tensor(&mut c),
            "map" => self.map(&mut c),
            "bundle" => self.bundle(&mut c),
            "algebroid" => self.algebroid(&mut c),
            "groupoid" => self.groupoid(&mut c),
            "task" => self.task(&mut c),
            "end" => Err(c.err(kw_at, ErrorKind::Syntax, "`end` outside a block")),
            other => Err(c.err(kw_at, ErrorKind::Syntax, format!("unknown section `{other}`"))),
        }
    }

    fn new_name(&self, c: &Cur, name: &str, at: usize) -> Result<(), DslError> {
        if self.doc.get(name).is_some() {
            return Err(c.err(at, ErrorKind::Syntax, format!("`{name}` is already declared")));
        }
        if self.table.get(name).is_some() {
            return Err(c.err(at, ErrorKind::Syntax, format!("`{name}` is a function symbol")));
        }
        Ok(())
    }

    fn declare(&mut self, name: String, value: Value) {
        self.doc.decls.push(Decl { name, value });
    }

    fn lookup(&self, c: &Cur, name: &str, at: usize, kind: &str) -> Result<&Value, DslError> {
        match self.doc.get(name) {
            None => Err(c.err(at, ErrorKind::Unresolved, format!("undeclared {kind} `{name}`"))),
            Some(v) if v.kind() != kind => {
                Err(c.err(at, ErrorKind::Unresolved, format!("`{name}` is a {}, expected a {kind}", v.kind())))
            }
            Some(v) => Ok(v),
        }
    }

    fn chart_ref(&self, c: &mut Cur) -> Result<Chart, DslError> {
        let (name, at) = c.ident("a chart name")?;
        match self.lookup(c, &name, at, "chart")? {
            Value::Chart(ch) => Ok(ch.clone()),
            _ => unreachable!(),
        }
    }

    fn expr(&self, c: &Cur, text: &str, at: usize) -> Result<Scalar, DslError> {
        let s = parse_with(text, &self.table).map_err(|e| {
            // the position goes into file coordinates, so the message
            // leaves out the byte offset
            let msg = match &e {
                ParseError::Syntax { msg, .. } => msg.clone(),
                ParseError::UnknownFunction { name, .. } => format!("unknown function `{name}`"),
                ParseError::Arity { name, expected, got, .. } => format!("`{name}` expects {expected} argument(s), got {got}"),
                ParseError::NonIntegerExponent { .. } => "exponent is not an integer".into(),
                ParseError::DivisionByZero { .. } => "division by zero".into(),
            };
            c.err(at + e.offset(), ErrorKind::Syntax, msg)
        })?;
        let used: BTreeMap<Var, Scalar> =
            s.free_vars().into_iter().filter_map(|v| self.scalars.get(&v).map(|x| (v, x.clone()))).collect();
        Ok(if used.is_empty() { s } else { s.substitute(&used) })
    }

    /// Expression whose variables must be coordinates of `chart`.
    fn expr_on(&self, c: &Cur, text: &str, at: usize, chart: &Chart) -> Result<Scalar, DslError> {
        let s = self.expr(c, text, at)?;
        if let Some(v) = s.free_vars().into_iter().find(|v| !chart.coords().contains(v)) {
            return Err(c.err(at, ErrorKind::Unresolved, format!("`{v}` is not a coordinate of {}", chart.name())));
        }
        Ok(s)
    }

    fn row(&self, c: &mut Cur, chart: &Chart, len: usize, what: &str) -> Result<Vec<Scalar>, DslError> {
        let start = {
            c.ws();
            c.pos
        };
        let items = c.list('[', ']')?;
        if items.len() != len {
            return Err(c.err(start, ErrorKind::Dimension, format!("{what} needs {len} entries, got {}", items.len())));
        }
        items.iter().map(|(t, at)| self.expr_on(c, t, *at, chart)).collect()
    }

    fn matrix(&self, c: &mut Cur, chart: &Chart, rows: usize, cols: usize, what: &str) -> Result<Vec<Vec<Scalar>>, DslError> {
        c.ws();
        let start = c.pos;
        let items = c.list('[', ']')?;
        if items.len() != rows {
            return Err(c.err(start, ErrorKind::Dimension, format!("{what} needs {rows} rows, got {}", items.len())));
        }
        let mut out = Vec::new();
        for (k, (text, at)) in items.iter().enumerate() {
            let mut sub = Cur { l: c.l, pos: *at };
            let r = self.row(&mut sub, chart, cols, &format!("row {} of {what}", k + 1))?;
            if sub.pos != at + text.len() {
                return Err(sub.here(ErrorKind::Syntax, "unexpected text after row"));
            }
            out.push(r);
        }
        Ok(out)
    }

    fn symbol(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a symbol name")?;
        c.punct("/")?;
        let arity = c.usize("an arity")?;
        c.end()?;
        if arity == 0 {
            return Err(c.err(at, ErrorKind::Syntax, "a function symbol needs arity at least 1"));
        }
        if self.doc.get(&name).is_some() || self.doc.decls.iter().any(|d| matches!(&d.value, Value::Chart(ch) if ch.index_of(&name).is_some())) {
            return Err(c.err(at, ErrorKind::Syntax, format!("`{name}` is already used as a variable or declaration")));
        }
        self.table = self
            .table
            .clone()
            .with_generic(&[(&name, arity)])
            .map_err(|e| c.err(at, ErrorKind::Syntax, e.to_string()))?;
        self.doc.symbols.push((name, arity));
        Ok(())
    }

    fn chart(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a chart name")?;
        self.new_name(c, &name, at)?;
        c.punct("=")?;
        let items = c.list('(', ')')?;
        c.end()?;
        if items.is_empty() {
            return Err(c.err(at, ErrorKind::Dimension, "a chart needs at least one coordinate"));
        }
        for (co, co_at) in &items {
            if !is_ident(co) {
                return Err(c.err(*co_at, ErrorKind::Syntax, format!("`{co}` is not a coordinate name")));
            }
            if self.table.get(co).is_some() {
                return Err(c.err(*co_at, ErrorKind::Syntax, format!("`{co}` is a function symbol")));
            }
            if self.scalars.contains_key(&Var::new(co)) {
                return Err(c.err(*co_at, ErrorKind::Syntax, format!("`{co}` is a declared scalar")));
            }
        }
        let coords: Vec<&str> = items.iter().map(|(t, _)| *t).collect();
        let chart = Chart::new(&name, &coords).map_err(|e| c.err(at, ErrorKind::Syntax, e.to_string()))?;
        self.declare(name, Value::Chart(chart));
        Ok(())
    }

    fn scalar(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a scalar name")?;
        self.new_name(c, &name, at)?;
        if self.doc.decls.iter().any(|d| matches!(&d.value, Value::Chart(ch) if ch.index_of(&name).is_some())) {
            return Err(c.err(at, ErrorKind::Syntax, format!("`{name}` is a chart coordinate")));
        }
        c.punct("=")?;
        c.ws();
        let at_e = c.pos;
        let text = c.rest().trim_end();
        if text.is_empty() {
            return Err(c.here(ErrorKind::Syntax, "expected an expression"));
        }
        let s = self.expr(c, text, at_e)?;
        self.scalars.insert(Var::new(&name), s.clone());
        self.declare(name, Value::Scalar(s));
        Ok(())
    }

    fn tensor(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a tensor name")?;
        self.new_name(c, &name, at)?;
        c.keyword("on")?;
        let chart = self.chart_ref(c)?;
        c.punct("=")?;
        let n = chart.dim();
        let m = self.matrix(c, &chart, n, n, "a (1,1) tensor")?;
        c.end()?;
        let t = VVForm::from_matrix(&chart, &m).map_err(|e| c.err(at, ErrorKind::Dimension, e.to_string()))?;
        self.declare(name, Value::Tensor(t));
        Ok(())
    }

    fn map(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a map name")?;
        self.new_name(c, &name, at)?;
        c.punct(":")?;
        let src = self.chart_ref(c)?;
        c.punct("->")?;
        let tgt = self.chart_ref(c)?;
        c.punct("=")?;
        let comps = self.row(c, &src, tgt.dim(), "the map")?;
        c.end()?;
        let m = SmoothMap::new(&src, &tgt, comps).map_err(|e| c.err(at, ErrorKind::Dimension, e.to_string()))?;
        self.declare(name, Value::Map(m));
        Ok(())
    }

    fn bundle(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a bundle map name")?;
        self.new_name(c, &name, at)?;
        c.keyword("on")?;
        let chart = self.chart_ref(c)?;
        c.keyword("rank")?;
        let r = c.usize("a rank")?;
        c.punct("=")?;
        let u = self.matrix(c, &chart, r, chart.dim(), "the bundle map")?;
        c.end()?;
        let u = BundleMapU::new(&chart, r, u).map_err(|e| c.err(at, ErrorKind::Dimension, e.to_string()))?;
        self.declare(name, Value::Bundle(u));
        Ok(())
    }

    fn next_line(&mut self, header: &Cur, what: &str) -> Result<&'a Logical, DslError> {
        let l = self.lines.get(self.at).ok_or_else(|| header.err(0, ErrorKind::Syntax, format!("{what} block has no `end`")))?;
        self.at += 1;
        Ok(l)
    }

    fn algebroid(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("an algebroid name")?;
        self.new_name(c, &name, at)?;
        if c.peek("=") {
            c.punct("=")?;
            let (how, how_at) = c.ident("`tangent` or `deformed`")?;
            let a = match how.as_str() {
                "tangent" => AlgebroidData::tangent(&self.chart_ref(c)?),
                "deformed" => {
                    let (t, t_at) = c.ident("a tensor name")?;
                    let Value::Tensor(t) = self.lookup(c, &t, t_at, "tensor")? else { unreachable!() };
                    njk_algebroid::deformed_structure(t).map_err(|e| c.err(t_at, ErrorKind::Dimension, e.to_string()))?
                }
                other => return Err(c.err(how_at, ErrorKind::Syntax, format!("expected `tangent` or `deformed`, got `{other}`"))),
            };
            c.end()?;
            self.declare(name, Value::Algebroid(a));
            return Ok(());
        }
        c.keyword("on")?;
        let chart = self.chart_ref(c)?;
        c.keyword("rank")?;
        let r = c.usize("a rank")?;
        c.end()?;
        if r == 0 {
            return Err(c.err(at, ErrorKind::Dimension, "rank must be at least 1"));
        }
        let mut frames: Vec<String> = (1..=r).map(|a| format!("u{a}")).collect();
        let mut anchor = None;
        let mut structure = vec![vec![Scalar::zero(); r]; subsets(r, 2).len()];
        let mut seen = vec![false; structure.len()];
        loop {
            let l = self.next_line(c, "algebroid")?;
            let mut b = Cur::new(l);
            let (key, key_at) = b.ident("`frames`, `anchor`, `bracket` or `end`")?;
            match key.as_str() {
                "end" => {
                    b.end()?;
                    break;
                }
                "frames" => {
                    b.punct("=")?;
                    let list_at = {
                        b.ws();
                        b.pos
                    };
                    let items = b.list('(', ')')?;
                    b.end()?;
                    if items.len() != r {
                        return Err(b.err(list_at, ErrorKind::Dimension, format!("rank {r} needs {r} frame names, got {}", items.len())));
                    }
                    for (k, (f, f_at)) in items.iter().enumerate() {
                        if f.contains(char::is_whitespace) || items[..k].iter().any(|(g, _)| g == f) {
                            return Err(b.err(*f_at, ErrorKind::Syntax, format!("bad or repeated frame name `{f}`")));
                        }
                    }
                    frames = items.iter().map(|(f, _)| f.to_string()).collect();
                }
                "anchor" => {
                    b.punct("=")?;
                    anchor = Some(self.matrix(&mut b, &chart, chart.dim(), r, "the anchor")?);
                    b.end()?;
                }
                "bracket" => {
                    let (x, x_at) = b.frame()?;
                    let (y, y_at) = b.frame()?;
                    let find = |f: &str, f_at: usize| -> Result<usize, DslError> {
                        if let Some(k) = frames.iter().position(|g| g == f) {
                            return Ok(k);
                        }
                        match f.parse::<usize>() {
                            Ok(k) if (1..=r).contains(&k) => Ok(k - 1),
                            _ => Err(b.err(f_at, ErrorKind::Unresolved, format!("unknown frame `{f}`"))),
                        }
                    };
                    let (i, j) = (find(&x, x_at)?, find(&y, y_at)?);
                    if i == j {
                        return Err(b.err(y_at, ErrorKind::Syntax, "a bracket needs two different frames"));
                    }
                    b.punct("=")?;
                    let comps = self.row(&mut b, &chart, r, "the bracket")?;
                    b.end()?;
                    let (lo, hi, sign) = if i < j { (i, j, false) } else { (j, i, true) };
                    let k = rank(r, &[lo, hi]);
                    if seen[k] {
                        return Err(b.err(x_at, ErrorKind::Syntax, "bracket given twice"));
                    }
                    seen[k] = true;
                    structure[k] = if sign { comps.iter().map(|x| -x).collect() } else { comps };
                }
                other => return Err(b.err(key_at, ErrorKind::Syntax, format!("unknown algebroid field `{other}`"))),
            }
        }
        let Some(anchor) = anchor else {
            return Err(c.err(at, ErrorKind::Syntax, format!("algebroid `{name}` has no anchor")));
        };
        let a = AlgebroidData::new(&chart, r, anchor, structure)
            .map_err(|e| c.err(at, ErrorKind::Dimension, e.to_string()))?
            .with_frame_names(frames);
        self.declare(name, Value::Algebroid(a));
        Ok(())
    }

    fn groupoid(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (name, at) = c.ident("a groupoid name")?;
        self.new_name(c, &name, at)?;
        c.end()?;
        let mut label = None;
        let mut charts: BTreeMap<&str, Chart> = BTreeMap::new();
        let mut maps: BTreeMap<&str, SmoothMap> = BTreeMap::new();
        loop {
            let l = self.next_line(c, "groupoid")?;
            let mut b = Cur::new(l);
            let (key, key_at) = b.ident("a groupoid field or `end`")?;
            if key == "end" {
                b.end()?;
                break;
            }
            if key == "label" {
                b.punct("=")?;
                label = Some(b.string()?);
                b.end()?;
                continue;
            }
            b.punct("=")?;
            if let Some(role) = GROUPOID_CHARTS.iter().find(|r| **r == key) {
                if charts.contains_key(role) {
                    return Err(b.err(key_at, ErrorKind::Syntax, format!("`{role}` given twice")));
                }
                let ch = self.chart_ref(&mut b)?;
                b.end()?;
                charts.insert(role, ch);
                continue;
            }
            let Some(&(role, src, tgt)) = GROUPOID_MAPS.iter().find(|(r, _, _)| *r == key) else {
                return Err(b.err(key_at, ErrorKind::Syntax, format!("unknown groupoid field `{key}`")));
            };
            if maps.contains_key(role) {
                return Err(b.err(key_at, ErrorKind::Syntax, format!("`{role}` given twice")));
            }
            let need = |r: &str| {
                charts.get(r).cloned().ok_or_else(|| b.err(key_at, ErrorKind::Unresolved, format!("`{role}` needs chart `{r}` declared first")))
            };
            let (src_c, tgt_c) = (need(src)?, need(tgt)?);
            let m = if b.peek("[") {
                let comps = self.row(&mut b, &src_c, tgt_c.dim(), &format!("`{role}`"))?;
                SmoothMap::new(&src_c, &tgt_c, comps).map_err(|e| b.err(key_at, ErrorKind::Dimension, e.to_string()))?
            } else {
                let (mn, mn_at) = b.ident("a map name or `[`")?;
                let Value::Map(m) = self.lookup(&b, &mn, mn_at, "map")? else { unreachable!() };
                if m.source != src_c || m.target != tgt_c {
                    return Err(b.err(mn_at, ErrorKind::Dimension, format!("`{role}` must map {src} → {tgt}")));
                }
                m.clone()
            };
            b.end()?;
            maps.insert(role, m);
        }
        for r in ["G", "M", "G2"] {
            if !charts.contains_key(r) {
                return Err(c.err(at, ErrorKind::Syntax, format!("groupoid `{name}` lacks chart `{r}`")));
            }
        }
        let mut take = |r: &str| maps.remove(r).ok_or_else(|| c.err(at, ErrorKind::Syntax, format!("groupoid `{name}` lacks map `{r}`")));
        let (s, t, u, i) = (take("s")?, take("t")?, take("u")?, take("i")?);
        let (p1, p2, mult) = (take("p1")?, take("p2")?, take("m")?);
        let (left_unit, right_unit, inverse_pair) = (take("left_unit")?, take("right_unit")?, take("inverse_pair")?);
        let g3 = match charts.get("G3") {
            Some(ch) => Some(TripleChart { chart: ch.clone(), q12: take("q12")?, q23: take("q23")?, left: take("left")?, right: take("right")? }),
            None => None,
        };
        if let Some(extra) = maps.keys().next() {
            return Err(c.err(at, ErrorKind::Syntax, format!("`{extra}` given without chart G3")));
        }
        let p = GroupoidPresentation {
            name: label.unwrap_or_else(|| name.clone()),
            g: charts["G"].clone(),
            m: charts["M"].clone(),
            s,
            t,
            u,
            i,
            g2: charts["G2"].clone(),
            p1,
            p2,
            mult,
            left_unit,
            right_unit,
            inverse_pair,
            g3,
        };
        p.validate().map_err(|e| c.err(at, ErrorKind::Dimension, e.to_string()))?;
        self.declare(name, Value::Groupoid(p));
        Ok(())
    }

    fn task(&mut self, c: &mut Cur) -> Result<(), DslError> {
        let (kw, kw_at) = c.word("a task kind")?;
        let kind = TaskKind::from_keyword(&kw).ok_or_else(|| {
            let known: Vec<&str> = TaskKind::ALL.iter().map(|k| k.keyword()).collect();
            c.err(kw_at, ErrorKind::Syntax, format!("unknown task `{kw}` (one of {})", known.join(", ")))
        })?;
        let mut args = Vec::new();
        let mut arg_at = Vec::new();
        for what in kind.arg_kinds() {
            let (a, a_at) = if kind == TaskKind::Catalog { c.word("a catalog name")? } else { c.ident(&format!("a {what} name"))? };
            if kind == TaskKind::Catalog {
                njk_catalog::lookup(&a).map_err(|e| c.err(a_at, ErrorKind::Unresolved, e.to_string()))?;
            } else {
                self.lookup(c, &a, a_at, what)?;
            }
            args.push(a);
            arg_at.push(a_at);
        }
        let mut expect = TaskExpect::Pass;
        if !c.at_end() {
            c.keyword("expect")?;
            let (e, e_at) = c.ident("`pass` or `fail`")?;
            expect = match e.as_str() {
                "pass" => TaskExpect::Pass,
                "fail" => TaskExpect::Fail,
                _ => return Err(c.err(e_at, ErrorKind::Syntax, "expected `pass` or `fail`")),
            };
        }
        c.end()?;
        self.check_task_shapes(c, kind, &args, &arg_at)?;
        self.doc.tasks.push(Task { kind, args, expect });
        Ok(())
    }

    fn check_task_shapes(&self, c: &Cur, kind: TaskKind, args: &[String], at: &[usize]) -> Result<(), DslError> {
        let get = |k: usize| self.doc.get(&args[k]).expect("resolved above");
        let bad = |k: usize, msg: String| Err(c.err(at[k], ErrorKind::Dimension, msg));
        match kind {
            TaskKind::Theorem1 => {
                let (Value::Algebroid(a), Value::Bundle(u)) = (get(0), get(1)) else { unreachable!() };
                if u.chart != a.chart || u.rank != a.rank {
                    return bad(1, format!("`{}` must map TM to the rank-{} bundle of `{}` over {}", args[1], a.rank, args[0], a.chart.name()));
                }
            }
            TaskKind::Theorem2 | TaskKind::Lemma => {
                let (Value::Groupoid(g), Value::Bundle(u)) = (get(0), get(1)) else { unreachable!() };
                let r = g.dim_g() - g.dim_m();
                if u.chart != g.m || u.rank != r {
                    return bad(1, format!("`{}` must be a rank-{r} bundle map over {}", args[1], g.m.name()));
                }
            }
            TaskKind::Multiplicative => {
                let (Value::Groupoid(g), Value::Tensor(t)) = (get(0), get(1)) else { unreachable!() };
                if t.chart != g.g {
                    return bad(1, format!("`{}` must be a tensor on {}", args[1], g.g.name()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
