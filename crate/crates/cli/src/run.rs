use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use njk_algebroid::check_lie_algebroid;
use njk_catalog::verify_entry;
use njk_graded::theorem1_check;
use njk_groupoid::{lemma_check, multiplicative_check, theorem2_check};
use njk_symexpr::{is_zero, Check, Expect, ModePreference, Outcome, Report, Status, VerifyConfig};
use njk_tensorcalc::{fn_bracket, nijenhuis_torsion};

use crate::doc::{Document, Task, TaskExpect, TaskKind, Value};

/// Version tag written at the head of every machine report.
pub const SCHEMA: &str = "njk-report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigRecord {
    pub mode: ModePreference,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub precision: u32,
}

impl From<&VerifyConfig> for ConfigRecord {
    fn from(c: &VerifyConfig) -> Self {
        ConfigRecord { mode: c.mode, samples: c.samples, tol: c.tol, seed: c.seed, precision: c.precision }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub expect: Expect,
    pub status: Status,
    pub outcome: Outcome,
}

impl From<Check> for CheckRecord {
    fn from(c: Check) -> Self {
        CheckRecord { name: c.name.clone(), expect: c.expect, status: c.status(), outcome: c.outcome }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskRecord {
    pub index: usize,
    pub task: String,
    pub inputs: Vec<String>,
    pub expect: TaskExpect,
    pub status: TaskStatus,
    /// Whether the status matches the declared expectation.
    pub met: bool,
    pub title: String,
    pub notes: Vec<String>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time; shown in text reports only, so machine reports stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub tasks: usize,
    pub met: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub source: String,
    pub config: ConfigRecord,
    pub tasks: Vec<TaskRecord>,
    pub summary: Summary,
    /// `pass` iff every task met its expectation.
    pub verdict: Verdict,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }

    pub fn machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let mode = serde_json::to_value(c.mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let _ = writeln!(s, "source: {}", self.source);
        let _ = writeln!(s, "config: mode={mode} samples={} tol={:e} seed={} precision={}", c.samples, c.tol, c.seed, c.precision);
        for t in &self.tasks {
            let st = match t.status {
                TaskStatus::Pass => "PASS",
                TaskStatus::Fail => "FAIL",
                TaskStatus::Error => "ERROR",
            };
            let exp = match t.expect {
                TaskExpect::Pass => "",
                TaskExpect::Fail => ", expected to fail",
            };
            let met = if t.met { "as declared" } else { "MISMATCH" };
            let _ = writeln!(
                s,
                "\n[{}] {} {}: {st}{exp} ({met}, {} ms)",
                t.index + 1,
                t.task,
                t.inputs.join(" "),
                t.elapsed.as_millis()
            );
            if !t.title.is_empty() {
                let _ = writeln!(s, "  {}", t.title);
            }
            for n in &t.notes {
                let _ = writeln!(s, "  note: {n}");
            }
            if let Some(e) = &t.error {
                let _ = writeln!(s, "  error: {e}");
            }
            for ch in &t.checks {
                let exp = match ch.expect {
                    Expect::Zero => "",
                    Expect::Nonzero => " (expect nonzero)",
                };
                let _ = writeln!(s, "  [{}] {}{exp}: {}", ch.status, ch.name, ch.outcome);
            }
        }
        let m = &self.summary;
        let v = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let _ = writeln!(
            s,
            "\nverdict: {v} ({}/{} tasks as declared; {} checks: {} passed, {} failed, {} skipped)",
            m.met, m.tasks, m.checks, m.passed, m.failed, m.skipped
        );
        s
    }
}

fn tensor<'a>(doc: &'a Document, name: &str) -> &'a njk_tensorcalc::VVForm {
    match doc.get(name) {
        Some(Value::Tensor(t)) => t,
        _ => unreachable!("task arguments are resolved at parse time"),
    }
}

/// Torsion task: the two ways of computing `T_N` agree, and `T_N` vanishes.
fn torsion_report(n: &njk_tensorcalc::VVForm, cfg: &VerifyConfig) -> Result<Report, String> {
    let mut rep = Report::new("Nijenhuis torsion");
    let t = nijenhuis_torsion(n).map_err(|e| e.to_string())?;
    let half = fn_bracket(n, n).map_err(|e| e.to_string())?.scale(&njk_symexpr::Scalar::ratio(1, 2));
    rep.push(Check::identity("T_N = ½[N,N]^fn", t.verify_eq(&half, cfg).map_err(|e| e.to_string())?));
    rep.push(Check::identity("T_N = 0", t.verify_zero(cfg)));
    Ok(rep)
}

fn execute(doc: &Document, task: &Task, cfg: &VerifyConfig) -> Result<Report, String> {
    let get = |k: usize| doc.get(&task.args[k]).expect("resolved at parse time");
    match task.kind {
        TaskKind::Torsion => torsion_report(tensor(doc, &task.args[0]), cfg),
        TaskKind::AlgebroidCheck => {
            let Value::Algebroid(a) = get(0) else { unreachable!() };
            Ok(check_lie_algebroid(a, cfg))
        }
        TaskKind::Theorem1 => {
            let (Value::Algebroid(a), Value::Bundle(u)) = (get(0), get(1)) else { unreachable!() };
            theorem1_check(a, u, cfg).map_err(|e| e.to_string())
        }
        TaskKind::Theorem2 => {
            let (Value::Groupoid(p), Value::Bundle(u)) = (get(0), get(1)) else { unreachable!() };
            theorem2_check(p, u, cfg).map_err(|e| e.to_string())
        }
        TaskKind::Lemma => {
            let (Value::Groupoid(p), Value::Bundle(u)) = (get(0), get(1)) else { unreachable!() };
            lemma_check(p, u, cfg).map_err(|e| e.to_string())
        }
        TaskKind::Multiplicative => {
            let Value::Groupoid(p) = get(0) else { unreachable!() };
            multiplicative_check(p, tensor(doc, &task.args[1]), cfg).map_err(|e| e.to_string())
        }
        TaskKind::Identity => {
            let Value::Scalar(s) = get(0) else { unreachable!() };
            let mut rep = Report::new("scalar identity");
            rep.push(Check::identity(format!("{} = 0", task.args[0]), is_zero(s, cfg)));
            Ok(rep)
        }
        TaskKind::Catalog => {
            let e = njk_catalog::lookup(&task.args[0]).map_err(|e| e.to_string())?;
            verify_entry(&e, cfg).map_err(|e| e.to_string())
        }
    }
}

fn record(index: usize, task: &Task, res: Result<Report, String>, elapsed: Duration) -> TaskRecord {
    let (status, title, notes, checks, error) = match res {
        Ok(rep) => {
            let st = if rep.passed() { TaskStatus::Pass } else { TaskStatus::Fail };
            (st, rep.title, rep.notes, rep.checks.into_iter().map(CheckRecord::from).collect(), None)
        }
        Err(e) => (TaskStatus::Error, String::new(), Vec::new(), Vec::new(), Some(e)),
    };
    let met = matches!((task.expect, status), (TaskExpect::Pass, TaskStatus::Pass) | (TaskExpect::Fail, TaskStatus::Fail));
    TaskRecord {
        index,
        task: task.kind.keyword().to_owned(),
        inputs: task.args.clone(),
        expect: task.expect,
        status,
        met,
        title,
        notes,
        checks,
        error,
        elapsed,
    }
}

/// Runs every task. Tasks run in parallel; the report keeps file order.
pub fn run_document(doc: &Document, cfg: &VerifyConfig, source: &str) -> RunReport {
    let tasks: Vec<TaskRecord> = doc
        .tasks
        .par_iter()
        .enumerate()
        .map(|(k, t)| {
            let start = Instant::now();
            let res = execute(doc, t, cfg);
            record(k, t, res, start.elapsed())
        })
        .collect();
    let mut summary = Summary { tasks: tasks.len(), ..Default::default() };
    for t in &tasks {
        summary.met += t.met as usize;
        for c in &t.checks {
            summary.checks += 1;
            match c.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skip => summary.skipped += 1,
            }
        }
    }
    let verdict = if summary.met == summary.tasks { Verdict::Pass } else { Verdict::Fail };
    RunReport { schema: SCHEMA, source: source.to_owned(), config: cfg.into(), tasks, summary, verdict }
}

/// A one-task document running a catalog entry.
pub fn catalog_document(name: &str) -> Document {
    Document {
        tasks: vec![Task { kind: TaskKind::Catalog, args: vec![name.to_owned()], expect: TaskExpect::Pass }],
        ..Default::default()
    }
}
