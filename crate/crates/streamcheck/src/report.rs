//! Command results, as JSON documents or line-oriented text.

use std::fmt::Write;

use serde::Serialize;
use streamcheck_core::expr::literal_text;
use streamcheck_core::{ChannelHistory, Value};

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const SIM: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Warning,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Message {
    pub level: Level,
    pub text: String,
    /// File the message is about, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
}

impl Message {
    pub fn new(level: Level, text: impl Into<String>) -> Self {
        Message {
            level,
            text: text.into(),
            file: None,
            line: None,
            col: None,
        }
    }

    pub fn at(mut self, file: &str, line: usize, col: Option<usize>) -> Self {
        self.file = Some(file.to_string());
        self.line = Some(line);
        self.col = col;
        self
    }
}

/// A channel history laid out by tick: `rows[t - 1][j]` is channel `j` at tick `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct HistoryTable {
    pub channels: Vec<String>,
    pub rows: Vec<Vec<serde_json::Value>>,
}

pub fn json_value(v: &Value) -> serde_json::Value {
    match v {
        Value::Bool(b) => (*b).into(),
        Value::Int(i) => (*i).into(),
        Value::Real(r) => serde_json::Number::from_f64(*r).map_or(serde_json::Value::Null, Into::into),
        Value::Enum(l) => l.clone().into(),
    }
}

impl From<&ChannelHistory> for HistoryTable {
    fn from(h: &ChannelHistory) -> Self {
        HistoryTable {
            channels: h.channels().map(String::from).collect(),
            rows: (0..h.horizon())
                .map(|t| h.iter().map(|(_, s)| json_value(&s.values()[t])).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimCase {
    pub name: String,
    pub ticks: usize,
    pub inputs: HistoryTable,
    pub outputs: HistoryTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceOut {
    pub tick: usize,
    pub channel: String,
    pub expected: serde_json::Value,
    pub actual: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCaseOut {
    pub name: String,
    pub status: Outcome,
    /// Expected group (0-based) the run matched, or was compared against.
    pub group: Option<usize>,
    pub first_divergence: Option<DivergenceOut>,
    pub divergences: Vec<DivergenceOut>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcCase {
    pub name: String,
    /// `None` when the refinement names no input relation.
    pub ri_holds: Option<bool>,
    pub concrete_input: HistoryTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckCase {
    pub name: String,
    pub ri_holds: bool,
    pub ri_per_tick: Vec<bool>,
    pub ro_holds: Option<bool>,
    pub ro_per_tick: Vec<bool>,
    pub corresponding: Option<bool>,
    /// RI failed, so the pair passes without saying anything about RO.
    pub vacuous: bool,
    pub abstract_output: Option<HistoryTable>,
    pub concrete_output: Option<HistoryTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaloisCex {
    pub concrete_set: Vec<String>,
    pub abstract_set: Vec<String>,
    pub f_side: bool,
    pub g_side: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalityCex {
    pub agree_through: usize,
    pub diverges_at: usize,
    pub x1: HistoryTable,
    pub x2: HistoryTable,
    pub y1: HistoryTable,
    pub y2: HistoryTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalityOut {
    pub component: String,
    pub mode: String,
    pub ok: bool,
    pub exhaustive: Option<bool>,
    pub checked: Option<usize>,
    pub counterexample: Option<CausalityCex>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Detail {
    None,
    Simulate {
        component: String,
        cases: Vec<SimCase>,
    },
    Test {
        component: String,
        eps: f64,
        passed: usize,
        failed: usize,
        errors: usize,
        cases: Vec<TestCaseOut>,
    },
    Concretize {
        refinement: String,
        concretizer: String,
        out: Option<String>,
        cases: Vec<ConcCase>,
    },
    Check {
        refinement: String,
        cases: Vec<CheckCase>,
    },
    Galois {
        galois: String,
        orientation: String,
        ok: bool,
        concrete_elements: Option<usize>,
        abstract_elements: Option<usize>,
        pairs_checked: Option<u64>,
        counterexample: Option<GaloisCex>,
    },
    Causality {
        seed: u64,
        horizon: usize,
        components: Vec<CausalityOut>,
    },
}

/// One invocation's result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub messages: Vec<Message>,
    #[serde(flatten)]
    pub detail: Detail,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            outcome: Outcome::Pass,
            exit_code: exit::OK,
            messages: Vec::new(),
            detail: Detail::None,
        }
    }

    /// Records an error and the exit code it implies.
    pub fn fail_with(&mut self, code: i32, msg: Message) {
        self.outcome = if code == exit::FAIL { Outcome::Fail } else { Outcome::Error };
        self.exit_code = code;
        self.messages.push(msg);
    }

    pub fn warn(&mut self, text: impl Into<String>) {
        self.messages.push(Message::new(Level::Warning, text));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Human-readable text: the result body, then messages.
    pub fn to_human(&self, color: bool) -> (String, String) {
        let mut out = String::new();
        let p = Paint(color);
        match &self.detail {
            Detail::None => {}
            Detail::Simulate { component, cases } => {
                for c in cases {
                    let _ = writeln!(out, "{component} / {} ({} ticks)", c.name, c.ticks);
                    out.push_str(&tick_table(&[("in", &c.inputs), ("out", &c.outputs)], c.ticks));
                }
            }
            Detail::Test {
                component,
                passed,
                failed,
                errors,
                cases,
                ..
            } => {
                for c in cases {
                    let tag = match c.status {
                        Outcome::Pass => p.green("PASS"),
                        Outcome::Fail => p.red("FAIL"),
                        Outcome::Error => p.red("ERROR"),
                    };
                    let _ = write!(out, "{tag} {}", c.name);
                    if let Some(d) = &c.first_divergence {
                        let _ = write!(out, ": tick {} {} expected {} got {}", d.tick, d.channel, d.expected, d.actual);
                    }
                    if let Some(e) = &c.error {
                        let _ = write!(out, ": {e}");
                    }
                    out.push('\n');
                    for d in c.divergences.iter().skip(1) {
                        let _ = writeln!(out, "     tick {} {} expected {} got {}", d.tick, d.channel, d.expected, d.actual);
                    }
                }
                let _ = writeln!(out, "{component}: {passed} passed, {failed} failed, {errors} errors");
            }
            Detail::Concretize { cases, out: path, .. } => {
                for c in cases {
                    let ri = match c.ri_holds {
                        Some(true) => " (RI holds)",
                        Some(false) => " (RI does not hold)",
                        None => "",
                    };
                    let _ = writeln!(out, "{}{ri}", c.name);
                    out.push_str(&tick_table(&[("c", &c.concrete_input)], c.concrete_input.rows.len()));
                }
                if let Some(path) = path {
                    let _ = writeln!(out, "wrote {path}");
                }
            }
            Detail::Check { refinement, cases } => {
                for c in cases {
                    let tag = match c.corresponding {
                        Some(true) if c.vacuous => p.yellow("VACUOUS"),
                        Some(true) => p.green("PASS"),
                        Some(false) => p.red("FAIL"),
                        None => p.red("ERROR"),
                    };
                    let _ = writeln!(
                        out,
                        "{tag} {refinement} / {}: RI {} {}, RO {} {}",
                        c.name,
                        c.ri_holds,
                        bools(&c.ri_per_tick),
                        c.ro_holds.map_or("-".into(), |b| b.to_string()),
                        bools(&c.ro_per_tick),
                    );
                    let false_ticks: Vec<String> = c
                        .ro_per_tick
                        .iter()
                        .enumerate()
                        .filter(|(_, ok)| !**ok)
                        .map(|(i, _)| (i + 1).to_string())
                        .collect();
                    if c.ri_holds && !false_ticks.is_empty() {
                        let _ = writeln!(out, "     RO false at ticks {}", false_ticks.join(", "));
                    }
                }
            }
            Detail::Galois {
                galois,
                orientation,
                ok,
                concrete_elements,
                abstract_elements,
                pairs_checked,
                counterexample,
            } => {
                if *ok {
                    let _ = writeln!(
                        out,
                        "{} {galois} ({orientation}): {} concrete x {} abstract elements, {} subset pairs",
                        p.green("OK"),
                        concrete_elements.unwrap_or(0),
                        abstract_elements.unwrap_or(0),
                        pairs_checked.unwrap_or(0)
                    );
                } else if let Some(cx) = counterexample {
                    let _ = writeln!(out, "{} {galois} ({orientation})", p.red("COUNTEREXAMPLE"));
                    let _ = writeln!(out, "  Tc = {{{}}}", cx.concrete_set.join(", "));
                    let _ = writeln!(out, "  Ta = {{{}}}", cx.abstract_set.join(", "));
                    let _ = writeln!(out, "  f(Tc) <= Ta: {}    g side: {}", cx.f_side, cx.g_side);
                }
            }
            Detail::Causality { seed, horizon, components } => {
                let _ = writeln!(out, "seed {seed}, horizon {horizon}");
                for c in components {
                    if let Some(e) = &c.error {
                        let _ = writeln!(out, "{} {} ({}): {e}", p.red("ERROR"), c.component, c.mode);
                    } else if c.ok {
                        let how = if c.exhaustive == Some(true) { "exhaustive" } else { "sampled" };
                        let _ = writeln!(
                            out,
                            "{} {} ({}): {how}, {} checked",
                            p.green("OK"),
                            c.component,
                            c.mode,
                            c.checked.unwrap_or(0)
                        );
                    } else if let Some(cx) = &c.counterexample {
                        let _ = writeln!(
                            out,
                            "{} {} ({}): inputs agree through tick {}, outputs differ at tick {}",
                            p.red("VIOLATION"),
                            c.component,
                            c.mode,
                            cx.agree_through,
                            cx.diverges_at
                        );
                        let n = cx.x1.rows.len();
                        out.push_str(&tick_table(&[("x1", &cx.x1), ("y1", &cx.y1), ("x2", &cx.x2), ("y2", &cx.y2)], n));
                    }
                }
            }
        }
        let mut err = String::new();
        for m in &self.messages {
            let lvl = match m.level {
                Level::Error => p.red("error"),
                Level::Warning => p.yellow("warning"),
                Level::Info => "note".to_string(),
            };
            let loc = match (&m.file, m.line, m.col) {
                (Some(f), Some(l), Some(c)) => format!("{f}:{l}:{c}: "),
                (Some(f), Some(l), None) => format!("{f}:{l}: "),
                (Some(f), None, _) => format!("{f}: "),
                _ => String::new(),
            };
            let _ = writeln!(err, "{lvl}: {loc}{}", m.text);
        }
        (out, err)
    }
}

fn bools(v: &[bool]) -> String {
    let s: Vec<&str> = v.iter().map(|b| if *b { "T" } else { "F" }).collect();
    format!("[{}]", s.join(" "))
}

fn cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => match n.as_f64() {
            Some(r) if n.is_f64() => literal_text(&Value::Real(r)),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// A tick-by-tick table with one column per channel of every part.
fn tick_table(parts: &[(&str, &HistoryTable)], ticks: usize) -> String {
    let mut header = vec!["tick".to_string()];
    for (tag, t) in parts {
        header.extend(t.channels.iter().map(|c| format!("{tag}.{c}")));
    }
    let mut rows = vec![header];
    for i in 0..ticks {
        let mut r = vec![(i + 1).to_string()];
        for (_, t) in parts {
            match t.rows.get(i) {
                Some(row) => r.extend(row.iter().map(cell)),
                None => r.extend(t.channels.iter().map(|_| String::new())),
            }
        }
        rows.push(r);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str("  ");
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

struct Paint(bool);

impl Paint {
    fn wrap(&self, code: &str, s: &str) -> String {
        if self.0 {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
    fn green(&self, s: &str) -> String {
        self.wrap("32", s)
    }
    fn red(&self, s: &str) -> String {
        self.wrap("31", s)
    }
    fn yellow(&self, s: &str) -> String {
        self.wrap("33", s)
    }
}
