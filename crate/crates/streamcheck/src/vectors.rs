//! `.tv.csv` test-vector files.
//!
//! A file holds one or more cases. Each case is a run of sections, each
//! introduced by a marker line and followed by a CSV table whose first row
//! names the columns:
//!
//! ```text
//! #case overtake
//! #inputs
//! DriverBrake,AccBrake
//! 21,79
//! 51,100
//! #expected
//! AccState
//! Active
//! Active
//! ```
//!
//! `#expected` may repeat to give alternative results. `#params` binds
//! concretizer parameters: a `const` parameter takes its first row, a
//! `stream` parameter the whole column. Blank lines are ignored.

use std::collections::BTreeSet;

use streamcheck_core::abstraction::{ParamBinding, ParamDecl, ParamKind, ParamValue};
use streamcheck_core::expr::literal_text;
use streamcheck_core::{Channel, ChannelHistory, ExpectedResult, SyntacticInterface, TestCase, TestInput, TimedStream, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: {message}", .col.map(|c| format!(", column {c}")).unwrap_or_default())]
pub struct VectorError {
    pub line: usize,
    pub col: Option<usize>,
    pub message: String,
}

impl VectorError {
    fn new(line: usize, col: Option<usize>, message: impl Into<String>) -> Self {
        VectorError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// An untyped CSV table. `line` is where its header row sits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub line: usize,
    pub header: Vec<String>,
    /// Each row with its line number.
    pub rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<impl Iterator<Item = (usize, usize, &str)>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(move |(l, r)| (*l, j + 1, r[j].as_str())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawCase {
    pub name: String,
    pub line: usize,
    pub inputs: Table,
    pub expected: Vec<Table>,
    pub params: Option<Table>,
}

/// A typed case together with its still untyped parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCase {
    pub case: TestCase,
    pub params: Option<Table>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Inputs,
    Expected,
    Params,
}

fn split_row(line: &str, lineno: usize) -> Result<Vec<String>, VectorError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(line.as_bytes());
    match rdr.records().next() {
        Some(Ok(rec)) => Ok(rec.iter().map(|s| s.trim().to_string()).collect()),
        Some(Err(e)) => Err(VectorError::new(lineno, None, e.to_string())),
        None => Ok(Vec::new()),
    }
}

/// Splits a file into cases and tables without looking at types.
pub fn parse_tables(text: &str) -> Result<Vec<RawCase>, Vec<VectorError>> {
    let mut cases: Vec<RawCase> = Vec::new();
    let mut errs = Vec::new();
    let mut current: Option<(Section, Table)> = None;

    fn close(cases: &mut [RawCase], current: Option<(Section, Table)>) {
        let Some((sec, t)) = current else { return };
        let case = cases.last_mut().expect("a section belongs to a case");
        match sec {
            Section::Inputs => case.inputs = t,
            Section::Expected => case.expected.push(t),
            Section::Params => case.params = Some(t),
        }
    }

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(marker) = line.strip_prefix('#') {
            let mut words = marker.split_whitespace();
            let kw = words.next().unwrap_or("");
            let arg: Vec<&str> = words.collect();
            let sec = match kw {
                "case" => {
                    close(&mut cases, current.take());
                    let name = if arg.is_empty() {
                        format!("case{}", cases.len() + 1)
                    } else {
                        arg.join(" ")
                    };
                    cases.push(RawCase {
                        name,
                        line: lineno,
                        ..Default::default()
                    });
                    continue;
                }
                "inputs" => Section::Inputs,
                "expected" => Section::Expected,
                "params" => Section::Params,
                _ => {
                    errs.push(VectorError::new(lineno, Some(1), format!("unknown section marker `#{kw}`")));
                    continue;
                }
            };
            if !arg.is_empty() {
                errs.push(VectorError::new(lineno, None, format!("`#{kw}` takes no argument")));
            }
            close(&mut cases, current.take());
            if cases.is_empty() {
                cases.push(RawCase {
                    name: "case1".into(),
                    line: lineno,
                    ..Default::default()
                });
            }
            let case = cases.last().expect("just ensured");
            let dup = match sec {
                Section::Inputs => case.inputs.line != 0,
                Section::Params => case.params.is_some(),
                Section::Expected => false,
            };
            if dup {
                errs.push(VectorError::new(
                    lineno,
                    None,
                    format!("`#{kw}` given twice in case `{}`", case.name),
                ));
            }
            current = Some((
                sec,
                Table {
                    line: lineno,
                    ..Default::default()
                },
            ));
            continue;
        }
        let Some((_, table)) = current.as_mut() else {
            errs.push(VectorError::new(
                lineno,
                Some(1),
                "data before any `#inputs`, `#expected` or `#params` marker",
            ));
            continue;
        };
        let cells = match split_row(raw, lineno) {
            Ok(c) => c,
            Err(e) => {
                errs.push(e);
                continue;
            }
        };
        if table.header.is_empty() {
            let mut seen = BTreeSet::new();
            for (j, h) in cells.iter().enumerate() {
                if h.is_empty() {
                    errs.push(VectorError::new(lineno, Some(j + 1), "empty column name"));
                } else if !seen.insert(h.as_str()) {
                    errs.push(VectorError::new(lineno, Some(j + 1), format!("duplicate column `{h}`")));
                }
            }
            table.header = cells;
            table.line = lineno;
        } else if cells.len() != table.header.len() {
            errs.push(VectorError::new(
                lineno,
                None,
                format!("ragged row: {} cells, header has {}", cells.len(), table.header.len()),
            ));
        } else {
            table.rows.push((lineno, cells));
        }
    }
    close(&mut cases, current.take());
    for c in &cases {
        if c.inputs.line == 0 {
            errs.push(VectorError::new(
                c.line,
                None,
                format!("case `{}` has no `#inputs` section", c.name),
            ));
        }
    }
    if errs.is_empty() {
        Ok(cases)
    } else {
        errs.sort_by_key(|e| (e.line, e.col));
        Err(errs)
    }
}

fn typed_history(t: &Table, channels: &[Channel], what: &str, horizon: usize, errs: &mut Vec<VectorError>) -> ChannelHistory {
    let mut h = ChannelHistory::new(horizon);
    for (j, name) in t.header.iter().enumerate() {
        let Some(ch) = channels.iter().find(|c| c.name == *name) else {
            errs.push(VectorError::new(
                t.line,
                Some(j + 1),
                format!("unknown channel `{name}` (not an {what} of the component)"),
            ));
            continue;
        };
        let mut vals = Vec::with_capacity(t.rows.len());
        for (line, row) in &t.rows {
            match ch.ctype.parse_value(&row[j]) {
                Ok(v) => vals.push(v),
                Err(e) => errs.push(VectorError::new(*line, Some(j + 1), e.to_string())),
            }
        }
        if vals.len() == t.rows.len() {
            let s = TimedStream::new(ch.ctype.clone(), vals).expect("parsed values are in the domain");
            let _ = h.insert(name.clone(), s);
        }
    }
    h
}

/// Types every case against `iface`, keeping parameter tables aside.
pub fn parse_vector_file(text: &str, iface: &SyntacticInterface) -> Result<Vec<VectorCase>, Vec<VectorError>> {
    let raw = parse_tables(text)?;
    let mut errs = Vec::new();
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for rc in raw {
        if !names.insert(rc.name.clone()) {
            errs.push(VectorError::new(rc.line, None, format!("duplicate case name `{}`", rc.name)));
        }
        let horizon = if rc.inputs.header.is_empty() {
            rc.expected.first().map_or(0, |t| t.rows.len())
        } else {
            rc.inputs.rows.len()
        };
        let input = typed_history(&rc.inputs, &iface.inputs, "input", horizon, &mut errs);
        for ch in &iface.inputs {
            if !rc.inputs.header.contains(&ch.name) {
                errs.push(VectorError::new(
                    rc.inputs.line,
                    None,
                    format!("missing input column `{}`", ch.name),
                ));
            }
        }
        let mut expected = ExpectedResult::default();
        for t in &rc.expected {
            if t.rows.len() != horizon {
                errs.push(VectorError::new(
                    t.line,
                    None,
                    format!("expected section has {} rows, inputs have {horizon}", t.rows.len()),
                ));
                continue;
            }
            expected
                .alternatives
                .push(typed_history(t, &iface.outputs, "output", horizon, &mut errs));
        }
        out.push(VectorCase {
            case: TestCase {
                name: rc.name,
                input: TestInput::new(input),
                expected,
            },
            params: rc.params,
        });
    }
    if errs.is_empty() {
        Ok(out)
    } else {
        errs.sort_by_key(|e| (e.line, e.col));
        Err(errs)
    }
}

/// Like [`parse_vector_file`], dropping parameter tables.
pub fn parse_testcases(text: &str, iface: &SyntacticInterface) -> Result<Vec<TestCase>, Vec<VectorError>> {
    parse_vector_file(text, iface).map(|v| v.into_iter().map(|c| c.case).collect())
}

/// Types a parameter table against the concretizer's declarations.
pub fn bind_params(t: &Table, decls: &[ParamDecl]) -> Result<ParamBinding, Vec<VectorError>> {
    let mut errs = Vec::new();
    let mut out = ParamBinding::new();
    for (j, name) in t.header.iter().enumerate() {
        if !decls.iter().any(|d| d.name == *name) {
            errs.push(VectorError::new(t.line, Some(j + 1), format!("unknown parameter `{name}`")));
        }
    }
    for d in decls {
        let Some(col) = t.column(&d.name) else {
            errs.push(VectorError::new(t.line, None, format!("parameter `{}` is not bound", d.name)));
            continue;
        };
        let mut vals = Vec::new();
        for (line, j, cell) in col {
            match d.ty.parse_value(cell) {
                Ok(v) => vals.push(v),
                Err(e) => errs.push(VectorError::new(line, Some(j), e.to_string())),
            }
        }
        if vals.len() != t.rows.len() {
            continue;
        }
        match d.kind {
            ParamKind::Const => match vals.into_iter().next() {
                Some(v) => {
                    out.insert(d.name.clone(), ParamValue::Const(v));
                }
                None => errs.push(VectorError::new(t.line, None, format!("parameter `{}` has no value", d.name))),
            },
            ParamKind::Stream => {
                let s = TimedStream::new(d.ty.clone(), vals).expect("parsed values are in the domain");
                out.insert(d.name.clone(), ParamValue::Stream(s));
            }
        }
    }
    if errs.is_empty() {
        Ok(out)
    } else {
        Err(errs)
    }
}

fn cell(v: &Value) -> String {
    literal_text(v)
}

fn write_history(out: &mut String, marker: &str, h: &ChannelHistory) {
    out.push_str(marker);
    out.push('\n');
    let names: Vec<&str> = h.channels().collect();
    out.push_str(&names.join(","));
    out.push('\n');
    if names.is_empty() {
        return;
    }
    for t in 1..=h.horizon() {
        let row: Vec<String> = h.iter().map(|(_, s)| cell(&s.values()[t - 1])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
}

/// Writes cases so that [`parse_testcases`] reads them back unchanged.
pub fn serialize_testcases(cases: &[TestCase]) -> String {
    let mut out = String::new();
    for c in cases {
        out.push_str(&format!("#case {}\n", c.name));
        write_history(&mut out, "#inputs", &c.input.bindings);
        for g in &c.expected.alternatives {
            write_history(&mut out, "#expected", g);
        }
    }
    out
}

/// A parameter table in file form.
pub fn serialize_params(p: &ParamBinding) -> String {
    let names: Vec<&str> = p.keys().map(String::as_str).collect();
    let rows = p
        .values()
        .map(|v| match v {
            ParamValue::Const(_) => 1,
            ParamValue::Stream(s) => s.horizon(),
        })
        .max()
        .unwrap_or(0);
    let mut out = format!("#params\n{}\n", names.join(","));
    for t in 0..rows {
        let row: Vec<String> = p
            .values()
            .map(|v| match v {
                ParamValue::Const(c) => cell(c),
                ParamValue::Stream(s) => s.values().get(t).or(s.values().last()).map(cell).unwrap_or_default(),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use streamcheck_core::DataType;

    fn iface() -> SyntacticInterface {
        let st = DataType::enumeration(["Active", "Standby"]).unwrap();
        SyntacticInterface::new(
            vec![
                Channel::new("DriverBrake", DataType::int(0, 255).unwrap()),
                Channel::new("AccBrake", DataType::int(0, 255).unwrap()),
            ],
            vec![Channel::new("AccState", st)],
        )
    }

    const SAMPLE: &str = "#case a\n#inputs\nDriverBrake,AccBrake\n21,79\n51,100\n#expected\nAccState\nActive\nActive\n";

    #[test]
    fn parses_and_round_trips() {
        let cases = parse_testcases(SAMPLE, &iface()).unwrap();
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].input.horizon(), 2);
        let text = serialize_testcases(&cases);
        assert_eq!(parse_testcases(&text, &iface()).unwrap(), cases);
    }

    #[test]
    fn unknown_channel() {
        let e = parse_testcases("#inputs\nDriverBrake,AccBrake,Speed\n1,2,3\n", &iface()).unwrap_err();
        assert_eq!(e.len(), 1);
        assert!(e[0].message.contains("unknown channel"));
        assert_eq!((e[0].line, e[0].col), (2, Some(3)));
    }

    #[test]
    fn misspelled_label_gets_a_suggestion() {
        let text = SAMPLE.replace("Active\nActive", "Active\nActve");
        let e = parse_testcases(&text, &iface()).unwrap_err();
        assert_eq!((e[0].line, e[0].col), (9, Some(1)));
        assert!(e[0].message.contains("did you mean `Active`"), "{}", e[0]);
    }

    #[test]
    fn ragged_rows() {
        let e = parse_testcases("#inputs\nDriverBrake,AccBrake\n1\n", &iface()).unwrap_err();
        assert!(e[0].message.starts_with("ragged row"));
        assert_eq!(e[0].line, 3);
    }

    #[test]
    fn params_const_and_stream() {
        let t = &parse_tables("#inputs\nx\n1\n2\n#params\nk,s\n3,0.5\n3,1.5\n").unwrap()[0];
        let decls = [
            ParamDecl {
                name: "k".into(),
                ty: DataType::int(0, 9).unwrap(),
                kind: ParamKind::Const,
            },
            ParamDecl {
                name: "s".into(),
                ty: DataType::Real,
                kind: ParamKind::Stream,
            },
        ];
        let p = bind_params(t.params.as_ref().unwrap(), &decls).unwrap();
        assert_eq!(p["k"], ParamValue::Const(Value::Int(3)));
        assert!(matches!(&p["s"], ParamValue::Stream(s) if s.horizon() == 2));
        let e = bind_params(t.params.as_ref().unwrap(), &decls[..1]).unwrap_err();
        assert!(e[0].message.contains("unknown parameter `s`"));
    }
}
