//! Test-cases, their execution and verdicts.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::component::{run, ComponentSpec, SimOptions, SyntacticInterface};
use crate::stream::{validate_history, ChannelHistory, TimedStream};
use crate::value::Value;

/// Streams for every input channel of a component.
#[derive(Debug, Clone, PartialEq)]
pub struct TestInput {
    pub bindings: ChannelHistory,
}

impl TestInput {
    pub fn new(bindings: ChannelHistory) -> Self {
        TestInput { bindings }
    }

    pub fn horizon(&self) -> usize {
        self.bindings.horizon()
    }
}

/// One or more complete output histories; a run passes when it matches any
/// of them. Deterministic components normally have exactly one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpectedResult {
    pub alternatives: Vec<ChannelHistory>,
}

impl ExpectedResult {
    pub fn single(h: ChannelHistory) -> Self {
        ExpectedResult {
            alternatives: alloc::vec![h],
        }
    }

    /// Flattens into `(channel, stream)` tuples, tagged with the group index.
    pub fn tuples(&self) -> impl Iterator<Item = (usize, &str, &TimedStream)> {
        self.alternatives
            .iter()
            .enumerate()
            .flat_map(|(g, h)| h.iter().map(move |(c, s)| (g, c, s)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub name: String,
    pub input: TestInput,
    pub expected: ExpectedResult,
}

impl TestCase {
    /// Problems with the case's typing against `iface`.
    pub fn check_against(&self, iface: &SyntacticInterface) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if let Err(vs) = validate_history(&self.input.bindings, &iface.inputs) {
            errs.extend(vs.iter().map(|v| alloc::format!("input: {v}")));
        }
        for (g, h) in self.expected.alternatives.iter().enumerate() {
            if let Err(vs) = validate_history(h, &iface.outputs) {
                errs.extend(vs.iter().map(|v| alloc::format!("expected group {}: {v}", g + 1)));
            }
            if h.horizon() != self.input.horizon() {
                errs.push(alloc::format!(
                    "expected group {} has horizon {}, input has {}",
                    g + 1,
                    h.horizon(),
                    self.input.horizon()
                ));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub tick: usize,
    pub channel: String,
    pub expected: Value,
    pub actual: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickCell {
    pub channel: String,
    pub expected: Option<Value>,
    pub actual: Option<Value>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub tick: usize,
    pub cells: Vec<TickCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// Earliest divergence against the closest expected group; present
    /// whenever the status is `Fail`.
    pub first_divergence: Option<Divergence>,
    /// First divergence of each channel against that same group.
    pub per_channel: Vec<Divergence>,
    /// Index of the expected group that matched, or that the divergences
    /// refer to.
    pub group: Option<usize>,
    pub log: Vec<TickRecord>,
    pub error: Option<String>,
}

impl Verdict {
    pub fn error(msg: impl Into<String>) -> Self {
        Verdict {
            status: Status::Error,
            first_divergence: None,
            per_channel: Vec::new(),
            group: None,
            log: Vec::new(),
            error: Some(msg.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn compare_group(actual: &ChannelHistory, expected: &ChannelHistory, eps: f64) -> Result<(Vec<Divergence>, Vec<TickRecord>), String> {
    if actual.horizon() != expected.horizon() {
        return Err(alloc::format!(
            "horizon mismatch: actual {}, expected {}",
            actual.horizon(),
            expected.horizon()
        ));
    }
    for (c, s) in expected.iter() {
        match actual.get(c) {
            None => return Err(alloc::format!("no actual stream for expected channel `{c}`")),
            Some(a) if a.elem_type() != s.elem_type() => {
                return Err(alloc::format!(
                    "type mismatch on `{c}`: actual {}, expected {}",
                    a.elem_type(),
                    s.elem_type()
                ))
            }
            _ => {}
        }
    }
    let mut per_channel: BTreeMap<&str, Divergence> = BTreeMap::new();
    let mut log = Vec::with_capacity(actual.horizon());
    for t in 1..=actual.horizon() {
        let mut cells = Vec::new();
        for (c, a) in actual.iter() {
            let av = a.at(t).expect("in range");
            let ev = expected.get(c).map(|s| s.at(t).expect("in range"));
            let ok = ev.map(|e| av.approx_eq(e, eps)).unwrap_or(true);
            if let (false, Some(e)) = (ok, ev) {
                per_channel.entry(c).or_insert_with(|| Divergence {
                    tick: t,
                    channel: c.to_string(),
                    expected: e.clone(),
                    actual: av.clone(),
                });
            }
            cells.push(TickCell {
                channel: c.to_string(),
                expected: ev.cloned(),
                actual: Some(av.clone()),
                ok,
            });
        }
        log.push(TickRecord { tick: t, cells });
    }
    Ok((per_channel.into_values().collect(), log))
}

/// Compares an actual output history with every expected group; passes if
/// any group matches (reals within `eps`).
pub fn compare_histories(actual: &ChannelHistory, expected: &ExpectedResult, eps: f64) -> Verdict {
    if expected.alternatives.is_empty() {
        return Verdict::error("no expected result");
    }
    let mut best: Option<(usize, Vec<Divergence>, Vec<TickRecord>)> = None;
    for (g, h) in expected.alternatives.iter().enumerate() {
        let (divs, log) = match compare_group(actual, h, eps) {
            Ok(x) => x,
            Err(e) => return Verdict::error(e),
        };
        if divs.is_empty() {
            return Verdict {
                status: Status::Pass,
                first_divergence: None,
                per_channel: Vec::new(),
                group: Some(g),
                log,
                error: None,
            };
        }
        let first_tick = divs.iter().map(|d| d.tick).min().unwrap_or(0);
        // Report against the group that matches longest.
        let better = match &best {
            None => true,
            Some((_, bd, _)) => first_tick > bd.iter().map(|d| d.tick).min().unwrap_or(0),
        };
        if better {
            best = Some((g, divs, log));
        }
    }
    let (g, divs, log) = best.expect("at least one group");
    let first = divs
        .iter()
        .min_by(|a, b| a.tick.cmp(&b.tick).then_with(|| a.channel.cmp(&b.channel)))
        .cloned();
    Verdict {
        status: Status::Fail,
        first_divergence: first,
        per_channel: divs,
        group: Some(g),
        log,
        error: None,
    }
}

/// Runs `spec` on the case's input for its horizon and compares.
pub fn execute_test(spec: &ComponentSpec, tc: &TestCase, eps: f64, opts: SimOptions) -> (Option<ChannelHistory>, Verdict) {
    if let Err(errs) = tc.check_against(spec.interface()) {
        return (None, Verdict::error(errs.join("; ")));
    }
    match run(spec, &tc.input.bindings, tc.input.horizon(), opts) {
        Ok(actual) => {
            let v = compare_histories(&actual, &tc.expected, eps);
            (Some(actual), v)
        }
        Err(e) => (None, Verdict::error(e.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub name: String,
    pub actual: Option<ChannelHistory>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    /// Sorted by case name.
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }
}

pub fn suite_run(spec: &ComponentSpec, suite: &[TestCase], eps: f64, opts: SimOptions) -> SuiteReport {
    let mut report = SuiteReport::default();
    for tc in suite {
        let (actual, verdict) = execute_test(spec, tc, eps, opts);
        match verdict.status {
            Status::Pass => report.passed += 1,
            Status::Fail => report.failed += 1,
            Status::Error => report.errors += 1,
        }
        report.cases.push(CaseReport {
            name: tc.name.clone(),
            actual,
            verdict,
        });
    }
    report.cases.sort_by(|a, b| a.name.cmp(&b.name));
    report
}
