use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::{Level, Side};
use crate::component::{run, ComponentSpec, SimError, SimOptions};
use crate::expr::{Env, EvalError, Expr, Scope, Ty};
use crate::stream::{Channel, ChannelHistory, TimedStream};
use crate::value::{DataType, Value};

/// A channel of the abstract or the concrete component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairRef {
    pub level: Level,
    pub channel: String,
}

impl PairRef {
    pub fn parse(qualified: &str) -> Option<PairRef> {
        let (p, ch) = qualified.split_once('.')?;
        let level = match p {
            "a" => Level::Abstract,
            "c" => Level::Concrete,
            _ => return None,
        };
        Some(PairRef {
            level,
            channel: ch.to_string(),
        })
    }
}

impl fmt::Display for PairRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.level.prefix(), self.channel)
    }
}

/// A component with interface `(O_a × O_c ▶ bool)` (or the input analogue).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckerRef {
    pub component: ComponentSpec,
    /// Checker input channel fed by each paired channel.
    pub bindings: Vec<(String, PairRef)>,
    /// The checker's boolean output.
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RelationForm {
    /// Evaluated at every tick over `a.<channel>` / `c.<channel>` names.
    Predicate(Expr),
    Checker(Box<CheckerRef>),
}

/// RI or RO: a relation between abstract and concrete histories of one side.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpec {
    pub name: String,
    pub side: Side,
    pub abstract_channels: Vec<Channel>,
    pub concrete_channels: Vec<Channel>,
    pub form: RelationForm,
}

pub(crate) struct PairScope<'a> {
    pub abstract_channels: &'a [Channel],
    pub concrete_channels: &'a [Channel],
    pub labels: BTreeSet<String>,
}

impl<'a> PairScope<'a> {
    pub fn new(abstract_channels: &'a [Channel], concrete_channels: &'a [Channel], extra: &BTreeSet<String>) -> Self {
        let mut labels = extra.clone();
        for c in abstract_channels.iter().chain(concrete_channels) {
            if let DataType::Enum(ls) = &c.ctype {
                labels.extend(ls.iter().cloned());
            }
        }
        PairScope {
            abstract_channels,
            concrete_channels,
            labels,
        }
    }
}

impl Scope for PairScope<'_> {
    fn lookup(&self, name: &str) -> Option<&DataType> {
        let r = PairRef::parse(name)?;
        let side = match r.level {
            Level::Abstract => self.abstract_channels,
            Level::Concrete => self.concrete_channels,
        };
        side.iter().find(|c| c.name == r.channel).map(|c| &c.ctype)
    }

    fn is_label(&self, name: &str) -> bool {
        self.labels.contains(name)
    }
}

/// Per-tick lookup of `a.`/`c.` names in a pair of histories.
pub(crate) struct PairEnv<'a> {
    pub a: &'a ChannelHistory,
    pub c: &'a ChannelHistory,
    pub tick: usize,
}

impl Env for PairEnv<'_> {
    fn get(&self, name: &str) -> Option<&Value> {
        let (p, ch) = name.split_once('.')?;
        let h = match p {
            "a" => self.a,
            "c" => self.c,
            _ => return None,
        };
        h.get(ch)?.at(self.tick).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelationError {
    #[error("no stream for `{0}`")]
    Missing(PairRef),
    #[error("`{channel}` has type {found}, relation expects {expected}")]
    TypeMismatch {
        channel: PairRef,
        expected: DataType,
        found: DataType,
    },
    #[error("abstract horizon {abstract_horizon} differs from concrete horizon {concrete_horizon}")]
    HorizonMismatch { abstract_horizon: usize, concrete_horizon: usize },
    #[error("evaluation failed at tick {tick}: {source}")]
    Eval { tick: usize, source: EvalError },
    #[error("predicate is not boolean at tick {0}")]
    NotBool(usize),
    #[error("checker: {0}")]
    Checker(SimError),
    #[error("checker has no boolean output `{0}`")]
    NoVerdict(String),
}

/// Per-tick outcome of a relation and its fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEval {
    pub holds: bool,
    pub per_tick: Vec<bool>,
}

/// A single `false` anywhere fails the whole comparison.
pub fn fold_verdicts(per_tick: &[bool]) -> bool {
    per_tick.iter().all(|b| *b)
}

impl RelationSpec {
    /// Type-checks the relation against its channel lists.
    pub fn resolve(&mut self, extra_labels: &BTreeSet<String>) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        match &mut self.form {
            RelationForm::Predicate(e) => {
                let scope = PairScope::new(&self.abstract_channels, &self.concrete_channels, extra_labels);
                match e.resolve(&scope) {
                    Ok(Ty::Bool) => {}
                    Ok(t) => errs.push(alloc::format!("relation `{}` has type {t}, expected bool", self.name)),
                    Err(er) => errs.push(alloc::format!("relation `{}`: {er}", self.name)),
                }
            }
            RelationForm::Checker(ch) => {
                let iface = ch.component.interface();
                match iface.output(&ch.verdict) {
                    Some(c) if c.ctype == DataType::Bool => {}
                    _ => errs.push(alloc::format!(
                        "relation `{}`: checker `{}` has no boolean output `{}`",
                        self.name,
                        ch.component.name(),
                        ch.verdict
                    )),
                }
                for input in &iface.inputs {
                    let bound: Vec<_> = ch.bindings.iter().filter(|(n, _)| *n == input.name).collect();
                    if bound.len() != 1 {
                        errs.push(alloc::format!(
                            "relation `{}`: checker input `{}` must be bound exactly once",
                            self.name,
                            input.name
                        ));
                        continue;
                    }
                    let r = &bound[0].1;
                    let side = match r.level {
                        Level::Abstract => &self.abstract_channels,
                        Level::Concrete => &self.concrete_channels,
                    };
                    match side.iter().find(|c| c.name == r.channel) {
                        None => errs.push(alloc::format!("relation `{}`: unresolved channel `{r}`", self.name)),
                        Some(c) if c.ctype != input.ctype => errs.push(alloc::format!(
                            "relation `{}`: `{r}` has type {}, checker input `{}` has {}",
                            self.name,
                            c.ctype,
                            input.name,
                            input.ctype
                        )),
                        _ => {}
                    }
                }
                for (n, _) in &ch.bindings {
                    if iface.input(n).is_none() {
                        errs.push(alloc::format!("relation `{}`: checker has no input `{n}`", self.name));
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

fn check_side(h: &ChannelHistory, channels: &[Channel], level: Level) -> Result<(), RelationError> {
    for c in channels {
        let r = PairRef {
            level,
            channel: c.name.clone(),
        };
        let s = h.get(&c.name).ok_or_else(|| RelationError::Missing(r.clone()))?;
        if s.elem_type() != &c.ctype {
            return Err(RelationError::TypeMismatch {
                channel: r,
                expected: c.ctype.clone(),
                found: s.elem_type().clone(),
            });
        }
    }
    Ok(())
}

/// Evaluates `rel` tick by tick over the paired histories.
pub fn eval_relation(rel: &RelationSpec, a: &ChannelHistory, c: &ChannelHistory, opts: SimOptions) -> Result<RelationEval, RelationError> {
    check_side(a, &rel.abstract_channels, Level::Abstract)?;
    check_side(c, &rel.concrete_channels, Level::Concrete)?;
    if a.horizon() != c.horizon() {
        return Err(RelationError::HorizonMismatch {
            abstract_horizon: a.horizon(),
            concrete_horizon: c.horizon(),
        });
    }
    let n = a.horizon();
    let per_tick = match &rel.form {
        RelationForm::Predicate(e) => (1..=n)
            .map(|tick| match e.eval(&PairEnv { a, c, tick }) {
                Ok(Value::Bool(b)) => Ok(b),
                Ok(_) => Err(RelationError::NotBool(tick)),
                Err(source) => Err(RelationError::Eval { tick, source }),
            })
            .collect::<Result<Vec<_>, _>>()?,
        RelationForm::Checker(ch) => run_checker(ch, a, c, opts)?,
    };
    Ok(RelationEval {
        holds: fold_verdicts(&per_tick),
        per_tick,
    })
}

pub(crate) fn run_checker(ch: &CheckerRef, a: &ChannelHistory, c: &ChannelHistory, opts: SimOptions) -> Result<Vec<bool>, RelationError> {
    let mut input = ChannelHistory::new(a.horizon());
    for (name, r) in &ch.bindings {
        let h = match r.level {
            Level::Abstract => a,
            Level::Concrete => c,
        };
        let s: &TimedStream = h.get(&r.channel).ok_or_else(|| RelationError::Missing(r.clone()))?;
        input.insert(name.clone(), s.clone()).map_err(|_| RelationError::HorizonMismatch {
            abstract_horizon: a.horizon(),
            concrete_horizon: c.horizon(),
        })?;
    }
    let out = run(&ch.component, &input, a.horizon(), opts).map_err(RelationError::Checker)?;
    let s = out.get(&ch.verdict).ok_or_else(|| RelationError::NoVerdict(ch.verdict.clone()))?;
    s.values()
        .iter()
        .map(|v| v.as_bool().ok_or_else(|| RelationError::NoVerdict(ch.verdict.clone())))
        .collect()
}
