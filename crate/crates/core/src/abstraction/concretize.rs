use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::galois::{g_member, GaloisError, GaloisSpec};
use crate::component::{run, ComponentSpec, SimError, SimOptions};
use crate::stream::{Channel, ChannelHistory, TimedStream};
use crate::testing::TestInput;
use crate::value::{DataType, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// One value, repeated at every tick.
    Const,
    Stream,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub ty: DataType,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Const(Value),
    Stream(TimedStream),
}

pub type ParamBinding = BTreeMap<String, ParamValue>;

/// A component that turns abstract inputs plus free parameters into concrete
/// inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcretizerSpec {
    pub name: String,
    pub component: ComponentSpec,
    pub params: Vec<ParamDecl>,
    pub abstract_inputs: Vec<Channel>,
    pub concrete_inputs: Vec<Channel>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConcretizeError {
    #[error("parameter `{0}` is not bound")]
    UnboundParam(String),
    #[error("no parameter `{0}`")]
    UnknownParam(String),
    #[error("parameter `{name}` expects a {expected}")]
    ParamKind { name: String, expected: &'static str },
    #[error("parameter `{name}`: {message}")]
    ParamType { name: String, message: String },
    #[error("stream for `{name}` has {len} ticks, input needs {needed}")]
    StreamTooShort { name: String, len: usize, needed: usize },
    #[error("abstract input lacks `{0}`")]
    MissingInput(String),
    #[error("concretizer: {0}")]
    Sim(SimError),
    #[error("{0}")]
    Galois(GaloisError),
}

impl ConcretizerSpec {
    /// Interface problems: the component must read exactly abstract inputs
    /// and parameters, and write the concrete inputs.
    pub fn check(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let iface = self.component.interface();
        for i in &iface.inputs {
            let abs = self.abstract_inputs.iter().find(|c| c.name == i.name).map(|c| &c.ctype);
            let par = self.params.iter().find(|p| p.name == i.name).map(|p| &p.ty);
            match (abs, par) {
                (Some(_), Some(_)) => errs.push(alloc::format!("`{}` is both an abstract input and a parameter", i.name)),
                (Some(t), None) | (None, Some(t)) if *t != i.ctype => {
                    errs.push(alloc::format!("`{}` has type {t}, concretizer reads {}", i.name, i.ctype))
                }
                (None, None) => errs.push(alloc::format!(
                    "concretizer input `{}` is neither an abstract input nor a parameter",
                    i.name
                )),
                _ => {}
            }
        }
        for p in &self.params {
            if iface.input(&p.name).is_none() {
                errs.push(alloc::format!("parameter `{}` is not a concretizer input", p.name));
            }
        }
        for c in &self.concrete_inputs {
            match iface.output(&c.name) {
                Some(o) if o.ctype == c.ctype => {}
                Some(o) => errs.push(alloc::format!("`{}` has type {}, concretizer writes {}", c.name, c.ctype, o.ctype)),
                None => errs.push(alloc::format!("concretizer does not write concrete input `{}`", c.name)),
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

fn param_stream(decl: &ParamDecl, v: &ParamValue, n: usize) -> Result<TimedStream, ConcretizeError> {
    let type_err = |message: String| ConcretizeError::ParamType {
        name: decl.name.clone(),
        message,
    };
    match (decl.kind, v) {
        (ParamKind::Const, ParamValue::Const(x)) => {
            let x = decl.ty.admit(x.clone()).map_err(|e| type_err(alloc::format!("{e}")))?;
            Ok(TimedStream::constant(decl.ty.clone(), x, n).expect("admitted"))
        }
        (ParamKind::Stream, ParamValue::Stream(s)) => {
            if s.horizon() < n {
                return Err(ConcretizeError::StreamTooShort {
                    name: decl.name.clone(),
                    len: s.horizon(),
                    needed: n,
                });
            }
            let vals = s.values()[..n]
                .iter()
                .map(|x| decl.ty.admit(x.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| type_err(alloc::format!("{e}")))?;
            Ok(TimedStream::new(decl.ty.clone(), vals).expect("admitted"))
        }
        (ParamKind::Const, _) => Err(ConcretizeError::ParamKind {
            name: decl.name.clone(),
            expected: "constant",
        }),
        (ParamKind::Stream, _) => Err(ConcretizeError::ParamKind {
            name: decl.name.clone(),
            expected: "stream",
        }),
    }
}

/// Runs the concretizer on `ta` with parameters `p`, giving a concrete test
/// input of the same horizon.
pub fn concretize(conc: &ConcretizerSpec, p: &ParamBinding, ta: &TestInput, opts: SimOptions) -> Result<TestInput, ConcretizeError> {
    let n = ta.horizon();
    for name in p.keys() {
        if !conc.params.iter().any(|d| d.name == *name) {
            return Err(ConcretizeError::UnknownParam(name.clone()));
        }
    }
    let mut x = ChannelHistory::new(n);
    for d in &conc.params {
        let v = p.get(&d.name).ok_or_else(|| ConcretizeError::UnboundParam(d.name.clone()))?;
        x.insert(d.name.clone(), param_stream(d, v, n)?).expect("uniform horizon");
    }
    for i in &conc.component.interface().inputs {
        if x.contains(&i.name) {
            continue;
        }
        let s = ta
            .bindings
            .get(&i.name)
            .ok_or_else(|| ConcretizeError::MissingInput(i.name.clone()))?;
        x.insert(i.name.clone(), s.clone()).expect("uniform horizon");
    }
    let y = run(&conc.component, &x, n, opts).map_err(ConcretizeError::Sim)?;
    Ok(TestInput::new(y.restrict(conc.concrete_inputs.iter().map(|c| c.name.as_str()))))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FinvOutcome {
    Ok {
        checked: usize,
    },
    /// The first sample whose concretization is not in `g` of its abstract
    /// input.
    Counterexample {
        index: usize,
        ta: TestInput,
        tc: TestInput,
    },
}

/// For each `(params, ta)` sample, checks that the concretized input lies in
/// `g(ta)`.
pub fn check_finv_in_g(
    gal: &GaloisSpec,
    conc: &ConcretizerSpec,
    samples: &[(ParamBinding, TestInput)],
    opts: SimOptions,
) -> Result<FinvOutcome, ConcretizeError> {
    for (index, (p, ta)) in samples.iter().enumerate() {
        let tc = concretize(conc, p, ta, opts)?;
        if !g_member(gal, &ta.bindings, &tc.bindings).map_err(ConcretizeError::Galois)? {
            return Ok(FinvOutcome::Counterexample { index, ta: ta.clone(), tc });
        }
    }
    Ok(FinvOutcome::Ok { checked: samples.len() })
}
