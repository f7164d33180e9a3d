//! Deterministic stream-processing components.
//!
//! An atomic component is a finite automaton over named states and typed
//! local variables. It consumes one message per input channel per tick and
//! emits one message per output channel. Composites wire subcomponents
//! together; they are simulated by flattening into their atomic parts.

mod causality;
mod compose;
mod sim;

pub use causality::{check_causality, CausalityCounterexample, CausalityOptions, CausalityOutcome, DomainChoice};
pub use compose::{compose_check, instantaneous_deps, CompositionViolation};
pub use sim::{initial_state, run, step, ComponentState, Determinism, SimError, SimOptions, Simulator};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Expr, ExprError, Scope};
use crate::stream::Channel;
use crate::value::{DataType, Value};

/// Whether outputs lag inputs by one tick (strict) or not (weak).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Causality {
    #[default]
    Strict,
    Weak,
}

impl fmt::Display for Causality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Causality::Strict => "strict",
            Causality::Weak => "weak",
        })
    }
}

/// The typed input and output channels of a component, `(I ▶ O)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SyntacticInterface {
    pub inputs: Vec<Channel>,
    pub outputs: Vec<Channel>,
}

impl SyntacticInterface {
    pub fn new(inputs: Vec<Channel>, outputs: Vec<Channel>) -> Self {
        SyntacticInterface { inputs, outputs }
    }

    pub fn input(&self, name: &str) -> Option<&Channel> {
        self.inputs.iter().find(|c| c.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&Channel> {
        self.outputs.iter().find(|c| c.name == name)
    }

    /// Duplicate names within a side, or names used on both sides.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for c in &self.inputs {
            if !seen.insert(c.name.as_str()) {
                out.push(alloc::format!("duplicate input channel `{}`", c.name));
            }
        }
        let mut seen_out = BTreeSet::new();
        for c in &self.outputs {
            if !seen_out.insert(c.name.as_str()) {
                out.push(alloc::format!("duplicate output channel `{}`", c.name));
            }
            if seen.contains(c.name.as_str()) {
                out.push(alloc::format!("channel `{}` is both input and output", c.name));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub ty: DataType,
    pub init: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// An output channel or a local variable.
    pub target: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub name: Option<String>,
    pub source: String,
    pub target: String,
    pub guard: Expr,
    /// Right-hand sides all read the pre-transition valuation.
    pub assignments: Vec<Assignment>,
}

impl Transition {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Transition {
            name: None,
            source: source.into(),
            target: target.into(),
            guard: Expr::tt(),
            assignments: Vec::new(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn when(mut self, guard: Expr) -> Self {
        self.guard = guard;
        self
    }

    pub fn assign(mut self, target: impl Into<String>, expr: Expr) -> Self {
        self.assignments.push(Assignment {
            target: target.into(),
            expr,
        });
        self
    }

    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| alloc::format!("#{index}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonSpec {
    pub name: String,
    pub interface: SyntacticInterface,
    pub states: Vec<String>,
    pub initial: String,
    pub variables: Vec<VarDecl>,
    /// Tried in declaration order.
    pub transitions: Vec<Transition>,
    /// Value emitted before anything is computed (tick 1 in strict mode) and
    /// latched until a transition assigns the output.
    pub output_init: BTreeMap<String, Value>,
    pub causality: Causality,
    /// When set, a tick without an enabled transition is an error instead of
    /// an implicit self-loop.
    pub total: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub component: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.component, self.message)
    }
}

struct GuardScope<'a> {
    spec: &'a AutomatonSpec,
    labels: &'a BTreeSet<String>,
}

impl Scope for GuardScope<'_> {
    fn lookup(&self, name: &str) -> Option<&DataType> {
        self.spec
            .interface
            .input(name)
            .map(|c| &c.ctype)
            .or_else(|| self.spec.variables.iter().find(|v| v.name == name).map(|v| &v.ty))
    }

    fn is_label(&self, name: &str) -> bool {
        self.labels.contains(name)
    }
}

impl AutomatonSpec {
    pub fn new(name: impl Into<String>) -> Self {
        AutomatonSpec {
            name: name.into(),
            interface: SyntacticInterface::default(),
            states: Vec::new(),
            initial: String::new(),
            variables: Vec::new(),
            transitions: Vec::new(),
            output_init: BTreeMap::new(),
            causality: Causality::Strict,
            total: false,
        }
    }

    pub fn input(mut self, name: &str, ty: DataType) -> Self {
        self.interface.inputs.push(Channel::new(name, ty));
        self
    }

    pub fn output(mut self, name: &str, ty: DataType, init: Option<Value>) -> Self {
        self.interface.outputs.push(Channel::new(name, ty));
        if let Some(v) = init {
            self.output_init.insert(name.to_string(), v);
        }
        self
    }

    pub fn variable(mut self, name: &str, ty: DataType, init: Value) -> Self {
        self.variables.push(VarDecl {
            name: name.to_string(),
            ty,
            init,
        });
        self
    }

    pub fn state(mut self, name: &str) -> Self {
        if self.states.is_empty() {
            self.initial = name.to_string();
        }
        self.states.push(name.to_string());
        self
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.initial = name.to_string();
        self
    }

    pub fn causality(mut self, c: Causality) -> Self {
        self.causality = c;
        self
    }

    pub fn transition(mut self, t: Transition) -> Self {
        self.transitions.push(t);
        self
    }

    /// Every enumeration label mentioned by the automaton's own types.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let types = self
            .interface
            .inputs
            .iter()
            .chain(&self.interface.outputs)
            .map(|c| &c.ctype)
            .chain(self.variables.iter().map(|v| &v.ty));
        for t in types {
            if let DataType::Enum(ls) = t {
                out.extend(ls.iter().cloned());
            }
        }
        out
    }

    /// Checks the automaton's invariants and type-checks its expressions,
    /// rewriting enumeration labels into literals. `extra_labels` widens the
    /// set of labels that bare identifiers may refer to.
    pub fn resolve(&mut self, extra_labels: &BTreeSet<String>) -> Result<(), Vec<SpecError>> {
        let mut errs = Vec::new();
        let name = self.name.clone();
        let mut err = |m: String| {
            errs.push(SpecError {
                component: name.clone(),
                message: m,
            })
        };
        for p in self.interface.problems() {
            err(p);
        }
        if self.states.is_empty() {
            err("automaton has no states".into());
        }
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                err(alloc::format!("duplicate state `{s}`"));
            }
        }
        if !self.states.contains(&self.initial) {
            err(alloc::format!("initial state `{}` is not declared", self.initial));
        }
        let mut vars = BTreeSet::new();
        for v in &self.variables {
            if !vars.insert(v.name.as_str()) || self.interface.input(&v.name).is_some() || self.interface.output(&v.name).is_some() {
                err(alloc::format!("variable `{}` clashes with another name", v.name));
            }
            if !v.ty.contains(&v.init) {
                err(alloc::format!("initial value `{}` of `{}` is outside {}", v.init, v.name, v.ty));
            }
        }
        for (o, v) in &self.output_init {
            match self.interface.output(o) {
                None => err(alloc::format!("initial value for undeclared output `{o}`")),
                Some(c) if !c.ctype.contains(v) => err(alloc::format!("initial value `{v}` of `{o}` is outside {}", c.ctype)),
                _ => {}
            }
        }
        if self.causality == Causality::Strict {
            for c in &self.interface.outputs {
                if !self.output_init.contains_key(&c.name) {
                    err(alloc::format!("strict output `{}` needs an initial value", c.name));
                }
            }
        }

        let mut labels = self.labels();
        labels.extend(extra_labels.iter().cloned());
        let mut transitions = core::mem::take(&mut self.transitions);
        {
            let scope = GuardScope {
                spec: self,
                labels: &labels,
            };
            for (i, t) in transitions.iter_mut().enumerate() {
                let tl = t.label(i);
                for s in [&t.source, &t.target] {
                    if !self.states.contains(s) {
                        err(alloc::format!("transition {tl}: unknown state `{s}`"));
                    }
                }
                match t.guard.resolve(&scope) {
                    Ok(crate::expr::Ty::Bool) => {}
                    Ok(ty) => err(alloc::format!("transition {tl}: guard has type {ty}, expected bool")),
                    Err(e) => err(alloc::format!("transition {tl}: {}", describe(&e))),
                }
                let mut targets = BTreeSet::new();
                for a in &mut t.assignments {
                    if !targets.insert(a.target.clone()) {
                        err(alloc::format!("transition {tl}: `{}` assigned twice", a.target));
                    }
                    let target_ty = self
                        .interface
                        .output(&a.target)
                        .map(|c| &c.ctype)
                        .or_else(|| self.variables.iter().find(|v| v.name == a.target).map(|v| &v.ty));
                    let Some(target_ty) = target_ty else {
                        err(alloc::format!("transition {tl}: unresolved assignment target `{}`", a.target));
                        continue;
                    };
                    match a.expr.resolve(&scope) {
                        Ok(ty) if ty.assignable_to(target_ty) => {}
                        Ok(ty) => err(alloc::format!(
                            "transition {tl}: cannot assign {ty} to `{}` of type {target_ty}",
                            a.target
                        )),
                        Err(e) => err(alloc::format!("transition {tl}: {}", describe(&e))),
                    }
                }
            }
        }
        self.transitions = transitions;
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

fn describe(e: &ExprError) -> String {
    e.to_string()
}

/// One end of a connector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    /// A channel of the enclosing composite's own interface.
    Boundary(String),
    /// A channel of a subcomponent instance.
    Port { instance: String, channel: String },
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Boundary(c) => f.write_str(c),
            Endpoint::Port { instance, channel } => write!(f, "{instance}.{channel}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connector {
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subcomponent {
    pub instance: String,
    pub spec: ComponentSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSpec {
    pub name: String,
    pub interface: SyntacticInterface,
    pub subcomponents: Vec<Subcomponent>,
    pub connectors: Vec<Connector>,
}

impl CompositeSpec {
    pub fn sub(&self, instance: &str) -> Option<&ComponentSpec> {
        self.subcomponents.iter().find(|s| s.instance == instance).map(|s| &s.spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentSpec {
    Automaton(AutomatonSpec),
    Composite(CompositeSpec),
}

impl ComponentSpec {
    pub fn name(&self) -> &str {
        match self {
            ComponentSpec::Automaton(a) => &a.name,
            ComponentSpec::Composite(c) => &c.name,
        }
    }

    pub fn interface(&self) -> &SyntacticInterface {
        match self {
            ComponentSpec::Automaton(a) => &a.interface,
            ComponentSpec::Composite(c) => &c.interface,
        }
    }

    /// Strict when no output depends on an input within the same tick.
    pub fn effective_causality(&self) -> Causality {
        match self {
            ComponentSpec::Automaton(a) => a.causality,
            ComponentSpec::Composite(_) => {
                if instantaneous_deps(self).is_empty() {
                    Causality::Strict
                } else {
                    Causality::Weak
                }
            }
        }
    }
}

impl From<AutomatonSpec> for ComponentSpec {
    fn from(a: AutomatonSpec) -> Self {
        ComponentSpec::Automaton(a)
    }
}

impl From<CompositeSpec> for ComponentSpec {
    fn from(c: CompositeSpec) -> Self {
        ComponentSpec::Composite(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::BinaryOp;

    #[test]
    fn resolve_flags_undeclared_names() {
        let t = DataType::int(0, 255).unwrap();
        let mut a = AutomatonSpec::new("A")
            .input("x", t.clone())
            .output("y", t, Some(Value::Int(0)))
            .state("S")
            .transition(
                Transition::new("S", "S")
                    .when(Expr::bin(BinaryOp::Gt, Expr::name("z"), Expr::lit(0i64)))
                    .assign("w", Expr::name("x")),
            );
        let errs = a.resolve(&BTreeSet::new()).unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("unresolved channel `z`")));
        assert!(errs.iter().any(|e| e.message.contains("unresolved assignment target `w`")));
    }

    #[test]
    fn strict_outputs_need_initial_values() {
        let mut a = AutomatonSpec::new("A").output("y", DataType::Bool, None).state("S");
        let errs = a.resolve(&BTreeSet::new()).unwrap_err();
        assert!(errs[0].message.contains("needs an initial value"));
        let mut weak = a.clone().causality(Causality::Weak);
        assert!(weak.resolve(&BTreeSet::new()).is_ok());
    }

    #[test]
    fn interface_problems() {
        let i = SyntacticInterface::new(
            alloc::vec![Channel::new("a", DataType::Bool), Channel::new("a", DataType::Bool)],
            alloc::vec![Channel::new("a", DataType::Bool)],
        );
        assert_eq!(i.problems().len(), 2);
    }
}
