use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::{compose_check, AutomatonSpec, Causality, ComponentSpec, Endpoint};
use crate::expr::{Env, EvalError};
use crate::stream::{validate_history, ChannelHistory, TimedStream, Violation};
use crate::value::{DataType, DomainError, Value};

/// How overlapping guards are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Determinism {
    /// Two enabled transitions in one tick are an error.
    #[default]
    Check,
    /// The first enabled transition in declaration order wins.
    Permissive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimOptions {
    pub determinism: Determinism,
}

impl SimOptions {
    pub fn permissive() -> Self {
        SimOptions {
            determinism: Determinism::Permissive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{component}: no enabled transition in state `{state}` at tick {tick}")]
    Stuck { component: String, state: String, tick: usize },
    #[error("{component}: transitions {} are all enabled in state `{state}` at tick {tick}", .transitions.join(", "))]
    Nondeterministic {
        component: String,
        state: String,
        transitions: Vec<String>,
        tick: usize,
    },
    #[error("{component}: evaluation failed at tick {tick}: {source}")]
    Eval { component: String, tick: usize, source: EvalError },
    #[error("{component}: guard of transition {transition} is not boolean at tick {tick}")]
    GuardNotBool {
        component: String,
        transition: String,
        tick: usize,
    },
    #[error("{component}: assignment to `{target}` at tick {tick}: {source}")]
    OutOfDomain {
        component: String,
        target: String,
        tick: usize,
        source: DomainError,
    },
    #[error("no message for input `{channel}` at tick {tick}")]
    MissingInput { channel: String, tick: usize },
    #[error("input `{channel}` at tick {tick}: {source}")]
    InputType { channel: String, tick: usize, source: DomainError },
    #[error("invalid wiring: {}", .0.join("; "))]
    Wiring(Vec<String>),
    #[error("invalid input history: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InputHistory(Vec<Violation>),
    #[error("input horizon {available} is shorter than the {requested} requested ticks")]
    HorizonTooShort { requested: usize, available: usize },
}

impl SimError {
    /// The tick the error occurred at, when it is tied to one.
    pub fn tick(&self) -> Option<usize> {
        match self {
            SimError::Stuck { tick, .. }
            | SimError::Nondeterministic { tick, .. }
            | SimError::Eval { tick, .. }
            | SimError::GuardNotBool { tick, .. }
            | SimError::OutOfDomain { tick, .. }
            | SimError::MissingInput { tick, .. }
            | SimError::InputType { tick, .. } => Some(*tick),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct AtomState {
    state: String,
    vars: Vec<Value>,
    latched: Vec<Value>,
}

/// The internal state of every automaton in a (possibly composite) component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentState {
    ticks: usize,
    paths: Vec<String>,
    atoms: Vec<AtomState>,
}

impl ComponentState {
    /// Number of ticks executed so far.
    pub fn ticks(&self) -> usize {
        self.ticks
    }

    /// Current control state of the automaton at `path` (the component's name
    /// for an atomic component, dotted instance names inside composites).
    pub fn control_state(&self, path: &str) -> Option<&str> {
        let i = self.paths.iter().position(|p| p == path)?;
        Some(&self.atoms[i].state)
    }

    pub fn variable(&self, spec: &ComponentSpec, path: &str, var: &str) -> Option<&Value> {
        let i = self.paths.iter().position(|p| p == path)?;
        let atom = find_atom(spec, path)?;
        let vi = atom.variables.iter().position(|v| v.name == var)?;
        self.atoms[i].vars.get(vi)
    }
}

fn find_atom<'a>(spec: &'a ComponentSpec, path: &str) -> Option<&'a AutomatonSpec> {
    match spec {
        ComponentSpec::Automaton(a) => (a.name == path).then_some(a),
        ComponentSpec::Composite(c) => {
            let (head, rest) = match path.split_once('.') {
                Some((h, r)) => (h, Some(r)),
                None => (path, None),
            };
            let sub = c.sub(head)?;
            match (sub, rest) {
                (ComponentSpec::Automaton(a), None) => Some(a),
                (ComponentSpec::Composite(_), Some(r)) => find_atom(sub, r),
                _ => None,
            }
        }
    }
}

struct Atom<'a> {
    path: String,
    spec: &'a AutomatonSpec,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq)]
enum Port {
    Unset,
    Slot(usize),
    Alias(usize),
}

struct Builder<'a> {
    ports: Vec<Port>,
    port_names: Vec<String>,
    atoms: Vec<(String, &'a AutomatonSpec, Vec<usize>, Vec<usize>)>,
    slots: usize,
}

impl<'a> Builder<'a> {
    fn port(&mut self, p: Port, name: String) -> usize {
        self.ports.push(p);
        self.port_names.push(name);
        self.ports.len() - 1
    }

    fn slot(&mut self) -> usize {
        self.slots += 1;
        self.slots - 1
    }

    fn add(&mut self, spec: &'a ComponentSpec, path: &str) -> Result<(Vec<usize>, Vec<usize>), Vec<String>> {
        let join = |c: &str| {
            if path.is_empty() {
                c.to_string()
            } else {
                alloc::format!("{path}.{c}")
            }
        };
        match spec {
            ComponentSpec::Automaton(a) => {
                let ins = a
                    .interface
                    .inputs
                    .iter()
                    .map(|c| self.port(Port::Unset, join(&c.name)))
                    .collect::<Vec<_>>();
                let outs = a
                    .interface
                    .outputs
                    .iter()
                    .map(|c| {
                        let s = self.slot();
                        self.port(Port::Slot(s), join(&c.name))
                    })
                    .collect::<Vec<_>>();
                let apath = if path.is_empty() { a.name.clone() } else { path.to_string() };
                self.atoms.push((apath, a, ins.clone(), outs.clone()));
                Ok((ins, outs))
            }
            ComponentSpec::Composite(c) => {
                let bin = c
                    .interface
                    .inputs
                    .iter()
                    .map(|ch| self.port(Port::Unset, join(&ch.name)))
                    .collect::<Vec<_>>();
                let bout = c
                    .interface
                    .outputs
                    .iter()
                    .map(|ch| self.port(Port::Unset, join(&ch.name)))
                    .collect::<Vec<_>>();
                let mut subs = BTreeMap::new();
                for s in &c.subcomponents {
                    let p = join(&s.instance);
                    subs.insert(s.instance.as_str(), (s, self.add(&s.spec, &p)?));
                }
                let mut errs = Vec::new();
                for conn in &c.connectors {
                    let producer = match &conn.from {
                        Endpoint::Boundary(ch) => c.interface.inputs.iter().position(|x| &x.name == ch).map(|i| bin[i]),
                        Endpoint::Port { instance, channel } => subs
                            .get(instance.as_str())
                            .and_then(|(s, (_, outs))| s.spec.interface().outputs.iter().position(|x| &x.name == channel).map(|i| outs[i])),
                    };
                    let consumer = match &conn.to {
                        Endpoint::Boundary(ch) => c.interface.outputs.iter().position(|x| &x.name == ch).map(|i| bout[i]),
                        Endpoint::Port { instance, channel } => subs
                            .get(instance.as_str())
                            .and_then(|(s, (ins, _))| s.spec.interface().inputs.iter().position(|x| &x.name == channel).map(|i| ins[i])),
                    };
                    match (producer, consumer) {
                        (Some(p), Some(q)) => {
                            if self.ports[q] != Port::Unset {
                                errs.push(alloc::format!("`{}` has more than one producer", self.port_names[q]));
                            }
                            self.ports[q] = Port::Alias(p);
                        }
                        _ => errs.push(alloc::format!("bad connector {} -> {}", conn.from, conn.to)),
                    }
                }
                for (_, (ins, _)) in subs.values() {
                    for &q in ins {
                        if self.ports[q] == Port::Unset {
                            errs.push(alloc::format!("unconnected consumer `{}`", self.port_names[q]));
                        }
                    }
                }
                for &q in &bout {
                    if self.ports[q] == Port::Unset {
                        errs.push(alloc::format!("unconnected consumer `{}`", self.port_names[q]));
                    }
                }
                if errs.is_empty() {
                    Ok((bin, bout))
                } else {
                    Err(errs)
                }
            }
        }
    }

    fn resolve(&self, mut p: usize) -> Option<usize> {
        for _ in 0..=self.ports.len() {
            match self.ports[p] {
                Port::Slot(s) => return Some(s),
                Port::Alias(q) => p = q,
                Port::Unset => return None,
            }
        }
        None
    }
}

/// A component compiled into a flat network of automata plus its current
/// state.
pub struct Simulator<'a> {
    spec: &'a ComponentSpec,
    opts: SimOptions,
    atoms: Vec<Atom<'a>>,
    slots: Vec<Value>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    strict: Vec<usize>,
    weak_order: Vec<usize>,
    state: ComponentState,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a ComponentSpec, opts: SimOptions) -> Result<Self, SimError> {
        if let ComponentSpec::Composite(c) = spec {
            compose_check(c).map_err(|vs| SimError::Wiring(vs.iter().map(|v| v.to_string()).collect()))?;
        }
        let mut b = Builder {
            ports: Vec::new(),
            port_names: Vec::new(),
            atoms: Vec::new(),
            slots: 0,
        };
        let (ins, outs) = b.add(spec, "").map_err(SimError::Wiring)?;
        for &p in &ins {
            let s = b.slot();
            b.ports[p] = Port::Slot(s);
        }
        let unresolved = |p: usize| SimError::Wiring(alloc::vec![alloc::format!("unresolved port `{}`", b.port_names[p])]);
        let inputs = ins
            .iter()
            .map(|&p| b.resolve(p).ok_or_else(|| unresolved(p)))
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = outs
            .iter()
            .map(|&p| b.resolve(p).ok_or_else(|| unresolved(p)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut atoms = Vec::new();
        for (path, a, ai, ao) in &b.atoms {
            atoms.push(Atom {
                path: path.clone(),
                spec: a,
                inputs: ai
                    .iter()
                    .map(|&p| b.resolve(p).ok_or_else(|| unresolved(p)))
                    .collect::<Result<_, _>>()?,
                outputs: ao
                    .iter()
                    .map(|&p| b.resolve(p).ok_or_else(|| unresolved(p)))
                    .collect::<Result<_, _>>()?,
            });
        }

        let mut producer = alloc::vec![None; b.slots];
        for (i, a) in atoms.iter().enumerate() {
            for &s in &a.outputs {
                producer[s] = Some(i);
            }
        }
        let strict: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].spec.causality == Causality::Strict).collect();
        let weak: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].spec.causality == Causality::Weak).collect();
        // Kahn's algorithm over weak-to-weak feeds, lowest index first.
        let deps = |w: usize| -> Vec<usize> {
            let mut d: Vec<usize> = atoms[w]
                .inputs
                .iter()
                .filter_map(|&s| producer[s])
                .filter(|&p| atoms[p].spec.causality == Causality::Weak)
                .collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        let mut done = alloc::vec![false; atoms.len()];
        let mut weak_order = Vec::new();
        while weak_order.len() < weak.len() {
            let next = weak.iter().copied().find(|&w| !done[w] && deps(w).iter().all(|&d| done[d]));
            match next {
                Some(w) => {
                    done[w] = true;
                    weak_order.push(w);
                }
                None => {
                    let stuck: Vec<String> = weak.iter().filter(|&&w| !done[w]).map(|&w| atoms[w].path.clone()).collect();
                    return Err(SimError::Wiring(alloc::vec![alloc::format!(
                        "zero-delay cycle through {}",
                        stuck.join(", ")
                    )]));
                }
            }
        }

        let state = fresh_state(&atoms);
        Ok(Simulator {
            spec,
            opts,
            slots: alloc::vec![Value::Bool(false); b.slots],
            atoms,
            inputs,
            outputs,
            strict,
            weak_order,
            state,
        })
    }

    pub fn spec(&self) -> &'a ComponentSpec {
        self.spec
    }

    pub fn state(&self) -> &ComponentState {
        &self.state
    }

    pub fn set_state(&mut self, state: ComponentState) {
        self.state = state;
    }

    pub fn reset(&mut self) {
        self.state = fresh_state(&self.atoms);
    }

    /// One tick with inputs given in interface order; returns outputs in
    /// interface order.
    pub fn step_slice(&mut self, inputs: &[Value]) -> Result<Vec<Value>, SimError> {
        let tick = self.state.ticks + 1;
        let iface = self.spec.interface();
        for (i, c) in iface.inputs.iter().enumerate() {
            let v = inputs.get(i).ok_or_else(|| SimError::MissingInput {
                channel: c.name.clone(),
                tick,
            })?;
            let v = c.ctype.admit(v.clone()).map_err(|source| SimError::InputType {
                channel: c.name.clone(),
                tick,
                source,
            })?;
            self.slots[self.inputs[i]] = v;
        }
        let mut next = self.state.clone();
        for &a in &self.strict {
            for (k, &s) in self.atoms[a].outputs.iter().enumerate() {
                self.slots[s] = next.atoms[a].latched[k].clone();
            }
        }
        for &a in &self.weak_order {
            fire(&self.atoms[a], &mut next.atoms[a], &self.slots, tick, self.opts)?;
            for (k, &s) in self.atoms[a].outputs.iter().enumerate() {
                self.slots[s] = next.atoms[a].latched[k].clone();
            }
        }
        for &a in &self.strict {
            fire(&self.atoms[a], &mut next.atoms[a], &self.slots, tick, self.opts)?;
        }
        next.ticks = tick;
        self.state = next;
        Ok(self.outputs.iter().map(|&s| self.slots[s].clone()).collect())
    }

    pub fn step(&mut self, inputs: &BTreeMap<String, Value>) -> Result<BTreeMap<String, Value>, SimError> {
        let iface = self.spec.interface();
        let tick = self.state.ticks + 1;
        let ordered = iface
            .inputs
            .iter()
            .map(|c| {
                inputs.get(&c.name).cloned().ok_or_else(|| SimError::MissingInput {
                    channel: c.name.clone(),
                    tick,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let outs = self.step_slice(&ordered)?;
        Ok(iface.outputs.iter().map(|c| c.name.clone()).zip(outs).collect())
    }

    /// Runs `n` ticks from the current state.
    pub fn run(&mut self, input: &ChannelHistory, n: usize) -> Result<ChannelHistory, SimError> {
        let iface = self.spec.interface();
        validate_history(input, &iface.inputs).map_err(SimError::InputHistory)?;
        if input.horizon() < n {
            return Err(SimError::HorizonTooShort {
                requested: n,
                available: input.horizon(),
            });
        }
        let streams: Vec<&TimedStream> = iface.inputs.iter().map(|c| input.get(&c.name).expect("validated")).collect();
        let mut out: Vec<Vec<Value>> = alloc::vec![Vec::with_capacity(n); iface.outputs.len()];
        let mut buf = Vec::with_capacity(streams.len());
        for t in 0..n {
            buf.clear();
            buf.extend(streams.iter().map(|s| s.values()[t].clone()));
            let o = self.step_slice(&buf)?;
            for (k, v) in o.into_iter().enumerate() {
                out[k].push(v);
            }
        }
        let mut h = ChannelHistory::new(n);
        for (c, vals) in iface.outputs.iter().zip(out) {
            let s = TimedStream::new(c.ctype.clone(), vals).expect("outputs are admitted on assignment");
            h.insert(c.name.clone(), s).expect("uniform horizon");
        }
        Ok(h)
    }
}

fn fresh_state(atoms: &[Atom<'_>]) -> ComponentState {
    ComponentState {
        ticks: 0,
        paths: atoms.iter().map(|a| a.path.clone()).collect(),
        atoms: atoms
            .iter()
            .map(|a| AtomState {
                state: a.spec.initial.clone(),
                vars: a.spec.variables.iter().map(|v| v.init.clone()).collect(),
                latched: a
                    .spec
                    .interface
                    .outputs
                    .iter()
                    .map(|c| a.spec.output_init.get(&c.name).cloned().unwrap_or_else(|| c.ctype.default_value()))
                    .collect(),
            })
            .collect(),
    }
}

struct AtomEnv<'b> {
    spec: &'b AutomatonSpec,
    inputs: &'b [usize],
    slots: &'b [Value],
    vars: &'b [Value],
}

impl Env for AtomEnv<'_> {
    fn get(&self, name: &str) -> Option<&Value> {
        if let Some(i) = self.spec.interface.inputs.iter().position(|c| c.name == name) {
            return Some(&self.slots[self.inputs[i]]);
        }
        let i = self.spec.variables.iter().position(|v| v.name == name)?;
        self.vars.get(i)
    }
}

fn fire(atom: &Atom<'_>, st: &mut AtomState, slots: &[Value], tick: usize, opts: SimOptions) -> Result<(), SimError> {
    let spec = atom.spec;
    let env = AtomEnv {
        spec,
        inputs: &atom.inputs,
        slots,
        vars: &st.vars,
    };
    let eval_err = |source| SimError::Eval {
        component: atom.path.clone(),
        tick,
        source,
    };
    let mut enabled: Vec<usize> = Vec::new();
    for (i, t) in spec.transitions.iter().enumerate() {
        if t.source != st.state {
            continue;
        }
        let g = t.guard.eval(&env).map_err(eval_err)?;
        match g {
            Value::Bool(true) => {
                enabled.push(i);
                if opts.determinism == Determinism::Permissive {
                    break;
                }
            }
            Value::Bool(false) => {}
            _ => {
                return Err(SimError::GuardNotBool {
                    component: atom.path.clone(),
                    transition: t.label(i),
                    tick,
                })
            }
        }
    }
    if enabled.len() > 1 {
        return Err(SimError::Nondeterministic {
            component: atom.path.clone(),
            state: st.state.clone(),
            transitions: enabled.iter().map(|&i| spec.transitions[i].label(i)).collect(),
            tick,
        });
    }
    let Some(&chosen) = enabled.first() else {
        if spec.total {
            return Err(SimError::Stuck {
                component: atom.path.clone(),
                state: st.state.clone(),
                tick,
            });
        }
        return Ok(());
    };
    let t = &spec.transitions[chosen];
    let values = t
        .assignments
        .iter()
        .map(|a| a.expr.eval(&env))
        .collect::<Result<Vec<_>, _>>()
        .map_err(eval_err)?;
    for (a, v) in t.assignments.iter().zip(values) {
        let (ty, slot): (&DataType, &mut Value) = if let Some(k) = spec.interface.outputs.iter().position(|c| c.name == a.target) {
            (&spec.interface.outputs[k].ctype, &mut st.latched[k])
        } else {
            let k = spec
                .variables
                .iter()
                .position(|v| v.name == a.target)
                .expect("targets are checked when the automaton is resolved");
            (&spec.variables[k].ty, &mut st.vars[k])
        };
        *slot = ty.admit(v).map_err(|source| SimError::OutOfDomain {
            component: atom.path.clone(),
            target: a.target.clone(),
            tick,
            source,
        })?;
    }
    st.state = t.target.clone();
    Ok(())
}

/// The state before the first tick.
pub fn initial_state(spec: &ComponentSpec) -> Result<ComponentState, SimError> {
    Ok(Simulator::new(spec, SimOptions::default())?.state.clone())
}

/// Executes one tick from `state`.
pub fn step(
    spec: &ComponentSpec,
    state: &ComponentState,
    inputs: &BTreeMap<String, Value>,
    opts: SimOptions,
) -> Result<(ComponentState, BTreeMap<String, Value>), SimError> {
    let mut sim = Simulator::new(spec, opts)?;
    sim.set_state(state.clone());
    let out = sim.step(inputs)?;
    Ok((sim.state.clone(), out))
}

/// Runs `n` ticks from the initial state.
pub fn run(spec: &ComponentSpec, input: &ChannelHistory, n: usize, opts: SimOptions) -> Result<ChannelHistory, SimError> {
    Simulator::new(spec, opts)?.run(input, n)
}
