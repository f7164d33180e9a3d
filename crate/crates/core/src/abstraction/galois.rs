use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::relation::{CheckerRef, PairEnv, PairRef, PairScope, RelationForm, RelationSpec};
use super::{Level, Side};
use crate::component::{
    run, AutomatonSpec, Causality, ComponentSpec, CompositeSpec, Connector, Endpoint, SimError, SimOptions, Subcomponent,
    SyntacticInterface, Transition,
};
use crate::expr::{BinaryOp, EvalError, Expr, Ty};
use crate::stream::{Channel, ChannelHistory, TimedStream};
use crate::value::{DataType, Value};

/// `a.<target> := expr` where `expr` reads the concrete channels at the same
/// tick.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractionMap {
    pub side: Side,
    pub target: Channel,
    pub expr: Expr,
}

/// The abstraction function `f` from concrete to abstract histories.
#[derive(Debug, Clone, PartialEq)]
pub enum AbstractionFn {
    ElementWise(Vec<AbstractionMap>),
    /// A component reading concrete channels and writing abstract ones.
    Component(ComponentSpec),
}

/// Membership test for the concretization `g`: the abstract history `a` is
/// related to the concrete history `c` when `pred` holds at every tick.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberClause {
    pub side: Side,
    pub target: String,
    pub pred: Expr,
}

/// Finite sets of histories of exactly `horizon` ticks, built from
/// per-channel value lists.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Universe {
    pub horizon: usize,
    pub concrete: Vec<(Channel, Vec<Value>)>,
    pub abstract_values: Vec<(Channel, Vec<Value>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaloisSpec {
    pub name: String,
    pub abstract_channels: Vec<Channel>,
    pub concrete_channels: Vec<Channel>,
    pub f: AbstractionFn,
    pub members: Vec<MemberClause>,
    pub universe: Option<Universe>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaloisError {
    #[error("no abstraction map applies to channels {0:?}")]
    NoApplicableMap(Vec<String>),
    #[error("no membership clause applies")]
    NoApplicableClause,
    #[error("`{channel}` at tick {tick}: {source}")]
    Eval { channel: String, tick: usize, source: EvalError },
    #[error("`{channel}` at tick {tick}: {value} is outside {ty}")]
    OutOfDomain {
        channel: String,
        tick: usize,
        value: Value,
        ty: DataType,
    },
    #[error("membership clause for `{0}` is not boolean")]
    NotBool(String),
    #[error("abstract horizon {0} differs from concrete horizon {1}")]
    HorizonMismatch(usize, usize),
    #[error("abstraction component: {0}")]
    Sim(SimError),
    #[error("`{0}` has no universe")]
    NoUniverse(String),
    #[error("{side} universe has {elements} elements, cap is {cap}")]
    TooManyElements { side: &'static str, elements: String, cap: usize },
    #[error("universe horizon {horizon} exceeds cap {cap}")]
    HorizonTooLong { horizon: usize, cap: usize },
    #[error("f maps a universe element outside the abstract universe: {0}")]
    ImageOutsideUniverse(String),
    #[error("`{0}` has a component abstraction; supply a checker component instead")]
    NotElementWise(String),
}

impl GaloisSpec {
    /// Type-checks maps, clauses and universe values.
    pub fn resolve(&mut self, extra_labels: &BTreeSet<String>) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let scope = PairScope::new(&self.abstract_channels, &self.concrete_channels, extra_labels);
        let name = &self.name;
        match &mut self.f {
            AbstractionFn::ElementWise(maps) => {
                for m in maps.iter_mut() {
                    if !self.abstract_channels.iter().any(|c| c.name == m.target.name) {
                        errs.push(alloc::format!("galois `{name}`: unknown abstract channel `{}`", m.target.name));
                    }
                    let resolved = m.expr.resolve(&scope);
                    if let Some(n) = m.expr.names().into_iter().find(|n| !n.starts_with("c.")) {
                        errs.push(alloc::format!(
                            "galois `{name}`: map for `{}` reads `{n}`, only `c.` channels allowed",
                            m.target.name
                        ));
                        continue;
                    }
                    match resolved {
                        Ok(t) if t.assignable_to(&m.target.ctype) => {}
                        Ok(t) => errs.push(alloc::format!(
                            "galois `{name}`: map for `{}` has type {t}, expected {}",
                            m.target.name,
                            m.target.ctype
                        )),
                        Err(e) => errs.push(alloc::format!("galois `{name}`: {e}")),
                    }
                }
            }
            AbstractionFn::Component(spec) => {
                let iface = spec.interface();
                for i in &iface.inputs {
                    if !self.concrete_channels.iter().any(|c| c == i) {
                        errs.push(alloc::format!(
                            "galois `{name}`: abstraction input `{}` is not a concrete channel",
                            i.name
                        ));
                    }
                }
                for o in &iface.outputs {
                    if !self.abstract_channels.iter().any(|c| c == o) {
                        errs.push(alloc::format!(
                            "galois `{name}`: abstraction output `{}` is not an abstract channel",
                            o.name
                        ));
                    }
                }
            }
        }
        for m in &mut self.members {
            if !self.abstract_channels.iter().any(|c| c.name == m.target) {
                errs.push(alloc::format!("galois `{name}`: unknown abstract channel `{}`", m.target));
            }
            match m.pred.resolve(&scope) {
                Ok(Ty::Bool) => {}
                Ok(t) => errs.push(alloc::format!(
                    "galois `{name}`: clause for `{}` has type {t}, expected bool",
                    m.target
                )),
                Err(e) => errs.push(alloc::format!("galois `{name}`: {e}")),
            }
        }
        if let Some(u) = &mut self.universe {
            for (list, channels, what) in [
                (&mut u.concrete, &self.concrete_channels, "concrete"),
                (&mut u.abstract_values, &self.abstract_channels, "abstract"),
            ] {
                for (ch, vals) in list.iter_mut() {
                    match channels.iter().find(|c| c.name == ch.name) {
                        None => errs.push(alloc::format!(
                            "galois `{name}`: universe names unknown {what} channel `{}`",
                            ch.name
                        )),
                        Some(decl) => {
                            ch.ctype = decl.ctype.clone();
                            for v in vals.iter_mut() {
                                match decl.ctype.admit(v.clone()) {
                                    Ok(x) => *v = x,
                                    Err(e) => errs.push(alloc::format!("galois `{name}`: universe value for `{}`: {e}", ch.name)),
                                }
                            }
                            vals.sort();
                            vals.dedup();
                        }
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

fn concrete_refs(e: &Expr) -> impl Iterator<Item = &str> {
    e.names().into_iter().filter_map(|n| n.strip_prefix("c."))
}

fn apply_maps(gal: &GaloisSpec, c: &ChannelHistory, side: Option<Side>) -> Result<ChannelHistory, GaloisError> {
    match &gal.f {
        AbstractionFn::ElementWise(_) if c.is_empty() => Ok(ChannelHistory::new(c.horizon())),
        AbstractionFn::ElementWise(maps) => {
            let empty = ChannelHistory::new(c.horizon());
            let mut out = ChannelHistory::new(c.horizon());
            for m in maps {
                if side.is_some_and(|s| s != m.side) || !concrete_refs(&m.expr).all(|n| c.contains(n)) {
                    continue;
                }
                let mut vals = Vec::with_capacity(c.horizon());
                for tick in 1..=c.horizon() {
                    let v = m.expr.eval(&PairEnv { a: &empty, c, tick }).map_err(|source| GaloisError::Eval {
                        channel: m.target.name.clone(),
                        tick,
                        source,
                    })?;
                    let v = m.target.ctype.admit(v).map_err(|e| GaloisError::OutOfDomain {
                        channel: m.target.name.clone(),
                        tick,
                        value: e.value,
                        ty: m.target.ctype.clone(),
                    })?;
                    vals.push(v);
                }
                let s = TimedStream::new(m.target.ctype.clone(), vals).expect("admitted values");
                out.insert(m.target.name.clone(), s).expect("uniform horizon");
            }
            if out.is_empty() {
                return Err(GaloisError::NoApplicableMap(c.channels().map(String::from).collect()));
            }
            Ok(out)
        }
        AbstractionFn::Component(spec) => {
            let inputs = spec.interface().inputs.iter().map(|i| i.name.as_str());
            let x = c.restrict(inputs);
            run(spec, &x, c.horizon(), SimOptions::default()).map_err(GaloisError::Sim)
        }
    }
}

/// `f(c)`: every abstract channel whose map only reads channels present in `c`.
pub fn apply_f(gal: &GaloisSpec, c: &ChannelHistory) -> Result<ChannelHistory, GaloisError> {
    apply_maps(gal, c, None)
}

/// `f` restricted to the output-side maps.
pub fn abstract_output(gal: &GaloisSpec, c_out: &ChannelHistory) -> Result<ChannelHistory, GaloisError> {
    apply_maps(gal, c_out, Some(Side::Output))
}

/// Whether `a ∈ g(c)`: every membership clause whose channels are all
/// present holds at every tick.
pub fn g_member(gal: &GaloisSpec, a: &ChannelHistory, c: &ChannelHistory) -> Result<bool, GaloisError> {
    if a.horizon() != c.horizon() {
        return Err(GaloisError::HorizonMismatch(a.horizon(), c.horizon()));
    }
    let mut applied = false;
    for m in &gal.members {
        let present = m.pred.names().into_iter().all(|n| match PairRef::parse(n) {
            Some(r) => match r.level {
                Level::Abstract => a.contains(&r.channel),
                Level::Concrete => c.contains(&r.channel),
            },
            None => false,
        });
        if !present {
            continue;
        }
        applied = true;
        for tick in 1..=a.horizon() {
            match m.pred.eval(&PairEnv { a, c, tick }) {
                Ok(Value::Bool(true)) => {}
                Ok(Value::Bool(false)) => return Ok(false),
                Ok(_) => return Err(GaloisError::NotBool(m.target.clone())),
                Err(source) => {
                    return Err(GaloisError::Eval {
                        channel: m.target.clone(),
                        tick,
                        source,
                    })
                }
            }
        }
    }
    if applied {
        Ok(true)
    } else {
        Err(GaloisError::NoApplicableClause)
    }
}

/// A weakly causal component with inputs `a_<o>` for every output-side map
/// target and `c_<x>` for every concrete channel those maps read, emitting
/// `ok` at each tick where `f` of the concrete values equals the abstract
/// ones.
pub fn build_output_checker(gal: &GaloisSpec) -> Result<ComponentSpec, GaloisError> {
    let AbstractionFn::ElementWise(maps) = &gal.f else {
        return Err(GaloisError::NotElementWise(gal.name.clone()));
    };
    let mut spec = AutomatonSpec::new(alloc::format!("{}Check", gal.name))
        .causality(Causality::Weak)
        .state("S");
    let mut read: Vec<&Channel> = Vec::new();
    let mut verdict: Option<Expr> = None;
    for m in maps.iter().filter(|m| m.side == Side::Output) {
        spec = spec.input(&alloc::format!("a_{}", m.target.name), m.target.ctype.clone());
        for n in concrete_refs(&m.expr) {
            if let Some(ch) = gal.concrete_channels.iter().find(|c| c.name == n) {
                if !read.contains(&ch) {
                    read.push(ch);
                }
            }
        }
        let rhs = m.expr.rename(&|n| n.strip_prefix("c.").map(|x| alloc::format!("c_{x}")));
        let eq = Expr::bin(BinaryOp::Eq, Expr::name(alloc::format!("a_{}", m.target.name)), rhs);
        verdict = Some(match verdict {
            None => eq,
            Some(v) => Expr::bin(BinaryOp::And, v, eq),
        });
    }
    for ch in read {
        spec = spec.input(&alloc::format!("c_{}", ch.name), ch.ctype.clone());
    }
    let spec = spec
        .output("ok", DataType::Bool, Some(Value::Bool(true)))
        .transition(Transition::new("S", "S").assign("ok", verdict.unwrap_or_else(Expr::tt)));
    Ok(spec.into())
}

/// [`build_output_checker`] wrapped as an output relation, binding `a_<o>`
/// to `a.<o>` and `c_<x>` to `c.<x>`.
pub fn output_checker_relation(
    gal: &GaloisSpec,
    name: &str,
    abstract_outputs: &[Channel],
    concrete_outputs: &[Channel],
) -> Result<RelationSpec, GaloisError> {
    let component = build_output_checker(gal)?;
    let bindings = component
        .interface()
        .inputs
        .iter()
        .map(|i| {
            let (level, ch) = match i.name.split_at(2) {
                ("a_", ch) => (Level::Abstract, ch),
                (_, ch) => (Level::Concrete, ch),
            };
            (
                i.name.clone(),
                PairRef {
                    level,
                    channel: ch.to_string(),
                },
            )
        })
        .collect();
    Ok(RelationSpec {
        name: name.to_string(),
        side: Side::Output,
        abstract_channels: abstract_outputs.to_vec(),
        concrete_channels: concrete_outputs.to_vec(),
        form: RelationForm::Checker(Box::new(CheckerRef {
            component,
            bindings,
            verdict: "ok".into(),
        })),
    })
}

/// The output relation induced by `f`: `a.o == f(c).o` on every output
/// channel. Element-wise maps give a predicate; a component `f` gives a
/// checker that runs it next to an equality test.
pub fn derive_output_relation(gal: &GaloisSpec, name: &str, abstract_outputs: &[Channel], concrete_outputs: &[Channel]) -> RelationSpec {
    let form = match &gal.f {
        AbstractionFn::ElementWise(maps) => {
            let mut conj: Option<Expr> = None;
            for m in maps.iter().filter(|m| m.side == Side::Output) {
                let eq = Expr::bin(BinaryOp::Eq, Expr::name(alloc::format!("a.{}", m.target.name)), m.expr.clone());
                conj = Some(match conj {
                    None => eq,
                    Some(c) => Expr::bin(BinaryOp::And, c, eq),
                });
            }
            RelationForm::Predicate(conj.unwrap_or_else(Expr::tt))
        }
        AbstractionFn::Component(spec) => RelationForm::Checker(Box::new(output_checker(spec, abstract_outputs))),
    };
    RelationSpec {
        name: name.to_string(),
        side: Side::Output,
        abstract_channels: abstract_outputs.to_vec(),
        concrete_channels: concrete_outputs.to_vec(),
        form,
    }
}

fn output_checker(f: &ComponentSpec, abstract_outputs: &[Channel]) -> CheckerRef {
    let f_iface = f.interface();
    let compared: Vec<&Channel> = f_iface.outputs.iter().filter(|o| abstract_outputs.contains(o)).collect();
    let mut cmp = AutomatonSpec::new("Compare").causality(Causality::Weak).state("S");
    let mut verdict: Option<Expr> = None;
    for o in &compared {
        cmp = cmp
            .input(&alloc::format!("f_{}", o.name), o.ctype.clone())
            .input(&alloc::format!("a_{}", o.name), o.ctype.clone());
        let eq = Expr::bin(
            BinaryOp::Eq,
            Expr::name(alloc::format!("f_{}", o.name)),
            Expr::name(alloc::format!("a_{}", o.name)),
        );
        verdict = Some(match verdict {
            None => eq,
            Some(v) => Expr::bin(BinaryOp::And, v, eq),
        });
    }
    let cmp = cmp
        .output("ok", DataType::Bool, Some(Value::Bool(true)))
        .transition(Transition::new("S", "S").assign("ok", verdict.unwrap_or_else(Expr::tt)));

    let mut inputs: Vec<Channel> = f_iface
        .inputs
        .iter()
        .map(|i| Channel::new(alloc::format!("c_{}", i.name), i.ctype.clone()))
        .collect();
    inputs.extend(
        compared
            .iter()
            .map(|o| Channel::new(alloc::format!("a_{}", o.name), o.ctype.clone())),
    );
    let mut connectors: Vec<Connector> = f_iface
        .inputs
        .iter()
        .map(|i| Connector {
            from: Endpoint::Boundary(alloc::format!("c_{}", i.name)),
            to: Endpoint::Port {
                instance: "f".into(),
                channel: i.name.clone(),
            },
        })
        .collect();
    for o in &compared {
        connectors.push(Connector {
            from: Endpoint::Port {
                instance: "f".into(),
                channel: o.name.clone(),
            },
            to: Endpoint::Port {
                instance: "cmp".into(),
                channel: alloc::format!("f_{}", o.name),
            },
        });
        connectors.push(Connector {
            from: Endpoint::Boundary(alloc::format!("a_{}", o.name)),
            to: Endpoint::Port {
                instance: "cmp".into(),
                channel: alloc::format!("a_{}", o.name),
            },
        });
    }
    connectors.push(Connector {
        from: Endpoint::Port {
            instance: "cmp".into(),
            channel: "ok".into(),
        },
        to: Endpoint::Boundary("ok".into()),
    });
    // The abstraction component may leave some outputs unread; that is fine
    // because only consumers need producers.
    let checker = CompositeSpec {
        name: alloc::format!("{}Check", f.name()),
        interface: SyntacticInterface::new(inputs, alloc::vec![Channel::new("ok", DataType::Bool)]),
        subcomponents: alloc::vec![
            Subcomponent {
                instance: "f".into(),
                spec: f.clone(),
            },
            Subcomponent {
                instance: "cmp".into(),
                spec: cmp.into(),
            },
        ],
        connectors,
    };
    let mut bindings: Vec<(String, PairRef)> = f_iface
        .inputs
        .iter()
        .map(|i| {
            (
                alloc::format!("c_{}", i.name),
                PairRef {
                    level: Level::Concrete,
                    channel: i.name.clone(),
                },
            )
        })
        .collect();
    bindings.extend(compared.iter().map(|o| {
        (
            alloc::format!("a_{}", o.name),
            PairRef {
                level: Level::Abstract,
                channel: o.name.clone(),
            },
        )
    }));
    CheckerRef {
        component: checker.into(),
        bindings,
        verdict: "ok".into(),
    }
}

/// Which adjunction law the lifted check compares against `f(Tc) ⊆ Ta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// `Tc ⊆ g(Ta)`, with `g(Ta) = {c | ∃a ∈ Ta. a ∈ g(c)}`.
    #[default]
    Standard,
    /// `Ta ⊆ g(Tc)`, with `g(Tc) = {a | ∃c ∈ Tc. a ∈ g(c)}`.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaloisOptions {
    pub max_elements: usize,
    pub max_horizon: usize,
    pub orientation: Orientation,
}

impl Default for GaloisOptions {
    fn default() -> Self {
        GaloisOptions {
            max_elements: 12,
            max_horizon: 3,
            orientation: Orientation::Standard,
        }
    }
}

/// First pair of sets, in ascending bitmask order with the concrete set as
/// the outer loop, where the two sides of the law disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct GaloisCounterexample {
    pub orientation: Orientation,
    pub concrete_set: Vec<ChannelHistory>,
    pub abstract_set: Vec<ChannelHistory>,
    /// Whether `f(Tc) ⊆ Ta`.
    pub f_side: bool,
    /// Whether the `g` side of the law holds.
    pub g_side: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GaloisOutcome {
    Ok {
        concrete_elements: usize,
        abstract_elements: usize,
        pairs_checked: u64,
    },
    Counterexample(Box<GaloisCounterexample>),
}

impl GaloisOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, GaloisOutcome::Ok { .. })
    }
}

fn count(values: &[(Channel, Vec<Value>)], horizon: usize) -> Option<u128> {
    if values.is_empty() {
        return Some(0);
    }
    let per_tick = values.iter().try_fold(1u128, |acc, (_, v)| acc.checked_mul(v.len() as u128))?;
    (0..horizon).try_fold(1u128, |acc, _| acc.checked_mul(per_tick))
}

/// Every history over the listed channels with exactly `horizon` ticks, in
/// lexicographic order (earlier ticks and earlier channels vary slowest).
pub(crate) fn enumerate_histories(values: &[(Channel, Vec<Value>)], horizon: usize) -> Vec<ChannelHistory> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut ticks: Vec<Vec<Value>> = alloc::vec![Vec::new()];
    for (_, vals) in values {
        ticks = ticks
            .iter()
            .flat_map(|p| {
                vals.iter().map(move |v| {
                    let mut p = p.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    let mut seqs: Vec<Vec<&Vec<Value>>> = alloc::vec![Vec::new()];
    for _ in 0..horizon {
        seqs = seqs
            .iter()
            .flat_map(|p| {
                ticks.iter().map(move |t| {
                    let mut p = p.clone();
                    p.push(t);
                    p
                })
            })
            .collect();
    }
    seqs.into_iter()
        .map(|seq| {
            let mut h = ChannelHistory::new(horizon);
            for (k, (ch, _)) in values.iter().enumerate() {
                let s =
                    TimedStream::new(ch.ctype.clone(), seq.iter().map(|t| t[k].clone()).collect()).expect("universe values are admitted");
                h.insert(ch.name.clone(), s).expect("uniform horizon");
            }
            h
        })
        .collect()
}

fn members(universe: &[ChannelHistory], mask: u64) -> Vec<ChannelHistory> {
    universe
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, h)| h.clone())
        .collect()
}

/// Checks `f(Tc) ⊆ Ta ⟺ Tc ⊆ g(Ta)` (or the literal variant) for every
/// pair of subsets of the finite universes, refusing universes above the
/// caps.
pub fn verify_galois(gal: &GaloisSpec, opts: &GaloisOptions) -> Result<GaloisOutcome, GaloisError> {
    let u = gal.universe.as_ref().ok_or_else(|| GaloisError::NoUniverse(gal.name.clone()))?;
    if u.horizon > opts.max_horizon {
        return Err(GaloisError::HorizonTooLong {
            horizon: u.horizon,
            cap: opts.max_horizon,
        });
    }
    // Bitmasks are u64, so 63 elements per side is the hard ceiling.
    let cap = opts.max_elements.min(63);
    for (side, vals) in [("concrete", &u.concrete), ("abstract", &u.abstract_values)] {
        match count(vals, u.horizon) {
            Some(n) if n <= cap as u128 => {}
            n => {
                return Err(GaloisError::TooManyElements {
                    side,
                    elements: n.map_or_else(|| "too many".into(), |n| n.to_string()),
                    cap,
                })
            }
        }
    }
    let uc = enumerate_histories(&u.concrete, u.horizon);
    let ua = enumerate_histories(&u.abstract_values, u.horizon);
    let abstract_names: Vec<&str> = u.abstract_values.iter().map(|(c, _)| c.name.as_str()).collect();

    // f as a map from concrete index to abstract index.
    let mut f_img = Vec::with_capacity(uc.len());
    for c in &uc {
        let image = apply_f(gal, c)?.restrict(abstract_names.iter().copied());
        let j = ua
            .iter()
            .position(|a| *a == image)
            .ok_or_else(|| GaloisError::ImageOutsideUniverse(format_history(&image)))?;
        f_img.push(j);
    }
    // member[j] = concrete elements c with a_j ∈ g(c).
    let mut member = alloc::vec![0u64; ua.len()];
    for (j, a) in ua.iter().enumerate() {
        for (i, c) in uc.iter().enumerate() {
            if g_member(gal, a, c)? {
                member[j] |= 1 << i;
            }
        }
    }

    let m = uc.len();
    let k = ua.len();
    let full_c: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let full_a: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    // g over abstract sets, or over concrete sets for the literal variant.
    let g_set: Vec<u64> = match opts.orientation {
        Orientation::Standard => (0..=full_a)
            .map(|ta| (0..k).filter(|j| ta >> j & 1 == 1).fold(0, |acc, j| acc | member[j]))
            .collect(),
        Orientation::Literal => (0..=full_c)
            .map(|tc| (0..k).filter(|&j| member[j] & tc != 0).fold(0u64, |acc, j| acc | 1 << j))
            .collect(),
    };
    let mut pairs = 0u64;
    for tc in 0..=full_c {
        let f_tc = (0..m).filter(|i| tc >> i & 1 == 1).fold(0u64, |acc, i| acc | 1 << f_img[i]);
        for ta in 0..=full_a {
            pairs += 1;
            let lhs = f_tc & !ta == 0;
            let rhs = match opts.orientation {
                Orientation::Standard => tc & !g_set[ta as usize] == 0,
                Orientation::Literal => ta & !g_set[tc as usize] == 0,
            };
            if lhs != rhs {
                return Ok(GaloisOutcome::Counterexample(Box::new(GaloisCounterexample {
                    orientation: opts.orientation,
                    concrete_set: members(&uc, tc),
                    abstract_set: members(&ua, ta),
                    f_side: lhs,
                    g_side: rhs,
                })));
            }
        }
    }
    Ok(GaloisOutcome::Ok {
        concrete_elements: m,
        abstract_elements: k,
        pairs_checked: pairs,
    })
}

pub(crate) fn format_history(h: &ChannelHistory) -> String {
    let parts: Vec<String> = h.iter().map(|(c, s)| alloc::format!("{c}={s}")).collect();
    alloc::format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn encoder_galois(weakened: bool) -> GaloisSpec {
        let map_in = AbstractionMap {
            side: Side::Input,
            target: Channel::new("i", DataType::Bool),
            expr: Expr::bin(BinaryOp::Ge, Expr::name("c.i"), Expr::lit(Value::real(0.0))),
        };
        let cmp = if weakened { BinaryOp::Gt } else { BinaryOp::Ge };
        let mut g = GaloisSpec {
            name: "G".into(),
            abstract_channels: vec![Channel::new("i", DataType::Bool)],
            concrete_channels: vec![Channel::new("i", DataType::Real)],
            f: AbstractionFn::ElementWise(vec![map_in]),
            members: vec![MemberClause {
                side: Side::Input,
                target: "i".into(),
                pred: Expr::bin(
                    BinaryOp::Eq,
                    Expr::name("a.i"),
                    Expr::bin(cmp, Expr::name("c.i"), Expr::lit(Value::real(0.0))),
                ),
            }],
            universe: Some(Universe {
                horizon: 1,
                concrete: vec![(
                    Channel::new("i", DataType::Real),
                    vec![Value::real(-1.0), Value::real(0.0), Value::real(2.5)],
                )],
                abstract_values: vec![(Channel::new("i", DataType::Bool), vec![true.into(), false.into()])],
            }),
        };
        g.resolve(&BTreeSet::new()).unwrap();
        g
    }

    #[test]
    fn exact_preimage_is_a_connection() {
        let out = verify_galois(&encoder_galois(false), &GaloisOptions::default()).unwrap();
        assert_eq!(
            out,
            GaloisOutcome::Ok {
                concrete_elements: 3,
                abstract_elements: 2,
                pairs_checked: 32
            }
        );
    }

    #[test]
    fn weakened_g_is_caught() {
        match verify_galois(&encoder_galois(true), &GaloisOptions::default()).unwrap() {
            GaloisOutcome::Counterexample(cx) => {
                // 0.0 maps to true, yet g now places it under false.
                assert!(!cx.f_side && cx.g_side);
                assert_eq!(cx.abstract_set[0].get("i").unwrap().values(), &[Value::Bool(false)]);
                let c0 = &cx.concrete_set[0];
                assert_eq!(c0.get("i").unwrap().values(), &[Value::real(0.0)]);
            }
            o => panic!("expected counterexample, got {o:?}"),
        }
    }

    #[test]
    fn caps_refuse_large_universes() {
        let mut g = encoder_galois(false);
        g.universe.as_mut().unwrap().horizon = 3;
        let err = verify_galois(&g, &GaloisOptions::default()).unwrap_err();
        assert!(matches!(err, GaloisError::TooManyElements { side: "concrete", .. }));
        g.universe.as_mut().unwrap().horizon = 4;
        assert!(matches!(
            verify_galois(&g, &GaloisOptions::default()),
            Err(GaloisError::HorizonTooLong { .. })
        ));
    }

    #[test]
    fn empty_universe_is_vacuous() {
        let mut g = encoder_galois(false);
        g.universe = Some(Universe::default());
        assert!(verify_galois(&g, &GaloisOptions::default()).unwrap().is_ok());
    }

    #[test]
    fn enumeration_order() {
        let vals = vec![(Channel::new("x", DataType::Bool), vec![false.into(), true.into()])];
        let hs = enumerate_histories(&vals, 2);
        let seqs: Vec<Vec<Value>> = hs.iter().map(|h| h.get("x").unwrap().values().to_vec()).collect();
        assert_eq!(
            seqs,
            vec![
                vec![false.into(), false.into()],
                vec![false.into(), true.into()],
                vec![true.into(), false.into()],
                vec![true.into(), true.into()],
            ]
        );
    }

    #[test]
    fn output_checker_runs_per_tick() {
        use crate::abstraction::eval_relation;
        let mut g = encoder_galois(false);
        g.abstract_channels.push(Channel::new("o", DataType::Bool));
        g.concrete_channels.push(Channel::new("o", DataType::int(-128, 127).unwrap()));
        if let AbstractionFn::ElementWise(ms) = &mut g.f {
            ms.push(AbstractionMap {
                side: Side::Output,
                target: Channel::new("o", DataType::Bool),
                expr: Expr::bin(BinaryOp::Ge, Expr::name("c.o"), Expr::lit(Value::Int(0))),
            });
        }
        g.resolve(&BTreeSet::new()).unwrap();
        let ao = vec![Channel::new("o", DataType::Bool)];
        let co = vec![Channel::new("o", DataType::int(-128, 127).unwrap())];
        let rel = output_checker_relation(&g, "RO", &ao, &co).unwrap();
        let a = ChannelHistory::from_streams([(
            "o",
            TimedStream::new(DataType::Bool, vec![true.into(), false.into(), true.into()]).unwrap(),
        )])
        .unwrap();
        let c = ChannelHistory::from_streams([(
            "o",
            TimedStream::new(co[0].ctype.clone(), vec![Value::Int(2), Value::Int(-4), Value::Int(0)]).unwrap(),
        )])
        .unwrap();
        let ev = eval_relation(&rel, &a, &c, SimOptions::default()).unwrap();
        assert_eq!(ev.per_tick, vec![true, true, true]);
        let c = ChannelHistory::from_streams([("o", TimedStream::new(co[0].ctype.clone(), vec![Value::Int(-4)]).unwrap())]).unwrap();
        let a = a.prefix(1).unwrap();
        assert_eq!(eval_relation(&rel, &a, &c, SimOptions::default()).unwrap().per_tick, vec![false]);
    }

    #[test]
    fn derived_relation_compares_outputs() {
        let mut g = encoder_galois(false);
        if let AbstractionFn::ElementWise(ms) = &mut g.f {
            ms.push(AbstractionMap {
                side: Side::Output,
                target: Channel::new("o", DataType::Bool),
                expr: Expr::name("c.o"),
            });
        }
        let ao = vec![Channel::new("o", DataType::Bool)];
        let rel = derive_output_relation(&g, "RO", &ao, &ao);
        match rel.form {
            RelationForm::Predicate(e) => assert_eq!(alloc::format!("{e}"), "a.o == c.o"),
            _ => panic!(),
        }
    }
}
