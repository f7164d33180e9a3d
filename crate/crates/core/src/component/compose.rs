use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{Causality, ComponentSpec, CompositeSpec, Endpoint};
use crate::value::DataType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositionViolation {
    Interface(String),
    DuplicateInstance(String),
    /// A connector names an instance or channel that does not exist, or
    /// connects two producers or two consumers.
    BadConnector {
        from: Endpoint,
        to: Endpoint,
        reason: String,
    },
    TypeMismatch {
        from: Endpoint,
        to: Endpoint,
        from_ty: DataType,
        to_ty: DataType,
    },
    MultipleProducers {
        consumer: Endpoint,
    },
    UnconnectedConsumer {
        consumer: Endpoint,
    },
    ZeroDelayCycle {
        path: Vec<Endpoint>,
    },
    /// A violation inside a nested composite.
    Nested {
        instance: String,
        inner: alloc::boxed::Box<CompositionViolation>,
    },
}

impl fmt::Display for CompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompositionViolation::Interface(m) => f.write_str(m),
            CompositionViolation::DuplicateInstance(i) => write!(f, "duplicate instance `{i}`"),
            CompositionViolation::BadConnector { from, to, reason } => write!(f, "connector {from} -> {to}: {reason}"),
            CompositionViolation::TypeMismatch { from, to, from_ty, to_ty } => {
                write!(f, "type mismatch on {from} -> {to}: {from_ty} vs {to_ty}")
            }
            CompositionViolation::MultipleProducers { consumer } => write!(f, "multiple producers for `{consumer}`"),
            CompositionViolation::UnconnectedConsumer { consumer } => write!(f, "unconnected consumer `{consumer}`"),
            CompositionViolation::ZeroDelayCycle { path } => {
                f.write_str("zero-delay cycle: ")?;
                for (i, e) in path.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" -> ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            CompositionViolation::Nested { instance, inner } => write!(f, "in `{instance}`: {inner}"),
        }
    }
}

enum Role {
    Producer,
    Consumer,
}

fn endpoint_type<'a>(c: &'a CompositeSpec, e: &Endpoint, role: Role) -> Result<&'a DataType, String> {
    match e {
        Endpoint::Boundary(ch) => {
            let (own, other) = match role {
                Role::Producer => (c.interface.input(ch), c.interface.output(ch)),
                Role::Consumer => (c.interface.output(ch), c.interface.input(ch)),
            };
            match (own, other) {
                (Some(x), _) => Ok(&x.ctype),
                (None, Some(_)) => Err(alloc::format!("`{ch}` has the wrong direction")),
                (None, None) => Err(alloc::format!("unknown channel `{ch}`")),
            }
        }
        Endpoint::Port { instance, channel } => {
            let sub = c.sub(instance).ok_or_else(|| alloc::format!("unknown instance `{instance}`"))?;
            let iface = sub.interface();
            let (own, other) = match role {
                Role::Producer => (iface.output(channel), iface.input(channel)),
                Role::Consumer => (iface.input(channel), iface.output(channel)),
            };
            match (own, other) {
                (Some(x), _) => Ok(&x.ctype),
                (None, Some(_)) => Err(alloc::format!("`{instance}.{channel}` has the wrong direction")),
                (None, None) => Err(alloc::format!("unknown channel `{instance}.{channel}`")),
            }
        }
    }
}

/// Checks a composite's wiring: every consumer has exactly one producer of
/// the same type, and no cycle avoids every strictly causal component.
/// Nested composites are checked too.
pub fn compose_check(c: &CompositeSpec) -> Result<(), Vec<CompositionViolation>> {
    let mut out = Vec::new();
    for p in c.interface.problems() {
        out.push(CompositionViolation::Interface(p));
    }
    let mut seen = BTreeSet::new();
    for s in &c.subcomponents {
        if !seen.insert(s.instance.as_str()) {
            out.push(CompositionViolation::DuplicateInstance(s.instance.clone()));
        }
        if let ComponentSpec::Composite(inner) = &s.spec {
            if let Err(vs) = compose_check(inner) {
                out.extend(vs.into_iter().map(|v| CompositionViolation::Nested {
                    instance: s.instance.clone(),
                    inner: alloc::boxed::Box::new(v),
                }));
            }
        }
    }

    let mut producers: BTreeMap<Endpoint, usize> = BTreeMap::new();
    for conn in &c.connectors {
        let from_ty = endpoint_type(c, &conn.from, Role::Producer);
        let to_ty = endpoint_type(c, &conn.to, Role::Consumer);
        match (from_ty, to_ty) {
            (Ok(a), Ok(b)) => {
                if a != b {
                    out.push(CompositionViolation::TypeMismatch {
                        from: conn.from.clone(),
                        to: conn.to.clone(),
                        from_ty: a.clone(),
                        to_ty: b.clone(),
                    });
                }
                *producers.entry(conn.to.clone()).or_default() += 1;
            }
            (Err(reason), _) | (_, Err(reason)) => out.push(CompositionViolation::BadConnector {
                from: conn.from.clone(),
                to: conn.to.clone(),
                reason,
            }),
        }
    }
    let consumers = c
        .subcomponents
        .iter()
        .flat_map(|s| {
            s.spec.interface().inputs.iter().map(|ch| Endpoint::Port {
                instance: s.instance.clone(),
                channel: ch.name.clone(),
            })
        })
        .chain(c.interface.outputs.iter().map(|ch| Endpoint::Boundary(ch.name.clone())));
    for consumer in consumers {
        match producers.get(&consumer).copied().unwrap_or(0) {
            0 => out.push(CompositionViolation::UnconnectedConsumer { consumer }),
            1 => {}
            _ => out.push(CompositionViolation::MultipleProducers { consumer }),
        }
    }

    if let Some(path) = find_cycle(&port_graph(c)) {
        out.push(CompositionViolation::ZeroDelayCycle { path });
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Producer-to-consumer edges plus, inside each subcomponent, input-to-output
/// edges for every same-tick dependency.
fn port_graph(c: &CompositeSpec) -> BTreeMap<Endpoint, Vec<Endpoint>> {
    let mut g: BTreeMap<Endpoint, Vec<Endpoint>> = BTreeMap::new();
    for conn in &c.connectors {
        g.entry(conn.from.clone()).or_default().push(conn.to.clone());
    }
    for s in &c.subcomponents {
        for (i, o) in instantaneous_deps(&s.spec) {
            g.entry(Endpoint::Port {
                instance: s.instance.clone(),
                channel: i,
            })
            .or_default()
            .push(Endpoint::Port {
                instance: s.instance.clone(),
                channel: o,
            });
        }
    }
    g
}

fn find_cycle(g: &BTreeMap<Endpoint, Vec<Endpoint>>) -> Option<Vec<Endpoint>> {
    // 0 = unvisited, 1 = on stack, 2 = finished
    fn visit<'a>(
        n: &'a Endpoint,
        g: &'a BTreeMap<Endpoint, Vec<Endpoint>>,
        color: &mut BTreeMap<&'a Endpoint, u8>,
        stack: &mut Vec<&'a Endpoint>,
    ) -> Option<Vec<Endpoint>> {
        color.insert(n, 1);
        stack.push(n);
        for m in g.get(n).into_iter().flatten() {
            match color.get(m).copied().unwrap_or(0) {
                1 => {
                    let start = stack.iter().position(|x| *x == m).expect("on stack");
                    let mut path: Vec<Endpoint> = stack[start..].iter().map(|e| (*e).clone()).collect();
                    path.push(m.clone());
                    return Some(path);
                }
                0 => {
                    if let Some(p) = visit(m, g, color, stack) {
                        return Some(p);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        color.insert(n, 2);
        None
    }
    let mut color = BTreeMap::new();
    for n in g.keys() {
        if color.get(n).copied().unwrap_or(0) == 0 {
            let mut stack = Vec::new();
            if let Some(p) = visit(n, g, &mut color, &mut stack) {
                return Some(p);
            }
        }
    }
    None
}

/// Pairs `(input, output)` where the output at tick `t` can depend on the
/// input at the same tick.
pub fn instantaneous_deps(spec: &ComponentSpec) -> BTreeSet<(String, String)> {
    match spec {
        ComponentSpec::Automaton(a) => match a.causality {
            Causality::Strict => BTreeSet::new(),
            Causality::Weak => a
                .interface
                .inputs
                .iter()
                .flat_map(|i| a.interface.outputs.iter().map(move |o| (i.name.clone(), o.name.clone())))
                .collect(),
        },
        ComponentSpec::Composite(c) => {
            let g = port_graph(c);
            let mut out = BTreeSet::new();
            for i in &c.interface.inputs {
                let start = Endpoint::Boundary(i.name.clone());
                let mut seen = BTreeSet::new();
                let mut todo = alloc::vec![&start];
                while let Some(n) = todo.pop() {
                    for m in g.get(n).into_iter().flatten() {
                        if seen.insert(m) {
                            todo.push(m);
                        }
                    }
                }
                for o in &c.interface.outputs {
                    if seen.contains(&Endpoint::Boundary(o.name.clone())) {
                        out.insert((i.name.to_string(), o.name.clone()));
                    }
                }
            }
            out
        }
    }
}
