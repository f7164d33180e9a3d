//! Name resolution and type checking of parsed declarations.

use std::collections::{BTreeMap, BTreeSet};

use streamcheck_core::abstraction::{
    AbstractionFn, AbstractionMap, CheckerRef, ConcretizerSpec, GaloisSpec, Level, MemberClause, ParamDecl, RelationForm, RelationSpec,
    Side, Universe,
};
use streamcheck_core::component::{
    compose_check, Assignment, AutomatonSpec, CompositeSpec, CompositionViolation, Connector, Subcomponent, Transition,
};
use streamcheck_core::{Channel, ComponentSpec, DataType, Expr, SyntacticInterface, Value};

use super::parser::{RawAutomaton, RawChannel, RawComposite, RawItem, RawLit, RawRelationForm, RawType};
use super::{ConcretizerDecl, Diagnostic, GaloisDecl, ModelDocument, Pos, Refinement, RelationDecl, TypeDecl};

struct Ctx {
    aliases: BTreeMap<String, (RawType, Pos)>,
    resolved: BTreeMap<String, DataType>,
    labels: BTreeSet<String>,
    diags: Vec<Diagnostic>,
}

impl Ctx {
    fn err(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(pos, msg));
    }

    fn ty(&mut self, raw: &RawType, pos: Pos) -> Option<DataType> {
        let mut seen = BTreeSet::new();
        match self.ty_inner(raw, &mut seen) {
            Ok(t) => Some(t),
            Err(m) => {
                self.err(pos, m);
                None
            }
        }
    }

    fn ty_inner(&self, raw: &RawType, seen: &mut BTreeSet<String>) -> Result<DataType, String> {
        match raw {
            RawType::Bool => Ok(DataType::Bool),
            RawType::Real => Ok(DataType::Real),
            RawType::Int(lo, hi) => DataType::int(*lo, *hi).map_err(|e| e.to_string()),
            RawType::Enum(ls) => DataType::enumeration(ls.iter().cloned()).map_err(|e| e.to_string()),
            RawType::Alias(n) => {
                if let Some(t) = self.resolved.get(n) {
                    return Ok(t.clone());
                }
                let (inner, _) = self.aliases.get(n).ok_or_else(|| format!("unknown type `{n}`"))?;
                if !seen.insert(n.clone()) {
                    return Err(format!("type `{n}` refers to itself"));
                }
                self.ty_inner(inner, seen)
            }
        }
    }

    fn value(&mut self, ty: &DataType, lit: &RawLit) -> Option<Value> {
        match ty.parse_value(&lit.text) {
            Ok(v) => Some(v),
            Err(e) => {
                self.err(lit.pos, e.to_string());
                None
            }
        }
    }

    fn channels(&mut self, raw: &[RawChannel]) -> Vec<Channel> {
        raw.iter()
            .filter_map(|c| self.ty(&c.ty, c.pos).map(|t| Channel::new(c.name.clone(), t)))
            .collect()
    }
}

pub fn build(items: Vec<RawItem>) -> Result<ModelDocument, Vec<Diagnostic>> {
    let mut cx = Ctx {
        aliases: BTreeMap::new(),
        resolved: BTreeMap::new(),
        labels: BTreeSet::new(),
        diags: Vec::new(),
    };

    let mut names: BTreeMap<String, Pos> = BTreeMap::new();
    for it in &items {
        let (n, p) = match it {
            RawItem::Type(n, _, p) => (n, *p),
            RawItem::Automaton(a) => (&a.name, a.pos),
            RawItem::Composite(c) => (&c.name, c.pos),
            RawItem::Relation(r) => (&r.name, r.pos),
            RawItem::Galois(g) => (&g.name, g.pos),
            RawItem::Concretizer(c) => (&c.name, c.pos),
            RawItem::Refinement(r) => (&r.name, r.pos),
        };
        if let Some(first) = names.get(n) {
            cx.err(p, format!("duplicate name `{n}` (first declared at {first})"));
        } else {
            names.insert(n.clone(), p);
        }
        if let RawItem::Type(n, t, p) = it {
            cx.aliases.entry(n.clone()).or_insert((t.clone(), *p));
        }
    }

    let mut doc = ModelDocument::default();
    for it in &items {
        if let RawItem::Type(n, t, p) = it {
            if let Some(ty) = cx.ty(t, *p) {
                if let DataType::Enum(ls) = &ty {
                    cx.labels.extend(ls.iter().cloned());
                }
                cx.resolved.insert(n.clone(), ty.clone());
                doc.types.push(TypeDecl { name: n.clone(), ty });
            }
        }
    }

    let automata: BTreeMap<&str, &RawAutomaton> = items
        .iter()
        .filter_map(|i| match i {
            RawItem::Automaton(a) => Some((a.name.as_str(), a)),
            _ => None,
        })
        .collect();
    let composites: BTreeMap<&str, &RawComposite> = items
        .iter()
        .filter_map(|i| match i {
            RawItem::Composite(c) => Some((c.name.as_str(), c)),
            _ => None,
        })
        .collect();
    let mut built: BTreeMap<String, Option<ComponentSpec>> = BTreeMap::new();
    for a in automata.values() {
        let spec = automaton(&mut cx, a).map(ComponentSpec::from);
        built.insert(a.name.clone(), spec);
    }
    for c in composites.values() {
        let mut stack = Vec::new();
        composite(&mut cx, c, &composites, &mut built, &mut stack);
    }
    for it in &items {
        match it {
            RawItem::Automaton(a) => {
                if let Some(Some(s)) = built.get(&a.name) {
                    doc.components.push(s.clone());
                }
            }
            RawItem::Composite(c) => {
                if let Some(Some(s)) = built.get(&c.name) {
                    doc.components.push(s.clone());
                }
            }
            _ => {}
        }
    }

    let lookup = |cx: &mut Ctx, name: &str, pos: Pos| -> Option<ComponentSpec> {
        match built.get(name) {
            Some(Some(s)) => Some(s.clone()),
            Some(None) => None,
            None => {
                cx.err(pos, format!("unknown component `{name}`"));
                None
            }
        }
    };

    for it in &items {
        match it {
            RawItem::Relation(r) => {
                let (Some(a), Some(c)) = (
                    lookup(&mut cx, &r.abstract_component, r.pos),
                    lookup(&mut cx, &r.concrete_component, r.pos),
                ) else {
                    continue;
                };
                let pick = |s: &ComponentSpec| match r.side {
                    Side::Input => s.interface().inputs.clone(),
                    Side::Output => s.interface().outputs.clone(),
                };
                let form = match &r.form {
                    RawRelationForm::Predicate(e) => RelationForm::Predicate(e.clone()),
                    RawRelationForm::Checker {
                        component,
                        bindings,
                        verdict,
                    } => {
                        let Some(comp) = lookup(&mut cx, component, r.pos) else {
                            continue;
                        };
                        RelationForm::Checker(Box::new(CheckerRef {
                            component: comp,
                            bindings: bindings.clone(),
                            verdict: verdict.clone(),
                        }))
                    }
                };
                let mut spec = RelationSpec {
                    name: r.name.clone(),
                    side: r.side,
                    abstract_channels: pick(&a),
                    concrete_channels: pick(&c),
                    form,
                };
                if let Err(es) = spec.resolve(&cx.labels) {
                    for e in es {
                        cx.err(r.pos, e);
                    }
                    continue;
                }
                doc.relations.push(RelationDecl {
                    abstract_component: r.abstract_component.clone(),
                    concrete_component: r.concrete_component.clone(),
                    spec,
                });
            }
            RawItem::Galois(g) => {
                let (Some(a), Some(c)) = (
                    lookup(&mut cx, &g.abstract_component, g.pos),
                    lookup(&mut cx, &g.concrete_component, g.pos),
                ) else {
                    continue;
                };
                let all = |s: &ComponentSpec| -> Vec<Channel> {
                    let i = s.interface();
                    i.inputs.iter().chain(&i.outputs).cloned().collect()
                };
                let side_channels = |s: &ComponentSpec, side: Side| match side {
                    Side::Input => s.interface().inputs.clone(),
                    Side::Output => s.interface().outputs.clone(),
                };
                let f = match (&g.map_using, g.maps.is_empty()) {
                    (Some(_), false) => {
                        cx.err(g.pos, format!("galois `{}` mixes `map using` with element-wise maps", g.name));
                        continue;
                    }
                    (None, true) => {
                        cx.err(g.pos, format!("galois `{}` has no abstraction map", g.name));
                        continue;
                    }
                    (Some((n, p)), true) => match lookup(&mut cx, n, *p) {
                        Some(s) => AbstractionFn::Component(s),
                        None => continue,
                    },
                    (None, false) => {
                        let mut maps = Vec::new();
                        for (side, target, e, p) in &g.maps {
                            match side_channels(&a, *side).into_iter().find(|ch| ch.name == *target) {
                                Some(ch) => maps.push(AbstractionMap {
                                    side: *side,
                                    target: ch,
                                    expr: e.clone(),
                                }),
                                None => cx.err(*p, format!("`{}` has no {} `{target}`", g.abstract_component, side_word(*side))),
                            }
                        }
                        AbstractionFn::ElementWise(maps)
                    }
                };
                let mut members = Vec::new();
                for (side, target, e, p) in &g.members {
                    if !side_channels(&a, *side).iter().any(|ch| ch.name == *target) {
                        cx.err(*p, format!("`{}` has no {} `{target}`", g.abstract_component, side_word(*side)));
                    }
                    members.push(MemberClause {
                        side: *side,
                        target: target.clone(),
                        pred: e.clone(),
                    });
                }
                let (ac, cc) = (all(&a), all(&c));
                let universe = g.universe.as_ref().map(|u| {
                    let mut out = Universe {
                        horizon: u.horizon,
                        ..Default::default()
                    };
                    for (q, lits, p) in &u.entries {
                        let (chans, list) = match q.level {
                            Level::Abstract => (&ac, &mut out.abstract_values),
                            Level::Concrete => (&cc, &mut out.concrete),
                        };
                        let Some(ch) = chans.iter().find(|ch| ch.name == q.channel) else {
                            cx.err(*p, format!("unresolved channel `{q}`"));
                            continue;
                        };
                        if list.iter().any(|(c, _)| c.name == ch.name) {
                            cx.err(*p, format!("`{q}` listed twice"));
                            continue;
                        }
                        let vals: Vec<Value> = lits.iter().filter_map(|l| cx.value(&ch.ctype, l)).collect();
                        list.push((ch.clone(), vals));
                    }
                    out
                });
                let mut spec = GaloisSpec {
                    name: g.name.clone(),
                    abstract_channels: ac,
                    concrete_channels: cc,
                    f,
                    members,
                    universe,
                };
                if let Err(es) = spec.resolve(&cx.labels) {
                    for e in es {
                        cx.err(g.pos, e);
                    }
                    continue;
                }
                doc.galois.push(GaloisDecl {
                    abstract_component: g.abstract_component.clone(),
                    concrete_component: g.concrete_component.clone(),
                    spec,
                });
            }
            RawItem::Concretizer(k) => {
                let (Some(a), Some(c), Some(comp)) = (
                    lookup(&mut cx, &k.abstract_component, k.pos),
                    lookup(&mut cx, &k.concrete_component, k.pos),
                    lookup(&mut cx, &k.component, k.pos),
                ) else {
                    continue;
                };
                let mut params = Vec::new();
                for (n, t, kind, p) in &k.params {
                    if let Some(ty) = cx.ty(t, *p) {
                        params.push(ParamDecl {
                            name: n.clone(),
                            ty,
                            kind: *kind,
                        });
                    }
                }
                let spec = ConcretizerSpec {
                    name: k.name.clone(),
                    component: comp,
                    params,
                    abstract_inputs: a.interface().inputs.clone(),
                    concrete_inputs: c.interface().inputs.clone(),
                };
                if let Err(es) = spec.check() {
                    for e in es {
                        cx.err(k.pos, format!("concretizer `{}`: {e}", k.name));
                    }
                    continue;
                }
                doc.concretizers.push(ConcretizerDecl {
                    abstract_component: k.abstract_component.clone(),
                    concrete_component: k.concrete_component.clone(),
                    spec,
                });
            }
            _ => {}
        }
    }

    for it in &items {
        let RawItem::Refinement(r) = it else { continue };
        let (Some(a), Some(c)) = (&r.abstract_component, &r.concrete_component) else {
            cx.err(r.pos, format!("refinement `{}` needs `abstract` and `concrete`", r.name));
            continue;
        };
        let mut ok = lookup(&mut cx, a, r.pos).is_some() & lookup(&mut cx, c, r.pos).is_some();
        let pair_ok = |ab: &str, co: &str| ab == a && co == c;
        for (kind, name) in [("ri", &r.ri), ("ro", &r.ro)] {
            let Some(name) = name else { continue };
            match doc.relation(name) {
                None => {
                    cx.err(r.pos, format!("unknown relation `{name}`"));
                    ok = false;
                }
                Some(d) => {
                    let want = if kind == "ri" { Side::Input } else { Side::Output };
                    if d.spec.side != want {
                        cx.err(
                            r.pos,
                            format!("`{name}` relates {}s, `{kind}` needs {}s", side_word(d.spec.side), side_word(want)),
                        );
                        ok = false;
                    }
                    if !pair_ok(&d.abstract_component, &d.concrete_component) {
                        cx.err(r.pos, format!("`{name}` relates a different pair of components"));
                        ok = false;
                    }
                }
            }
        }
        if let Some(n) = &r.galois {
            match doc.galois(n) {
                None => {
                    cx.err(r.pos, format!("unknown galois `{n}`"));
                    ok = false;
                }
                Some(d) if !pair_ok(&d.abstract_component, &d.concrete_component) => {
                    cx.err(r.pos, format!("`{n}` relates a different pair of components"));
                    ok = false;
                }
                _ => {}
            }
        }
        if let Some(n) = &r.concretizer {
            match doc.concretizer(n) {
                None => {
                    cx.err(r.pos, format!("unknown concretizer `{n}`"));
                    ok = false;
                }
                Some(d) if !pair_ok(&d.abstract_component, &d.concrete_component) => {
                    cx.err(r.pos, format!("`{n}` relates a different pair of components"));
                    ok = false;
                }
                _ => {}
            }
        }
        if ok {
            doc.refinements.push(Refinement {
                name: r.name.clone(),
                abstract_component: a.clone(),
                concrete_component: c.clone(),
                ri: r.ri.clone(),
                ro: r.ro.clone(),
                galois: r.galois.clone(),
                concretizer: r.concretizer.clone(),
            });
        }
    }

    if cx.diags.is_empty() {
        Ok(doc)
    } else {
        let mut d = cx.diags;
        d.sort_by_key(|e| e.pos);
        d.dedup();
        Err(d)
    }
}

fn side_word(s: Side) -> &'static str {
    match s {
        Side::Input => "input",
        Side::Output => "output",
    }
}

fn automaton(cx: &mut Ctx, a: &RawAutomaton) -> Option<AutomatonSpec> {
    let n0 = cx.diags.len();
    let inputs = cx.channels(&a.inputs);
    let outputs = cx.channels(&a.outputs);
    let mut spec = AutomatonSpec::new(a.name.clone());
    spec.interface = SyntacticInterface::new(inputs, outputs.clone());
    for (raw, ch) in a.outputs.iter().zip(&outputs) {
        if let Some(l) = &raw.init {
            if let Some(v) = cx.value(&ch.ctype, l) {
                spec.output_init.insert(ch.name.clone(), v);
            }
        }
    }
    for v in &a.vars {
        let Some(ty) = cx.ty(&v.ty, v.pos) else { continue };
        let init = v.init.as_ref().and_then(|l| cx.value(&ty, l));
        if let Some(init) = init {
            spec = spec.variable(&v.name, ty, init);
        }
    }
    spec.states = a.states.clone();
    spec.initial = a.initial.clone().or_else(|| a.states.first().cloned()).unwrap_or_default();
    spec.causality = a.causality;
    spec.total = a.total;
    spec.transitions = a
        .transitions
        .iter()
        .map(|t| Transition {
            name: t.name.clone(),
            source: t.source.clone(),
            target: t.target.clone(),
            guard: t.guard.clone().unwrap_or_else(Expr::tt),
            assignments: t
                .assignments
                .iter()
                .map(|(target, expr)| Assignment {
                    target: target.clone(),
                    expr: expr.clone(),
                })
                .collect(),
        })
        .collect();
    if cx.diags.len() > n0 {
        return None;
    }
    let labels = cx.labels.clone();
    match spec.resolve(&labels) {
        Ok(()) => Some(spec),
        Err(es) => {
            for e in es {
                let pos = a
                    .transitions
                    .iter()
                    .enumerate()
                    .find(|(i, t)| {
                        let label = t.name.clone().unwrap_or_else(|| format!("#{i}"));
                        e.message.starts_with(&format!("transition {label}:"))
                    })
                    .map(|(_, t)| t.pos)
                    .unwrap_or(a.pos);
                cx.err(pos, format!("component `{}`: {}", a.name, e.message));
            }
            None
        }
    }
}

fn composite(
    cx: &mut Ctx,
    c: &RawComposite,
    composites: &BTreeMap<&str, &RawComposite>,
    built: &mut BTreeMap<String, Option<ComponentSpec>>,
    stack: &mut Vec<String>,
) -> Option<ComponentSpec> {
    if let Some(s) = built.get(&c.name) {
        return s.clone();
    }
    if stack.contains(&c.name) {
        cx.err(c.pos, format!("composite `{}` contains itself", c.name));
        return None;
    }
    stack.push(c.name.clone());
    let n0 = cx.diags.len();
    let inputs = cx.channels(&c.inputs);
    let outputs = cx.channels(&c.outputs);
    let mut subs = Vec::new();
    for (inst, comp, p) in &c.subs {
        let spec = match built.get(comp) {
            Some(s) => s.clone(),
            None => match composites.get(comp.as_str()) {
                Some(inner) => composite(cx, inner, composites, built, stack),
                None => {
                    cx.err(*p, format!("unknown component `{comp}`"));
                    None
                }
            },
        };
        if let Some(spec) = spec {
            subs.push(Subcomponent {
                instance: inst.clone(),
                spec,
            });
        }
    }
    stack.pop();
    let result = if cx.diags.len() > n0 || subs.len() != c.subs.len() {
        None
    } else {
        let spec = CompositeSpec {
            name: c.name.clone(),
            interface: SyntacticInterface::new(inputs, outputs),
            subcomponents: subs,
            connectors: c
                .connects
                .iter()
                .map(|(from, to, _)| Connector {
                    from: from.clone(),
                    to: to.clone(),
                })
                .collect(),
        };
        match compose_check(&spec) {
            Ok(()) => Some(ComponentSpec::Composite(spec)),
            Err(vs) => {
                for v in vs {
                    let pos = match &v {
                        CompositionViolation::BadConnector { from, to, .. } | CompositionViolation::TypeMismatch { from, to, .. } => c
                            .connects
                            .iter()
                            .find(|(f, t, _)| f == from && t == to)
                            .map(|(_, _, p)| *p)
                            .unwrap_or(c.pos),
                        _ => c.pos,
                    };
                    cx.err(pos, format!("composite `{}`: {v}", c.name));
                }
                None
            }
        }
    };
    built.insert(c.name.clone(), result.clone());
    result
}
