//! Renders a [`ModelDocument`] back to model text.

use std::fmt::Write;

use streamcheck_core::abstraction::{AbstractionFn, Level, ParamKind, RelationForm, Side};
use streamcheck_core::component::{AutomatonSpec, CompositeSpec};
use streamcheck_core::expr::literal_text;
use streamcheck_core::{Channel, ComponentSpec, DataType, Expr};

use super::{ModelDocument, TypeDecl};

/// Type syntax, using a declared alias when one matches exactly.
pub fn write_type(ty: &DataType, types: &[TypeDecl]) -> String {
    if let Some(t) = types.iter().find(|t| t.ty == *ty) {
        return t.name.clone();
    }
    raw_type(ty)
}

fn raw_type(ty: &DataType) -> String {
    match ty {
        DataType::Bool => "bool".into(),
        DataType::Real => "real".into(),
        DataType::Int { lo, hi } => format!("int[{lo}, {hi}]"),
        DataType::Enum(ls) => format!("enum {{ {} }}", ls.join(", ")),
    }
}

fn side(s: Side) -> &'static str {
    match s {
        Side::Input => "input",
        Side::Output => "output",
    }
}

/// Serializes a document so that [`super::parse_model`] gives it back.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    let ty = |t: &DataType| write_type(t, &doc.types);
    for t in &doc.types {
        let _ = writeln!(out, "type {} = {};", t.name, raw_type(&t.ty));
    }
    if !doc.types.is_empty() {
        out.push('\n');
    }
    for c in &doc.components {
        match c {
            ComponentSpec::Automaton(a) => automaton(&mut out, a, &ty),
            ComponentSpec::Composite(c) => composite(&mut out, c, &ty),
        }
        out.push('\n');
    }
    for r in &doc.relations {
        let s = &r.spec;
        let _ = write!(
            out,
            "relation {} : {} {} ~ {} ",
            s.name,
            side(s.side),
            r.abstract_component,
            r.concrete_component
        );
        match &s.form {
            RelationForm::Predicate(e) => {
                let _ = writeln!(out, "{{ {e} }}");
            }
            RelationForm::Checker(ch) => {
                let binds: Vec<String> = ch.bindings.iter().map(|(p, q)| format!("{p} = {q}")).collect();
                let _ = writeln!(out, "checker {}({}) -> {};", ch.component.name(), binds.join(", "), ch.verdict);
            }
        }
    }
    if !doc.relations.is_empty() {
        out.push('\n');
    }
    for g in &doc.galois {
        let s = &g.spec;
        let _ = writeln!(out, "galois {} : {} ~ {} {{", s.name, g.abstract_component, g.concrete_component);
        match &s.f {
            AbstractionFn::ElementWise(maps) => {
                for m in maps {
                    let _ = writeln!(out, "    map {} {} := {};", side(m.side), m.target.name, m.expr);
                }
            }
            AbstractionFn::Component(c) => {
                let _ = writeln!(out, "    map using {};", c.name());
            }
        }
        for m in &s.members {
            let _ = writeln!(out, "    member {} {} : {};", side(m.side), m.target, m.pred);
        }
        if let Some(u) = &s.universe {
            let _ = writeln!(out, "    universe horizon {} {{", u.horizon);
            let lists = u
                .concrete
                .iter()
                .map(|e| (Level::Concrete, e))
                .chain(u.abstract_values.iter().map(|e| (Level::Abstract, e)));
            for (level, (ch, vals)) in lists {
                let vs: Vec<String> = vals.iter().map(literal_text).collect();
                let _ = writeln!(out, "        {}.{} in {{ {} }};", level.prefix(), ch.name, vs.join(", "));
            }
            out.push_str("    }\n");
        }
        out.push_str("}\n\n");
    }
    for k in &doc.concretizers {
        let s = &k.spec;
        let _ = writeln!(
            out,
            "concretizer {} : {} ~ {} using {} {{",
            s.name,
            k.abstract_component,
            k.concrete_component,
            s.component.name()
        );
        for p in &s.params {
            let kind = match p.kind {
                ParamKind::Const => "const",
                ParamKind::Stream => "stream",
            };
            let _ = writeln!(out, "    param {} : {} {kind};", p.name, ty(&p.ty));
        }
        out.push_str("}\n\n");
    }
    for r in &doc.refinements {
        let _ = writeln!(out, "refinement {} {{", r.name);
        let _ = writeln!(out, "    abstract {};", r.abstract_component);
        let _ = writeln!(out, "    concrete {};", r.concrete_component);
        for (k, v) in [("ri", &r.ri), ("ro", &r.ro), ("galois", &r.galois), ("concretizer", &r.concretizer)] {
            if let Some(v) = v {
                let _ = writeln!(out, "    {k} {v};");
            }
        }
        out.push_str("}\n\n");
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

fn channels(out: &mut String, kw: &str, chans: &[Channel], ty: &dyn Fn(&DataType) -> String) {
    for c in chans {
        let _ = writeln!(out, "    {kw} {} : {};", c.name, ty(&c.ctype));
    }
}

fn automaton(out: &mut String, a: &AutomatonSpec, ty: &dyn Fn(&DataType) -> String) {
    let _ = writeln!(out, "component {} {{", a.name);
    let _ = writeln!(out, "    causality {};", a.causality);
    if a.total {
        out.push_str("    total;\n");
    }
    channels(out, "input", &a.interface.inputs, ty);
    for c in &a.interface.outputs {
        let _ = write!(out, "    output {} : {}", c.name, ty(&c.ctype));
        if let Some(v) = a.output_init.get(&c.name) {
            let _ = write!(out, " = {}", literal_text(v));
        }
        out.push_str(";\n");
    }
    for v in &a.variables {
        let _ = writeln!(out, "    var {} : {} = {};", v.name, ty(&v.ty), literal_text(&v.init));
    }
    let states: Vec<String> = a
        .states
        .iter()
        .map(|s| if *s == a.initial { format!("initial {s}") } else { s.clone() })
        .collect();
    let _ = writeln!(out, "    states {{ {} }}", states.join(", "));
    out.push_str("    transitions {\n");
    for t in &a.transitions {
        out.push_str("        ");
        if let Some(n) = &t.name {
            let _ = write!(out, "{n}: ");
        }
        let _ = write!(out, "{} -> {}", t.source, t.target);
        if t.guard != Expr::tt() {
            let _ = write!(out, " when {}", t.guard);
        }
        if !t.assignments.is_empty() {
            let asg: Vec<String> = t.assignments.iter().map(|a| format!("{} := {}", a.target, a.expr)).collect();
            let _ = write!(out, " do {}", asg.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("    }\n}\n");
}

fn composite(out: &mut String, c: &CompositeSpec, ty: &dyn Fn(&DataType) -> String) {
    let _ = writeln!(out, "composite {} {{", c.name);
    channels(out, "input", &c.interface.inputs, ty);
    channels(out, "output", &c.interface.outputs, ty);
    for s in &c.subcomponents {
        let _ = writeln!(out, "    sub {} : {};", s.instance, s.spec.name());
    }
    for k in &c.connectors {
        let _ = writeln!(out, "    connect {} -> {};", k.from, k.to);
    }
    out.push_str("}\n");
}
