//! Shared helpers for the integration tests: fixture access and a random
//! generator of well-formed model files.
#![allow(dead_code)]

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streamcheck::model::{parse_model, ModelDocument};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> String {
    fs::read_to_string(fixture_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn model(name: &str) -> ModelDocument {
    parse_model(&fixture(name)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn model_fixtures() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".scm.txt"))
        .collect();
    v.sort();
    v
}

#[derive(Clone, Debug)]
enum Ty {
    Bool,
    Int(i64, i64),
    Real,
    /// Alias name and labels.
    Enum(String, Vec<String>),
}

#[derive(Clone, Debug)]
struct Ch {
    name: String,
    ty: Ty,
}

#[derive(Clone, Debug)]
struct Atom {
    name: String,
    inputs: Vec<Ch>,
    outputs: Vec<Ch>,
}

/// Writes random model text that is expected to parse and resolve.
pub struct ModelGen {
    rng: ChaCha8Rng,
    next: usize,
    enums: Vec<(String, Vec<String>)>,
    int_aliases: Vec<(String, i64, i64)>,
}

impl ModelGen {
    pub fn new(seed: u64) -> Self {
        ModelGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next: 0,
            enums: Vec::new(),
            int_aliases: Vec::new(),
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn ty(&mut self) -> Ty {
        match self.rng.gen_range(0..5) {
            0 => Ty::Bool,
            1 => Ty::Real,
            2 if !self.enums.is_empty() => {
                let (n, ls) = self.enums.choose(&mut self.rng).unwrap().clone();
                Ty::Enum(n, ls)
            }
            _ => {
                let lo = self.rng.gen_range(-50..=0);
                Ty::Int(lo, lo + self.rng.gen_range(0..100))
            }
        }
    }

    fn ty_text(&mut self, t: &Ty) -> String {
        match t {
            Ty::Bool => "bool".into(),
            Ty::Real => "real".into(),
            Ty::Enum(n, _) => n.clone(),
            Ty::Int(lo, hi) => match self.int_aliases.iter().find(|(_, l, h)| l == lo && h == hi) {
                Some((n, _, _)) if self.rng.gen_bool(0.5) => n.clone(),
                _ => format!("int[{lo}, {hi}]"),
            },
        }
    }

    fn literal(&mut self, t: &Ty) -> String {
        match t {
            Ty::Bool => if self.rng.gen() { "true" } else { "false" }.into(),
            Ty::Int(lo, hi) => self.rng.gen_range(*lo..=*hi).to_string(),
            Ty::Real => {
                let r: f64 = self.rng.gen_range(-100.0..100.0);
                match self.rng.gen_range(0..3) {
                    0 => format!("{:?}", (r * 4.0).round() / 4.0),
                    1 => format!("{r:?}"),
                    _ => format!("{}", r.round() as i64),
                }
            }
            Ty::Enum(_, ls) => ls.choose(&mut self.rng).unwrap().clone(),
        }
    }

    fn pick<'a>(&mut self, scope: &'a [Ch], f: impl Fn(&Ty) -> bool) -> Option<&'a Ch> {
        let c: Vec<&Ch> = scope.iter().filter(|c| f(&c.ty)).collect();
        c.choose(&mut self.rng).copied()
    }

    fn bool_expr(&mut self, scope: &[Ch], depth: usize) -> String {
        let k = if depth == 0 {
            self.rng.gen_range(0..4)
        } else {
            self.rng.gen_range(0..9)
        };
        match k {
            0 => self.literal(&Ty::Bool),
            1 => match self.pick(scope, |t| matches!(t, Ty::Bool)) {
                Some(c) => c.name.clone(),
                None => self.literal(&Ty::Bool),
            },
            2 => {
                let op = *["<", "<=", ">", ">=", "==", "!="].choose(&mut self.rng).unwrap();
                let l = self.num_expr(scope, depth.saturating_sub(1));
                let r = self.num_expr(scope, depth.saturating_sub(1));
                format!("({l} {op} {r})")
            }
            3 => match self.pick(scope, |t| matches!(t, Ty::Enum(..))) {
                Some(c) => {
                    let Ty::Enum(_, ls) = &c.ty else { unreachable!() };
                    let l = ls.choose(&mut self.rng).unwrap();
                    format!("({} == {l})", c.name)
                }
                None => self.literal(&Ty::Bool),
            },
            4 => format!("!({})", self.bool_expr(scope, depth - 1)),
            5..=7 => {
                let op = *["&&", "||", "=>"].choose(&mut self.rng).unwrap();
                let l = self.bool_expr(scope, depth - 1);
                let r = self.bool_expr(scope, depth - 1);
                format!("({l} {op} {r})")
            }
            _ => {
                let c = self.bool_expr(scope, depth - 1);
                let a = self.bool_expr(scope, depth - 1);
                let b = self.bool_expr(scope, depth - 1);
                format!("ite({c}, {a}, {b})")
            }
        }
    }

    fn int_expr(&mut self, scope: &[Ch], depth: usize) -> String {
        let k = if depth == 0 {
            self.rng.gen_range(0..2)
        } else {
            self.rng.gen_range(0..8)
        };
        match k {
            0 => self.rng.gen_range(-20i64..20).to_string(),
            1 => match self.pick(scope, |t| matches!(t, Ty::Int(..))) {
                Some(c) => c.name.clone(),
                None => self.rng.gen_range(0i64..9).to_string(),
            },
            2 | 3 => {
                let op = *["+", "-", "*"].choose(&mut self.rng).unwrap();
                let l = self.int_expr(scope, depth - 1);
                let r = self.int_expr(scope, depth - 1);
                format!("({l} {op} {r})")
            }
            4 => {
                let f = *["min", "max"].choose(&mut self.rng).unwrap();
                let l = self.int_expr(scope, depth - 1);
                let r = self.int_expr(scope, depth - 1);
                format!("{f}({l}, {r})")
            }
            5 => format!("abs({})", self.int_expr(scope, depth - 1)),
            6 => format!("floor({})", self.num_expr(scope, depth - 1)),
            _ => format!("-({})", self.int_expr(scope, depth - 1)),
        }
    }

    fn num_expr(&mut self, scope: &[Ch], depth: usize) -> String {
        match self.rng.gen_range(0..4) {
            0 => self.literal(&Ty::Real),
            1 => match self.pick(scope, |t| matches!(t, Ty::Real)) {
                Some(c) => c.name.clone(),
                None => self.int_expr(scope, depth),
            },
            2 if depth > 0 => {
                let op = *["+", "-", "*", "/"].choose(&mut self.rng).unwrap();
                let l = self.num_expr(scope, depth - 1);
                let r = self.num_expr(scope, depth - 1);
                format!("({l} {op} {r})")
            }
            _ => self.int_expr(scope, depth),
        }
    }

    fn expr_of(&mut self, t: &Ty, scope: &[Ch]) -> String {
        let d = self.rng.gen_range(0..3);
        match t {
            Ty::Bool => self.bool_expr(scope, d),
            Ty::Int(..) => self.int_expr(scope, d),
            Ty::Real => self.num_expr(scope, d),
            Ty::Enum(_, ls) => {
                let same: Vec<&Ch> = scope
                    .iter()
                    .filter(|c| matches!(&c.ty, Ty::Enum(n, _) if matches!(t, Ty::Enum(m, _) if m == n)))
                    .collect();
                match same.choose(&mut self.rng) {
                    Some(c) if self.rng.gen() => c.name.clone(),
                    _ => ls.choose(&mut self.rng).unwrap().clone(),
                }
            }
        }
    }

    fn channels(&mut self, prefix: &str, n: usize) -> Vec<Ch> {
        (0..n)
            .map(|_| {
                let ty = self.ty();
                Ch {
                    name: self.fresh(prefix),
                    ty,
                }
            })
            .collect()
    }

    fn automaton(&mut self, out: &mut String, name: &str, inputs: Vec<Ch>, outputs: Vec<Ch>) -> Atom {
        let causality = if self.rng.gen() { "strict" } else { "weak" };
        let _ = writeln!(out, "component {name} {{");
        let _ = writeln!(out, "    causality {causality};");
        if self.rng.gen_bool(0.2) {
            out.push_str("    total;\n");
        }
        for c in &inputs {
            let t = self.ty_text(&c.ty);
            let _ = writeln!(out, "    input {} : {t};", c.name);
        }
        for c in &outputs {
            let t = self.ty_text(&c.ty);
            if causality == "strict" || self.rng.gen() {
                let l = self.literal(&c.ty);
                let _ = writeln!(out, "    output {} : {t} = {l};", c.name);
            } else {
                let _ = writeln!(out, "    output {} : {t};", c.name);
            }
        }
        let nv = self.rng.gen_range(0..3);
        let vars = self.channels("v", nv);
        for v in &vars {
            let t = self.ty_text(&v.ty);
            let l = self.literal(&v.ty);
            let _ = writeln!(out, "    var {} : {t} = {l};", v.name);
        }
        let states: Vec<String> = (0..self.rng.gen_range(1..4)).map(|_| self.fresh("S")).collect();
        let init = self.rng.gen_range(0..states.len());
        let st: Vec<String> = states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i == init && self.rng.gen() {
                    format!("initial {s}")
                } else {
                    s.clone()
                }
            })
            .collect();
        let _ = writeln!(out, "    states {{ {} }}", st.join(", "));
        out.push_str("    transitions {\n");
        let mut scope = inputs.clone();
        scope.extend(vars.iter().cloned());
        let targets: Vec<Ch> = outputs.iter().chain(&vars).cloned().collect();
        for _ in 0..self.rng.gen_range(0..5) {
            out.push_str("        ");
            if self.rng.gen() {
                let n = self.fresh("t");
                let _ = write!(out, "{n}: ");
            }
            let s = states.choose(&mut self.rng).unwrap();
            let t = states.choose(&mut self.rng).unwrap();
            let _ = write!(out, "{s} -> {t}");
            if self.rng.gen() {
                let d = self.rng.gen_range(0..3);
                let g = self.bool_expr(&scope, d);
                let _ = write!(out, " when {g}");
            }
            let mut chosen: Vec<&Ch> = targets.iter().filter(|_| self.rng.gen_bool(0.5)).collect();
            chosen.shuffle(&mut self.rng);
            if !chosen.is_empty() {
                let asg: Vec<String> = chosen
                    .iter()
                    .map(|c| {
                        let e = self.expr_of(&c.ty, &scope);
                        format!("{} := {e}", c.name)
                    })
                    .collect();
                let _ = write!(out, " do {}", asg.join(", "));
            }
            out.push_str(";\n");
        }
        out.push_str("    }\n}\n\n");
        Atom {
            name: name.into(),
            inputs,
            outputs,
        }
    }

    fn decl_channels(&mut self, out: &mut String, kw: &str, chans: &[Ch]) {
        for c in chans {
            let t = self.ty_text(&c.ty);
            let _ = writeln!(out, "    {kw} {} : {t};", c.name);
        }
    }

    /// Wraps one or two atoms side by side, renaming the boundary.
    fn composite(&mut self, out: &mut String, parts: &[Atom]) -> Atom {
        let name = self.fresh("Comp");
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut lines = Vec::new();
        for p in parts {
            let inst = self.fresh("u");
            lines.push(format!("    sub {inst} : {};", p.name));
            for c in &p.inputs {
                let b = Ch {
                    name: self.fresh("bi"),
                    ty: c.ty.clone(),
                };
                lines.push(format!("    connect {} -> {inst}.{};", b.name, c.name));
                inputs.push(b);
            }
            for c in &p.outputs {
                let b = Ch {
                    name: self.fresh("bo"),
                    ty: c.ty.clone(),
                };
                lines.push(format!("    connect {inst}.{} -> {};", c.name, b.name));
                outputs.push(b);
            }
        }
        let _ = writeln!(out, "composite {name} {{");
        self.decl_channels(out, "input", &inputs);
        self.decl_channels(out, "output", &outputs);
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out.push_str("}\n\n");
        Atom { name, inputs, outputs }
    }

    fn qualified(chans: &[Ch], p: &str) -> Vec<Ch> {
        chans
            .iter()
            .map(|c| Ch {
                name: format!("{p}.{}", c.name),
                ty: c.ty.clone(),
            })
            .collect()
    }

    /// One complete model file.
    pub fn document(&mut self) -> String {
        let mut out = String::new();
        self.enums.clear();
        self.int_aliases.clear();
        if self.rng.gen_bool(0.2) {
            return out;
        }
        for _ in 0..self.rng.gen_range(0..3) {
            let n = self.fresh("E");
            let ls: Vec<String> = (0..self.rng.gen_range(1..4)).map(|_| self.fresh("L")).collect();
            let _ = writeln!(out, "type {n} = enum {{ {} }};", ls.join(", "));
            self.enums.push((n, ls));
        }
        if self.rng.gen() {
            let n = self.fresh("I");
            let lo = self.rng.gen_range(-50..=0);
            let hi = lo + self.rng.gen_range(0..100);
            let _ = writeln!(out, "type {n} = int[{lo}, {hi}];");
            self.int_aliases.push((n, lo, hi));
        }
        out.push('\n');
        let mut atoms = Vec::new();
        for _ in 0..self.rng.gen_range(1..4) {
            let name = self.fresh("A");
            let (ni, no) = (self.rng.gen_range(0..3), self.rng.gen_range(1..3));
            let ins = self.channels("x", ni);
            let outs = self.channels("y", no);
            atoms.push(self.automaton(&mut out, &name, ins, outs));
        }
        let mut all = atoms.clone();
        if self.rng.gen() {
            let k = self.rng.gen_range(1..=atoms.len().min(2));
            let parts: Vec<Atom> = atoms.choose_multiple(&mut self.rng, k).cloned().collect();
            all.push(self.composite(&mut out, &parts));
        }
        if self.rng.gen_bool(0.6) {
            self.refinement(&mut out, &all);
        }
        out
    }

    fn refinement(&mut self, out: &mut String, all: &[Atom]) {
        let a = all.choose(&mut self.rng).unwrap().clone();
        let c = all.choose(&mut self.rng).unwrap().clone();
        let mut scope_in = Self::qualified(&a.inputs, "a");
        scope_in.extend(Self::qualified(&c.inputs, "c"));
        let mut scope_out = Self::qualified(&a.outputs, "a");
        scope_out.extend(Self::qualified(&c.outputs, "c"));
        let ri = self.fresh("Ri");
        let e = self.bool_expr(&scope_in, 2);
        let _ = writeln!(out, "relation {ri} : input {} ~ {} {{ {e} }}", a.name, c.name);
        let ro = self.fresh("Ro");
        if self.rng.gen() {
            let e = self.bool_expr(&scope_out, 2);
            let _ = writeln!(out, "relation {ro} : output {} ~ {} {{ {e} }}", a.name, c.name);
        } else {
            // A checker reading one abstract and one concrete output.
            let chk = self.fresh("Chk");
            let (l, r) = (a.outputs[0].clone(), c.outputs[0].clone());
            let pl = Ch {
                name: "p".into(),
                ty: l.ty.clone(),
            };
            let pr = Ch {
                name: "q".into(),
                ty: r.ty.clone(),
            };
            let verdict = Ch {
                name: "ok".into(),
                ty: Ty::Bool,
            };
            let mut text = String::new();
            self.automaton(&mut text, &chk, vec![pl, pr], vec![verdict]);
            out.push_str(&text);
            let _ = writeln!(
                out,
                "relation {ro} : output {} ~ {} checker {chk}(p = a.{}, q = c.{}) -> ok;",
                a.name, c.name, l.name, r.name
            );
        }
        out.push('\n');

        let gal = if self.rng.gen() {
            let g = self.fresh("G");
            let _ = writeln!(out, "galois {g} : {} ~ {} {{", a.name, c.name);
            let mut cs = Self::qualified(&c.inputs, "c");
            cs.extend(Self::qualified(&c.outputs, "c"));
            for (side, chans) in [("input", &a.inputs[..]), ("output", &a.outputs[1..])] {
                for ch in chans.iter() {
                    if self.rng.gen() {
                        let e = self.expr_of(&ch.ty, &cs);
                        let _ = writeln!(out, "    map {side} {} := {e};", ch.name);
                    }
                }
            }
            // At least one map.
            let first = &a.outputs[0];
            let e = self.expr_of(&first.ty, &cs);
            let _ = writeln!(out, "    map output {} := {e};", first.name);
            let mut both = cs.clone();
            both.extend(Self::qualified(&a.inputs, "a"));
            both.extend(Self::qualified(&a.outputs, "a"));
            for ch in &a.inputs {
                if self.rng.gen() {
                    let e = self.bool_expr(&both, 2);
                    let _ = writeln!(out, "    member input {} : {e};", ch.name);
                }
            }
            if self.rng.gen() {
                let h = self.rng.gen_range(0..3);
                let _ = writeln!(out, "    universe horizon {h} {{");
                for (p, chans) in [("c", &c.inputs), ("a", &a.inputs)] {
                    for ch in chans.iter() {
                        let n = self.rng.gen_range(0..4);
                        let vals: Vec<String> = (0..n).map(|_| self.literal(&ch.ty)).collect();
                        let _ = writeln!(out, "        {p}.{} in {{ {} }};", ch.name, vals.join(", "));
                    }
                }
                out.push_str("    }\n");
            }
            out.push_str("}\n\n");
            Some(g)
        } else {
            None
        };

        let conc = if a.name != c.name && self.rng.gen() {
            let np = self.rng.gen_range(0..3);
            let params = self.channels("p", np);
            let kinds: Vec<&str> = params.iter().map(|_| if self.rng.gen() { "const" } else { "stream" }).collect();
            let comp = self.fresh("Kc");
            let mut ins = a.inputs.clone();
            ins.extend(params.iter().cloned());
            let mut text = String::new();
            self.automaton(&mut text, &comp, ins, c.inputs.clone());
            out.push_str(&text);
            let k = self.fresh("K");
            let _ = writeln!(out, "concretizer {k} : {} ~ {} using {comp} {{", a.name, c.name);
            for (p, kind) in params.iter().zip(kinds) {
                let t = self.ty_text(&p.ty);
                let _ = writeln!(out, "    param {} : {t} {kind};", p.name);
            }
            out.push_str("}\n\n");
            Some(k)
        } else {
            None
        };

        let r = self.fresh("R");
        let _ = writeln!(out, "refinement {r} {{");
        let mut items = vec![format!("abstract {};", a.name), format!("concrete {};", c.name)];
        if self.rng.gen() {
            items.push(format!("ri {ri};"));
        }
        if self.rng.gen() {
            items.push(format!("ro {ro};"));
        }
        if let Some(g) = gal {
            items.push(format!("galois {g};"));
        }
        if let Some(k) = conc {
            items.push(format!("concretizer {k};"));
        }
        items.shuffle(&mut self.rng);
        for i in items {
            let _ = writeln!(out, "    {i}");
        }
        out.push_str("}\n");
    }
}
