//! Syntax only: turns tokens into unresolved declarations.

use streamcheck_core::abstraction::{Level, PairRef, ParamKind, Side};
use streamcheck_core::component::{Causality, Endpoint};
use streamcheck_core::expr::{BinaryOp, Func, UnaryOp};
use streamcheck_core::{Expr, Value};

use super::lexer::{describe, lex, Tok, Token};
use super::{Diagnostic, Pos};

const MAX_DEPTH: usize = 128;

pub const RESERVED: &[&str] = &[
    "abstract",
    "bool",
    "causality",
    "checker",
    "component",
    "composite",
    "concrete",
    "concretizer",
    "connect",
    "const",
    "do",
    "enum",
    "false",
    "galois",
    "in",
    "initial",
    "input",
    "int",
    "map",
    "member",
    "output",
    "param",
    "real",
    "refinement",
    "relation",
    "ri",
    "ro",
    "states",
    "stream",
    "strict",
    "sub",
    "total",
    "transitions",
    "true",
    "type",
    "universe",
    "using",
    "var",
    "weak",
    "when",
];

#[derive(Debug, Clone, PartialEq)]
pub enum RawType {
    Bool,
    Real,
    Int(i64, i64),
    Enum(Vec<String>),
    Alias(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawLit {
    pub text: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawChannel {
    pub name: String,
    pub ty: RawType,
    pub init: Option<RawLit>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawTransition {
    pub name: Option<String>,
    pub source: String,
    pub target: String,
    pub guard: Option<Expr>,
    pub assignments: Vec<(String, Expr)>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawAutomaton {
    pub name: String,
    pub pos: Pos,
    pub causality: Causality,
    pub total: bool,
    pub inputs: Vec<RawChannel>,
    pub outputs: Vec<RawChannel>,
    pub vars: Vec<RawChannel>,
    pub states: Vec<String>,
    pub initial: Option<String>,
    pub transitions: Vec<RawTransition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawComposite {
    pub name: String,
    pub pos: Pos,
    pub inputs: Vec<RawChannel>,
    pub outputs: Vec<RawChannel>,
    pub subs: Vec<(String, String, Pos)>,
    pub connects: Vec<(Endpoint, Endpoint, Pos)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawRelationForm {
    Predicate(Expr),
    Checker {
        component: String,
        bindings: Vec<(String, PairRef)>,
        verdict: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRelation {
    pub name: String,
    pub pos: Pos,
    pub side: Side,
    pub abstract_component: String,
    pub concrete_component: String,
    pub form: RawRelationForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawUniverse {
    pub horizon: usize,
    pub entries: Vec<(PairRef, Vec<RawLit>, Pos)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawGalois {
    pub name: String,
    pub pos: Pos,
    pub abstract_component: String,
    pub concrete_component: String,
    pub maps: Vec<(Side, String, Expr, Pos)>,
    pub map_using: Option<(String, Pos)>,
    pub members: Vec<(Side, String, Expr, Pos)>,
    pub universe: Option<RawUniverse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawConcretizer {
    pub name: String,
    pub pos: Pos,
    pub abstract_component: String,
    pub concrete_component: String,
    pub component: String,
    pub params: Vec<(String, RawType, ParamKind, Pos)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawRefinement {
    pub name: String,
    pub pos: Pos,
    pub abstract_component: Option<String>,
    pub concrete_component: Option<String>,
    pub ri: Option<String>,
    pub ro: Option<String>,
    pub galois: Option<String>,
    pub concretizer: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawItem {
    Type(String, RawType, Pos),
    Automaton(RawAutomaton),
    Composite(RawComposite),
    Relation(RawRelation),
    Galois(RawGalois),
    Concretizer(RawConcretizer),
    Refinement(RawRefinement),
}

pub fn parse_items(src: &str) -> Result<Vec<RawItem>, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0, depth: 0 };
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(items)
}

/// Parses one expression, for tests and command-line use.
pub fn parse_expr(src: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0, depth: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::Eof => Ok(e),
        t => Err(Diagnostic::new(
            p.pos(),
            format!("expected end of expression, found {}", describe(t)),
        )),
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    depth: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::new(
            self.pos(),
            format!("expected {expected}, found {}", describe(self.peek())),
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(&format!("`{s}`"))
        }
    }

    fn kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(&format!("`{k}`"))
        }
    }

    /// A user-chosen name: any identifier that is not reserved.
    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if RESERVED.contains(&s.as_str()) => Err(Diagnostic::new(self.pos(), format!("`{s}` is a reserved word"))),
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("a name"),
        }
    }

    fn item(&mut self) -> PResult<RawItem> {
        let pos = self.pos();
        let Tok::Ident(k) = self.peek().clone() else {
            return self.err("a declaration");
        };
        self.bump();
        match k.as_str() {
            "type" => {
                let name = self.ident()?;
                self.sym("=")?;
                let ty = self.ty()?;
                self.sym(";")?;
                Ok(RawItem::Type(name, ty, pos))
            }
            "component" => self.automaton(pos).map(RawItem::Automaton),
            "composite" => self.composite(pos).map(RawItem::Composite),
            "relation" => self.relation(pos).map(RawItem::Relation),
            "galois" => self.galois(pos).map(RawItem::Galois),
            "concretizer" => self.concretizer(pos).map(RawItem::Concretizer),
            "refinement" => self.refinement(pos).map(RawItem::Refinement),
            _ => Err(Diagnostic::new(pos, format!("expected a declaration, found `{k}`"))),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let pos = self.pos();
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                negate(n, neg).ok_or_else(|| Diagnostic::new(pos, "integer literal is out of range"))
            }
            _ => self.err("an integer"),
        }
    }

    fn ty(&mut self) -> PResult<RawType> {
        let pos = self.pos();
        if self.eat_kw("bool") {
            return Ok(RawType::Bool);
        }
        if self.eat_kw("real") {
            return Ok(RawType::Real);
        }
        if self.eat_kw("int") {
            self.sym("[")?;
            let lo = self.signed_int()?;
            self.sym(",")?;
            let hi = self.signed_int()?;
            self.sym("]")?;
            if lo > hi {
                return Err(Diagnostic::new(pos, format!("empty integer range [{lo}, {hi}]")));
            }
            return Ok(RawType::Int(lo, hi));
        }
        if self.eat_kw("enum") {
            self.sym("{")?;
            let mut labels = vec![self.ident()?];
            while self.eat_sym(",") {
                labels.push(self.ident()?);
            }
            self.sym("}")?;
            return Ok(RawType::Enum(labels));
        }
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => Ok(RawType::Alias(self.ident()?)),
            _ => self.err("a type"),
        }
    }

    fn literal(&mut self) -> PResult<RawLit> {
        let pos = self.pos();
        let neg = self.eat_sym("-");
        let t = self.peek().clone();
        let text = match t {
            Tok::Int(_) | Tok::Real(_) => self.bump().text,
            Tok::Ident(ref s) if !neg && (s == "true" || s == "false" || !RESERVED.contains(&s.as_str())) => self.bump().text,
            _ => return self.err("a literal"),
        };
        Ok(RawLit {
            text: if neg { format!("-{text}") } else { text },
            pos,
        })
    }

    fn channel(&mut self, with_init: bool) -> PResult<RawChannel> {
        let pos = self.pos();
        let name = self.ident()?;
        self.sym(":")?;
        let ty = self.ty()?;
        let init = if with_init && self.eat_sym("=") {
            Some(self.literal()?)
        } else {
            None
        };
        self.sym(";")?;
        Ok(RawChannel { name, ty, init, pos })
    }

    fn automaton(&mut self, pos: Pos) -> PResult<RawAutomaton> {
        let name = self.ident()?;
        let mut a = RawAutomaton {
            name,
            pos,
            causality: Causality::Strict,
            total: false,
            inputs: Vec::new(),
            outputs: Vec::new(),
            vars: Vec::new(),
            states: Vec::new(),
            initial: None,
            transitions: Vec::new(),
        };
        self.sym("{")?;
        while !self.eat_sym("}") {
            if self.eat_kw("causality") {
                a.causality = if self.eat_kw("strict") {
                    Causality::Strict
                } else if self.eat_kw("weak") {
                    Causality::Weak
                } else {
                    return self.err("`strict` or `weak`");
                };
                self.sym(";")?;
            } else if self.eat_kw("total") {
                a.total = true;
                self.sym(";")?;
            } else if self.eat_kw("input") {
                a.inputs.push(self.channel(false)?);
            } else if self.eat_kw("output") {
                a.outputs.push(self.channel(true)?);
            } else if self.eat_kw("var") {
                let v = self.channel(true)?;
                if v.init.is_none() {
                    return Err(Diagnostic::new(v.pos, format!("variable `{}` needs an initial value", v.name)));
                }
                a.vars.push(v);
            } else if self.eat_kw("states") {
                self.sym("{")?;
                loop {
                    let initial = self.eat_kw("initial");
                    let s = self.ident()?;
                    if initial {
                        if a.initial.is_some() {
                            return Err(Diagnostic::new(self.pos(), "more than one initial state"));
                        }
                        a.initial = Some(s.clone());
                    }
                    a.states.push(s);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.sym("}")?;
            } else if self.eat_kw("transitions") {
                self.sym("{")?;
                while !self.eat_sym("}") {
                    a.transitions.push(self.transition()?);
                }
            } else {
                return self.err("a component item");
            }
        }
        Ok(a)
    }

    fn transition(&mut self) -> PResult<RawTransition> {
        let pos = self.pos();
        let name = if matches!(self.peek_at(1), Tok::Sym(":")) {
            let n = self.ident()?;
            self.sym(":")?;
            Some(n)
        } else {
            None
        };
        let source = self.ident()?;
        self.sym("->")?;
        let target = self.ident()?;
        let guard = if self.eat_kw("when") { Some(self.expr()?) } else { None };
        let mut assignments = Vec::new();
        if self.eat_kw("do") {
            loop {
                let t = self.ident()?;
                self.sym(":=")?;
                assignments.push((t, self.expr()?));
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.sym(";")?;
        Ok(RawTransition {
            name,
            source,
            target,
            guard,
            assignments,
            pos,
        })
    }

    fn endpoint(&mut self) -> PResult<Endpoint> {
        let a = self.ident()?;
        if self.eat_sym(".") {
            let b = self.ident()?;
            Ok(Endpoint::Port { instance: a, channel: b })
        } else {
            Ok(Endpoint::Boundary(a))
        }
    }

    fn composite(&mut self, pos: Pos) -> PResult<RawComposite> {
        let name = self.ident()?;
        let mut c = RawComposite {
            name,
            pos,
            inputs: Vec::new(),
            outputs: Vec::new(),
            subs: Vec::new(),
            connects: Vec::new(),
        };
        self.sym("{")?;
        while !self.eat_sym("}") {
            let p = self.pos();
            if self.eat_kw("input") {
                c.inputs.push(self.channel(false)?);
            } else if self.eat_kw("output") {
                c.outputs.push(self.channel(false)?);
            } else if self.eat_kw("sub") {
                let inst = self.ident()?;
                self.sym(":")?;
                let comp = self.ident()?;
                self.sym(";")?;
                c.subs.push((inst, comp, p));
            } else if self.eat_kw("connect") {
                let from = self.endpoint()?;
                self.sym("->")?;
                let to = self.endpoint()?;
                self.sym(";")?;
                c.connects.push((from, to, p));
            } else {
                return self.err("a composite item");
            }
        }
        Ok(c)
    }

    fn side(&mut self) -> PResult<Side> {
        if self.eat_kw("input") {
            Ok(Side::Input)
        } else if self.eat_kw("output") {
            Ok(Side::Output)
        } else {
            self.err("`input` or `output`")
        }
    }

    fn pair(&mut self) -> PResult<(String, String)> {
        let a = self.ident()?;
        self.sym("~")?;
        let c = self.ident()?;
        Ok((a, c))
    }

    fn qname(&mut self) -> PResult<PairRef> {
        let level = match self.peek() {
            Tok::Ident(s) if s == "a" => Level::Abstract,
            Tok::Ident(s) if s == "c" => Level::Concrete,
            _ => return self.err("`a.<channel>` or `c.<channel>`"),
        };
        self.bump();
        self.sym(".")?;
        let channel = self.ident()?;
        Ok(PairRef { level, channel })
    }

    fn relation(&mut self, pos: Pos) -> PResult<RawRelation> {
        let name = self.ident()?;
        self.sym(":")?;
        let side = self.side()?;
        let (abstract_component, concrete_component) = self.pair()?;
        let form = if self.eat_sym("{") {
            let e = self.expr()?;
            self.sym("}")?;
            RawRelationForm::Predicate(e)
        } else if self.eat_kw("checker") {
            let component = self.ident()?;
            self.sym("(")?;
            let mut bindings = Vec::new();
            if !self.is_sym(")") {
                loop {
                    let port = self.ident()?;
                    self.sym("=")?;
                    bindings.push((port, self.qname()?));
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.sym(")")?;
            self.sym("->")?;
            let verdict = self.ident()?;
            self.sym(";")?;
            RawRelationForm::Checker {
                component,
                bindings,
                verdict,
            }
        } else {
            return self.err("`{` or `checker`");
        };
        Ok(RawRelation {
            name,
            pos,
            side,
            abstract_component,
            concrete_component,
            form,
        })
    }

    fn galois(&mut self, pos: Pos) -> PResult<RawGalois> {
        let name = self.ident()?;
        self.sym(":")?;
        let (abstract_component, concrete_component) = self.pair()?;
        let mut g = RawGalois {
            name,
            pos,
            abstract_component,
            concrete_component,
            maps: Vec::new(),
            map_using: None,
            members: Vec::new(),
            universe: None,
        };
        self.sym("{")?;
        while !self.eat_sym("}") {
            let p = self.pos();
            if self.eat_kw("map") {
                if self.eat_kw("using") {
                    g.map_using = Some((self.ident()?, p));
                } else {
                    let side = self.side()?;
                    let target = self.ident()?;
                    self.sym(":=")?;
                    let e = self.expr()?;
                    g.maps.push((side, target, e, p));
                }
                self.sym(";")?;
            } else if self.eat_kw("member") {
                let side = self.side()?;
                let target = self.ident()?;
                self.sym(":")?;
                let e = self.expr()?;
                self.sym(";")?;
                g.members.push((side, target, e, p));
            } else if self.eat_kw("universe") {
                if g.universe.is_some() {
                    return Err(Diagnostic::new(p, "more than one universe"));
                }
                self.kw("horizon")?;
                let horizon = match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        usize::try_from(n).map_err(|_| Diagnostic::new(p, "horizon is out of range"))?
                    }
                    _ => return self.err("a horizon"),
                };
                let mut entries = Vec::new();
                self.sym("{")?;
                while !self.eat_sym("}") {
                    let ep = self.pos();
                    let q = self.qname()?;
                    self.kw("in")?;
                    self.sym("{")?;
                    let mut vals = Vec::new();
                    if !self.is_sym("}") {
                        loop {
                            vals.push(self.literal()?);
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.sym("}")?;
                    self.sym(";")?;
                    entries.push((q, vals, ep));
                }
                g.universe = Some(RawUniverse { horizon, entries });
            } else {
                return self.err("`map`, `member` or `universe`");
            }
        }
        Ok(g)
    }

    fn concretizer(&mut self, pos: Pos) -> PResult<RawConcretizer> {
        let name = self.ident()?;
        self.sym(":")?;
        let (abstract_component, concrete_component) = self.pair()?;
        self.kw("using")?;
        let component = self.ident()?;
        let mut params = Vec::new();
        self.sym("{")?;
        while !self.eat_sym("}") {
            let p = self.pos();
            self.kw("param")?;
            let n = self.ident()?;
            self.sym(":")?;
            let ty = self.ty()?;
            let kind = if self.eat_kw("const") {
                ParamKind::Const
            } else if self.eat_kw("stream") {
                ParamKind::Stream
            } else {
                return self.err("`const` or `stream`");
            };
            self.sym(";")?;
            params.push((n, ty, kind, p));
        }
        Ok(RawConcretizer {
            name,
            pos,
            abstract_component,
            concrete_component,
            component,
            params,
        })
    }

    fn refinement(&mut self, pos: Pos) -> PResult<RawRefinement> {
        let name = self.ident()?;
        let mut r = RawRefinement {
            name,
            pos,
            ..Default::default()
        };
        self.sym("{")?;
        while !self.eat_sym("}") {
            let p = self.pos();
            let Tok::Ident(k) = self.peek().clone() else {
                return self.err("a refinement item");
            };
            self.bump();
            let slot = match k.as_str() {
                "abstract" => &mut r.abstract_component,
                "concrete" => &mut r.concrete_component,
                "ri" => &mut r.ri,
                "ro" => &mut r.ro,
                "galois" => &mut r.galois,
                "concretizer" => &mut r.concretizer,
                _ => return Err(Diagnostic::new(p, format!("expected a refinement item, found `{k}`"))),
            };
            if slot.is_some() {
                return Err(Diagnostic::new(p, format!("`{k}` given twice")));
            }
            *slot = Some(self.ident()?);
            self.sym(";")?;
        }
        Ok(r)
    }

    // Expressions, loosest binding first.

    fn expr(&mut self) -> PResult<Expr> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Diagnostic::new(self.pos(), "expression nested too deeply"));
        }
        let r = self.implies();
        self.depth -= 1;
        r
    }

    fn implies(&mut self) -> PResult<Expr> {
        let l = self.or()?;
        if self.eat_sym("=>") {
            let r = self.expr()?;
            return Ok(Expr::bin(BinaryOp::Implies, l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut l = self.and()?;
        while self.eat_sym("||") {
            l = Expr::bin(BinaryOp::Or, l, self.and()?);
        }
        Ok(l)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut l = self.cmp()?;
        while self.eat_sym("&&") {
            l = Expr::bin(BinaryOp::And, l, self.cmp()?);
        }
        Ok(l)
    }

    fn cmp(&mut self) -> PResult<Expr> {
        let l = self.sum()?;
        let op = match self.peek() {
            Tok::Sym("==") => BinaryOp::Eq,
            Tok::Sym("!=") => BinaryOp::Ne,
            Tok::Sym("<") => BinaryOp::Lt,
            Tok::Sym("<=") => BinaryOp::Le,
            Tok::Sym(">") => BinaryOp::Gt,
            Tok::Sym(">=") => BinaryOp::Ge,
            _ => return Ok(l),
        };
        self.bump();
        let r = self.sum()?;
        if matches!(self.peek(), Tok::Sym("==" | "!=" | "<" | "<=" | ">" | ">=")) {
            return Err(Diagnostic::new(self.pos(), "comparisons do not chain; add parentheses"));
        }
        Ok(Expr::bin(op, l, r))
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut l = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinaryOp::Add,
                Tok::Sym("-") => BinaryOp::Sub,
                _ => return Ok(l),
            };
            self.bump();
            l = Expr::bin(op, l, self.product()?);
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut l = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinaryOp::Mul,
                Tok::Sym("/") => BinaryOp::Div,
                _ => return Ok(l),
            };
            self.bump();
            l = Expr::bin(op, l, self.unary()?);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        if self.eat_sym("!") {
            return Ok(Expr::not(self.nested_unary()?));
        }
        if self.eat_sym("-") {
            // A minus directly on a number is part of the literal.
            match self.peek().clone() {
                Tok::Int(n) => {
                    self.bump();
                    let v = negate(n, true).ok_or_else(|| Diagnostic::new(pos, "integer literal is out of range"))?;
                    return Ok(Expr::lit(v));
                }
                Tok::Real(r) => {
                    self.bump();
                    return Ok(Expr::lit(Value::real(-r)));
                }
                _ => return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.nested_unary()?))),
            }
        }
        self.primary()
    }

    fn nested_unary(&mut self) -> PResult<Expr> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Diagnostic::new(self.pos(), "expression nested too deeply"));
        }
        let r = self.unary();
        self.depth -= 1;
        r
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                let v = negate(n, false).ok_or_else(|| Diagnostic::new(pos, "integer literal is out of range"))?;
                Ok(Expr::lit(v))
            }
            Tok::Real(r) => {
                self.bump();
                Ok(Expr::lit(Value::real(r)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::lit(s == "true"))
            }
            Tok::Ident(s) => {
                if matches!(self.peek_at(1), Tok::Sym("(")) {
                    let Some(f) = Func::from_name(&s) else {
                        return Err(Diagnostic::new(pos, format!("unknown function `{s}`")));
                    };
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if !self.is_sym(")") {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.sym(")")?;
                    if args.len() != f.arity() {
                        return Err(Diagnostic::new(
                            pos,
                            format!("`{}` expects {} arguments, got {}", f.name(), f.arity(), args.len()),
                        ));
                    }
                    return Ok(Expr::call(f, args));
                }
                let first = self.ident()?;
                if self.eat_sym(".") {
                    let second = self.ident()?;
                    return Ok(Expr::name(format!("{first}.{second}")));
                }
                Ok(Expr::name(first))
            }
            _ => self.err("an expression"),
        }
    }
}

fn negate(n: u64, neg: bool) -> Option<i64> {
    if neg {
        if n == 1 << 63 {
            Some(i64::MIN)
        } else {
            i64::try_from(n).ok().map(|x| -x)
        }
    } else {
        i64::try_from(n).ok()
    }
}
