//! Guard and assignment expressions.
//!
//! Expressions are built over named values (channels, variables, or `a.`/`c.`
//! qualified channels in relations) and literals. Identifiers that are not in
//! scope but name an enumeration label are rewritten into label literals by
//! [`Expr::resolve`].

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::value::{DataType, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    /// Truncating division on integers, ordinary division on reals.
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Implies => "=>",
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Implies => 1,
            BinaryOp::Or => 2,
            BinaryOp::And => 3,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Min,
    Max,
    Abs,
    Floor,
    /// `ite(cond, then, else)`
    Ite,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Floor => "floor",
            Func::Ite => "ite",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "min" => Func::Min,
            "max" => Func::Max,
            "abs" => Func::Abs,
            "floor" => Func::Floor,
            "ite" => Func::Ite,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Abs | Func::Floor => 1,
            Func::Ite => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Value),
    Name(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

// Small constructors, mostly for building specs in code.
impl Expr {
    pub fn name(n: impl Into<String>) -> Expr {
        Expr::Name(n.into())
    }
    pub fn lit(v: impl Into<Value>) -> Expr {
        Expr::Lit(v.into())
    }
    pub fn label(l: impl Into<String>) -> Expr {
        Expr::Lit(Value::Enum(l.into()))
    }
    pub fn tt() -> Expr {
        Expr::Lit(Value::Bool(true))
    }
    pub fn bin(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnaryOp::Not, Box::new(e))
    }
    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        Expr::Call(f, args)
    }

    /// Every name referenced by the expression (before label resolution this
    /// includes labels).
    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    /// Renames every name for which `f` returns a replacement.
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> Expr {
        match self {
            Expr::Lit(_) => self.clone(),
            Expr::Name(n) => Expr::Name(f(n).unwrap_or_else(|| n.clone())),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.rename(f))),
            Expr::Binary(op, l, r) => Expr::Binary(*op, Box::new(l.rename(f)), Box::new(r.rename(f))),
            Expr::Call(func, args) => Expr::Call(*func, args.iter().map(|a| a.rename(f)).collect()),
        }
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Name(n) => {
                if !out.contains(&n.as_str()) {
                    out.push(n)
                }
            }
            Expr::Unary(_, e) => e.collect_names(out),
            Expr::Binary(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_names(out)),
        }
    }
}

/// Static type of an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Int,
    Real,
    Enum(Vec<String>),
    /// A bare label literal, compatible with any enumeration that has it.
    Label(String),
}

impl Ty {
    pub fn of(ty: &DataType) -> Ty {
        match ty {
            DataType::Bool => Ty::Bool,
            DataType::Int { .. } => Ty::Int,
            DataType::Real => Ty::Real,
            DataType::Enum(l) => Ty::Enum(l.clone()),
        }
    }

    fn is_numeric(&self) -> bool {
        matches!(self, Ty::Int | Ty::Real)
    }

    fn compatible(&self, other: &Ty) -> bool {
        match (self, other) {
            (a, b) if a.is_numeric() && b.is_numeric() => true,
            (Ty::Bool, Ty::Bool) => true,
            (Ty::Enum(a), Ty::Enum(b)) => a == b,
            (Ty::Enum(ls), Ty::Label(l)) | (Ty::Label(l), Ty::Enum(ls)) => ls.contains(l),
            (Ty::Label(_), Ty::Label(_)) => true,
            _ => false,
        }
    }

    /// Whether a value of this type can be stored in `target`.
    pub fn assignable_to(&self, target: &DataType) -> bool {
        match (target, self) {
            (DataType::Bool, Ty::Bool) => true,
            (DataType::Int { .. }, Ty::Int) => true,
            (DataType::Real, Ty::Int | Ty::Real) => true,
            (DataType::Enum(ls), Ty::Enum(o)) => ls == o,
            (DataType::Enum(ls), Ty::Label(l)) => ls.contains(l),
            _ => false,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Bool => f.write_str("bool"),
            Ty::Int => f.write_str("int"),
            Ty::Real => f.write_str("real"),
            Ty::Enum(l) => write!(f, "enum {{ {} }}", l.join(", ")),
            Ty::Label(l) => write!(f, "label `{l}`"),
        }
    }
}

/// Names visible to an expression during type checking.
pub trait Scope {
    fn lookup(&self, name: &str) -> Option<&DataType>;
    fn is_label(&self, name: &str) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unresolved channel `{0}`")]
    Unresolved(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("`{func}` expects {expected} arguments, got {found}")]
    Arity { func: &'static str, expected: usize, found: usize },
}

fn type_err(msg: impl Into<String>) -> ExprError {
    ExprError::Type(msg.into())
}

impl Expr {
    /// Type-checks the expression, rewriting unbound identifiers that name
    /// enumeration labels into literals. Idempotent.
    pub fn resolve(&mut self, scope: &dyn Scope) -> Result<Ty, ExprError> {
        match self {
            Expr::Lit(v) => Ok(match v {
                Value::Bool(_) => Ty::Bool,
                Value::Int(_) => Ty::Int,
                Value::Real(_) => Ty::Real,
                Value::Enum(l) => Ty::Label(l.clone()),
            }),
            Expr::Name(n) => {
                if let Some(t) = scope.lookup(n) {
                    Ok(Ty::of(t))
                } else if scope.is_label(n) {
                    let l = core::mem::take(n);
                    *self = Expr::Lit(Value::Enum(l.clone()));
                    Ok(Ty::Label(l))
                } else {
                    Err(ExprError::Unresolved(n.clone()))
                }
            }
            Expr::Unary(op, e) => {
                let t = e.resolve(scope)?;
                match (op, &t) {
                    (UnaryOp::Not, Ty::Bool) => Ok(Ty::Bool),
                    (UnaryOp::Neg, Ty::Int | Ty::Real) => Ok(t),
                    (UnaryOp::Not, _) => Err(type_err(alloc::format!("`!` applied to {t}"))),
                    (UnaryOp::Neg, _) => Err(type_err(alloc::format!("`-` applied to {t}"))),
                }
            }
            Expr::Binary(op, l, r) => {
                let op = *op;
                let lt = l.resolve(scope)?;
                let rt = r.resolve(scope)?;
                let mismatch = || type_err(alloc::format!("`{}` applied to {lt} and {rt}", op.symbol()));
                match op {
                    BinaryOp::Implies | BinaryOp::Or | BinaryOp::And => {
                        if lt == Ty::Bool && rt == Ty::Bool {
                            Ok(Ty::Bool)
                        } else {
                            Err(mismatch())
                        }
                    }
                    BinaryOp::Eq | BinaryOp::Ne => {
                        if lt.compatible(&rt) {
                            Ok(Ty::Bool)
                        } else {
                            Err(mismatch())
                        }
                    }
                    BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                        if lt.is_numeric() && rt.is_numeric() {
                            Ok(Ty::Bool)
                        } else {
                            Err(mismatch())
                        }
                    }
                    BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => match (&lt, &rt) {
                        (Ty::Int, Ty::Int) => Ok(Ty::Int),
                        (a, b) if a.is_numeric() && b.is_numeric() => Ok(Ty::Real),
                        _ => Err(mismatch()),
                    },
                }
            }
            Expr::Call(f, args) => {
                let f = *f;
                if args.len() != f.arity() {
                    return Err(ExprError::Arity {
                        func: f.name(),
                        expected: f.arity(),
                        found: args.len(),
                    });
                }
                let tys = args.iter_mut().map(|a| a.resolve(scope)).collect::<Result<Vec<_>, _>>()?;
                match f {
                    Func::Min | Func::Max => match (&tys[0], &tys[1]) {
                        (Ty::Int, Ty::Int) => Ok(Ty::Int),
                        (a, b) if a.is_numeric() && b.is_numeric() => Ok(Ty::Real),
                        _ => Err(type_err(alloc::format!("`{}` needs numbers", f.name()))),
                    },
                    Func::Abs if tys[0].is_numeric() => Ok(tys[0].clone()),
                    Func::Floor if tys[0].is_numeric() => Ok(Ty::Int),
                    Func::Abs | Func::Floor => Err(type_err(alloc::format!("`{}` needs a number", f.name()))),
                    Func::Ite => {
                        if tys[0] != Ty::Bool {
                            return Err(type_err("`ite` condition must be bool"));
                        }
                        if !tys[1].compatible(&tys[2]) {
                            return Err(type_err(alloc::format!("`ite` branches differ: {} and {}", tys[1], tys[2])));
                        }
                        Ok(match (&tys[1], &tys[2]) {
                            (Ty::Int, Ty::Int) => Ty::Int,
                            (a, _) if a.is_numeric() => Ty::Real,
                            (Ty::Label(_), b) => b.clone(),
                            (a, _) => a.clone(),
                        })
                    }
                }
            }
        }
    }
}

/// Values of the names an expression may read.
pub trait Env {
    fn get(&self, name: &str) -> Option<&Value>;
}

impl Env for alloc::collections::BTreeMap<String, Value> {
    fn get(&self, name: &str) -> Option<&Value> {
        alloc::collections::BTreeMap::get(self, name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value for `{0}`")]
    Unbound(String),
    #[error("ill-typed operands for `{0}`")]
    Operands(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow in `{0}`")]
    Overflow(&'static str),
    #[error("non-finite real result in `{0}`")]
    NonFinite(&'static str),
}

fn real(r: f64, op: &'static str) -> Result<Value, EvalError> {
    if r.is_finite() {
        Ok(Value::real(r))
    } else {
        Err(EvalError::NonFinite(op))
    }
}

impl Expr {
    pub fn eval(&self, env: &dyn Env) -> Result<Value, EvalError> {
        match self {
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Name(n) => env.get(n).cloned().ok_or_else(|| EvalError::Unbound(n.clone())),
            Expr::Unary(UnaryOp::Not, e) => match e.eval(env)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                _ => Err(EvalError::Operands("!")),
            },
            Expr::Unary(UnaryOp::Neg, e) => match e.eval(env)? {
                Value::Int(i) => i.checked_neg().map(Value::Int).ok_or(EvalError::Overflow("-")),
                Value::Real(r) => Ok(Value::real(-r)),
                _ => Err(EvalError::Operands("-")),
            },
            Expr::Binary(op, l, r) => {
                let op = *op;
                // Boolean connectives short-circuit.
                match op {
                    BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => {
                        let lv = l.eval(env)?.as_bool().ok_or(EvalError::Operands(op.symbol()))?;
                        let short = match op {
                            BinaryOp::And => (!lv).then_some(false),
                            BinaryOp::Or => lv.then_some(true),
                            _ => (!lv).then_some(true),
                        };
                        if let Some(b) = short {
                            return Ok(Value::Bool(b));
                        }
                        let rv = r.eval(env)?.as_bool().ok_or(EvalError::Operands(op.symbol()))?;
                        return Ok(Value::Bool(rv));
                    }
                    _ => {}
                }
                let lv = l.eval(env)?;
                let rv = r.eval(env)?;
                binary(op, &lv, &rv)
            }
            Expr::Call(f, args) => {
                if args.len() != f.arity() {
                    return Err(EvalError::Operands(f.name()));
                }
                if *f == Func::Ite {
                    let c = args[0].eval(env)?.as_bool().ok_or(EvalError::Operands("ite"))?;
                    return if c { args[1].eval(env) } else { args[2].eval(env) };
                }
                let vals = args.iter().map(|a| a.eval(env)).collect::<Result<Vec<_>, _>>()?;
                call(*f, &vals)
            }
        }
    }
}

fn binary(op: BinaryOp, l: &Value, r: &Value) -> Result<Value, EvalError> {
    use BinaryOp::*;
    let sym = op.symbol();
    match op {
        Eq | Ne => {
            let eq = match (l, r) {
                (Value::Int(_) | Value::Real(_), Value::Int(_) | Value::Real(_)) => match (l, r) {
                    (Value::Int(a), Value::Int(b)) => a == b,
                    _ => l.as_f64() == r.as_f64(),
                },
                (Value::Bool(a), Value::Bool(b)) => a == b,
                (Value::Enum(a), Value::Enum(b)) => a == b,
                _ => return Err(EvalError::Operands(sym)),
            };
            Ok(Value::Bool(if op == Eq { eq } else { !eq }))
        }
        Lt | Le | Gt | Ge => {
            let ord = match (l, r) {
                (Value::Int(a), Value::Int(b)) => a.partial_cmp(b),
                _ => match (l.as_f64(), r.as_f64()) {
                    (Some(a), Some(b)) => a.partial_cmp(&b),
                    _ => return Err(EvalError::Operands(sym)),
                },
            };
            let ord = ord.ok_or(EvalError::Operands(sym))?;
            Ok(Value::Bool(match op {
                Lt => ord.is_lt(),
                Le => ord.is_le(),
                Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }))
        }
        Add | Sub | Mul | Div => match (l, r) {
            (Value::Int(a), Value::Int(b)) => {
                let v = match op {
                    Add => a.checked_add(*b),
                    Sub => a.checked_sub(*b),
                    Mul => a.checked_mul(*b),
                    _ => {
                        if *b == 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a.checked_div(*b)
                    }
                };
                v.map(Value::Int).ok_or(EvalError::Overflow(sym))
            }
            _ => {
                let (a, b) = match (l.as_f64(), r.as_f64()) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(EvalError::Operands(sym)),
                };
                let v = match op {
                    Add => a + b,
                    Sub => a - b,
                    Mul => a * b,
                    _ => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                };
                real(v, sym)
            }
        },
        Implies | Or | And => unreachable!("handled by the caller"),
    }
}

fn call(f: Func, vals: &[Value]) -> Result<Value, EvalError> {
    let name = f.name();
    match f {
        Func::Min | Func::Max => match (&vals[0], &vals[1]) {
            (Value::Int(a), Value::Int(b)) => Ok(Value::Int(if f == Func::Min { *a.min(b) } else { *a.max(b) })),
            (a, b) => {
                let (a, b) = (
                    a.as_f64().ok_or(EvalError::Operands(name))?,
                    b.as_f64().ok_or(EvalError::Operands(name))?,
                );
                real(if f == Func::Min { libm::fmin(a, b) } else { libm::fmax(a, b) }, name)
            }
        },
        Func::Abs => match &vals[0] {
            Value::Int(a) => a.checked_abs().map(Value::Int).ok_or(EvalError::Overflow(name)),
            Value::Real(a) => real(libm::fabs(*a), name),
            _ => Err(EvalError::Operands(name)),
        },
        Func::Floor => match &vals[0] {
            Value::Int(a) => Ok(Value::Int(*a)),
            Value::Real(a) => {
                let fl = libm::floor(*a);
                if (-9.223_372_036_854_776e18..9.223_372_036_854_776e18).contains(&fl) {
                    Ok(Value::Int(fl as i64))
                } else {
                    Err(EvalError::Overflow(name))
                }
            }
            _ => Err(EvalError::Operands(name)),
        },
        Func::Ite => unreachable!("handled by the caller"),
    }
}

/// Prints with explicit parentheses around every compound operand, so the
/// text parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(v) => write_literal(f, v),
            Expr::Name(n) => f.write_str(n),
            Expr::Unary(op, e) => {
                f.write_str(match op {
                    UnaryOp::Not => "!",
                    UnaryOp::Neg => "-",
                })?;
                // `-1` would read back as a literal, so keep the operand separate.
                match **e {
                    Expr::Lit(Value::Int(_) | Value::Real(_)) => write!(f, "({e})"),
                    _ => write_operand(f, e),
                }
            }
            Expr::Binary(op, l, r) => {
                write_operand(f, l)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Binary(..) | Expr::Unary(..) => write!(f, "({e})"),
        Expr::Lit(Value::Int(i)) if *i < 0 => write!(f, "({i})"),
        Expr::Lit(Value::Real(r)) if r.is_sign_negative() => {
            f.write_str("(")?;
            write_literal(f, &Value::Real(*r))?;
            f.write_str(")")
        }
        _ => write!(f, "{e}"),
    }
}

/// Literals in expression text: reals always carry a `.` or exponent.
pub fn write_literal(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Real(r) => write!(f, "{r:?}"),
        other => write!(f, "{other}"),
    }
}

/// A literal rendered the way [`Expr`]'s `Display` renders it.
pub fn literal_text(v: &Value) -> String {
    struct L<'a>(&'a Value);
    impl fmt::Display for L<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_literal(f, self.0)
        }
    }
    L(v).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    struct S(BTreeMap<String, DataType>, Vec<String>);
    impl Scope for S {
        fn lookup(&self, name: &str) -> Option<&DataType> {
            self.0.get(name)
        }
        fn is_label(&self, name: &str) -> bool {
            self.1.iter().any(|l| l == name)
        }
    }

    fn scope() -> S {
        let mut m = BTreeMap::new();
        m.insert("x".into(), DataType::int(-10, 10).unwrap());
        m.insert("r".into(), DataType::Real);
        m.insert("b".into(), DataType::Bool);
        m.insert("st".into(), DataType::enumeration(["Standby", "Active"]).unwrap());
        S(m, vec!["Standby".into(), "Active".into()])
    }

    #[test]
    fn labels_resolve_to_literals() {
        let mut e = Expr::bin(BinaryOp::Eq, Expr::name("st"), Expr::name("Active"));
        assert_eq!(e.resolve(&scope()), Ok(Ty::Bool));
        assert_eq!(e, Expr::bin(BinaryOp::Eq, Expr::name("st"), Expr::label("Active")));
        // second resolution is a no-op
        assert_eq!(e.clone().resolve(&scope()), Ok(Ty::Bool));
    }

    #[test]
    fn unresolved_names_are_reported() {
        let mut e = Expr::bin(BinaryOp::Gt, Expr::name("DriverBrak"), Expr::lit(0i64));
        assert_eq!(e.resolve(&scope()), Err(ExprError::Unresolved("DriverBrak".into())));
    }

    #[test]
    fn type_errors_are_reported() {
        let mut e = Expr::bin(BinaryOp::And, Expr::name("x"), Expr::name("b"));
        assert!(matches!(e.resolve(&scope()), Err(ExprError::Type(_))));
        let mut e = Expr::bin(BinaryOp::Eq, Expr::name("st"), Expr::lit(1i64));
        assert!(e.resolve(&scope()).is_err());
        let mut e = Expr::call(Func::Min, vec![Expr::name("x")]);
        assert!(matches!(e.resolve(&scope()), Err(ExprError::Arity { .. })));
    }

    #[test]
    fn mixed_arithmetic_promotes_to_real() {
        let mut e = Expr::bin(BinaryOp::Add, Expr::name("x"), Expr::name("r"));
        assert_eq!(e.resolve(&scope()), Ok(Ty::Real));
        let mut env = BTreeMap::new();
        env.insert("x".to_string(), Value::Int(2));
        env.insert("r".to_string(), Value::Real(0.5));
        assert_eq!(e.eval(&env), Ok(Value::Real(2.5)));
    }

    #[test]
    fn evaluation_examples() {
        let env: BTreeMap<String, Value> = [
            ("d".to_string(), Value::Int(3)),
            ("s".to_string(), Value::Int(5)),
            ("v".to_string(), Value::Real(-3.6)),
        ]
        .into_iter()
        .collect();
        let min = Expr::call(Func::Min, vec![Expr::name("d"), Expr::name("s")]);
        assert_eq!(min.eval(&env), Ok(Value::Int(3)));
        let fl = Expr::call(Func::Floor, vec![Expr::name("v")]);
        assert_eq!(fl.eval(&env), Ok(Value::Int(-4)));
        let div = Expr::bin(BinaryOp::Div, Expr::lit(-7i64), Expr::lit(2i64));
        assert_eq!(div.eval(&env), Ok(Value::Int(-3)));
        let dz = Expr::bin(BinaryOp::Div, Expr::name("d"), Expr::lit(0i64));
        assert_eq!(dz.eval(&env), Err(EvalError::DivisionByZero));
        let ovf = Expr::bin(BinaryOp::Mul, Expr::lit(i64::MAX), Expr::lit(2i64));
        assert!(matches!(ovf.eval(&env), Err(EvalError::Overflow(_))));
        let ite = Expr::call(
            Func::Ite,
            vec![
                Expr::bin(BinaryOp::Lt, Expr::name("d"), Expr::name("s")),
                Expr::lit(1i64),
                Expr::lit(2i64),
            ],
        );
        assert_eq!(ite.eval(&env), Ok(Value::Int(1)));
    }

    #[test]
    fn connectives_short_circuit() {
        let env = BTreeMap::new();
        // the right operand is unbound but never evaluated
        let e = Expr::bin(BinaryOp::Or, Expr::tt(), Expr::name("missing"));
        assert_eq!(e.eval(&env), Ok(Value::Bool(true)));
        let e = Expr::bin(BinaryOp::Implies, Expr::lit(false), Expr::name("missing"));
        assert_eq!(e.eval(&env), Ok(Value::Bool(true)));
    }

    #[test]
    fn display_parenthesizes_operands() {
        let e = Expr::bin(
            BinaryOp::Mul,
            Expr::bin(BinaryOp::Add, Expr::name("a"), Expr::lit(-1i64)),
            Expr::lit(2.0),
        );
        assert_eq!(e.to_string(), "(a + (-1)) * 2.0");
    }
}
