//! Message types and the scalar values carried on channels.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

/// The type of a channel, variable or stream element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DataType {
    Bool,
    /// Inclusive integer range. Build with [`DataType::int`] so that `lo <= hi`.
    Int {
        lo: i64,
        hi: i64,
    },
    /// Finite 64-bit floats.
    Real,
    /// Ordered, distinct labels. Build with [`DataType::enumeration`].
    Enum(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("empty integer range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("enumeration needs at least one label")]
    NoLabels,
    #[error("duplicate enumeration label `{0}`")]
    DuplicateLabel(String),
}

/// A value that does not belong to the domain of a type.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("value `{value}` is outside type {ty}")]
pub struct DomainError {
    pub value: Value,
    pub ty: DataType,
}

impl DataType {
    pub fn int(lo: i64, hi: i64) -> Result<Self, TypeError> {
        if lo > hi {
            return Err(TypeError::EmptyRange { lo, hi });
        }
        Ok(DataType::Int { lo, hi })
    }

    pub fn enumeration<I, S>(labels: I) -> Result<Self, TypeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(TypeError::NoLabels);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(TypeError::DuplicateLabel(l.clone()));
            }
        }
        Ok(DataType::Enum(labels))
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (DataType::Bool, Value::Bool(_)) => true,
            (DataType::Int { lo, hi }, Value::Int(v)) => lo <= v && v <= hi,
            (DataType::Real, Value::Real(v)) => v.is_finite(),
            (DataType::Enum(labels), Value::Enum(l)) => labels.iter().any(|x| x == l),
            _ => false,
        }
    }

    /// Admits `value` into this type. Integer values are promoted when the
    /// type is `Real`; everything else must already match.
    pub fn admit(&self, value: Value) -> Result<Value, DomainError> {
        let value = match (self, value) {
            (DataType::Real, Value::Int(i)) => Value::real(i as f64),
            (DataType::Real, Value::Real(r)) => Value::real(r),
            (_, v) => v,
        };
        if self.contains(&value) {
            Ok(value)
        } else {
            Err(DomainError { value, ty: self.clone() })
        }
    }

    /// The value used when nothing else is known: `false`, the integer in
    /// range closest to zero, `0.0`, or the first label.
    pub fn default_value(&self) -> Value {
        match self {
            DataType::Bool => Value::Bool(false),
            DataType::Int { lo, hi } => Value::Int(0.clamp(*lo, *hi)),
            DataType::Real => Value::Real(0.0),
            DataType::Enum(labels) => Value::Enum(labels[0].clone()),
        }
    }

    /// Every value of the type, when there are at most `cap` of them.
    pub fn enumerate(&self, cap: usize) -> Option<Vec<Value>> {
        match self {
            DataType::Bool => (cap >= 2).then(|| alloc::vec![Value::Bool(false), Value::Bool(true)]),
            DataType::Int { lo, hi } => {
                let size = (*hi as i128) - (*lo as i128) + 1;
                if size > cap as i128 {
                    return None;
                }
                Some((*lo..=*hi).map(Value::Int).collect())
            }
            DataType::Real => None,
            DataType::Enum(labels) => (labels.len() <= cap).then(|| labels.iter().cloned().map(Value::Enum).collect()),
        }
    }

    /// A two-point abstraction of the domain: both booleans, the ends of an
    /// integer range, `-1.0`/`1.0` for reals and the first and last label.
    pub fn two_point(&self) -> Vec<Value> {
        match self {
            DataType::Bool => alloc::vec![Value::Bool(false), Value::Bool(true)],
            DataType::Int { lo, hi } if lo == hi => alloc::vec![Value::Int(*lo)],
            DataType::Int { lo, hi } => alloc::vec![Value::Int(*lo), Value::Int(*hi)],
            DataType::Real => alloc::vec![Value::Real(-1.0), Value::Real(1.0)],
            DataType::Enum(labels) if labels.len() == 1 => alloc::vec![Value::Enum(labels[0].clone())],
            DataType::Enum(labels) => alloc::vec![Value::Enum(labels[0].clone()), Value::Enum(labels[labels.len() - 1].clone()),],
        }
    }

    /// Parses a single cell or literal under this type.
    pub fn parse_value(&self, text: &str) -> Result<Value, ParseValueError> {
        let text = text.trim();
        let bad = || ParseValueError {
            text: text.to_string(),
            ty: self.clone(),
            suggestion: None,
        };
        let value = match self {
            DataType::Bool => match text {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => return Err(bad()),
            },
            DataType::Int { .. } => Value::Int(text.parse().map_err(|_| bad())?),
            DataType::Real => {
                let r: f64 = text.parse().map_err(|_| bad())?;
                if !r.is_finite() || !looks_decimal(text) {
                    return Err(bad());
                }
                Value::real(r)
            }
            DataType::Enum(labels) => {
                if !labels.iter().any(|l| l == text) {
                    let mut err = bad();
                    err.suggestion = closest_label(labels, text);
                    return Err(err);
                }
                Value::Enum(text.to_string())
            }
        };
        self.admit(value).map_err(|_| bad())
    }
}

fn looks_decimal(text: &str) -> bool {
    text.bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
}

fn closest_label(labels: &[String], text: &str) -> Option<String> {
    labels
        .iter()
        .map(|l| (edit_distance(l, text), l))
        .filter(|(d, l)| *d <= l.chars().count().max(2) / 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, l)| l.clone())
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cur = row[j + 1];
            row[j + 1] = if ca == *cb { prev } else { 1 + prev.min(cur).min(row[j]) };
            prev = cur;
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{text}` is not a value of type {ty}{}", .suggestion.as_ref().map(|s| alloc::format!(" (did you mean `{s}`?)")).unwrap_or_default())]
pub struct ParseValueError {
    pub text: String,
    pub ty: DataType,
    pub suggestion: Option<String>,
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Bool => f.write_str("bool"),
            DataType::Int { lo, hi } => write!(f, "int[{lo}, {hi}]"),
            DataType::Real => f.write_str("real"),
            DataType::Enum(labels) => {
                f.write_str("enum { ")?;
                for (i, l) in labels.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(l)?;
                }
                f.write_str(" }")
            }
        }
    }
}

/// A message: one value communicated on a channel in one tick.
///
/// Reals are kept finite and `-0.0` is normalized to `0.0`, which makes the
/// total order below agree with `==` on floats.
#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Real(f64),
    Enum(String),
}

impl Value {
    pub fn real(r: f64) -> Self {
        Value::Real(if r == 0.0 { 0.0 } else { r })
    }

    pub fn label(l: impl Into<String>) -> Self {
        Value::Enum(l.into())
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Equality that allows an absolute tolerance between numbers.
    pub fn approx_eq(&self, other: &Value, eps: f64) -> bool {
        match (self, other) {
            (Value::Real(_), _) | (_, Value::Real(_)) => match (self.as_f64(), other.as_f64()) {
                (Some(a), Some(b)) => a == b || libm::fabs(a - b) <= eps,
                _ => false,
            },
            _ => self == other,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Bool(_) => 0,
            Value::Int(_) => 1,
            Value::Real(_) => 2,
            Value::Enum(_) => 3,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Real(a), Value::Real(b)) => {
                let norm = |x: f64| if x == 0.0 { 0.0 } else { x };
                norm(*a).total_cmp(&norm(*b))
            }
            (Value::Enum(a), Value::Enum(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            // `Display` for f64 prints the shortest digits that round-trip.
            Value::Real(r) => write!(f, "{r}"),
            Value::Enum(l) => f.write_str(l),
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<f64> for Value {
    fn from(r: f64) -> Self {
        Value::real(r)
    }
}
