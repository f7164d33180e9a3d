//! Finite timed streams and channel histories.
//!
//! A stream of horizon `N` carries exactly one message per tick `1..=N`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::value::{DataType, DomainError, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("tick {tick} is out of range for a stream of horizon {horizon}")]
pub struct IndexError {
    pub tick: usize,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedStream {
    elem_type: DataType,
    ticks: Vec<Value>,
}

impl TimedStream {
    pub fn new(elem_type: DataType, values: Vec<Value>) -> Result<Self, DomainError> {
        let ticks = values.into_iter().map(|v| elem_type.admit(v)).collect::<Result<Vec<_>, _>>()?;
        Ok(TimedStream { elem_type, ticks })
    }

    pub fn empty(elem_type: DataType) -> Self {
        TimedStream {
            elem_type,
            ticks: Vec::new(),
        }
    }

    /// A stream holding `value` at every tick `1..=horizon`.
    pub fn constant(elem_type: DataType, value: Value, horizon: usize) -> Result<Self, DomainError> {
        let value = elem_type.admit(value)?;
        Ok(TimedStream {
            elem_type,
            ticks: alloc::vec![value; horizon],
        })
    }

    pub fn elem_type(&self) -> &DataType {
        &self.elem_type
    }

    pub fn horizon(&self) -> usize {
        self.ticks.len()
    }

    pub fn values(&self) -> &[Value] {
        &self.ticks
    }

    /// The message at 1-based tick `t`.
    pub fn at(&self, t: usize) -> Result<&Value, IndexError> {
        if t == 0 || t > self.ticks.len() {
            return Err(IndexError {
                tick: t,
                horizon: self.ticks.len(),
            });
        }
        Ok(&self.ticks[t - 1])
    }

    /// The first `t` messages.
    pub fn prefix(&self, t: usize) -> Result<TimedStream, IndexError> {
        if t > self.ticks.len() {
            return Err(IndexError {
                tick: t,
                horizon: self.ticks.len(),
            });
        }
        Ok(TimedStream {
            elem_type: self.elem_type.clone(),
            ticks: self.ticks[..t].to_vec(),
        })
    }

    pub fn push(&mut self, value: Value) -> Result<(), DomainError> {
        let value = self.elem_type.admit(value)?;
        self.ticks.push(value);
        Ok(())
    }
}

impl fmt::Display for TimedStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.ticks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// A typed channel name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Channel {
    pub name: String,
    pub ctype: DataType,
}

impl Channel {
    pub fn new(name: impl Into<String>, ctype: DataType) -> Self {
        Channel { name: name.into(), ctype }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("stream for `{channel}` has horizon {found}, history has horizon {expected}")]
    HorizonMismatch { channel: String, expected: usize, found: usize },
}

/// An assignment of one stream to each channel, all of the same horizon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelHistory {
    horizon: usize,
    bindings: BTreeMap<String, TimedStream>,
}

impl ChannelHistory {
    pub fn new(horizon: usize) -> Self {
        ChannelHistory {
            horizon,
            bindings: BTreeMap::new(),
        }
    }

    /// Builds a history from streams; the horizon is taken from the first
    /// stream (0 when there are none).
    pub fn from_streams<I, S>(streams: I) -> Result<Self, HistoryError>
    where
        I: IntoIterator<Item = (S, TimedStream)>,
        S: Into<String>,
    {
        let mut iter = streams.into_iter().peekable();
        let horizon = iter.peek().map(|(_, s)| s.horizon()).unwrap_or(0);
        let mut h = ChannelHistory::new(horizon);
        for (name, s) in iter {
            h.insert(name, s)?;
        }
        Ok(h)
    }

    pub fn insert(&mut self, channel: impl Into<String>, stream: TimedStream) -> Result<(), HistoryError> {
        let channel = channel.into();
        if stream.horizon() != self.horizon {
            return Err(HistoryError::HorizonMismatch {
                channel,
                expected: self.horizon,
                found: stream.horizon(),
            });
        }
        self.bindings.insert(channel, stream);
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, channel: &str) -> Option<&TimedStream> {
        self.bindings.get(channel)
    }

    pub fn contains(&self, channel: &str) -> bool {
        self.bindings.contains_key(channel)
    }

    pub fn channels(&self) -> impl Iterator<Item = &str> {
        self.bindings.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &TimedStream)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// The messages of every channel at tick `t`.
    pub fn tick(&self, t: usize) -> Result<BTreeMap<String, Value>, IndexError> {
        self.bindings.iter().map(|(k, s)| Ok((k.clone(), s.at(t)?.clone()))).collect()
    }

    pub fn prefix(&self, t: usize) -> Result<ChannelHistory, IndexError> {
        if t > self.horizon {
            return Err(IndexError {
                tick: t,
                horizon: self.horizon,
            });
        }
        let bindings = self
            .bindings
            .iter()
            .map(|(k, s)| Ok((k.clone(), s.prefix(t)?)))
            .collect::<Result<_, IndexError>>()?;
        Ok(ChannelHistory { horizon: t, bindings })
    }

    /// Keeps only the named channels.
    pub fn restrict<'a>(&self, channels: impl IntoIterator<Item = &'a str>) -> ChannelHistory {
        let mut out = ChannelHistory::new(self.horizon);
        for c in channels {
            if let Some(s) = self.bindings.get(c) {
                out.bindings.insert(c.to_string(), s.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    Unbound,
    Undeclared,
    TypeMismatch { expected: DataType, found: DataType },
    HorizonMismatch { expected: usize, found: usize },
}

/// One problem found by [`validate_history`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub channel: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Unbound => write!(f, "unbound channel `{}`", self.channel),
            ViolationKind::Undeclared => write!(f, "undeclared channel `{}`", self.channel),
            ViolationKind::TypeMismatch { expected, found } => {
                write!(f, "type mismatch on `{}`: expected {expected}, found {found}", self.channel)
            }
            ViolationKind::HorizonMismatch { expected, found } => {
                write!(f, "horizon mismatch on `{}`: expected {expected}, found {found}", self.channel)
            }
        }
    }
}

/// Checks that `h` binds exactly `channels`, with matching types and one
/// common horizon. Never fails; problems are returned as a list.
pub fn validate_history(h: &ChannelHistory, channels: &[Channel]) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    for c in channels {
        match h.get(&c.name) {
            None => violations.push(Violation {
                channel: c.name.clone(),
                kind: ViolationKind::Unbound,
            }),
            Some(s) => {
                if s.elem_type() != &c.ctype {
                    violations.push(Violation {
                        channel: c.name.clone(),
                        kind: ViolationKind::TypeMismatch {
                            expected: c.ctype.clone(),
                            found: s.elem_type().clone(),
                        },
                    });
                }
                if s.horizon() != h.horizon() {
                    violations.push(Violation {
                        channel: c.name.clone(),
                        kind: ViolationKind::HorizonMismatch {
                            expected: h.horizon(),
                            found: s.horizon(),
                        },
                    });
                }
            }
        }
    }
    for name in h.channels() {
        if !channels.iter().any(|c| c.name == name) {
            violations.push(Violation {
                channel: name.to_string(),
                kind: ViolationKind::Undeclared,
            });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
