//! Timed-stream component models: simulation, test verdicts, and
//! abstract/concrete correspondence checks.
//!
//! The crate is `no_std` and only needs `alloc`. Text formats and the
//! command-line driver live in the `streamcheck` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod abstraction;
pub mod component;
pub mod expr;
pub mod stream;
pub mod testing;
pub mod value;

pub use component::{AutomatonSpec, Causality, ComponentSpec, CompositeSpec, SimOptions, SyntacticInterface};
pub use expr::Expr;
pub use stream::{Channel, ChannelHistory, TimedStream};
pub use testing::{ExpectedResult, TestCase, TestInput, Verdict};
pub use value::{DataType, Value};
