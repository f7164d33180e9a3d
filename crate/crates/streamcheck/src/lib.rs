//! Model files, test vectors and the command-line driver for
//! [`streamcheck_core`].

pub mod cli;
pub mod model;
pub mod report;
pub mod vectors;
