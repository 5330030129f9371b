//! Algebraic path queries on graphs of bounded treewidth and on recursive state machines.

pub mod bench;
pub mod cli;
pub mod dynamic;
pub mod error;
pub mod graph;
pub mod oracles;
pub mod par;
pub mod rsm;
pub mod semiring;
pub mod treedec;

pub use error::{Error, Result};
