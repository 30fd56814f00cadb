//! Wilson loops in lattice Yang–Mills theory at large N: loop equations,
//! planar free-probability evaluation and a Monte Carlo cross-check.

pub mod audit;
pub mod cli;
pub mod error;
pub mod freeprob;
pub mod gauge;
pub mod lattice;
pub mod mc;
pub mod ops;
pub mod parse;
pub mod poly;
pub mod solver;

pub use error::{Error, Result};
