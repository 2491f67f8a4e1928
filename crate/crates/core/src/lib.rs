//! Digitization of dense-time behaviour.
//!
//! The crate turns questions about timed systems over dense (rational) time
//! into questions over integer time:
//!
//! - [`trace`]: exact ε-digitization of timed state sequences;
//! - [`ta`]: timed automata, Closed/Open classification, exact simulation;
//! - [`tick`]: the integer-time semantics of a timed automaton as a finite
//!   automaton over events plus a `TICK` symbol;
//! - [`mtl`]: metric temporal logic over finite pointwise traces;
//! - [`lab`]: closure-under-digitization checkers, fuzzers and the bounded
//!   verification pipeline.

pub mod error;
pub mod lab;
pub mod mtl;
pub mod rational;
pub mod ta;
pub mod tick;
pub mod trace;

pub use error::{Error, Result};
pub use rational::Rational;
