//! Relaxed locally correctable codes built by nesting small correctable codes
//! inside locally testable ones, with exact verification on desk-scale
//! instances and exact evaluation of the asymptotic parameter formulas.

pub mod analysis;
pub mod chain;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod local;
pub mod nesting;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
