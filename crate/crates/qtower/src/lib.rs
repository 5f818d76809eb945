//! Quadratic 2-class groups, unit invariants, case tables and 2-group checks
//! for narrow 2-class field towers of real quadratic fields.

pub mod abelian;
pub mod arith;
pub mod classify;
pub mod conic;
pub mod error;
pub mod formulas;
pub mod group2;
pub mod multiquad;
pub mod qform;
pub mod serde_big;
pub mod units;

pub use error::{Error, Result};
