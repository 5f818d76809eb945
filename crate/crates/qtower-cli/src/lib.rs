//! Library side of the `qtower` command: input parsing, records, scanning.

pub mod config;
pub mod exit;
pub mod expr;
pub mod record;
pub mod scan;
