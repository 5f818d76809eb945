//! Process exit codes.

use qtower::error::Error;

pub const OK: i32 = 0;
pub const PRECONDITION: i32 = 2;
pub const NO_ROW_MATCH: i32 = 3;
pub const INTERNAL: i32 = 4;
pub const RESOURCE: i32 = 5;

pub fn code_for(e: &Error) -> i32 {
    match e {
        Error::NoRowMatch(_) => NO_ROW_MATCH,
        Error::MultipleLabels { .. } | Error::Inconsistent(_) => INTERNAL,
        Error::BoundExceeded(_)
        | Error::FactoringBoundExceeded { .. }
        | Error::NoSolutionWithinBound(_)
        | Error::PrecisionEscalationFailure(_)
        | Error::GeneratorSearchExhausted(_) => RESOURCE,
        _ => PRECONDITION,
    }
}
