use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undefined input: {0}")]
    UndefinedInput(String),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is not a prime discriminant")]
    NotPrimeDiscriminant(i64),
    #[error("factoring bound {bound} exceeded while factoring {n}")]
    FactoringBoundExceeded { n: u64, bound: u64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("square discriminant {0}")]
    SquareDiscriminant(i64),
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("unit has norm -1, delta is undefined")]
    NormMinusOne,
    #[error("no square-root decomposition: {0}")]
    NoDecomposition(String),
    #[error("precision escalation failed at {0} bits")]
    PrecisionEscalationFailure(u64),
    #[error("non-integer result: {0}")]
    NonInteger(String),
    #[error("no solution with max(|b|,|c|) <= {0}")]
    NoSolutionWithinBound(u64),
    #[error("provably insoluble: local obstruction at {0}")]
    ProvablyInsoluble(String),
    #[error("sign rule inapplicable: {0}")]
    SignRuleInapplicable(String),
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no table row matches {0}")]
    NoRowMatch(i64),
    #[error("multiple labels match {d}: {labels:?}")]
    MultipleLabels { d: i64, labels: Vec<String> },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("generator search exhausted: {0}")]
    GeneratorSearchExhausted(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
