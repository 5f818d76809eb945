//! Discriminant input: a plain integer or a product of prime discriminants
//! such as `8*17*-3*-47`.

use qtower::arith::{factor_discriminant, PrimeDiscriminant};
use qtower::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscInput {
    pub d: i64,
    /// Factors as written, when the input was a product.
    pub factors: Option<Vec<PrimeDiscriminant>>,
}

pub fn parse_disc(s: &str) -> Result<DiscInput> {
    let s = s.trim();
    if !s.contains('*') {
        let d = s.parse::<i64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        return Ok(DiscInput { d, factors: None });
    }
    let mut factors = Vec::new();
    let mut d: i64 = 1;
    for part in s.split('*') {
        let v = part.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{part:?}: {e}")))?;
        factors.push(PrimeDiscriminant::new(v)?);
        d = d.checked_mul(v).ok_or_else(|| Error::BoundExceeded(format!("{s} overflows 64 bits")))?;
    }
    let mut given: Vec<i64> = factors.iter().map(|p| p.value()).collect();
    given.sort_unstable();
    let mut actual: Vec<i64> = factor_discriminant(d)?.factors.iter().map(|p| p.value()).collect();
    actual.sort_unstable();
    if given != actual {
        return Err(Error::Inconsistent(format!("{s} is not the prime discriminant factorization of {d}")));
    }
    Ok(DiscInput { d, factors: Some(factors) })
}

/// Comma-separated positive integers, e.g. `2,4,4`.
pub fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect()
}
