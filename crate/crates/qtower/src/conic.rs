//! Rational points on the ternary forms a^2 = b^2 d1 + c^2 d2 and
//! x1^2 d1 - x2^2 d2 = -d3 d4 x3^2, and the elements alpha, gamma, mu built from them.

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::arith::{self, factor, hilbert_symbol, kr, squarefree_kernel, DEFAULT_FACTOR_BOUND};
use crate::error::{Error, Result};
use crate::units::{fundamental_unit, QuadUnit};

pub const DEFAULT_SEARCH_BOUND: u64 = 10_000;

/// a^2 = b^2 delta1 + c^2 delta2 with gcd(a, b, c) = 1 and a > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConicSolution {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub delta1: i64,
    pub delta2: i64,
}

impl ConicSolution {
    pub fn new(a: i64, b: i64, c: i64, delta1: i64, delta2: i64) -> Result<Self> {
        let s = Self { a, b, c, delta1, delta2 };
        if !s.holds() {
            return Err(Error::Inconsistent(format!("{a}^2 != {b}^2*{delta1} + {c}^2*{delta2}")));
        }
        Ok(s)
    }

    pub fn holds(&self) -> bool {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        a * a == b * b * self.delta1 as i128 + c * c * self.delta2 as i128
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

fn relevant_primes(ns: &[i64]) -> Result<Vec<u64>> {
    let mut ps = vec![2u64];
    for &n in ns {
        for (p, _) in factor(n.unsigned_abs(), DEFAULT_FACTOR_BOUND)? {
            if !ps.contains(&p) {
                ps.push(p);
            }
        }
    }
    ps.sort_unstable();
    Ok(ps)
}

/// Places where a^2 = b^2 x + c^2 y has no nontrivial local solution.
pub fn local_obstructions(x: i64, y: i64) -> Result<Vec<String>> {
    if x == 0 || y == 0 {
        return Err(Error::UndefinedInput(format!("conic ({x}, {y})")));
    }
    let mut out = Vec::new();
    if hilbert_symbol(x, y, 0)? == -1 {
        out.push("infinity".to_string());
    }
    for p in relevant_primes(&[x, y])? {
        if hilbert_symbol(x, y, p)? == -1 {
            out.push(p.to_string());
        }
    }
    Ok(out)
}

pub fn solve_conic(delta1: i64, delta2: i64) -> Result<ConicSolution> {
    solve_conic_with_bound(delta1, delta2, DEFAULT_SEARCH_BOUND)
}

/// Primitive solution with a > 0, searched by increasing max(b, c) and then by the smaller of the two.
pub fn solve_conic_with_bound(delta1: i64, delta2: i64, bound: u64) -> Result<ConicSolution> {
    let obstructions = local_obstructions(delta1, delta2)?;
    if !obstructions.is_empty() {
        return Err(Error::ProvablyInsoluble(obstructions.join(",")));
    }
    let (d1, d2) = (delta1 as i128, delta2 as i128);
    let try_pair = |b: i64, c: i64| -> Option<ConicSolution> {
        if b.gcd(&c) != 1 {
            return None;
        }
        let (bi, ci) = (b as i128, c as i128);
        let a = isqrt_exact(bi * bi * d1 + ci * ci * d2)?;
        if a == 0 {
            return None;
        }
        Some(ConicSolution { a: a as i64, b, c, delta1, delta2 })
    };
    for m in 1..=bound as i64 {
        for j in 0..=m {
            if let Some(s) = try_pair(j, m).or_else(|| try_pair(m, j)) {
                return Ok(s);
            }
        }
    }
    Err(Error::NoSolutionWithinBound(bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignRule {
    ForcePositive,
    ForceNegative,
    /// Positive when h2(F) >= 4, negative when h2(F) = 2; None means h2(F) was not supplied.
    Auto(Option<u64>),
}

/// alpha = a + c sqrt(D) with alpha alpha' = b^2 d1, and gamma = gamma_factor * alpha.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaElement {
    pub base: i64,
    pub a: i64,
    pub c: i64,
    pub b: i64,
    pub d1: i64,
    pub d3: i64,
    pub negative: bool,
    pub gamma_factor: i64,
}

impl AlphaElement {
    pub fn norm(&self) -> i128 {
        let (a, c) = (self.a as i128, self.c as i128);
        a * a - c * c * self.base as i128
    }

    pub fn to_f64(&self) -> f64 {
        self.a as f64 + self.c as f64 * (self.base as f64).sqrt()
    }

    /// alpha'/alpha = alpha'^2 / (b^2 d1) is a square in Q(sqrt D) only when d1 is 1 or D mod squares.
    pub fn is_non_normal(&self) -> Result<bool> {
        let k = squarefree_kernel(self.d1)?;
        let kd = squarefree_kernel(self.d1 * squarefree_kernel(self.base)?)?;
        Ok(k != 1 && kd != 1)
    }
}

impl std::fmt::Display for AlphaElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = if self.c < 0 { format!("-{}", -self.c) } else { format!("+{}", self.c) };
        write!(f, "{}{}*sqrt({})", self.a, c, self.base)
    }
}

/// Sign of a + c sqrt(D) for D > 0 not a square.
fn sign_of(a: i64, c: i64, d: i64) -> i8 {
    let (a2, c2d) = ((a as i128).pow(2), (c as i128).pow(2) * d as i128);
    match (a.signum(), c.signum()) {
        (0, s) | (s, 0) => s as i8,
        (x, y) if x == y => x as i8,
        (x, _) => {
            if a2 > c2d {
                x as i8
            } else {
                -x as i8
            }
        }
    }
}

pub fn build_alpha(sol: &ConicSolution, base: i64, d1: i64, d3: i64, rule: SignRule) -> Result<AlphaElement> {
    if sol.c == 0 {
        return Err(Error::UndefinedInput("c = 0 gives a rational alpha".into()));
    }
    if !sol.holds() {
        return Err(Error::Inconsistent("solution does not satisfy its conic".into()));
    }
    if sol.delta1 != d1 || sol.delta2 != base {
        return Err(Error::DiscriminantMismatch(sol.delta1 * sol.delta2, d1 * base));
    }
    if base <= 0 || arith::is_square(base) {
        return Err(Error::NotApplicable(format!("base {base} must be a positive nonsquare")));
    }
    let positive = match rule {
        SignRule::ForcePositive => true,
        SignRule::ForceNegative => false,
        SignRule::Auto(Some(h)) if h >= 4 => true,
        SignRule::Auto(Some(2)) => false,
        SignRule::Auto(Some(h)) => {
            return Err(Error::SignRuleInapplicable(format!("h2(F) = {h}")));
        }
        SignRule::Auto(None) => {
            return Err(Error::SignRuleInapplicable("h2(F) was not supplied".into()));
        }
    };
    let (a, c) = (sol.a.abs(), sol.c.abs());
    let a = if positive { a } else { -a };
    if sign_of(a, c, base) != if positive { 1 } else { -1 } {
        return Err(Error::SignRuleInapplicable(format!(
            "no sign choice of {a}+{c}*sqrt({base}) has the requested sign"
        )));
    }
    let negative = !positive;
    let alpha = AlphaElement { base, a, c, b: sol.b.abs(), d1, d3, negative, gamma_factor: if negative { 1 } else { d3 } };
    let b = alpha.b as i128;
    if alpha.norm() != b * b * d1 as i128 {
        return Err(Error::Inconsistent(format!("N({alpha}) != b^2 d1")));
    }
    Ok(alpha)
}

/// The four Kronecker conditions for an H8-factorization d1 * d2 * d3 * d4.
pub fn h8_holds(d: [i64; 4]) -> Result<bool> {
    let p = d
        .iter()
        .map(|&x| arith::PrimeDiscriminant::new(x).map(|pd| pd.prime() as i64))
        .collect::<Result<Vec<_>>>()?;
    Ok(kr(d[0] * d[1], p[2]) == 1
        && kr(d[0] * d[1], p[3]) == 1
        && kr(d[1] * d[2] * d[3], p[0]) == 1
        && kr(d[2] * d[3] * d[0], p[1]) == 1)
}

/// x1^2 d1 - x2^2 d2 = -d3d4 x3^2 with beta = x1 sqrt(d1) + x2 sqrt(d2) and mu = beta * u2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuElement {
    pub x1: i64,
    pub x2: i64,
    pub x3: i64,
    pub d1: i64,
    pub d2: i64,
    pub d3d4: i64,
    /// p2 = s^2 + t^2 with t odd.
    pub s: u64,
    pub t: u64,
    pub u2: QuadUnit,
}

impl MuElement {
    pub fn holds(&self) -> bool {
        let (x1, x2, x3) = (self.x1 as i128, self.x2 as i128, self.x3 as i128);
        x1 * x1 * self.d1 as i128 - x2 * x2 * self.d2 as i128 == -(self.d3d4 as i128) * x3 * x3
    }

    /// beta is not divisible by a rational prime in the ring of integers of Q(sqrt d1, sqrt d2).
    pub fn is_primitive(&self) -> bool {
        if self.x1.gcd(&self.x2) != 1 {
            return false;
        }
        let odd = |x: i64| x % 2 != 0;
        let one_mod_4 = |d: i64| d.rem_euclid(4) == 1;
        !(odd(self.x1) && odd(self.x2) && one_mod_4(self.d1) && one_mod_4(self.d2))
    }
}

fn norm_minus_one_unit(d2: i64) -> Result<(u64, u64, QuadUnit)> {
    let pd = arith::PrimeDiscriminant::new(d2)?;
    if d2 < 0 {
        return Err(Error::HypothesisViolation(format!("d2 = {d2} is negative")));
    }
    let p2 = pd.prime();
    let (s, t) = if p2 == 2 { (1, 1) } else { arith::two_square_decomposition(p2)? };
    let eps = fundamental_unit(d2)?;
    if eps.norm != -1 {
        return Err(Error::HypothesisViolation(format!("the fundamental unit of {d2} has norm +1")));
    }
    let u2 = if eps.in_order_z_sqrt_m() { eps } else { eps.pow(3) };
    debug_assert!(u2.in_order_z_sqrt_m() && u2.norm == -1);
    Ok((s, t, u2))
}

pub fn solve_h8(d1: i64, d2: i64, d3d4: i64) -> Result<MuElement> {
    solve_h8_with_bound(d1, d2, d3d4, DEFAULT_SEARCH_BOUND)
}

pub fn solve_h8_with_bound(d1: i64, d2: i64, d3d4: i64, bound: u64) -> Result<MuElement> {
    let rest = arith::factor_discriminant(d3d4)?;
    if rest.len() != 2 {
        return Err(Error::HypothesisViolation(format!("{d3d4} is not a product of two prime discriminants")));
    }
    let (d3, d4) = (rest.factors[0].value(), rest.factors[1].value());
    if !h8_holds([d1, d2, d3, d4])? {
        return Err(Error::HypothesisViolation(format!("{d1}*{d2}*{d3}*{d4} is not an H8-factorization")));
    }
    let (s, t, u2) = norm_minus_one_unit(d2)?;
    let (a, b, c) = (d1 as i128, d2 as i128, d3d4 as i128);
    let obstructions = local_obstructions(d1 * d2, d2 * d3d4)?;
    if !obstructions.is_empty() {
        return Err(Error::ProvablyInsoluble(obstructions.join(",")));
    }
    let try_pair = |x1: i64, x3: i64| -> Option<MuElement> {
        let (y1, y3) = (x1 as i128, x3 as i128);
        let n = a * y1 * y1 + c * y3 * y3;
        if n % b != 0 {
            return None;
        }
        let x2 = isqrt_exact(n / b)? as i64;
        let m = MuElement { x1, x2, x3, d1, d2, d3d4, s, t, u2: u2.clone() };
        m.is_primitive().then_some(m)
    };
    for m in 1..=bound as i64 {
        for j in 1..=m {
            if let Some(r) = try_pair(j, m).or_else(|| try_pair(m, j)) {
                return Ok(r);
            }
        }
    }
    Err(Error::NoSolutionWithinBound(bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_tuples() {
        assert!(ConicSolution::new(5, 1, 1, 8, 17).is_ok());
        assert!(ConicSolution::new(9, 1, 2, 61, 5).is_ok());
        assert!(ConicSolution::new(383, 1, 26, -3, 217).is_ok());
        assert!(ConicSolution::new(9, 1, 1, 61, 5).is_err());
    }

    #[test]
    fn solver_examples() {
        let s = solve_conic(8, 17).unwrap();
        assert_eq!((s.a, s.b, s.c), (5, 1, 1));
        let s = solve_conic(61, 5).unwrap();
        assert_eq!((s.a, s.b, s.c), (9, 1, 2));
        let s = solve_conic(-3, 217).unwrap();
        assert!(s.holds() && s.is_primitive());
    }

    #[test]
    fn insoluble_detected() {
        assert!(matches!(solve_conic(-1, -1), Err(Error::ProvablyInsoluble(_))));
        assert!(matches!(solve_conic(3, 5), Err(Error::ProvablyInsoluble(_))));
        assert!(matches!(solve_conic_with_bound(2, 7, 0), Err(Error::NoSolutionWithinBound(0))));
    }

    #[test]
    fn alpha_signs() {
        let s = solve_conic(8, 17).unwrap();
        let al = build_alpha(&s, 17, 8, -3, SignRule::Auto(Some(2))).unwrap();
        assert_eq!((al.a, al.c), (-5, 1));
        assert!(al.to_f64() < 0.0);
        assert_eq!(al.gamma_factor, 1);
        assert_eq!(al.to_string(), "-5+1*sqrt(17)");
        assert!(al.is_non_normal().unwrap());
        let al = build_alpha(&s, 17, 8, -3, SignRule::Auto(Some(4))).unwrap();
        assert_eq!((al.a, al.gamma_factor), (5, -3));
        assert!(matches!(build_alpha(&s, 17, 8, -3, SignRule::Auto(None)), Err(Error::SignRuleInapplicable(_))));
        let s = ConicSolution::new(383, 1, 26, -3, 217).unwrap();
        let al = build_alpha(&s, 217, -3, -7, SignRule::ForcePositive).unwrap();
        assert!(al.to_f64() > 0.0);
        assert!(build_alpha(&s, 217, -3, -7, SignRule::ForceNegative).is_err());
        let deg = ConicSolution { a: 1, b: 1, c: 0, delta1: 1, delta2: 5 };
        assert!(build_alpha(&deg, 5, 1, -3, SignRule::ForcePositive).is_err());
    }

    #[test]
    fn h8_example() {
        let m = solve_h8(13, 5, 131 * 7).unwrap();
        assert!(m.holds() && m.is_primitive());
        let listed = MuElement { x1: 4, x2: 15, x3: 1, ..m.clone() };
        assert!(listed.holds() && listed.is_primitive());
        assert_eq!(m.u2.to_string(), "2+1*sqrt(5)");
        assert_eq!((m.s, m.t), (2, 1));
    }
}
