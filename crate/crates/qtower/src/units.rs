//! Fundamental units of real quadratic fields, the delta invariant and
//! square roots of norm +1 units.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, factor, kr, radicand, squarefree_kernel_over, DEFAULT_FACTOR_BOUND};
use crate::error::{Error, Result};

pub const DEFAULT_CF_CAP: u64 = 1_000_000;

/// The unit (x + y sqrt d)/2 of the field of discriminant d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadUnit {
    pub d: i64,
    #[serde(with = "crate::serde_big")]
    pub x: BigInt,
    #[serde(with = "crate::serde_big")]
    pub y: BigInt,
    pub norm: i8,
}

impl fmt::Display for QuadUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = radicand(self.d);
        let (mut x, mut y) = (self.x.clone(), self.y.clone());
        if self.d != m {
            y *= 2;
        }
        if x.is_even() && y.is_even() {
            x /= 2;
            y /= 2;
            write!(f, "{x}+{y}*sqrt({m})")
        } else {
            write!(f, "({x}+{y}*sqrt({m}))/2")
        }
    }
}

impl QuadUnit {
    pub fn new(d: i64, x: BigInt, y: BigInt) -> Result<Self> {
        let n = &x * &x - BigInt::from(d) * &y * &y;
        let norm = if n == BigInt::from(4) {
            1
        } else if n == BigInt::from(-4) {
            -1
        } else {
            return Err(Error::Inconsistent(format!("({x}+{y}sqrt{d})/2 is not a unit")));
        };
        Ok(Self { d, x, y, norm })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        let d = BigInt::from(self.d);
        let x = (&self.x * &other.x + &d * &self.y * &other.y) / 2;
        let y = (&self.x * &other.y + &other.x * &self.y) / 2;
        Self { d: self.d, x, y, norm: self.norm * other.norm }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self { d: self.d, x: BigInt::from(2), y: BigInt::zero(), norm: 1 };
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn to_f64(&self) -> f64 {
        let (x, y) = (big_f64(&self.x), big_f64(&self.y));
        (x + y * (self.d as f64).sqrt()) / 2.0
    }

    /// Natural logarithm, accurate for units of any size.
    pub fn ln(&self) -> f64 {
        let bits = self.x.bits().max(self.y.bits()) as i64;
        let shift = (bits - 60).max(0) as usize;
        let x = big_f64(&(&self.x >> shift));
        let y = big_f64(&(&self.y >> shift));
        ((x + y * (self.d as f64).sqrt()) / 2.0).ln() + shift as f64 * std::f64::consts::LN_2
    }

    /// Whether the unit lies in Z[sqrt m] for m the squarefree radicand.
    pub fn in_order_z_sqrt_m(&self) -> bool {
        self.d % 4 == 0 || (self.x.is_even() && self.y.is_even())
    }
}

fn big_f64(b: &BigInt) -> f64 {
    b.to_string().parse().unwrap_or(f64::INFINITY)
}

pub fn fundamental_unit(d: i64) -> Result<QuadUnit> {
    fundamental_unit_with_cap(d, DEFAULT_CF_CAP)
}

/// Fundamental unit via the continued fraction of the ring generator:
/// sqrt(d/4) when 4 | d, (1 + sqrt d)/2 otherwise.
pub fn fundamental_unit_with_cap(d: i64, cap: u64) -> Result<QuadUnit> {
    if d <= 0 || !arith::is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let (big_d, mut p, mut q) = if d % 4 == 0 { (d / 4, 0i64, 1i64) } else { (d, 1, 2) };
    let s = (big_d as u64).sqrt() as i64;
    let (mut a_prev, mut a_cur) = (BigInt::zero(), BigInt::one());
    let (mut b_prev, mut b_cur) = (BigInt::one(), BigInt::zero());
    let bd = BigInt::from(d);
    for _ in 0..cap {
        let a = (p + s).div_euclid(q);
        let a_next = BigInt::from(a) * &a_cur + &a_prev;
        let b_next = BigInt::from(a) * &b_cur + &b_prev;
        (a_prev, a_cur) = (a_cur, a_next);
        (b_prev, b_cur) = (b_cur, b_next);
        let (x, y) = if d % 4 == 0 {
            (&a_cur * 2, b_cur.clone())
        } else {
            (&a_cur * 2 - &b_cur, b_cur.clone())
        };
        let n = &x * &x - &bd * &y * &y;
        if n == BigInt::from(4) || n == BigInt::from(-4) {
            return QuadUnit::new(d, x, y);
        }
        p = a * q - p;
        q = (big_d - p * p) / q;
    }
    Err(Error::BoundExceeded(format!("continued fraction of {d} exceeded {cap} steps")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaInvariant {
    pub delta: i64,
}

fn unit_primes(d: i64) -> Vec<u64> {
    let mut ps: Vec<u64> = factor(d.unsigned_abs(), DEFAULT_FACTOR_BOUND)
        .map(|f| f.into_iter().map(|(p, _)| p).collect())
        .unwrap_or_default();
    if !ps.contains(&2) {
        ps.insert(0, 2);
    }
    ps
}

/// delta with N(1 + eps) = x + 2 = delta * r^2.
fn delta_and_root(u: &QuadUnit) -> Result<(i64, BigInt)> {
    if u.norm != 1 {
        return Err(Error::NormMinusOne);
    }
    squarefree_kernel_over(&(&u.x + 2), &unit_primes(u.d))
}

pub fn delta_invariant(u: &QuadUnit) -> Result<DeltaInvariant> {
    Ok(DeltaInvariant { delta: delta_and_root(u)?.0 })
}

impl DeltaInvariant {
    /// Values of all genus characters of the field of discriminant d at delta.
    pub fn genus_values(&self, d: i64) -> Result<Vec<i8>> {
        crate::qform::genus_characters(d)?
            .iter()
            .map(|c| c.eval(self.delta))
            .collect()
    }

    pub fn is_genus_positive(&self, d: i64) -> Result<bool> {
        Ok(self.genus_values(d)?.iter().all(|&v| v == 1))
    }
}

/// sqrt(eps) = (a sqrt(u) + b sqrt(v)) / denom with denom in {1, 2}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqrtUnitDecomposition {
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    #[serde(with = "crate::serde_big")]
    pub b: BigInt,
    pub basis: (i64, i64),
    pub denom: u8,
}

impl fmt::Display for SqrtUnitDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = format!("{}*sqrt({})+{}*sqrt({})", self.a, self.basis.0, self.b, self.basis.1);
        if self.denom == 1 {
            write!(f, "{body}")
        } else {
            write!(f, "({body})/{}", self.denom)
        }
    }
}

impl SqrtUnitDecomposition {
    /// (a^2 u - b^2 v) / denom^2, always +1 or -1.
    pub fn sign_identity(&self) -> i64 {
        let n = &self.a * &self.a * self.basis.0 - &self.b * &self.b * self.basis.1;
        let q: BigInt = n / (self.denom as i64 * self.denom as i64);
        q.try_into().unwrap_or(0)
    }

    /// The same decomposition with `first` as the first basis element.
    pub fn oriented(&self, first: i64) -> Result<Self> {
        if self.basis.0 == first {
            Ok(self.clone())
        } else if self.basis.1 == first {
            Ok(Self {
                a: self.b.clone(),
                b: self.a.clone(),
                basis: (self.basis.1, self.basis.0),
                denom: self.denom,
            })
        } else {
            Err(Error::NoDecomposition(format!("{first} is not a basis element of {self}")))
        }
    }

    /// Square of the decomposition as (x, y) with value (x + y sqrt(m))/2,
    /// m = u*v / gcd(u,v)^2.
    pub fn square(&self) -> (BigInt, BigInt, i64) {
        let (u, v) = self.basis;
        let g = u.gcd(&v);
        let m = u / g * (v / g);
        let den2 = BigInt::from(self.denom as i64 * self.denom as i64);
        let x = (&self.a * &self.a * u + &self.b * &self.b * v) * 2 / &den2;
        let y = &self.a * &self.b * 2 * g * 2 / &den2;
        (x, y, m)
    }

    /// Sign of the value when sqrt(u) and sqrt(v) are replaced by s_u sqrt(u)
    /// and s_v sqrt(v).
    pub fn sign_under(&self, su: i8, sv: i8) -> i8 {
        let t1 = &self.a * &self.a * self.basis.0;
        let t2 = &self.b * &self.b * self.basis.1;
        let s1 = self.a.signum() * su as i64;
        let s2 = self.b.signum() * sv as i64;
        let s = if t1 > t2 { s1 } else { s2 };
        if s.is_positive() {
            1
        } else {
            -1
        }
    }
}

pub fn sqrt_unit_decomposition(u: &QuadUnit) -> Result<SqrtUnitDecomposition> {
    let (delta, r) = delta_and_root(u)?;
    let m = radicand(u.d);
    if delta == 1 || delta == m {
        return Err(Error::NoDecomposition(format!("delta = {delta} does not split {m}")));
    }
    let f = if u.d == m { 1 } else { 2 };
    let g = m.gcd(&delta);
    let v = m / g * (delta / g);
    let num: BigInt = &u.y * BigInt::from(f * g);
    let den: BigInt = &r * BigInt::from(delta);


    if !(&num % &den).is_zero() {
        return Err(Error::NoDecomposition(format!("non-integral coefficient for {u}")));
    }
    let (mut a, mut b) = (r.clone(), num / den);
    let mut denom = 2u8;
    if a.is_even() && b.is_even() {
        a /= 2;
        b /= 2;
        denom = 1;
    }
    let dec = SqrtUnitDecomposition { a, b, basis: (delta, v), denom };
    let (x, y, mm) = dec.square();
    let scale = if u.d == m { 1 } else { 2 };
    if x != u.x || y != &u.y * scale || mm != m {
        return Err(Error::Inconsistent(format!("square of {dec} is not {u}")));
    }
    Ok(dec)
}

/// The three unit families whose square roots have a closed form with a
/// prescribed sign identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimePairCase {
    /// eps_pq for primes p < q, both 3 mod 4.
    ProductOfTwo { p: u64, q: u64 },
    /// eps_2p for a prime p = 3 mod 4.
    TwiceAPrime { p: u64 },
    /// eps_p for a prime p = 3 mod 4.
    SinglePrime { p: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignIdentityCheck {
    pub case: PrimePairCase,
    pub decomposition: SqrtUnitDecomposition,
    pub lhs: i64,
    pub expected: i64,
}

impl SignIdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.expected
    }
}

pub fn prime_pair_case(d: i64) -> Result<PrimePairCase> {
    let fs = factor(d.unsigned_abs(), DEFAULT_FACTOR_BOUND)?;
    let odd: Vec<u64> = fs.iter().filter(|f| f.0 != 2).map(|f| f.0).collect();
    let two = fs.iter().find(|f| f.0 == 2).map(|f| f.1).unwrap_or(0);
    let all3 = odd.iter().all(|p| p % 4 == 3);
    match (two, odd.as_slice()) {
        (0, [p, q]) if all3 => Ok(PrimePairCase::ProductOfTwo { p: *p, q: *q }),
        (3, [p]) if all3 => Ok(PrimePairCase::TwiceAPrime { p: *p }),
        (2, [p]) if all3 => Ok(PrimePairCase::SinglePrime { p: *p }),
        _ => Err(Error::NotApplicable(format!("{d} is not pq, 8p or 4p with primes 3 mod 4"))),
    }
}

/// Square root of the fundamental unit of d in one of the three families,
/// with its sign identity and the Kronecker value it should equal.
pub fn prime_pair_sign_identity(d: i64) -> Result<SignIdentityCheck> {
    let case = prime_pair_case(d)?;
    let u = fundamental_unit(d)?;
    let dec = sqrt_unit_decomposition(&u)?;
    let (first, expected) = match case {
        PrimePairCase::ProductOfTwo { p, q } => (p as i64, kr(p as i64, q as i64) as i64),
        PrimePairCase::TwiceAPrime { p } => (2, kr(2, p as i64) as i64),
        PrimePairCase::SinglePrime { p } => (2 * p as i64, -(kr(-(p as i64), 2) as i64)),
    };
    let decomposition = dec.oriented(first)?;
    let lhs = decomposition.sign_identity();
    Ok(SignIdentityCheck { case, decomposition, lhs, expected })
}

/// A real embedding of a multiquadratic field, given by the set of primes p
/// whose square root sqrt(p) changes sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    pub flipped: Vec<u64>,
}

impl Embedding {
    pub fn identity() -> Self {
        Self { flipped: Vec::new() }
    }

    pub fn flipping(primes: &[u64]) -> Self {
        Self { flipped: primes.to_vec() }
    }

    /// Sign taken by sqrt(n) for n > 0 squarefree.
    pub fn sign_of_sqrt(&self, n: i64) -> i8 {
        let n = n.unsigned_abs();
        let c = self.flipped.iter().filter(|&&p| n.is_multiple_of(p)).count();
        if c % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Product of two embeddings of the Galois group.
    pub fn compose(&self, other: &Self) -> Self {
        let mut f: Vec<u64> = self.flipped.iter().filter(|p| !other.flipped.contains(p)).copied().collect();
        f.extend(other.flipped.iter().filter(|p| !self.flipped.contains(p)));
        f.sort_unstable();
        Self { flipped: f }
    }
}

/// sqrt(e_1 ... e_k) * f_1 ... f_l for quadratic units e_i, f_j.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitExpr {
    pub sqrt_of: Vec<QuadUnit>,
    pub times: Vec<QuadUnit>,
}

impl UnitExpr {
    pub fn sqrt_of(units: Vec<QuadUnit>) -> Self {
        Self { sqrt_of: units, times: Vec::new() }
    }

    pub fn unit(u: QuadUnit) -> Self {
        Self { sqrt_of: Vec::new(), times: vec![u] }
    }
}

fn unit_sign(u: &QuadUnit, e: &Embedding) -> i8 {
    if e.sign_of_sqrt(radicand(u.d)) == 1 {
        1
    } else {
        u.norm
    }
}

pub fn conjugate_sign_table(units: &[UnitExpr], embeddings: &[Embedding]) -> Result<Vec<Vec<i8>>> {
    if embeddings.is_empty() {
        return Err(Error::UndefinedInput("empty embedding list".into()));
    }
    let mut out = Vec::new();
    for ue in units {
        let mut decs = Vec::new();
        for u in &ue.sqrt_of {
            decs.push(sqrt_unit_decomposition(u)?);
        }
        let row = embeddings
            .iter()
            .map(|e| {
                let mut s: i8 = 1;
                for dec in &decs {
                    s *= dec.sign_under(e.sign_of_sqrt(dec.basis.0), e.sign_of_sqrt(dec.basis.1));
                }
                for u in &ue.times {
                    s *= unit_sign(u, e);
                }
                s
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pell_oracle(d: i64, ymax: i64) -> Option<(i64, i64)> {
        for y in 1..=ymax {
            for s in [-4, 4] {
                let t = d * y * y + s;
                if t > 0 && arith::is_square(t) {
                    return Some(((t as u64).sqrt() as i64, y));
                }
            }
        }
        None
    }

    #[test]
    fn fundamental_unit_examples() {
        let u = fundamental_unit(5).unwrap();
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(1), BigInt::from(1), -1));
        let u = fundamental_unit(12).unwrap();
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(4), BigInt::from(1), 1));
        assert_eq!(u.to_string(), "2+1*sqrt(3)");
        let u = fundamental_unit(40).unwrap();
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (BigInt::from(6), BigInt::from(1), -1));
        assert!(fundamental_unit(-4).is_err());
        assert!(fundamental_unit_with_cap(94 * 4, 2).is_err());
    }

    #[test]
    fn fundamental_unit_matches_pell_oracle() {
        for d in 5..2000 {
            if !arith::is_fundamental_discriminant(d) {
                continue;
            }
            let u = fundamental_unit(d).unwrap();
            match pell_oracle(d, 20000) {
                Some((x, y)) => {
                    assert_eq!(u.x, BigInt::from(x), "d = {d}");
                    assert_eq!(u.y, BigInt::from(y), "d = {d}");
                }
                None => assert!(u.y > BigInt::from(20000), "d = {d}"),
            }
        }
    }

    #[test]
    fn delta_examples() {
        let u = fundamental_unit(12).unwrap();
        assert_eq!(delta_invariant(&u).unwrap().delta, 6);
        assert!(matches!(delta_invariant(&fundamental_unit(5).unwrap()), Err(Error::NormMinusOne)));
        let u = fundamental_unit(19176).unwrap();
        assert_eq!(delta_invariant(&u).unwrap().delta, 102);
        assert!(delta_invariant(&u).unwrap().is_genus_positive(19176).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let dec = sqrt_unit_decomposition(&fundamental_unit(12).unwrap()).unwrap();
        assert_eq!(dec.basis, (6, 2));
        assert_eq!((dec.a.clone(), dec.b.clone(), dec.denom), (BigInt::from(1), BigInt::from(1), 2));
        let c = prime_pair_sign_identity(12).unwrap();
        assert_eq!((c.lhs, c.expected), (1, 1));
        let dec = sqrt_unit_decomposition(&fundamental_unit(21).unwrap()).unwrap().oriented(3).unwrap();
        assert_eq!(dec.basis, (3, 7));
        assert_eq!(dec.sign_identity(), -1);
        assert_eq!(kr(3, 7), -1);
        assert!(sqrt_unit_decomposition(&fundamental_unit(5).unwrap()).is_err());
    }

    #[test]
    fn sign_table_examples() {
        let u = fundamental_unit(12).unwrap();
        let t = conjugate_sign_table(
            &[UnitExpr::sqrt_of(vec![u.clone()]), UnitExpr::unit(u)],
            &[Embedding::identity(), Embedding::flipping(&[3])],
        )
        .unwrap();
        assert_eq!(t, vec![vec![1, -1], vec![1, 1]]);
    }
}
