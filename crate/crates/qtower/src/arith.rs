//! Integer arithmetic: Kronecker symbols, primality, prime-discriminant
//! factorization, squarefree kernels and sums of two squares.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// Full Kronecker symbol (a/n), including even and negative n.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if a == 0 && n == 0 {
        return Err(Error::UndefinedInput("kronecker(0, 0)".into()));
    }
    Ok(kron(a as i128, n as i128))
}

/// Kronecker symbol for arguments known not to be both zero.
pub fn kr(a: i64, n: i64) -> i8 {
    kron(a as i128, n as i128)
}

fn kron(a: i128, n: i128) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut n = n;
    let mut k: i8 = 1;
    let v = n.trailing_zeros();
    n >>= v;
    if v % 2 == 1 {
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            k = -k;
        }
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    let mut n = n as u128;
    let mut a = a.rem_euclid(n as i128) as u128;
    loop {
        if a == 0 {
            return if n == 1 { k } else { 0 };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 && (n & 7 == 3 || n & 7 == 5) {
            k = -k;
        }
        if a & n & 2 != 0 {
            k = -k;
        }
        let r = a;
        a = n % r;
        n = r;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factor n > 0 by trial division up to `bound`; a cofactor left over is
/// accepted only if it is prime.
pub fn factor(n: u64, bound: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::UndefinedInput("factor(0)".into()));
    }
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p <= bound && p.saturating_mul(p) <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if p.saturating_mul(p) > m || is_prime(m) {
            out.push((m, 1));
        } else {
            return Err(Error::FactoringBoundExceeded { n, bound });
        }
    }
    Ok(out)
}

pub fn is_squarefree(n: u64) -> bool {
    match factor(n, DEFAULT_FACTOR_BOUND) {
        Ok(f) => f.iter().all(|&(_, e)| e == 1),
        Err(_) => false,
    }
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = (n as u64).sqrt();
        r * r == n as u64
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A fundamental discriminant divisible by exactly one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct PrimeDiscriminant(i64);

impl PrimeDiscriminant {
    pub fn new(value: i64) -> Result<Self> {
        if matches!(value, -4 | 8 | -8) {
            return Ok(Self(value));
        }
        let p = value.unsigned_abs();
        if p % 2 == 1 && value.rem_euclid(4) == 1 && is_prime(p) {
            Ok(Self(value))
        } else {
            Err(Error::NotPrimeDiscriminant(value))
        }
    }

    /// The prime discriminant attached to an odd prime p.
    pub fn from_odd_prime(p: u64) -> Result<Self> {
        if p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::NotPrimeDiscriminant(p as i64));
        }
        let v = p as i64;
        Self::new(if p % 4 == 1 { v } else { -v })
    }

    pub fn value(self) -> i64 {
        self.0
    }

    /// The prime dividing this discriminant (2 for -4, 8, -8).
    pub fn prime(self) -> u64 {
        if self.0 % 2 == 0 {
            2
        } else {
            self.0.unsigned_abs()
        }
    }

    pub fn is_even(self) -> bool {
        self.0 % 2 == 0
    }
}

impl TryFrom<i64> for PrimeDiscriminant {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PrimeDiscriminant> for i64 {
    fn from(p: PrimeDiscriminant) -> i64 {
        p.0
    }
}

impl fmt::Display for PrimeDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantFactorization {
    pub factors: Vec<PrimeDiscriminant>,
    pub product: i64,
}

impl DiscriminantFactorization {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.prime()).collect()
    }
}

pub fn sort_factors(factors: &mut [PrimeDiscriminant]) {
    factors.sort_by_key(|f| (f.value().unsigned_abs(), f.value()));
}

pub fn factor_discriminant(d: i64) -> Result<DiscriminantFactorization> {
    factor_discriminant_with_bound(d, DEFAULT_FACTOR_BOUND)
}

pub fn factor_discriminant_with_bound(d: i64, bound: u64) -> Result<DiscriminantFactorization> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let mut factors = Vec::new();
    let mut odd_part: i64 = 1;
    for (p, _) in factor(d.unsigned_abs(), bound)? {
        if p == 2 {
            continue;
        }
        let f = PrimeDiscriminant::from_odd_prime(p)?;
        odd_part *= f.value();
        factors.push(f);
    }
    let rest = d / odd_part;
    if rest != 1 {
        factors.push(PrimeDiscriminant::new(rest)?);
    }
    sort_factors(&mut factors);
    Ok(DiscriminantFactorization { factors, product: d })
}

pub fn squarefree_kernel(n: i64) -> Result<i64> {
    squarefree_kernel_with_bound(n, DEFAULT_FACTOR_BOUND)
}

pub fn squarefree_kernel_with_bound(n: i64, bound: u64) -> Result<i64> {
    if n == 0 {
        return Err(Error::UndefinedInput("squarefree_kernel(0)".into()));
    }
    let k: i64 = factor(n.unsigned_abs(), bound)?
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p as i64)
        .product();
    Ok(if n < 0 { -k } else { k })
}

/// Squarefree kernel of a big integer whose odd-exponent primes all lie in
/// `primes`. Returns (kernel, r) with n = kernel * r^2, or an error when the
/// cofactor outside `primes` is not a square.
pub fn squarefree_kernel_over(n: &BigInt, primes: &[u64]) -> Result<(i64, BigInt)> {
    if n.is_zero() {
        return Err(Error::UndefinedInput("squarefree_kernel(0)".into()));
    }
    let mut m = n.abs();
    let mut kernel: i64 = 1;
    let mut root = BigInt::one();
    for &p in primes {
        let bp = BigInt::from(p);
        let mut e = 0u32;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e % 2 == 1 {
            kernel *= p as i64;
        }
        root *= bp.pow(e / 2);
    }
    let s = m.sqrt();
    if &s * &s != m {
        return Err(Error::HypothesisViolation(format!(
            "cofactor of {n} outside primes {primes:?} is not a square"
        )));
    }
    root *= s;
    if n.is_negative() {
        kernel = -kernel;
    }
    Ok((kernel, root))
}

pub fn is_sum_of_two_squares(d: u64) -> Result<bool> {
    if d == 0 {
        return Err(Error::UndefinedInput("is_sum_of_two_squares(0)".into()));
    }
    Ok(factor(d, DEFAULT_FACTOR_BOUND)?
        .iter()
        .all(|&(p, e)| p % 4 != 3 || e % 2 == 0))
}

/// p = s^2 + t^2 with t odd and s, t > 0 (Hermite-Serret).
pub fn two_square_decomposition(p: u64) -> Result<(u64, u64)> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(Error::NotApplicable(format!("{p} is not a prime = 1 mod 4")));
    }
    let mut c = 2;
    while pow_mod(c, (p - 1) / 2, p) != p - 1 {
        c += 1;
    }
    let x = pow_mod(c, (p - 1) / 4, p);
    let (mut a, mut b) = (p, x);
    while b * b > p {
        let r = a % b;
        a = b;
        b = r;
    }
    let other = (p - b * b).sqrt();
    let (s, t) = if b % 2 == 1 { (other, b) } else { (b, other) };
    debug_assert_eq!(s * s + t * t, p);
    Ok((s, t))
}

/// Fundamental discriminant of Q(sqrt(n)) for squarefree n != 1.
pub fn field_discriminant(n: i64) -> i64 {
    if n.rem_euclid(4) == 1 {
        n
    } else {
        4 * n
    }
}

/// Squarefree part of a fundamental discriminant: d or d/4.
pub fn radicand(d: i64) -> i64 {
    if d % 4 == 0 {
        d / 4
    } else {
        d
    }
}

/// Discriminant of the quadratic field Q(sqrt(n)) for any nonsquare n.
pub fn disc_of_radicand(n: i64) -> Result<i64> {
    let k = squarefree_kernel(n)?;
    if k == 1 {
        return Err(Error::SquareDiscriminant(n));
    }
    Ok(field_discriminant(k))
}

pub fn big_to_i64(b: &BigInt) -> Option<i64> {
    b.to_i64()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Hilbert symbol (a, b)_p for a prime p; p = 0 denotes the real place.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> Result<i8> {
    if a == 0 || b == 0 {
        return Err(Error::UndefinedInput(format!("hilbert_symbol({a}, {b})")));
    }
    if p == 0 {
        return Ok(if a < 0 && b < 0 { -1 } else { 1 });
    }
    let split = |mut x: i64| {
        let mut v = 0u32;
        while x % p as i64 == 0 {
            x /= p as i64;
            v += 1;
        }
        (v, x)
    };
    let (alpha, u) = split(a);
    let (beta, w) = split(b);
    if p == 2 {
        let eps = |x: i64| (x.rem_euclid(8) - 1) / 2 % 2;
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            i64::from(r == 3 || r == 5)
        };
        let e = eps(u) * eps(w) + alpha as i64 * omega(w) + beta as i64 * omega(u);
        return Ok(if e % 2 == 0 { 1 } else { -1 });
    }
    let pi = p as i64;
    let mut s: i8 = if alpha % 2 == 1 && beta % 2 == 1 && pi % 4 == 3 { -1 } else { 1 };
    if beta % 2 == 1 {
        s *= kr(u, pi);
    }
    if alpha % 2 == 1 {
        s *= kr(w, pi);
    }
    Ok(s)
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}
