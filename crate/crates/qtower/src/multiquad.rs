//! Exact arithmetic in real multiquadratic fields Q(sqrt m_1, ..., sqrt m_n)
//! and the unit index over the subgroup generated by quadratic-subfield units.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, field_discriminant, squarefree_kernel, DEFAULT_FACTOR_BOUND};
use crate::error::{Error, Result};
use crate::units::{delta_invariant, fundamental_unit, QuadUnit};

pub const DEFAULT_MAX_PRECISION_BITS: u64 = 1 << 20;

/// Q(sqrt g_1, ..., sqrt g_n) with basis sqrt(m_J) over subsets J.
#[derive(Debug, Clone)]
pub struct MultiQuadField {
    pub gens: Vec<i64>,
    pub radicands: Vec<i64>,
    primes: Vec<Vec<u64>>,
}

/// sum_J num[J] sqrt(m_J) / den.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

impl Element {
    fn normalize(mut self) -> Self {
        let mut g = self.den.clone();
        for x in &self.num {
            g = g.gcd(x);
        }
        if self.den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for x in self.num.iter_mut() {
                *x /= &g;
            }
            self.den /= &g;
        }
        self
    }

    pub fn is_one(&self) -> bool {
        self.num[0] == self.den && self.num[1..].iter().all(|x| x.is_zero())
    }
}

fn sorted_sym_diff(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().filter(|p| !b.contains(p)).copied().collect();
    v.extend(b.iter().filter(|p| !a.contains(p)));
    v.sort_unstable();
    v
}

impl MultiQuadField {
    pub fn new(gens: &[i64]) -> Result<Self> {
        let n = gens.len();
        if n == 0 || n > 4 {
            return Err(Error::UndefinedInput(format!("{n} generators")));
        }
        let mut gp = Vec::new();
        for &g in gens {
            if g <= 0 {
                return Err(Error::NotApplicable(format!("radicand {g} is not positive")));
            }
            let k = squarefree_kernel(g)?;
            let ps: Vec<u64> = factor(k as u64, DEFAULT_FACTOR_BOUND)?.into_iter().map(|(p, _)| p).collect();
            gp.push(ps);
        }
        let mut primes = vec![Vec::new(); 1 << n];
        for j in 1..(1usize << n) {
            let low = j.trailing_zeros() as usize;
            primes[j] = sorted_sym_diff(&primes[j & (j - 1)], &gp[low]);
            if primes[j].is_empty() {
                return Err(Error::UndefinedInput(format!("generators {gens:?} are dependent mod squares")));
            }
        }
        let radicands = primes.iter().map(|ps| ps.iter().map(|&p| p as i64).product()).collect();
        Ok(Self { gens: gens.to_vec(), radicands, primes })
    }

    pub fn degree(&self) -> usize {
        1 << self.gens.len()
    }

    /// sqrt(m_I) sqrt(m_J) = c sqrt(m_{I xor J}).
    fn coef(&self, i: usize, j: usize) -> i64 {
        self.primes[i]
            .iter()
            .filter(|p| self.primes[j].contains(p))
            .map(|&p| p as i64)
            .product()
    }

    pub fn one(&self) -> Element {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = BigInt::one();
        Element { num, den: BigInt::one() }
    }

    /// Embed a quadratic unit whose radicand is m_J.
    pub fn embed_unit(&self, u: &QuadUnit) -> Result<Element> {
        let m = squarefree_kernel(u.d)?;
        let j = self
            .radicands
            .iter()
            .position(|&r| r == m)
            .ok_or_else(|| Error::UndefinedInput(format!("Q(sqrt {m}) is not a subfield")))?;
        let f = if u.d % 4 == 0 { 2 } else { 1 };
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = u.x.clone();
        num[j] = &u.y * f;
        Ok(Element { num, den: BigInt::from(2) }.normalize())
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let k = self.degree();
        let mut num = vec![BigInt::zero(); k];
        for i in 0..k {
            if x.num[i].is_zero() {
                continue;
            }
            for j in 0..k {
                if y.num[j].is_zero() {
                    continue;
                }
                num[i ^ j] += &x.num[i] * &y.num[j] * self.coef(i, j);
            }
        }
        Element { num, den: &x.den * &y.den }.normalize()
    }

    /// Fixed-point value of the conjugate of x under the sign pattern s
    /// (bit i set: sqrt g_i changes sign), scaled by 2^prec, with an error bound in ulps.
    fn conjugate_fixed(&self, x: &Element, s: usize, roots: &[BigInt]) -> (BigInt, BigInt) {
        let mut acc = BigInt::zero();
        let mut err = BigInt::from(2);
        for (j, c) in x.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = c * &roots[j];
            if (s & j).count_ones() % 2 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
            err += c.abs();
        }
        (acc / &x.den, err / &x.den + 1)
    }

    fn fixed_roots(&self, prec: u64) -> Vec<BigInt> {
        self.radicands
            .iter()
            .map(|&m| (BigInt::from(m) << (2 * prec as usize)).sqrt())
            .collect()
    }

    /// A square root of x in the field, positive at the identity embedding.
    pub fn sqrt(&self, x: &Element, max_prec: u64) -> Result<Option<Element>> {
        let k = self.degree();
        let size: u64 = x.num.iter().map(|c| c.bits()).max().unwrap_or(0) + x.den.bits();
        let mut prec = 64 + 2 * size * k as u64;
        loop {
            if prec > max_prec {
                return Err(Error::PrecisionEscalationFailure(prec));
            }
            match self.sqrt_at(x, prec)? {
                Attempt::Done(r) => return Ok(r),
                Attempt::Escalate => prec *= 2,
            }
        }
    }

    fn sqrt_at(&self, x: &Element, prec: u64) -> Result<Attempt> {
        let k = self.degree();
        let p = prec as usize;
        let roots = self.fixed_roots(prec);
        let mut vals = Vec::with_capacity(k);
        let mut bound_log2 = f64::NEG_INFINITY;
        for s in 0..k {
            let (v, e) = self.conjugate_fixed(x, s, &roots);
            if v.abs() <= e {
                return Ok(Attempt::Escalate);
            }
            if v.is_negative() {
                return Ok(Attempt::Done(None));
            }
            let low = &v - &e;
            let e_eta = log2(&e) - prec as f64;
            let eta_low = log2(&low) - prec as f64;
            let e_xi = (e_eta - 1.0 - eta_low / 2.0).max(-(prec as f64)) + 1.0;
            bound_log2 = bound_log2.max(e_xi);
            vals.push(v);
        }
        let mmax = *self.radicands.iter().max().unwrap() as f64;
        let xi_max = vals.iter().map(|v| (log2(v) - prec as f64) / 2.0).fold(0.0, f64::max);
        let from_eta = bound_log2 + (k as f64).log2() + mmax.log2() / 2.0 + 1.0;
        let from_roots = xi_max + (k as f64).log2() - prec as f64 + 2.0;
        let trace_err = from_eta.max(from_roots) + 1.0;
        if trace_err > -30.0 {
            return Ok(Attempt::Escalate);
        }
        let xis: Vec<BigInt> = vals.iter().map(|v| (v << p).sqrt()).collect();
        let half = BigInt::one() << (p - 1);
        let tol = BigInt::one() << (p - 24);
        let near = |t: &BigInt| -> Option<BigInt> {
            let r = (t + &half) >> p;
            let d = t - (&r << p);
            if d.abs() <= tol {
                Some(r)
            } else {
                None
            }
        };
        let gens = self.gens.len();
        for pattern in 0..(1usize << (k - 1)) {
            let sign = |s: usize| s != 0 && (pattern >> (s - 1)) & 1 == 1;
            let mut traces = Vec::with_capacity(k);
            let mut ok = true;
            for j in 0..k {
                let mut acc = BigInt::zero();
                for (s, xi) in xis.iter().enumerate() {
                    let neg = sign(s) ^ ((s & j).count_ones() % 2 == 1);
                    if neg {
                        acc -= xi;
                    } else {
                        acc += xi;
                    }
                }
                let t = if j == 0 { acc } else { (acc * &roots[j]) >> p };
                match near(&t) {
                    Some(r) => traces.push(r),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let lcm = self.radicands.iter().fold(BigInt::one(), |a, &m| a.lcm(&BigInt::from(m)));
            let den = &lcm << gens;
            let num: Vec<BigInt> = traces
                .iter()
                .zip(&self.radicands)
                .map(|(t, &m)| t * (&lcm / m))
                .collect();
            let cand = Element { num, den }.normalize();
            if self.mul(&cand, &cand) == *x {
                return Ok(Attempt::Done(Some(cand)));
            }
        }
        Ok(Attempt::Done(None))
    }
}

enum Attempt {
    Done(Option<Element>),
    Escalate,
}

fn log2(x: &BigInt) -> f64 {
    let b = x.bits();
    if b == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = b.saturating_sub(53);
    let top: BigInt = x.abs() >> shift as usize;
    let f: f64 = top.to_string().parse().unwrap();
    f.log2() + shift as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KubotaIndex {
    pub q: u64,
    pub exponent: u32,
    /// Number of independent square roots found in each extraction round.
    pub rounds: Vec<u32>,
    /// Radicands of the quadratic subfields, in basis order.
    pub subfields: Vec<i64>,
    /// Norms of the fundamental units of those subfields.
    pub norms: Vec<i8>,
}

/// Bit masks over the quadratic subfields whose unit product has a square
/// root, predicted from delta invariants (all units must have norm +1).
pub fn delta_criterion_squares(field: &MultiQuadField, units: &[QuadUnit]) -> Result<Option<Vec<u32>>> {
    if units.iter().any(|u| u.norm != 1) {
        return Ok(None);
    }
    let deltas: Vec<i64> = units.iter().map(|u| delta_invariant(u).map(|d| d.delta)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for mask in 1u32..(1 << units.len()) {
        let mut prod: i64 = 1;
        for (i, d) in deltas.iter().enumerate() {
            if mask >> i & 1 == 1 {
                prod = squarefree_kernel(prod * d)?;
            }
        }
        if prod == 1 || field.radicands.contains(&prod) {
            out.push(mask);
        }
    }
    Ok(Some(out))
}

pub fn kubota_index(radicands: &[i64]) -> Result<KubotaIndex> {
    kubota_index_with_precision(radicands, DEFAULT_MAX_PRECISION_BITS)
}

/// (E_K : <units of the quadratic subfields>) for K = Q(sqrt r_1, ..., sqrt r_n),
/// by repeated extraction of square roots.
pub fn kubota_index_with_precision(radicands: &[i64], max_prec: u64) -> Result<KubotaIndex> {
    let field = MultiQuadField::new(radicands)?;
    let k = field.degree();
    let mut units = Vec::new();
    for j in 1..k {
        units.push(fundamental_unit(field_discriminant(field.radicands[j]))?);
    }
    let mut basis: Vec<Element> = units.iter().map(|u| field.embed_unit(u)).collect::<Result<_>>()?;
    let r = basis.len();
    let predicted = delta_criterion_squares(&field, &units)?;
    let mut rounds = Vec::new();
    loop {
        let mut found: Vec<(u32, Element)> = Vec::new();
        for mask in 1u32..(1 << r) {
            let mut eta = field.one();
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    eta = field.mul(&eta, b);
                }
            }
            if let Some(xi) = field.sqrt(&eta, max_prec)? {
                found.push((mask, xi));
            }
        }
        if rounds.is_empty() {
            if let Some(pred) = &predicted {
                let got: Vec<u32> = found.iter().map(|f| f.0).collect();
                if &got != pred {
                    return Err(Error::Inconsistent(format!(
                        "square roots {got:?} disagree with the delta criterion {pred:?}"
                    )));
                }
            }
        }
        let echelon = f2_echelon(&found);
        if echelon.is_empty() {
            break;
        }
        rounds.push(echelon.len() as u32);
        for (pivot, xi) in echelon {
            basis[pivot] = xi;
        }
    }
    let exponent: u32 = rounds.iter().sum();
    Ok(KubotaIndex {
        q: 1 << exponent,
        exponent,
        rounds,
        subfields: field.radicands[1..].to_vec(),
        norms: units.iter().map(|u| u.norm).collect(),
    })
}

/// Reduced echelon basis of a subspace of F_2^r given with all its nonzero
/// members; returns (pivot, element attached to the basis vector).
fn f2_echelon(members: &[(u32, Element)]) -> Vec<(usize, Element)> {
    let mut rows: Vec<u32> = Vec::new();
    for &(m, _) in members {
        let mut v = m;
        for &b in &rows {
            if v & (1 << (31 - b.leading_zeros())) != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            rows.push(v);
            rows.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let n = rows.len();
    for i in 0..n {
        let top = 1u32 << (31 - rows[i].leading_zeros());
        for j in 0..n {
            if j != i && rows[j] & top != 0 {
                rows[j] ^= rows[i];
            }
        }
    }
    rows.into_iter()
        .map(|v| {
            let pivot = 31 - v.leading_zeros() as usize;
            let xi = members.iter().find(|m| m.0 == v).unwrap().1.clone();
            (pivot, xi)
        })
        .collect()
}

/// 2-class number of a real multiquadratic field of degree 4 or 8 from its
/// quadratic subfields: q * prod(h_2) / 4 or q * prod(h_2) / 2^9.
pub fn multiquadratic_h2(subfield_h2: &[u64], q: u64, degree: u32) -> Result<u64> {
    let (count, shift) = match degree {
        4 => (3, 2),
        8 => (7, 9),
        _ => return Err(Error::UndefinedInput(format!("degree {degree}"))),
    };
    if subfield_h2.len() != count {
        return Err(Error::UndefinedInput(format!("expected {count} subfield values")));
    }
    let num: u128 = q as u128 * subfield_h2.iter().map(|&h| h as u128).product::<u128>();
    if !num.is_multiple_of(1u128 << shift) {
        return Err(Error::NonInteger(format!("{num}/2^{shift}")));
    }
    Ok((num >> shift) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let f = MultiQuadField::new(&[2, 5]).unwrap();
        assert_eq!(f.radicands, vec![1, 2, 5, 10]);
        let mut x = f.one();
        x.num[1] = BigInt::from(1);
        let sq = f.mul(&x, &x);
        assert_eq!(sq.num, vec![3, 2, 0, 0].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let r = f.sqrt(&sq, 1 << 16).unwrap().unwrap();
        assert_eq!(r, x.normalize());
        let mut two = f.one();
        two.num[0] = BigInt::from(3);
        assert!(!f.sqrt(&two, 1 << 16).unwrap().is_some());
        assert!(MultiQuadField::new(&[2, 8]).is_err());
        assert!(MultiQuadField::new(&[6, 10, 15]).is_err());
    }

    #[test]
    fn kubota_small_fields() {
        assert_eq!(kubota_index(&[2, 5]).unwrap().q, 2);
        assert_eq!(kubota_index(&[2, 3]).unwrap().q, 4);
    }

    #[test]
    fn h2_formula() {
        assert_eq!(multiquadratic_h2(&[1, 1, 1], 4, 4).unwrap(), 1);
        assert_eq!(multiquadratic_h2(&[1, 2, 4], 2, 4).unwrap(), 4);
        assert_eq!(multiquadratic_h2(&[1, 1, 1, 1, 1, 2, 2], 128, 8).unwrap(), 1);
        assert!(multiquadratic_h2(&[1, 1, 1], 2, 4).is_err());
    }
}
