//! Binary quadratic forms and class groups of quadratic discriminants.

use std::collections::HashMap;
use std::fmt;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::abelian::{two_part, AbelianGroup};
use crate::arith::{self, ext_gcd, factor, kr, PrimeDiscriminant, DEFAULT_FACTOR_BOUND};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BQForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for BQForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl BQForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        Self::new(1, b, (b * b - d) / 4)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
    }

    fn from_ab(a: i128, b: i128, d: i128) -> Self {
        let c = (b * b - d) / (4 * a);
        Self::new(a as i64, b as i64, c as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
        } else {
            let s = (d as u64).sqrt() as i64;
            let a2 = 2 * self.a.abs();
            let b = self.b;
            0 < b && b <= s && s < a2 + b && a2 - b <= s
        }
    }

    /// One step of the reduction operator for indefinite forms.
    pub fn rho(&self) -> Self {
        let d = self.discriminant() as i128;
        let s = (d as u128).sqrt() as i128;
        let c = self.c as i128;
        let m = 2 * c.abs();
        let target = (-(self.b as i128)).rem_euclid(m);
        let b = if c.abs() > s {
            let mut b = target;
            if b > c.abs() {
                b -= m;
            }
            b
        } else {
            s - (s - target).rem_euclid(m)
        };
        Self::from_ab(c, b, d)
    }
}

fn is_square_i64(n: i64) -> bool {
    arith::is_square(n)
}

pub fn reduce(f: BQForm) -> Result<BQForm> {
    let d = f.discriminant();
    if d == 0 || is_square_i64(d) {
        return Err(Error::SquareDiscriminant(d));
    }
    if d < 0 {
        Ok(reduce_definite(f))
    } else {
        let mut g = f;
        let mut steps = 0u64;
        while !g.is_reduced() {
            g = g.rho();
            steps += 1;
            if steps > 1_000_000 {
                return Err(Error::BoundExceeded(format!("reduction of {f}")));
            }
        }
        Ok(g)
    }
}

fn reduce_definite(f: BQForm) -> BQForm {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    if a < 0 {
        a = -a;
        b = -b;
        c = -c;
    }
    loop {
        if b > a || b <= -a {
            let m = 2 * a;
            let nb = (b + a - 1).rem_euclid(m) - (a - 1);
            let q = (nb - b) / m;
            c += q * (q * a + b);
            b = nb;
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if (a == c || b == -a) && b < 0 {
            b = -b;
        }
        if b > a || b <= -a {
            continue;
        }
        break;
    }
    BQForm::new(a as i64, b as i64, c as i64)
}

/// Dirichlet composition followed by reduction.
pub fn compose_raw(f: BQForm, g: BQForm) -> Result<BQForm> {
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(Error::DiscriminantMismatch(d, g.discriminant()));
    }
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let dd = d as i128;
    let s = (b1 + b2) / 2;
    let (e1, p1, q1) = ext_gcd(a1, a2);
    let (e, r1, r) = ext_gcd(e1, s);
    let (p, q) = (p1 * r1, q1 * r1);
    let a3 = a1 * a2 / (e * e);
    let num = p * a1 * b2 + q * a2 * b1 + r * (b1 * b2 + dd) / 2;
    let b3 = (num / e).rem_euclid(2 * a3.abs());
    Ok(BQForm::from_ab(a3, b3, dd))
}

pub fn compose(f: BQForm, g: BQForm) -> Result<BQForm> {
    reduce(compose_raw(f, g)?)
}

/// All reduced forms of a positive nonsquare discriminant.
pub fn reduced_indefinite_forms(d: i64) -> Vec<BQForm> {
    let s = (d as u64).sqrt() as i64;
    let mut out = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (d - b * b) / 4;
        let mut a = 1;
        while a * a <= n {
            if n % a == 0 {
                for x in [a, n / a] {
                    if s < 2 * x + b && 2 * x - b <= s {
                        out.push(BQForm::new(x, b, -(n / x)));
                        out.push(BQForm::new(-x, b, n / x));
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    out.sort_by_key(|f| (f.a.abs(), f.a < 0, f.b, f.c));
    out.dedup();
    out
}

pub fn reduced_definite_forms(d: i64) -> Vec<BQForm> {
    let mut out = Vec::new();
    let amax = ((-d / 3) as u64).sqrt() as i64;
    for a in 1..=amax {
        for b in -a + 1..=a {
            let n = b * b - d;
            if n % (4 * a) != 0 {
                continue;
            }
            let f = BQForm::new(a, b, n / (4 * a));
            if f.is_reduced() {
                out.push(f);
            }
        }
    }
    out
}

/// The form class group with an internal identifier for each class.
#[derive(Debug, Clone)]
struct ClassStructure {
    reps: Vec<BQForm>,
    index: HashMap<BQForm, usize>,
}

impl ClassStructure {
    fn new(d: i64) -> Self {
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        if d < 0 {
            for (i, f) in reduced_definite_forms(d).into_iter().enumerate() {
                index.insert(f, i);
                reps.push(f);
            }
        } else {
            let forms = reduced_indefinite_forms(d);
            for f in forms {
                if index.contains_key(&f) {
                    continue;
                }
                let id = reps.len();
                reps.push(f);
                let mut g = f;
                loop {
                    index.insert(g, id);
                    g = g.rho();
                    if g == f {
                        break;
                    }
                }
            }
        }
        let p = BQForm::principal(d);
        let p = reduce(p).unwrap();
        let pid = index[&p];
        reps.swap(0, pid);
        for v in index.values_mut() {
            if *v == 0 {
                *v = pid;
            } else if *v == pid {
                *v = 0;
            }
        }
        Self { reps, index }
    }

    fn class_of(&self, f: BQForm) -> usize {
        self.index[&reduce(f).unwrap()]
    }

    fn table(&self) -> Vec<u32> {
        let n = self.reps.len();
        let mut t = vec![0u32; n * n];
        for i in 0..n {
            for j in i..n {
                let k = self.class_of(compose_raw(self.reps[i], self.reps[j]).unwrap()) as u32;
                t[i * n + j] = k;
                t[j * n + i] = k;
            }
        }
        t
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormClassGroup {
    pub discriminant: i64,
    pub elementary_divisors: Vec<u64>,
    pub class_representatives: Vec<BQForm>,
    pub narrow: bool,
    #[serde(skip)]
    table: Option<AbelianGroup>,
}

impl PartialEq for FormClassGroup {
    fn eq(&self, other: &Self) -> bool {
        self.discriminant == other.discriminant
            && self.elementary_divisors == other.elementary_divisors
            && self.class_representatives == other.class_representatives
            && self.narrow == other.narrow
    }
}

impl FormClassGroup {
    /// A group known only through its elementary divisors.
    pub fn from_divisors(discriminant: i64, divisors: Vec<u64>, narrow: bool) -> Self {
        Self {
            discriminant,
            elementary_divisors: divisors.into_iter().filter(|&x| x > 1).collect(),
            class_representatives: Vec::new(),
            narrow,
            table: None,
        }
    }

    pub fn class_number(&self) -> u64 {
        self.elementary_divisors.iter().product()
    }

    pub fn two_rank(&self) -> usize {
        self.elementary_divisors.iter().filter(|&&x| x % 2 == 0).count()
    }

    pub fn h2(&self) -> u64 {
        self.elementary_divisors.iter().map(|&x| two_part(x)).product()
    }

    pub fn cayley_table(&self) -> Option<&AbelianGroup> {
        self.table.as_ref()
    }
}

pub fn class_group(d: i64, narrow: bool) -> Result<FormClassGroup> {
    class_group_with_bound(d, narrow, DEFAULT_ENUMERATION_BOUND)
}

pub fn class_group_with_bound(d: i64, narrow: bool, bound: u64) -> Result<FormClassGroup> {
    if d.unsigned_abs() > bound {
        return Err(Error::BoundExceeded(format!("|{d}| > enumeration bound {bound}")));
    }
    if !arith::is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let cs = ClassStructure::new(d);
    let n = cs.reps.len();
    let table = cs.table();
    let narrow = narrow && d > 0;
    if narrow || d < 0 {
        let g = AbelianGroup::new(n, table);
        return Ok(FormClassGroup {
            discriminant: d,
            elementary_divisors: g.invariants(),
            class_representatives: cs.reps,
            narrow,
            table: Some(g),
        });
    }
    let p = BQForm::principal(d);
    let j = cs.class_of(BQForm::new(-1, p.b, -p.c));
    let mut coset = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if coset[i] == usize::MAX {
            let id = reps.len();
            reps.push(i);
            coset[i] = id;
            coset[table[i * n + j] as usize] = id;
        }
    }
    let m = reps.len();
    let mut qt = vec![0u32; m * m];
    for (x, &rx) in reps.iter().enumerate() {
        for (y, &ry) in reps.iter().enumerate() {
            qt[x * m + y] = coset[table[rx * n + ry] as usize] as u32;
        }
    }
    let g = AbelianGroup::new(m, qt);
    Ok(FormClassGroup {
        discriminant: d,
        elementary_divisors: g.invariants(),
        class_representatives: reps.into_iter().map(|i| cs.reps[i]).collect(),
        narrow: false,
        table: Some(g),
    })
}

/// Whether the fundamental unit of Q(sqrt d), d > 0, has norm -1, decided
/// from the forms alone: the negated principal form is principal.
pub fn has_unit_of_norm_minus_one(d: i64) -> Result<bool> {
    if d <= 0 || !arith::is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let p = BQForm::principal(d);
    let j = reduce(BQForm::new(-1, p.b, -p.c))?;
    let p = reduce(p)?;
    let mut g = p;
    loop {
        if g == j {
            return Ok(true);
        }
        g = g.rho();
        if g == p {
            return Ok(false);
        }
    }
}

pub fn two_sylow(g: &FormClassGroup) -> FormClassGroup {
    let divisors: Vec<u64> = g
        .elementary_divisors
        .iter()
        .map(|&x| two_part(x))
        .filter(|&x| x > 1)
        .collect();
    let Some(t) = &g.table else {
        return FormClassGroup::from_divisors(g.discriminant, divisors, g.narrow);
    };
    let keep: Vec<usize> = (0..t.order)
        .filter(|&i| t.element_order(i).is_power_of_two())
        .collect();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let m = keep.len();
    let mut table = vec![0u32; m * m];
    for (x, &i) in keep.iter().enumerate() {
        for (y, &j) in keep.iter().enumerate() {
            table[x * m + y] = pos[&t.mul(i, j)] as u32;
        }
    }
    FormClassGroup {
        discriminant: g.discriminant,
        elementary_divisors: divisors,
        class_representatives: keep
            .iter()
            .filter_map(|&i| g.class_representatives.get(i).copied())
            .collect(),
        narrow: g.narrow,
        table: Some(AbelianGroup::new(m, table)),
    }
}

/// The genus character attached to one prime-discriminant factor d_i of d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusCharacter {
    pub disc: PrimeDiscriminant,
    pub field_disc: i64,
}

impl GenusCharacter {
    /// chi_i(n) = (d_i / n) for n coprime to d.
    pub fn eval_coprime(&self, n: i64) -> i8 {
        kr(self.disc.value(), n)
    }

    /// Extension to all nonzero n: chi_i(p_i) is (d / d_i  / p_i), so that the
    /// product of all characters is trivial on norms.
    pub fn eval(&self, n: i64) -> Result<i8> {
        if n == 0 {
            return Err(Error::UndefinedInput("genus character at 0".into()));
        }
        let mut v: i8 = if n < 0 && self.disc.value() < 0 { -1 } else { 1 };
        for (p, e) in factor(n.unsigned_abs(), DEFAULT_FACTOR_BOUND)? {
            if e % 2 == 0 {
                continue;
            }
            let s = if p == self.disc.prime() {
                kr(self.field_disc / self.disc.value(), p as i64)
            } else {
                kr(self.disc.value(), p as i64)
            };
            v *= s;
        }
        Ok(v)
    }
}

pub fn genus_characters(d: i64) -> Result<Vec<GenusCharacter>> {
    Ok(arith::factor_discriminant(d)?
        .factors
        .into_iter()
        .map(|disc| GenusCharacter { disc, field_disc: d })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct C4Splitting {
    pub delta1: i64,
    pub delta2: i64,
    pub factors1: Vec<PrimeDiscriminant>,
    pub factors2: Vec<PrimeDiscriminant>,
}

impl C4Splitting {
    pub fn contains_pair(&self, x: i64, y: i64) -> bool {
        (self.delta1 == x && self.delta2 == y) || (self.delta1 == y && self.delta2 == x)
    }
}

pub fn is_c4_pair(f1: &[PrimeDiscriminant], f2: &[PrimeDiscriminant]) -> bool {
    let d1: i64 = f1.iter().map(|f| f.value()).product();
    let d2: i64 = f2.iter().map(|f| f.value()).product();
    f2.iter().all(|p| kr(d1, p.prime() as i64) == 1) && f1.iter().all(|p| kr(d2, p.prime() as i64) == 1)
}

pub fn c4_splittings(d: i64) -> Result<Vec<C4Splitting>> {
    let fs = arith::factor_discriminant(d)?.factors;
    let r = fs.len();
    let mut out = Vec::new();
    if r < 2 {
        return Ok(out);
    }
    for mask in 0..(1u32 << r) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let (f1, f2): (Vec<_>, Vec<_>) = (0..r).partition(|&i| mask >> i & 1 == 1);
        let f1: Vec<PrimeDiscriminant> = f1.into_iter().map(|i| fs[i]).collect();
        let f2: Vec<PrimeDiscriminant> = f2.into_iter().map(|i| fs[i]).collect();
        if is_c4_pair(&f1, &f2) {
            out.push(C4Splitting {
                delta1: f1.iter().map(|f| f.value()).product(),
                delta2: f2.iter().map(|f| f.value()).product(),
                factors1: f1,
                factors2: f2,
            });
        }
    }
    Ok(out)
}

/// 2-class number of the quadratic field with discriminant d.
pub fn h2(d: i64, narrow: bool) -> Result<u64> {
    Ok(class_group(d, narrow)?.h2())
}

/// 2-class number of Q(sqrt n) for any nonsquare integer n.
pub fn h2_of_radicand(n: i64, narrow: bool) -> Result<u64> {
    h2(arith::disc_of_radicand(n)?, narrow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(BQForm::new(1, 1, 6)).unwrap(), BQForm::new(1, 1, 6));
        assert_eq!(reduce(BQForm::new(2, -1, 3)).unwrap(), BQForm::new(2, -1, 3));
        assert_eq!(reduce(BQForm::new(3, 1, 2)).unwrap(), BQForm::new(2, -1, 3));
        assert_eq!(reduce(BQForm::new(6, 7, 3)).unwrap().discriminant(), 49 - 72);
        let r = reduce(BQForm::new(6, 2, -1)).unwrap();
        assert_eq!(r.discriminant(), 28);
        assert!(r.is_reduced());
        let s = 5.2915;
        assert!(0.0 < r.b as f64 && (r.b as f64) < s);
        assert!(s - (r.b as f64) < 2.0 * r.a.abs() as f64 && 2.0 * (r.a.abs() as f64) < s + r.b as f64);
        assert!(reduce(BQForm::new(1, 2, 1)).is_err());
        assert!(reduce(BQForm::new(1, 0, -4)).is_err());
    }

    #[test]
    fn compose_examples() {
        let d23 = |a, b, c| BQForm::new(a, b, c);
        assert_eq!(compose(d23(2, 1, 3), d23(2, -1, 3)).unwrap(), d23(1, 1, 6));
        assert_eq!(compose(d23(2, 1, 3), d23(2, 1, 3)).unwrap(), d23(2, -1, 3));
        assert_eq!(compose(BQForm::principal(-23), d23(3, 1, 2)).unwrap(), d23(2, -1, 3));
        assert!(compose(d23(1, 1, 6), BQForm::principal(-20)).is_err());
    }

    #[test]
    fn class_group_examples() {
        assert_eq!(class_group(-23, true).unwrap().elementary_divisors, vec![3]);
        assert_eq!(class_group(-4, false).unwrap().elementary_divisors, Vec::<u64>::new());
        assert_eq!(class_group(40, false).unwrap().elementary_divisors, vec![2]);
        assert_eq!(class_group(40, true).unwrap().elementary_divisors, vec![2]);
        assert_eq!(class_group(12, false).unwrap().elementary_divisors, Vec::<u64>::new());
        assert_eq!(class_group(12, true).unwrap().elementary_divisors, vec![2]);
        let g = class_group(19176, false).unwrap();
        assert_eq!(two_sylow(&g).elementary_divisors, vec![2, 2]);
        assert_eq!(class_group(-84, false).unwrap().elementary_divisors, vec![2, 2]);
        assert_eq!(class_group(-3299, false).unwrap().class_number(), 27);
        assert!(class_group(16, false).is_err());
        assert!(class_group_with_bound(19176, false, 1000).is_err());
    }

    #[test]
    fn two_sylow_examples() {
        let f = |v: Vec<u64>| two_sylow(&FormClassGroup::from_divisors(0, v, false)).elementary_divisors;
        assert_eq!(f(vec![12]), vec![4]);
        assert_eq!(f(vec![3]), Vec::<u64>::new());
        assert_eq!(f(vec![2, 6]), vec![2, 2]);
        let g = class_group(-420, false).unwrap();
        let s = two_sylow(&g);
        assert_eq!(s.h2(), 8);
        assert_eq!(s.cayley_table().unwrap().invariants(), s.elementary_divisors);
    }

    #[test]
    fn genus_examples() {
        let chars = genus_characters(7 * 3 * 43 * 31).unwrap();
        assert_eq!(chars.len(), 4);
        let chi1 = chars.iter().find(|c| c.disc.value() == -7).unwrap();
        assert_eq!(chi1.eval_coprime(3), -1);
        let g = genus_characters(40).unwrap();
        let chi5 = g.iter().find(|c| c.disc.value() == 5).unwrap();
        assert_eq!(chi5.eval_coprime(2), -1);
        for c in chars.iter().chain(&g) {
            assert_eq!(c.eval_coprime(1), 1);
        }
    }

    #[test]
    fn c4_examples() {
        assert!(c4_splittings(136).unwrap().iter().any(|s| s.contains_pair(8, 17)));
        assert!(c4_splittings(-23).unwrap().is_empty());
        assert!(c4_splittings(12).unwrap().is_empty());
        let s = c4_splittings(136).unwrap();
        assert_eq!(s[0].delta1, 8);
    }

    #[test]
    fn unit_norm_from_forms() {
        assert!(has_unit_of_norm_minus_one(5).unwrap());
        assert!(has_unit_of_norm_minus_one(40).unwrap());
        assert!(!has_unit_of_norm_minus_one(12).unwrap());
        assert!(!has_unit_of_norm_minus_one(136).unwrap());
        assert!(has_unit_of_norm_minus_one(8).unwrap());
    }
}
