//! Kuroda's class number formula, the ambiguous class number formula and the
//! chains that reduce h2(L)/h2(k+^1) to class numbers of quartic fields.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::{kr, PrimeDiscriminant};
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Type of the Galois group G = Gal(k^2/k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GType {
    /// generalized quaternion
    Qg,
    /// dihedral
    D,
    /// semidihedral
    S,
    /// quaternion of order 8
    Q,
    /// Klein four group
    V4,
}

impl GType {
    pub fn symbol(self) -> &'static str {
        match self {
            GType::Qg => "Qg",
            GType::D => "D",
            GType::S => "S",
            GType::Q => "Q",
            GType::V4 => "V4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "Qg" => GType::Qg,
            "D" => GType::D,
            "S" => GType::S,
            "Q" => GType::Q,
            "V4" => GType::V4,
            _ => return Err(Error::Parse(format!("unknown group type {s:?}"))),
        })
    }
}

impl std::fmt::Display for GType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

fn is_pow2(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// h(L) = 2^e q h(k1) h(k2) h(k3) / h(k)^2 for a V4-extension L/k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KurodaInput {
    pub v: u8,
    pub kappa: u32,
    pub unit_index_q: u64,
    pub subfield_h2: [u64; 3],
    pub base_h2: u64,
    pub prefactor_exponent: i32,
}

impl KurodaInput {
    /// Extension of a base field of degree `degree` with `kappa` infinite places ramified: e = d - kappa - 2 - v.
    pub fn over_field(degree: u32, kappa: u32, v: u8, q: u64, subfield_h2: [u64; 3], base_h2: u64) -> Result<Self> {
        let inp = Self {
            v,
            kappa,
            unit_index_q: q,
            subfield_h2,
            base_h2,
            prefactor_exponent: degree as i32 - kappa as i32 - 2 - v as i32,
        };
        inp.validate()?;
        Ok(inp)
    }

    /// Biquadratic field over Q: e = -2 when real, -1 when imaginary.
    pub fn over_rationals(real: bool, q: u64, subfield_h2: [u64; 3]) -> Result<Self> {
        let inp = Self {
            v: 0,
            kappa: if real { 0 } else { 1 },
            unit_index_q: q,
            subfield_h2,
            base_h2: 1,
            prefactor_exponent: if real { -2 } else { -1 },
        };
        inp.validate()?;
        Ok(inp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.v > 1 {
            return Err(Error::UndefinedInput(format!("v = {}", self.v)));
        }
        if !is_pow2(self.unit_index_q) {
            return Err(Error::UndefinedInput(format!("q = {} is not a power of 2", self.unit_index_q)));
        }
        if self.base_h2 == 0 || self.subfield_h2.contains(&0) {
            return Err(Error::UndefinedInput("2-class numbers must be positive".into()));
        }
        Ok(())
    }
}

fn pow2(e: i32) -> Rational {
    if e >= 0 {
        Rational::from_integer(1i128 << e)
    } else {
        Rational::new(1, 1i128 << -e)
    }
}

pub fn kuroda_ratio(inp: &KurodaInput) -> Result<Rational> {
    inp.validate()?;
    let num: i128 = inp.unit_index_q as i128 * inp.subfield_h2.iter().map(|&h| h as i128).product::<i128>();
    let den = (inp.base_h2 as i128).pow(2);
    Ok(pow2(inp.prefactor_exponent) * Rational::new(num, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousInput {
    pub t_fin: u32,
    pub t_inf: u32,
    pub unit_index: u64,
}

/// #Am_2 = 2^(t-1) / (E:H).
pub fn ambiguous_number(inp: &AmbiguousInput) -> Result<u64> {
    let t = inp.t_fin + inp.t_inf;
    if t == 0 || t > 63 {
        return Err(Error::UndefinedInput(format!("t = {t}")));
    }
    if !is_pow2(inp.unit_index) {
        return Err(Error::UndefinedInput(format!("(E:H) = {} is not a power of 2", inp.unit_index)));
    }
    let top = 1u64 << (t - 1);
    if !top.is_multiple_of(inp.unit_index) {
        return Err(Error::Inconsistent(format!("2^{} / {} is not an integer", t - 1, inp.unit_index)));
    }
    Ok(top / inp.unit_index)
}

/// 2-rank of the class group when the base field has odd class number.
pub fn ambiguous_rank(inp: &AmbiguousInput) -> Result<u32> {
    Ok(ambiguous_number(inp)?.trailing_zeros())
}

/// Hasse unit indices Q(L) = Q(k+^1) = 2 and Q(N) by group type.
pub fn hasse_indices(g: GType) -> Result<(u64, u64, u64)> {
    match g {
        GType::Qg => Ok((2, 2, 1)),
        GType::D | GType::S => Ok((2, 2, 2)),
        _ => Err(Error::NotApplicable(format!("no unit index constants for type {g}"))),
    }
}

/// l in h2(L)/h2(k+^1) = l h2(N)/h2(k^1): 1/4 * Q(L) / (Q(k+^1) Q(N)) with w-ratio 1/2 and h2(K) = h2(k^1)/2 absorbed.
pub fn first_step_ell(g: GType) -> Result<Rational> {
    let (ql, qk, qn) = hasse_indices(g)?;
    Ok(Rational::new(1, 4) * Rational::new(ql as i128, (qk * qn) as i128))
}

/// Factor f in h2(N)/h2(k^1) = f h2(M)^2, namely Q(N)/2.
pub fn second_step_factor(g: GType) -> Result<Rational> {
    let (_, _, qn) = hasse_indices(g)?;
    Ok(Rational::new(qn as i128, 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainDecision {
    /// h2(L) >= 2 h2(k+^1), so the narrow tower has length at least 3.
    LengthAtLeastThree,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MainChain {
    pub ratio: Rational,
    pub decision: ChainDecision,
}

/// h2(L)/h2(k+^1) = h2(M)^2 / 8, composed from both Kuroda steps.
pub fn main_chain(g: GType, h2_m: u64) -> Result<MainChain> {
    if h2_m == 0 {
        return Err(Error::UndefinedInput("h2(M) = 0".into()));
    }
    let h = h2_m as i128;
    let ratio = first_step_ell(g)? * second_step_factor(g)? * Rational::from_integer(h * h);
    debug_assert_eq!(ratio, Rational::new(h * h, 8));
    let decision = if ratio >= Rational::from_integer(2) {
        ChainDecision::LengthAtLeastThree
    } else {
        ChainDecision::Undecided
    };
    Ok(MainChain { ratio, decision })
}

/// h2(M) = 1/2 h2(Q(sqrt gamma)) h2(Q(sqrt D1 gamma)).
pub fn h2_m_from_subfields(h2_gamma: u64, h2_d1_gamma: u64) -> Result<Rational> {
    let inp = KurodaInput::over_rationals(false, 1, [h2_gamma, h2_d1_gamma, 1])?;
    kuroda_ratio(&inp)
}

/// The two families of cases with D = d2 and a C4-splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitFamily {
    A,
    B,
}

impl SplitFamily {
    pub fn of_label(label: &str) -> Option<Self> {
        match label {
            "a1" | "a2" | "b2" | "a5" | "b5" | "a7" | "b7" => Some(SplitFamily::A),
            "b1" | "a6" | "b6" => Some(SplitFamily::B),
            _ => None,
        }
    }

    pub fn t_fin(self) -> u32 {
        match self {
            SplitFamily::A => 4,
            SplitFamily::B => 3,
        }
    }

    /// 2-rank of Cl(Q(sqrt d3d4 alpha)) for alpha < 0: t = t_fin + 2, (E:H) = 4.
    pub fn rank(self) -> Result<u32> {
        ambiguous_rank(&AmbiguousInput { t_fin: self.t_fin(), t_inf: 2, unit_index: 4 })
    }
}

/// t_fin from the splitting of p1, p3, p4 in Q(sqrt d2): p1 contributes 1, p3 and p4 contribute 2 when split, else 1.
pub fn t_fin_from_symbols(d2: i64, d3: i64, d4: i64) -> Result<u32> {
    let mut t = 1;
    for dj in [d3, d4] {
        let p = PrimeDiscriminant::new(dj)?.prime() as i64;
        t += match kr(d2, p) {
            1 => 2,
            -1 => 1,
            _ => return Err(Error::NotApplicable(format!("{p} ramifies in Q(sqrt {d2})"))),
        };
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuroda_examples() {
        let f = KurodaInput::over_rationals(true, 2, [1, 2, 1]).unwrap();
        assert_eq!(kuroda_ratio(&f).unwrap(), Rational::from_integer(1));
        let m = KurodaInput { v: 0, kappa: 0, unit_index_q: 1, subfield_h2: [1, 1, 1], base_h2: 1, prefactor_exponent: -1 };
        assert_eq!(kuroda_ratio(&m).unwrap(), Rational::new(1, 2));
        assert_eq!(h2_m_from_subfields(1, 8).unwrap(), Rational::from_integer(4));
        let l = KurodaInput::over_field(8, 7, 1, 4, [2, 2, 8], 4).unwrap();
        assert_eq!(l.prefactor_exponent, -2);
        assert_eq!(kuroda_ratio(&l).unwrap(), Rational::from_integer(2));
        assert!(KurodaInput::over_rationals(true, 3, [1, 1, 1]).is_err());
    }

    #[test]
    fn ambiguous_examples() {
        let n = |t_fin, t_inf, unit_index| ambiguous_number(&AmbiguousInput { t_fin, t_inf, unit_index });
        assert_eq!(n(1, 0, 1).unwrap(), 1);
        assert_eq!(n(4, 2, 4).unwrap(), 8);
        assert_eq!(n(1, 2, 4).unwrap(), 1);
        assert!(matches!(n(1, 1, 4), Err(Error::Inconsistent(_))));
        assert!(n(0, 0, 1).is_err());
    }

    #[test]
    fn chain_values() {
        for g in [GType::Qg, GType::D, GType::S] {
            assert_eq!(first_step_ell(g).unwrap() * second_step_factor(g).unwrap(), Rational::new(1, 8));
            assert_eq!(main_chain(g, 2).unwrap().ratio, Rational::new(1, 2));
            let c = main_chain(g, 4).unwrap();
            assert_eq!((c.ratio, c.decision), (Rational::from_integer(2), ChainDecision::LengthAtLeastThree));
            assert_eq!(main_chain(g, 1).unwrap().ratio, Rational::new(1, 8));
        }
        assert_eq!(first_step_ell(GType::Qg).unwrap(), Rational::new(1, 4));
        assert_eq!(first_step_ell(GType::D).unwrap(), Rational::new(1, 8));
        assert!(main_chain(GType::V4, 4).is_err());
    }

    #[test]
    fn split_families() {
        assert_eq!(SplitFamily::A.rank().unwrap(), 3);
        assert_eq!(SplitFamily::B.rank().unwrap(), 2);
        assert_eq!(SplitFamily::of_label("a6"), Some(SplitFamily::B));
        assert_eq!(SplitFamily::of_label("c2"), None);
    }
}
