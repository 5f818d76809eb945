//! Case tables for real quadratic fields with four prime discriminant factors
//! and 2-class group (2,2): classification, tower verdicts and verification of
//! the unit and class number data attached to each case.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith::{self, kr, PrimeDiscriminant};
use crate::error::{Error, Result};
use crate::formulas::GType;
use crate::multiquad::{kubota_index, multiquadratic_h2};
use crate::qform;
use crate::units::{delta_invariant, fundamental_unit};

pub const TABLES_JSON: &str = include_str!("../data/case_tables.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseType {
    I,
    II,
    III,
    IV,
}

impl CaseType {
    pub fn name(self) -> &'static str {
        match self {
            CaseType::I => "I",
            CaseType::II => "II",
            CaseType::III => "III",
            CaseType::IV => "IV",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "I" => CaseType::I,
            "II" => CaseType::II,
            "III" => CaseType::III,
            "IV" => CaseType::IV,
            _ => return Err(Error::Parse(format!("unknown case type {s:?}"))),
        })
    }

    /// Sign pattern and the presence of -4 in the fourth slot.
    pub fn admits(self, d: &[i64; 4]) -> bool {
        let neg = |i: usize| d[i] < 0;
        let no_m4 = |i: usize| d[i] != -4;
        match self {
            CaseType::I => !neg(0) && !neg(1) && neg(2) && neg(3) && (0..4).all(no_m4),
            CaseType::II => !neg(0) && !neg(1) && neg(2) && d[3] == -4,
            CaseType::III => (0..4).all(neg) && (0..4).all(no_m4),
            CaseType::IV => (0..4).all(neg) && d[3] == -4,
        }
    }
}

impl fmt::Display for CaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawTables {
    version: u32,
    types: Vec<RawType>,
    unit_rows: Vec<RawUnitRow>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawType {
    name: String,
    fixed: Vec<[i64; 3]>,
    columns: Vec<[usize; 2]>,
    rows: Vec<RawRow>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawRow {
    label: String,
    signs: String,
    g: String,
    gplus: String,
}

#[derive(Debug, Clone, Deserialize)]
struct RawUnitRow {
    label: String,
    nu: String,
    delta: String,
    delta1: String,
    delta2: String,
    n12: String,
    g: String,
    q: [String; 3],
    h2: [String; 3],
    order: String,
    #[serde(default)]
    printed_label: Option<String>,
    #[serde(default)]
    loose: Vec<String>,
}

/// One row of the symbol tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRow {
    pub label: String,
    pub signs: Vec<i8>,
    pub g_type: Vec<GType>,
    pub gplus_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeTable {
    pub case_type: CaseType,
    /// (i, j, s): (d_i / p_j) = s, 1-based.
    pub fixed: Vec<(usize, usize, i8)>,
    /// (i, j): the symbol (d_i / p_j) of each sign column, 1-based.
    pub columns: Vec<(usize, usize)>,
    pub rows: Vec<CaseRow>,
}

/// One row of the unit and class number table, cells kept in source syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRow {
    pub label: String,
    pub nu: String,
    pub delta: String,
    pub delta1: String,
    pub delta2: String,
    pub n12: String,
    pub g: String,
    pub q: [String; 3],
    pub h2: [String; 3],
    pub order: String,
    pub printed_label: Option<String>,
    /// Cells whose nesting is ambiguous; any listed alternative is accepted.
    pub loose: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTables {
    pub version: u32,
    pub types: Vec<TypeTable>,
    pub unit_rows: Vec<UnitRow>,
}

impl CaseTables {
    pub fn parse(json: &str) -> Result<Self> {
        let raw: RawTables = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        let mut types = Vec::new();
        for t in raw.types {
            let case_type = CaseType::parse(&t.name)?;
            let fixed = t
                .fixed
                .iter()
                .map(|&[i, j, s]| (i as usize, j as usize, s as i8))
                .collect();
            let columns: Vec<(usize, usize)> = t.columns.iter().map(|&[i, j]| (i, j)).collect();
            let mut rows = Vec::new();
            for r in t.rows {
                let signs = r
                    .signs
                    .chars()
                    .map(|c| match c {
                        '+' => Ok(1),
                        '-' => Ok(-1),
                        _ => Err(Error::Parse(format!("bad sign {c:?} in row {}", r.label))),
                    })
                    .collect::<Result<Vec<i8>>>()?;
                if signs.len() != columns.len() {
                    return Err(Error::Parse(format!("row {} has {} signs", r.label, signs.len())));
                }
                let g_type = r.g.split('/').map(GType::parse).collect::<Result<_>>()?;
                rows.push(CaseRow { label: r.label, signs, g_type, gplus_label: r.gplus });
            }
            types.push(TypeTable { case_type, fixed, columns, rows });
        }
        let mut unit_rows = Vec::new();
        for r in raw.unit_rows {
            let row = UnitRow {
                label: r.label,
                nu: r.nu,
                delta: r.delta,
                delta1: r.delta1,
                delta2: r.delta2,
                n12: r.n12,
                g: r.g,
                q: r.q,
                h2: r.h2,
                order: r.order,
                printed_label: r.printed_label,
                loose: r.loose,
            };
            for cell in row.cells() {
                Cell::parse(cell.1)?;
            }
            unit_rows.push(row);
        }
        Ok(CaseTables { version: raw.version, types, unit_rows })
    }

    pub fn type_table(&self, t: CaseType) -> &TypeTable {
        self.types.iter().find(|x| x.case_type == t).expect("all four types are tabulated")
    }

    pub fn row(&self, label: &str) -> Option<(CaseType, &CaseRow)> {
        self.types
            .iter()
            .find_map(|t| t.rows.iter().find(|r| r.label == label).map(|r| (t.case_type, r)))
    }

    pub fn unit_row(&self, label: &str) -> Option<&UnitRow> {
        self.unit_rows.iter().find(|r| r.label == label)
    }
}

impl UnitRow {
    /// (column name, cell text) in table order.
    pub fn cells(&self) -> Vec<(&'static str, &str)> {
        vec![
            ("delta", &self.delta),
            ("delta1", &self.delta1),
            ("delta2", &self.delta2),
            ("n12", &self.n12),
            ("g", &self.g),
            ("q1", &self.q[0]),
            ("q2", &self.q[1]),
            ("q3", &self.q[2]),
            ("h2_k1", &self.h2[0]),
            ("h2_k2", &self.h2[1]),
            ("h2_k3", &self.h2[2]),
            ("order", &self.order),
        ]
    }

    /// The first five symbol bits; the sixth is free in Type II rows.
    pub fn nu_bits(&self) -> Vec<Option<u8>> {
        self.nu
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect()
    }
}

pub fn tables() -> &'static CaseTables {
    static T: OnceLock<CaseTables> = OnceLock::new();
    T.get_or_init(|| CaseTables::parse(TABLES_JSON).expect("embedded case tables parse"))
}

/// Top/bottom alternative of a round-bracket cell. Where the norm column is
/// split, top is Nε = -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Top,
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Alt {
    Plain(Vec<String>),
    Branch(Vec<String>, Vec<String>),
}

/// Cell grammar: `[x | y]` splits on nu34 (top is nu34 = 1), `(x | y)` splits on
/// the row branch, `a or b` lists alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Cell {
    Fixed(Alt),
    ByNu34(Alt, Alt),
}

fn split_top(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '|' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn strip(s: &str, open: char, close: char) -> Option<&str> {
    let s = s.trim();
    s.strip_prefix(open)?.strip_suffix(close)
}

impl Alt {
    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = strip(s, '(', ')') {
            if let Some((a, b)) = split_top(inner) {
                return Ok(Alt::Branch(choices(a)?, choices(b)?));
            }
        }
        Ok(Alt::Plain(choices(s)?))
    }

    fn select(&self, branch: Branch) -> &[String] {
        match (self, branch) {
            (Alt::Plain(v), _) => v,
            (Alt::Branch(a, _), Branch::Top) => a,
            (Alt::Branch(_, b), Branch::Bottom) => b,
        }
    }

    fn leaves(&self) -> Vec<&String> {
        match self {
            Alt::Plain(v) => v.iter().collect(),
            Alt::Branch(a, b) => a.iter().chain(b.iter()).collect(),
        }
    }

    fn is_branched(&self) -> bool {
        matches!(self, Alt::Branch(..))
    }
}

fn choices(s: &str) -> Result<Vec<String>> {
    let v: Vec<String> = s.split(" or ").map(|x| x.trim().to_string()).collect();
    if v.iter().any(|x| x.is_empty() || x.contains(['[', ']', '|'])) {
        return Err(Error::Parse(format!("malformed cell alternative {s:?}")));
    }
    Ok(v)
}

impl Cell {
    fn parse(s: &str) -> Result<Self> {
        if let Some(inner) = strip(s, '[', ']') {
            let (a, b) = split_top(inner).ok_or_else(|| Error::Parse(format!("missing '|' in {s:?}")))?;
            return Ok(Cell::ByNu34(Alt::parse(a)?, Alt::parse(b)?));
        }
        Ok(Cell::Fixed(Alt::parse(s)?))
    }

    fn select(&self, nu34: u8, branch: Branch) -> &[String] {
        match self {
            Cell::Fixed(a) => a.select(branch),
            Cell::ByNu34(a, b) => {
                if nu34 == 1 {
                    a.select(branch)
                } else {
                    b.select(branch)
                }
            }
        }
    }

    fn leaves(&self) -> Vec<&String> {
        match self {
            Cell::Fixed(a) => a.leaves(),
            Cell::ByNu34(a, b) => a.leaves().into_iter().chain(b.leaves()).collect(),
        }
    }

    fn is_branched(&self) -> bool {
        match self {
            Cell::Fixed(a) => a.is_branched(),
            Cell::ByNu34(a, b) => a.is_branched() || b.is_branched(),
        }
    }
}

/// Classification of one discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub d: i64,
    pub case_type: CaseType,
    pub label: String,
    /// d_1, ..., d_4 in the chosen labeling.
    pub assignment: [PrimeDiscriminant; 4],
    /// nu_12, nu_13, nu_23, nu_14, nu_24, nu_34 with (-1)^nu_ij = (d_i / p_j).
    pub symbol_matrix: [u8; 6],
    pub g_type: Vec<GType>,
    pub gplus_label: String,
    pub g_order_formula: String,
}

impl CaseRecord {
    pub fn values(&self) -> [i64; 4] {
        self.assignment.map(|p| p.value())
    }

    pub fn primes(&self) -> [u64; 4] {
        self.assignment.map(|p| p.prime())
    }

    pub fn nu34(&self) -> u8 {
        self.symbol_matrix[5]
    }
}

const NU_PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)];

fn symbol(d: &[i64; 4], p: &[u64; 4], i: usize, j: usize) -> i8 {
    kr(d[i - 1], p[j - 1] as i64)
}

fn symbol_matrix(d: &[i64; 4], p: &[u64; 4]) -> [u8; 6] {
    NU_PAIRS.map(|(i, j)| u8::from(symbol(d, p, i, j) == -1))
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

/// Checks the hypotheses of the tables: four prime discriminant factors, not
/// a sum of two squares, 2-class group (2,2).
pub fn check_preconditions(d: i64) -> Result<arith::DiscriminantFactorization> {
    if d <= 0 {
        return Err(Error::Precondition(format!("{d} is not positive")));
    }
    if !arith::is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let f = arith::factor_discriminant(d)?;
    if f.len() != 4 {
        return Err(Error::Precondition(format!("{d} has {} prime discriminant factors, not 4", f.len())));
    }
    if arith::is_sum_of_two_squares(d as u64)? {
        return Err(Error::Precondition(format!("{d} is a sum of two squares")));
    }
    let cl = qform::two_sylow(&qform::class_group(d, false)?);
    let mut divs = cl.elementary_divisors.clone();
    divs.sort_unstable();
    if divs != [2, 2] {
        return Err(Error::Precondition(format!("2-class group of {d} is {divs:?}, not (2,2)")));
    }
    Ok(f)
}

pub fn classify(d: i64) -> Result<CaseRecord> {
    let f = check_preconditions(d)?;
    classify_factors(d, &f.factors)
}

/// Classification from a given factorization, bypassing the class group check.
pub fn classify_factors(d: i64, factors: &[PrimeDiscriminant]) -> Result<CaseRecord> {
    if factors.len() != 4 {
        return Err(Error::Precondition(format!("{} factors, not 4", factors.len())));
    }
    let t = tables();
    let mut hits: BTreeMap<String, Vec<([i64; 4], CaseType)>> = BTreeMap::new();
    for perm in permutations() {
        let dv = perm.map(|i| factors[i].value());
        let pv = perm.map(|i| factors[i].prime());
        for tt in &t.types {
            if !tt.case_type.admits(&dv) {
                continue;
            }
            if tt.fixed.iter().any(|&(i, j, s)| symbol(&dv, &pv, i, j) != s) {
                continue;
            }
            let signs: Vec<i8> = tt.columns.iter().map(|&(i, j)| symbol(&dv, &pv, i, j)).collect();
            for row in tt.rows.iter().filter(|r| r.signs == signs) {
                hits.entry(row.label.clone()).or_default().push((dv, tt.case_type));
            }
        }
    }
    if hits.is_empty() {
        return Err(Error::NoRowMatch(d));
    }
    if hits.len() > 1 {
        return Err(Error::MultipleLabels { d, labels: hits.into_keys().collect() });
    }
    let (label, mut found) = hits.into_iter().next().expect("one label");
    found.sort_by_key(|(dv, _)| dv.map(i64::unsigned_abs));
    let (dv, case_type) = found[0];
    let (_, row) = t.row(&label).expect("label from table");
    let assignment = dv.map(|x| PrimeDiscriminant::new(x).expect("factor is a prime discriminant"));
    let pv = assignment.map(|p| p.prime());
    let g_order_formula = t.unit_row(&label).map(|r| r.order.clone()).unwrap_or_else(|| "4".into());
    Ok(CaseRecord {
        d,
        case_type,
        label,
        assignment,
        symbol_matrix: symbol_matrix(&dv, &pv),
        g_type: row.g_type.clone(),
        gplus_label: row.gplus_label.clone(),
        g_order_formula,
    })
}

/// (d1d2/p3) = (d1d2/p4) = (d2d3d4/p1) = (d3d4d1/p2) = +1.
pub fn h8_predicate(assignment: &[PrimeDiscriminant; 4]) -> bool {
    let d = assignment.map(|p| p.value());
    let p = assignment.map(|p| p.prime() as i64);
    kr(d[0] * d[1], p[2]) == 1
        && kr(d[0] * d[1], p[3]) == 1
        && kr(d[1] * d[2] * d[3], p[0]) == 1
        && kr(d[2] * d[3] * d[0], p[1]) == 1
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Exactly2,
    AtLeast3,
    Unknown64_150,
    Exactly2_By8Rank,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerVerdict {
    pub verdict: Verdict,
    pub justification: String,
}

/// Labels whose tower has length exactly 2, at least 3, or is undecided.
pub const VERDICT_PARTITION: (&[&str], &[&str], &[&str]) = (
    &["32.034", "32.036", "32.037", "32.039", "32.041"],
    &["32.033", "64.144", "64.146", "64.147"],
    &["64.150"],
);

pub fn tower_verdict_for_label(gplus_label: &str, octic_cl2: Option<&[u64]>) -> TowerVerdict {
    let (verdict, justification) = if gplus_label == "64.150" {
        match octic_cl2 {
            Some(cl) if cl.iter().all(|&x| x <= 4) => (
                Verdict::Exactly2_By8Rank,
                format!("G+/G3+ = 64.150 and the supplied 2-class group {cl:?} of the narrow 2-class field has 8-rank 0, so G+ is metabelian"),
            ),
            Some(cl) => (
                Verdict::Unknown64_150,
                format!("G+/G3+ = 64.150 and the supplied 2-class group {cl:?} has positive 8-rank; decide via h2(L_j) = h2(k+^1)/2 for the three quadratic extensions L_0, L_1, L_2"),
            ),
            None => (
                Verdict::Unknown64_150,
                "G+/G3+ = 64.150; length 2 follows if the 2-class group of the narrow 2-class field has 8-rank 0, otherwise check h2(L_j) = h2(k+^1)/2".into(),
            ),
        }
    } else if gplus_label.starts_with("32.") && gplus_label != "32.033" {
        (Verdict::Exactly2, format!("G+/G3+ = {gplus_label} has order 32 and is not 32.033"))
    } else {
        (Verdict::AtLeast3, format!("G+/G3+ = {gplus_label} is 32.033 or of order 64 other than 64.150"))
    };
    TowerVerdict { verdict, justification }
}

pub fn tower_verdict(rec: &CaseRecord, octic_cl2: Option<&[u64]>) -> TowerVerdict {
    tower_verdict_for_label(&rec.gplus_label, octic_cl2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub column: String,
    /// Alternatives accepted under the resolved nu34 and branch.
    pub expected: Vec<String>,
    pub computed: Option<String>,
    pub matched: bool,
    /// The alternative that matched, when the cell lists several.
    pub matched_alternative: Option<String>,
    /// For cells read loosely: whether the nu34/branch reading also matches.
    pub strict_matched: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixIIReport {
    pub d: i64,
    pub label: String,
    pub assignment: [i64; 4],
    pub nu34: u8,
    pub nu_matches: bool,
    pub branch: Option<Branch>,
    pub g_type: Vec<GType>,
    pub entries: Vec<ReportEntry>,
    /// Twice the largest h2(k_i), the order of G when a maximal subgroup is cyclic.
    pub order_from_fields: Option<i64>,
}

impl AppendixIIReport {
    pub fn all_match(&self) -> bool {
        self.nu_matches && self.entries.iter().all(|e| e.matched)
    }

    pub fn entry(&self, column: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.column == column)
    }
}

struct RowContext {
    d: [i64; 4],
    p: [u64; 4],
    cache: std::cell::RefCell<BTreeMap<i64, Result<u64>>>,
}

impl RowContext {
    fn product(&self, s: &str) -> Result<(i64, i64)> {
        // returns (integer coefficient, product of the named d_i or p_i)
        let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
        let coeff: i64 = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| Error::Parse(s.into()))? };
        let rest = &s[digits.len()..];
        let mut prod = 1i64;
        let mut chars = rest.chars().peekable();
        while let Some(c) = chars.next() {
            let idx = chars
                .next()
                .and_then(|x| x.to_digit(10))
                .filter(|&x| (1..=4).contains(&x))
                .ok_or_else(|| Error::Parse(format!("bad term {s:?}")))? as usize;
            prod *= match c {
                'd' => self.d[idx - 1],
                'p' => self.p[idx - 1] as i64,
                _ => return Err(Error::Parse(format!("bad term {s:?}"))),
            };
        }
        Ok((coeff, prod))
    }

    fn h2_of(&self, radicand: i64) -> Result<u64> {
        let n = arith::squarefree_kernel(radicand)?;
        if let Some(v) = self.cache.borrow().get(&n) {
            return v.clone();
        }
        let v = qform::h2_of_radicand(n, false);
        self.cache.borrow_mut().insert(n, v.clone());
        v
    }

    /// Integer value of a term such as `p1p4`, `2p3`, `-1`, `4`, `2h2(d1d2)`.
    fn eval(&self, term: &str) -> Result<i64> {
        let term = term.trim();
        if let Ok(v) = term.parse::<i64>() {
            return Ok(v);
        }
        if let Some(pos) = term.find("h2(") {
            let coeff: i64 = if pos == 0 { 1 } else { term[..pos].parse().map_err(|_| Error::Parse(term.into()))? };
            let arg = term[pos + 3..].strip_suffix(')').ok_or_else(|| Error::Parse(term.into()))?;
            let (c, prod) = self.product(arg)?;
            return Ok(coeff * self.h2_of(c * prod)? as i64);
        }
        let (c, prod) = self.product(term)?;
        Ok(c * prod)
    }
}

struct Computed {
    delta: [Result<i64>; 3],
    n12: Result<i64>,
    q: [Result<i64>; 3],
    h2: [Result<i64>; 3],
}

fn quartic_radicands(d: &[i64; 4]) -> [[i64; 2]; 3] {
    [
        [d[0], d[1] * d[2] * d[3]],
        [d[1], d[0] * d[2] * d[3]],
        [d[0] * d[1], d[2] * d[3]],
    ]
}

fn compute_row_values(ctx: &RowContext) -> Computed {
    let d = &ctx.d;
    let dk: i64 = d.iter().product();
    let delta_of = |disc_product: i64| -> Result<i64> {
        let disc = arith::disc_of_radicand(arith::squarefree_kernel(disc_product)?)?;
        Ok(delta_invariant(&fundamental_unit(disc)?)?.delta)
    };
    let delta = [delta_of(dk), delta_of(d[1] * d[2] * d[3]), delta_of(d[0] * d[2] * d[3])];
    let n12 = arith::disc_of_radicand(arith::squarefree_kernel(d[0] * d[1]).unwrap_or(1))
        .and_then(fundamental_unit)
        .map(|u| u.norm as i64);
    let fields = quartic_radicands(d);
    let q = fields.map(|[a, b]| -> Result<i64> {
        let ra = arith::squarefree_kernel(a)?;
        let rb = arith::squarefree_kernel(b)?;
        Ok(kubota_index(&[ra, rb])?.q as i64)
    });
    let h2 = std::array::from_fn(|i| -> Result<i64> {
        let [a, b] = fields[i];
        let qi = q[i].clone()? as u64;
        let hs = [ctx.h2_of(a)?, ctx.h2_of(b)?, ctx.h2_of(a * b)?];
        Ok(multiquadratic_h2(&hs, qi, 4)? as i64)
    });
    Computed { delta, n12, q, h2 }
}

/// Compares computed invariants of d against its row of the unit table.
pub fn verify_appendix_row(d: i64) -> Result<AppendixIIReport> {
    let rec = classify(d)?;
    verify_record(&rec)
}

pub fn verify_record(rec: &CaseRecord) -> Result<AppendixIIReport> {
    let row = tables()
        .unit_row(&rec.label)
        .ok_or_else(|| Error::NotApplicable(format!("no unit table row for case {}", rec.label)))?;
    let ctx = RowContext { d: rec.values(), p: rec.primes(), cache: Default::default() };
    let computed = compute_row_values(&ctx);
    let nu34 = rec.nu34();
    let nu_matches = row
        .nu_bits()
        .iter()
        .zip(rec.symbol_matrix.iter())
        .all(|(want, have)| want.is_none_or(|w| w == *have));

    let order_from_fields = match &computed.h2 {
        [Ok(a), Ok(b), Ok(c)] => Some(2 * (*a).max(*b).max(*c)),
        _ => None,
    };
    let values: Vec<(&str, std::result::Result<i64, String>)> = vec![
        ("delta", computed.delta[0].clone().map_err(|e| e.to_string())),
        ("delta1", computed.delta[1].clone().map_err(|e| e.to_string())),
        ("delta2", computed.delta[2].clone().map_err(|e| e.to_string())),
        ("n12", computed.n12.clone().map_err(|e| e.to_string())),
        ("q1", computed.q[0].clone().map_err(|e| e.to_string())),
        ("q2", computed.q[1].clone().map_err(|e| e.to_string())),
        ("q3", computed.q[2].clone().map_err(|e| e.to_string())),
        ("h2_k1", computed.h2[0].clone().map_err(|e| e.to_string())),
        ("h2_k2", computed.h2[1].clone().map_err(|e| e.to_string())),
        ("h2_k3", computed.h2[2].clone().map_err(|e| e.to_string())),
        ("order", order_from_fields.ok_or_else(|| "h2 of a quartic field unavailable".to_string())),
    ];
    let cells: BTreeMap<&str, &str> = row.cells().into_iter().collect();
    let parsed: BTreeMap<&str, Cell> =
        cells.iter().map(|(k, v)| Cell::parse(v).map(|c| (*k, c))).collect::<Result<_>>()?;
    let branched = parsed.values().any(Cell::is_branched);

    let evaluate = |branch: Branch| -> Vec<ReportEntry> {
        values
            .iter()
            .map(|(col, val)| {
                let cell = &parsed[col];
                let loose = row.loose.iter().any(|c| c == col);
                let alts: Vec<&String> =
                    if loose { cell.leaves() } else { cell.select(nu34, branch).iter().collect() };
                let expected: Vec<String> = alts.iter().map(|s| s.to_string()).collect();
                match val {
                    Err(e) => ReportEntry {
                        column: col.to_string(),
                        expected,
                        computed: None,
                        matched: false,
                        matched_alternative: None,
                        strict_matched: None,
                        error: Some(e.clone()),
                    },
                    Ok(v) => {
                        let mut hit = None;
                        let mut err = None;
                        for a in &alts {
                            match ctx.eval(a) {
                                Ok(x) if x == *v => {
                                    hit = Some(a.to_string());
                                    break;
                                }
                                Ok(_) => {}
                                Err(e) => err = Some(e.to_string()),
                            }
                        }
                        let strict_matched = loose.then(|| {
                            cell.select(nu34, branch).iter().any(|a| ctx.eval(a).is_ok_and(|x| x == *v))
                        });
                        ReportEntry {
                            column: col.to_string(),
                            expected,
                            computed: Some(v.to_string()),
                            matched: hit.is_some(),
                            matched_alternative: if alts.len() > 1 { hit.clone() } else { None },
                            strict_matched,
                            error: if hit.is_none() { err } else { None },
                        }
                    }
                }
            })
            .collect()
    };

    let (branch, entries) = if branched {
        let top = evaluate(Branch::Top);
        let bottom = evaluate(Branch::Bottom);
        let score = |v: &[ReportEntry]| v.iter().filter(|e| e.matched).count();
        if score(&bottom) > score(&top) {
            (Some(Branch::Bottom), bottom)
        } else {
            (Some(Branch::Top), top)
        }
    } else {
        (None, evaluate(Branch::Top))
    };
    let g_type = parsed["g"]
        .select(nu34, branch.unwrap_or(Branch::Top))
        .iter()
        .map(|s| GType::parse(s))
        .collect::<Result<_>>()?;
    Ok(AppendixIIReport {
        d: rec.d,
        label: rec.label.clone(),
        assignment: rec.values(),
        nu34,
        nu_matches,
        branch,
        g_type,
        entries,
        order_from_fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_load() {
        let t = tables();
        assert_eq!(t.version, 1);
        assert_eq!(t.types.iter().map(|x| x.rows.len()).sum::<usize>(), 13 + 13 + 3 + 8);
        assert_eq!(t.unit_rows.len(), 26);
    }

    #[test]
    fn unit_rows_agree_with_symbol_rows() {
        let t = tables();
        for u in &t.unit_rows {
            let (ct, row) = t.row(&u.label).unwrap();
            let tt = t.type_table(ct);
            let bits = u.nu_bits();
            for (k, &(i, j)) in tt.columns.iter().enumerate() {
                let pos = NU_PAIRS.iter().position(|&x| x == (i, j)).unwrap();
                let want = if row.signs[k] == 1 { 0 } else { 1 };
                assert_eq!(bits[pos], Some(want), "{} column ({i},{j})", u.label);
            }
        }
    }

    #[test]
    fn cell_grammar() {
        let c = Cell::parse("[(2p1p3 | p1 or 2p3) | (2 | p1 or 2p1)]").unwrap();
        assert_eq!(c.select(1, Branch::Bottom), ["p1", "2p3"]);
        assert_eq!(c.select(0, Branch::Top), ["2"]);
        assert_eq!(c.leaves().len(), 6);
        assert!(Cell::parse("[2p1 2p3]").is_err());
    }

    #[test]
    fn permutations_distinct() {
        let mut v = permutations();
        v.sort();
        v.dedup();
        assert_eq!(v.len(), 24);
    }

    #[test]
    fn verdict_partition() {
        let (two, three, unknown) = VERDICT_PARTITION;
        for l in two {
            assert_eq!(tower_verdict_for_label(l, None).verdict, Verdict::Exactly2);
        }
        for l in three {
            assert_eq!(tower_verdict_for_label(l, None).verdict, Verdict::AtLeast3);
        }
        for l in unknown {
            assert_eq!(tower_verdict_for_label(l, None).verdict, Verdict::Unknown64_150);
        }
        let labels: std::collections::BTreeSet<&str> =
            tables().types.iter().flat_map(|t| t.rows.iter().map(|r| r.gplus_label.as_str())).collect();
        let all: std::collections::BTreeSet<&str> = two.iter().chain(three).chain(unknown).copied().collect();
        assert_eq!(labels, all);
    }

    #[test]
    fn classify_first_example() {
        let r = classify(19176).unwrap();
        assert_eq!((r.case_type, r.label.as_str()), (CaseType::I, "a1"));
        assert_eq!(r.values(), [8, 17, -47, -3]);
    }
}
