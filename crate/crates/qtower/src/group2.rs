//! Finite 2-groups given by multiplication tables: series, maximal subgroups,
//! the class-2 model of 64.150 and checkers for its structural properties.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group on 0..order with identity 0.
#[derive(Clone, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
}

impl fmt::Debug for TableGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TableGroup(order {})", self.order)
    }
}

/// A subset of a TableGroup closed under the operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<bool>,
    order: usize,
}

impl Subgroup {
    fn from_members(members: Vec<bool>) -> Self {
        let order = members.iter().filter(|&&b| b).count();
        Subgroup { members, order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_subset(&self, other: &Subgroup) -> bool {
        self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup::from_members(self.members.iter().zip(&other.members).map(|(&a, &b)| a && b).collect())
    }
}

impl TableGroup {
    /// Validates identity 0, inverses and associativity.
    pub fn new(order: usize, table: Vec<u32>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGroup("empty group".into()));
        }
        if table.len() != order * order {
            return Err(Error::InvalidGroup(format!("table has {} entries, expected {}", table.len(), order * order)));
        }
        if table.iter().any(|&x| x as usize >= order) {
            return Err(Error::InvalidGroup("entry out of range".into()));
        }
        for a in 0..order {
            if table[a] as usize != a || table[a * order] as usize != a {
                return Err(Error::InvalidGroup("element 0 is not a two-sided identity".into()));
            }
        }
        let mut inverse = vec![u32::MAX; order];
        for a in 0..order {
            let row = &table[a * order..(a + 1) * order];
            let mut seen = vec![false; order];
            for &x in row {
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::InvalidGroup(format!("row {a} is not a permutation")));
                }
            }
            let b = row.iter().position(|&x| x == 0).expect("row is a permutation");
            if table[b * order + a] != 0 {
                return Err(Error::InvalidGroup(format!("element {a} has no two-sided inverse")));
            }
            inverse[a] = b as u32;
        }
        for a in 0..order {
            for b in 0..order {
                let ab = table[a * order + b] as usize;
                for c in 0..order {
                    let bc = table[b * order + c] as usize;
                    if table[ab * order + c] != table[a * order + bc] {
                        return Err(Error::InvalidGroup(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                    }
                }
            }
        }
        Ok(TableGroup { order, table, inverse })
    }

    /// Line 1 is the order n, then n rows of n space-separated indices.
    pub fn from_table_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty table file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("order line: {e}")))?;
        let mut table = Vec::with_capacity(n * n);
        for (i, line) in lines.enumerate() {
            if i >= n {
                return Err(Error::Parse(format!("more than {n} rows")));
            }
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|e| Error::Parse(format!("row {}: {e}", i + 1))))
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Parse(format!("row {} has {} entries", i + 1, row.len())));
            }
            table.extend(row);
        }
        if table.len() != n * n {
            return Err(Error::Parse(format!("expected {n} rows")));
        }
        TableGroup::new(n, table)
    }

    pub fn to_table_text(&self) -> String {
        let mut s = format!("{}\n", self.order);
        for a in 0..self.order {
            let row: Vec<String> = self.table[a * self.order..(a + 1) * self.order].iter().map(u32::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_two_group(&self) -> bool {
        self.order.is_power_of_two()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let (mut base, mut acc) = (a, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// [a, b] = a^-1 b^-1 a b.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_members(vec![true; self.order])
    }

    pub fn trivial(&self) -> Subgroup {
        let mut m = vec![false; self.order];
        m[0] = true;
        Subgroup::from_members(m)
    }

    /// Subgroup generated by the given elements.
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut members = vec![false; self.order];
        members[0] = true;
        let mut list = vec![0usize];
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in &gens {
                let y = self.mul(x, g);
                if !members[y] {
                    members[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        Subgroup::from_members(members)
    }

    pub fn join(&self, h: &Subgroup, k: &Subgroup) -> Subgroup {
        let mut gens = h.elements();
        gens.extend(k.elements());
        self.generate(&gens)
    }

    /// [H, K] generated by all [h, k].
    pub fn commutator_subgroup(&self, h: &Subgroup, k: &Subgroup) -> Subgroup {
        let (he, ke) = (h.elements(), k.elements());
        let mut gens = Vec::new();
        let mut seen = vec![false; self.order];
        for &a in &he {
            for &b in &ke {
                let c = self.commutator(a, b);
                if !std::mem::replace(&mut seen[c], true) {
                    gens.push(c);
                }
            }
        }
        self.generate(&gens)
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let g = self.whole();
        self.commutator_subgroup(&g, &g)
    }

    /// H' for a subgroup H.
    pub fn derived_of(&self, h: &Subgroup) -> Subgroup {
        self.commutator_subgroup(h, h)
    }

    /// G_1 = G, G_{j+1} = [G_j, G], up to the first repeated term.
    pub fn lower_central_series(&self) -> Vec<Subgroup> {
        let g = self.whole();
        let mut series = vec![g.clone()];
        loop {
            let next = self.commutator_subgroup(series.last().expect("nonempty"), &g);
            if next == *series.last().expect("nonempty") {
                return series;
            }
            let done = next.is_trivial();
            series.push(next);
            if done {
                return series;
            }
        }
    }

    /// <h^e : h in H>.
    pub fn power_subgroup(&self, h: &Subgroup, e: u64) -> Subgroup {
        let gens: Vec<usize> = h.elements().into_iter().map(|x| self.pow(x, e)).collect();
        self.generate(&gens)
    }

    /// G' G^2.
    pub fn frattini(&self) -> Subgroup {
        let sq = self.power_subgroup(&self.whole(), 2);
        self.join(&self.derived_subgroup(), &sq)
    }

    pub fn is_normal(&self, n: &Subgroup) -> bool {
        let ne = n.elements();
        (0..self.order).all(|g| ne.iter().all(|&x| n.contains(self.mul(self.mul(self.inv(g), x), g))))
    }

    /// Elements whose images form a basis of G / Phi(G).
    pub fn frattini_basis(&self) -> Vec<usize> {
        let phi = self.frattini();
        let mut span = phi;
        let mut basis = Vec::new();
        for x in 0..self.order {
            if !span.contains(x) {
                basis.push(x);
                let mut gens = span.elements();
                gens.push(x);
                span = self.generate(&gens);
            }
        }
        basis
    }

    /// Rank of G / (G' G^2).
    pub fn frattini_rank(&self) -> usize {
        self.frattini_basis().len()
    }

    /// All index-2 subgroups, as kernels of the nonzero maps G -> C2.
    pub fn maximal_subgroups(&self) -> Vec<Subgroup> {
        let phi = self.frattini();
        let basis = self.frattini_basis();
        let k = basis.len();
        let mut coords = vec![0u32; self.order];
        let mut assigned = vec![false; self.order];
        for mask in 0u32..(1 << k) {
            let mut rep = 0;
            for (i, &b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    rep = self.mul(rep, b);
                }
            }
            for f in phi.elements() {
                let x = self.mul(f, rep);
                coords[x] = mask;
                assigned[x] = true;
            }
        }
        debug_assert!(assigned.iter().all(|&a| a));
        (1u32..(1 << k))
            .map(|c| Subgroup::from_members(coords.iter().map(|&v| (v & c).count_ones() % 2 == 0).collect()))
            .collect()
    }

    /// Invariant factors of H/K for K <= H with H/K abelian 2-group, ascending.
    pub fn abelian_quotient_invariants(&self, h: &Subgroup, k: &Subgroup) -> Vec<u64> {
        let he = h.elements();
        let kord = k.order().max(1);
        let mut counts = Vec::new();
        let mut e: u64 = 1;
        loop {
            let n = he.iter().filter(|&&x| k.contains(self.pow(x, e))).count() / kord;
            counts.push(n);
            if n * kord == he.len() {
                break;
            }
            e *= 2;
        }
        // counts[i] = |{x : x^(2^i) in K}| / |K|, so the number of cyclic factors of order >= 2^i
        // is log2(counts[i]) - log2(counts[i-1]).
        let logs: Vec<u32> = counts.iter().map(|c| c.trailing_zeros()).collect();
        let mut out = Vec::new();
        for i in 1..logs.len() {
            let ge_i = logs[i] - logs[i - 1];
            let ge_next = if i + 1 < logs.len() { logs[i + 1] - logs[i] } else { 0 };
            for _ in 0..(ge_i - ge_next) {
                out.push(1u64 << i);
            }
        }
        out.sort_unstable();
        out
    }

    /// G / N for a normal subgroup N.
    pub fn quotient(&self, n: &Subgroup) -> Result<TableGroup> {
        if !self.is_normal(n) {
            return Err(Error::InvalidGroup("quotient by a non-normal subgroup".into()));
        }
        let mut coset = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        let ne = n.elements();
        for g in 0..self.order {
            if coset[g] == usize::MAX {
                let id = reps.len();
                reps.push(g);
                for &x in &ne {
                    coset[self.mul(g, x)] = id;
                }
            }
        }
        let m = reps.len();
        let mut table = vec![0u32; m * m];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                table[i * m + j] = coset[self.mul(a, b)] as u32;
            }
        }
        TableGroup::new(m, table)
    }

    pub fn center(&self) -> Subgroup {
        Subgroup::from_members((0..self.order).map(|z| (0..self.order).all(|g| self.mul(z, g) == self.mul(g, z))).collect())
    }

    /// All nontrivial subgroups of an elementary abelian subgroup.
    fn subgroups_of_elementary(&self, z: &Subgroup) -> Vec<Subgroup> {
        let mut out: Vec<Subgroup> = Vec::new();
        let elems = z.elements();
        let mut stack = vec![self.trivial()];
        while let Some(s) = stack.pop() {
            for &x in &elems {
                if !s.contains(x) {
                    let mut gens = s.elements();
                    gens.push(x);
                    let t = self.generate(&gens);
                    if !out.contains(&t) {
                        out.push(t.clone());
                        stack.push(t);
                    }
                }
            }
        }
        out
    }
}

pub fn direct_product(a: &TableGroup, b: &TableGroup) -> TableGroup {
    let (m, n) = (a.order(), b.order());
    let size = m * n;
    let mut table = vec![0u32; size * size];
    for x in 0..size {
        for y in 0..size {
            let (x1, x2) = (x / n, x % n);
            let (y1, y2) = (y / n, y % n);
            table[x * size + y] = (a.mul(x1, y1) * n + b.mul(x2, y2)) as u32;
        }
    }
    TableGroup::new(size, table).expect("direct product of groups")
}

pub fn cyclic(n: usize) -> TableGroup {
    let table = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
    TableGroup::new(n, table).expect("cyclic group")
}

/// Abelian group with the given cyclic factors.
pub fn abelian(factors: &[usize]) -> TableGroup {
    factors.iter().fold(cyclic(1), |acc, &f| direct_product(&acc, &cyclic(f)))
}

pub fn elementary_abelian(rank: usize) -> TableGroup {
    abelian(&vec![2; rank])
}

/// <a, b : a^m = 1, b a b^-1 = a^r, b^2 = a^s>, element a^i b^j at index i + m j.
fn metacyclic(m: usize, r: usize, s: usize) -> TableGroup {
    let n = 2 * m;
    let mut table = vec![0u32; n * n];
    for x in 0..n {
        for y in 0..n {
            let (i, j) = (x % m, x / m);
            let (k, l) = (y % m, y / m);
            // a^i b^j a^k b^l = a^(i + r^j k) b^j b^l
            let k2 = if j == 1 { (r * k) % m } else { k };
            let mut e = (i + k2) % m;
            let mut bj = j + l;
            if bj == 2 {
                e = (e + s) % m;
                bj = 0;
            }
            table[x * n + y] = (e + m * bj) as u32;
        }
    }
    TableGroup::new(n, table).expect("consistent metacyclic presentation")
}

/// Dihedral group of the given order (>= 4).
pub fn dihedral(order: usize) -> TableGroup {
    let m = order / 2;
    metacyclic(m, m - 1, 0)
}

/// Semidihedral group of the given order (a power of 2, >= 16).
pub fn semidihedral(order: usize) -> TableGroup {
    let m = order / 2;
    metacyclic(m, m / 2 - 1, 0)
}

/// Generalized quaternion group of the given order (a power of 2, >= 8).
pub fn generalized_quaternion(order: usize) -> TableGroup {
    let m = order / 2;
    metacyclic(m, m - 1, m / 2)
}

pub fn quaternion() -> TableGroup {
    generalized_quaternion(8)
}

/// Class-2 group on pairs (x, y) in F_2^rank x F_2^s with
/// (x, y)(x', y') = (x + x', y + y' + f(x, x')), f bilinear with f(e_i, e_i) the
/// square of a_i and f(e_i, e_j) = [a_i, a_j] for i < j, f(e_j, e_i) = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class2Extension {
    pub rank: usize,
    pub central_rank: usize,
    /// square_map[i] = a_i^2 as a bit vector in F_2^s.
    pub square_map: Vec<u32>,
    /// commutator_map[i][j] = [a_i, a_j], alternating.
    pub commutator_map: Vec<Vec<u32>>,
}

impl Class2Extension {
    pub fn new(rank: usize, central_rank: usize, square_map: Vec<u32>, commutator_map: Vec<Vec<u32>>) -> Result<Self> {
        if square_map.len() != rank || commutator_map.len() != rank || commutator_map.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidGroup("map dimensions do not match the rank".into()));
        }
        let limit = 1u32 << central_rank;
        for i in 0..rank {
            if commutator_map[i][i] != 0 {
                return Err(Error::InvalidGroup("commutator map is not alternating".into()));
            }
            for j in 0..rank {
                if commutator_map[i][j] != commutator_map[j][i] || commutator_map[i][j] >= limit {
                    return Err(Error::InvalidGroup("commutator map is not alternating".into()));
                }
            }
            if square_map[i] >= limit {
                return Err(Error::InvalidGroup("square value out of range".into()));
            }
        }
        let ext = Class2Extension { rank, central_rank, square_map, commutator_map };
        ext.check_cocycle()?;
        Ok(ext)
    }

    pub fn order(&self) -> usize {
        1 << (self.rank + self.central_rank)
    }

    fn cocycle(&self, x: u32, x2: u32) -> u32 {
        let mut out = 0;
        for i in 0..self.rank {
            if x >> i & 1 == 0 {
                continue;
            }
            for j in i..self.rank {
                if x2 >> j & 1 == 1 {
                    out ^= if i == j { self.square_map[i] } else { self.commutator_map[i][j] };
                }
            }
        }
        out
    }

    /// Elements are encoded as x | y << rank.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let mask = (1u32 << self.rank) - 1;
        let (x, y) = (a as u32 & mask, a as u32 >> self.rank);
        let (x2, y2) = (b as u32 & mask, b as u32 >> self.rank);
        ((x ^ x2) | ((y ^ y2 ^ self.cocycle(x, x2)) << self.rank)) as usize
    }

    /// f(x, x') + f(x + x', x'') = f(x', x'') + f(x, x' + x'').
    pub fn check_cocycle(&self) -> Result<()> {
        let n = 1u32 << self.rank;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.cocycle(x, y) ^ self.cocycle(x ^ y, z) != self.cocycle(y, z) ^ self.cocycle(x, y ^ z) {
                        return Err(Error::InvalidGroup(format!("cocycle condition fails at ({x},{y},{z})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Index of the generator a_i.
    pub fn generator(&self, i: usize) -> usize {
        1 << i
    }

    /// Index of the central basis element with bit j.
    pub fn central(&self, j: usize) -> usize {
        1 << (self.rank + j)
    }

    pub fn to_table_group(&self) -> TableGroup {
        let n = self.order();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.mul(a, b) as u32;
            }
        }
        TableGroup::new(n, table).expect("bilinear cocycles define groups")
    }
}

/// <a_1, a_2, a_3 : a_1^2 = c_12, a_2^2 = c_23, a_3^2 = c_13> of class 2, with
/// central bits c_12 = 1, c_23 = 2, c_13 = 4.
pub fn build_64_150() -> Class2Extension {
    let (c12, c23, c13) = (1, 2, 4);
    let comm = vec![vec![0, c12, c13], vec![c12, 0, c23], vec![c13, c23, 0]];
    Class2Extension::new(3, 3, vec![c12, c23, c13], comm).expect("fixed construction")
}

/// Power-commutator presentation with all relative orders 2: g_i^2 = power[i],
/// [g_j, g_i] = comm[j][i] for j > i, words in higher generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcPresentation {
    pub generators: usize,
    pub power: Vec<Vec<usize>>,
    pub comm: Vec<Vec<Vec<usize>>>,
}

impl PcPresentation {
    pub fn new(generators: usize) -> Self {
        PcPresentation {
            generators,
            power: vec![Vec::new(); generators],
            comm: vec![vec![Vec::new(); generators]; generators],
        }
    }

    pub fn set_power(&mut self, i: usize, word: &[usize]) -> &mut Self {
        self.power[i] = word.to_vec();
        self
    }

    /// [g_j, g_i] for j > i.
    pub fn set_comm(&mut self, j: usize, i: usize, word: &[usize]) -> &mut Self {
        self.comm[j][i] = word.to_vec();
        self
    }

    fn check_words(&self) -> Result<()> {
        for i in 0..self.generators {
            if self.power[i].iter().any(|&g| g <= i || g >= self.generators) {
                return Err(Error::InvalidGroup(format!("power word of g{i} is not in higher generators")));
            }
            for j in 0..self.generators {
                if !self.comm[j][i].is_empty() && (j <= i || self.comm[j][i].iter().any(|&g| g <= j || g >= self.generators)) {
                    return Err(Error::InvalidGroup(format!("commutator word [g{j}, g{i}] is not in higher generators")));
                }
            }
        }
        Ok(())
    }

    /// x * g_k on exponent bit vectors.
    fn mul_gen(&self, x: u32, k: usize) -> u32 {
        let head = x & ((1u32 << k) - 1);
        let bit = x >> k & 1;
        let tail = x >> (k + 1);
        let mut rest: u32 = 0;
        let mut out_bit = 1;
        if bit == 1 {
            out_bit = 0;
            for &g in &self.power[k] {
                rest = self.mul_gen(rest, g);
            }
        }
        for j in (k + 1)..self.generators {
            if tail >> (j - k - 1) & 1 == 1 {
                // g_j^{g_k} = g_j [g_j, g_k]
                rest = self.mul_gen(rest, j);
                for &g in &self.comm[j][k] {
                    rest = self.mul_gen(rest, g);
                }
            }
        }
        head | out_bit << k | rest
    }

    fn mul(&self, x: u32, y: u32) -> u32 {
        let mut acc = x;
        for k in 0..self.generators {
            if y >> k & 1 == 1 {
                acc = self.mul_gen(acc, k);
            }
        }
        acc
    }

    /// Collects the multiplication table and validates it; inconsistent
    /// presentations are rejected by the associativity check.
    pub fn to_table_group(&self) -> Result<TableGroup> {
        self.check_words()?;
        let n = 1usize << self.generators;
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.mul(a as u32, b as u32);
            }
        }
        TableGroup::new(n, table)
    }
}

/// Class-3 groups with G/G_3 = 64.150: generators a1, a2, a3, c12, c23, c13, then
/// central z's with c12^2 = z_1 (and c23^2 = z_2 when two are requested), and
/// [c12, a2] = c12^2, [c23, a3] = c23^2.
pub fn class3_cover_64_150(extra: usize) -> Result<TableGroup> {
    if !(1..=2).contains(&extra) {
        return Err(Error::UndefinedInput(format!("{extra} central generators")));
    }
    let (a1, a2, a3, c12, c23, c13) = (0, 1, 2, 3, 4, 5);
    let mut p = PcPresentation::new(6 + extra);
    p.set_power(a1, &[c12]).set_power(a2, &[c23]).set_power(a3, &[c13]);
    p.set_comm(a2, a1, &[c12]).set_comm(a3, a1, &[c13]).set_comm(a3, a2, &[c23]);
    p.set_power(c12, &[6]).set_comm(c12, a2, &[6]);
    if extra == 2 {
        p.set_power(c23, &[7]).set_comm(c23, a3, &[7]);
    }
    p.to_table_group()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop10Report {
    pub applicable: bool,
    pub frattini_rank: usize,
    pub derived_order: usize,
    pub maximal_subgroups: usize,
    /// Triples (H1, H2, H3) of distinct maximal subgroups, H1 n H2 in H3, all H_j' = G'.
    pub qualifying_triples: usize,
    pub counterexample: Option<[usize; 3]>,
}

impl Prop10Report {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Exhaustive search for a triple of maximal subgroups with equal derived
/// subgroups in a group with G' != 1.
pub fn check_prop10(g: &TableGroup) -> Prop10Report {
    let rank = g.frattini_rank();
    let derived = g.derived_subgroup();
    let mut rep = Prop10Report {
        applicable: rank == 3 && g.is_two_group(),
        frattini_rank: rank,
        derived_order: derived.order(),
        maximal_subgroups: 0,
        qualifying_triples: 0,
        counterexample: None,
    };
    if !rep.applicable {
        return rep;
    }
    let maxes = g.maximal_subgroups();
    rep.maximal_subgroups = maxes.len();
    let good: Vec<bool> = maxes.iter().map(|h| g.derived_of(h) == derived).collect();
    for i in 0..maxes.len() {
        for j in 0..maxes.len() {
            if i == j || !good[i] || !good[j] {
                continue;
            }
            let meet = maxes[i].intersection(&maxes[j]);
            for k in 0..maxes.len() {
                if k == i || k == j || !good[k] || !meet.is_subset(&maxes[k]) {
                    continue;
                }
                rep.qualifying_triples += 1;
                if !derived.is_trivial() && rep.counterexample.is_none() {
                    rep.counterexample = Some([i, j, k]);
                }
            }
        }
    }
    rep
}

/// Generators a_1, a_2, a_3 with a_1^2 = [a_1,a_2], a_2^2 = [a_2,a_3],
/// a_3^2 = [a_1,a_3] modulo G_3, and |G : G_3| = 64.
pub fn find_64_150_triple(g: &TableGroup) -> Result<Option<[usize; 3]>> {
    if !g.is_two_group() || g.frattini_rank() != 3 {
        return Ok(None);
    }
    let lcs = g.lower_central_series();
    let g3 = lcs.get(2).cloned().unwrap_or_else(|| g.trivial());
    if g.order() / g3.order() != 64 {
        return Ok(None);
    }
    let phi = g.frattini();
    let congruent = |x: usize, y: usize| g3.contains(g.mul(g.inv(x), y));
    let outside: Vec<usize> = (0..g.order()).filter(|&x| !phi.contains(x)).collect();
    for &a1 in &outside {
        let s1 = g.mul(a1, a1);
        for &a2 in &outside {
            if phi.contains(g.mul(g.inv(a1), a2)) || !congruent(s1, g.commutator(a1, a2)) {
                continue;
            }
            let s2 = g.mul(a2, a2);
            let span = g.join(&phi, &g.generate(&[a1, a2]));
            for &a3 in &outside {
                if span.contains(a3) {
                    continue;
                }
                if congruent(s2, g.commutator(a2, a3)) && congruent(g.mul(a3, a3), g.commutator(a1, a3)) {
                    return Ok(Some([a1, a2, a3]));
                }
            }
        }
    }
    Err(Error::GeneratorSearchExhausted(format!(
        "no generating triple matching the 64.150 presentation in a group of order {}",
        g.order()
    )))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesStep {
    pub j: usize,
    pub order_gj: usize,
    pub order_generator_powers: usize,
    pub order_g2_power: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop11Report {
    pub applicable: bool,
    pub generators: Option<[usize; 3]>,
    /// G' = <a_1^2, a_2^2, a_3^2> = <c_12, c_23, c_13>.
    pub derived_from_squares: bool,
    pub derived_from_commutators: bool,
    pub derived_invariants: Vec<u64>,
    pub steps: Vec<SeriesStep>,
}

impl Prop11Report {
    pub fn holds(&self) -> bool {
        !self.applicable || (self.derived_from_squares && self.derived_from_commutators && self.steps.iter().all(|s| s.equal))
    }
}

/// G_j = <a_i^(2^(j-1))> = G_2^(2^(j-2)) for every j >= 2 until G_j = 1.
pub fn check_prop11(g: &TableGroup) -> Result<Prop11Report> {
    let Some(t) = find_64_150_triple(g)? else {
        return Ok(Prop11Report {
            applicable: false,
            generators: None,
            derived_from_squares: false,
            derived_from_commutators: false,
            derived_invariants: Vec::new(),
            steps: Vec::new(),
        });
    };
    let derived = g.derived_subgroup();
    let squares = g.generate(&t.map(|a| g.mul(a, a)));
    let comms = g.generate(&[g.commutator(t[0], t[1]), g.commutator(t[1], t[2]), g.commutator(t[0], t[2])]);
    let lcs = g.lower_central_series();
    let g2 = lcs.get(1).cloned().unwrap_or_else(|| g.trivial());
    let mut steps = Vec::new();
    let mut j = 2;
    loop {
        let gj = lcs.get(j - 1).cloned().unwrap_or_else(|| g.trivial());
        let e = 1u64 << (j - 1);
        let from_gens = g.generate(&t.map(|a| g.pow(a, e)));
        let from_g2 = g.power_subgroup(&g2, 1 << (j - 2));
        steps.push(SeriesStep {
            j,
            order_gj: gj.order(),
            order_generator_powers: from_gens.order(),
            order_g2_power: from_g2.order(),
            equal: gj == from_gens && gj == from_g2,
        });
        if gj.is_trivial() && from_gens.is_trivial() && from_g2.is_trivial() {
            break;
        }
        j += 1;
        if j > 64 {
            break;
        }
    }
    Ok(Prop11Report {
        applicable: true,
        generators: Some(t),
        derived_from_squares: squares == derived,
        derived_from_commutators: comms == derived,
        derived_invariants: g.abelian_quotient_invariants(&derived, &g.trivial()),
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop12Report {
    pub applicable: bool,
    /// Invariant factors of G'/G''.
    pub derived_quotient: Vec<u64>,
    /// All invariant factors at most 4.
    pub hypothesis: bool,
    pub metabelian: bool,
}

impl Prop12Report {
    pub fn holds(&self) -> bool {
        !self.applicable || !self.hypothesis || self.metabelian
    }
}

/// When G/G_3 = 64.150 and G'/G'' has exponent at most 4, G'' = 1.
pub fn check_prop12(g: &TableGroup) -> Result<Prop12Report> {
    let applicable = find_64_150_triple(g)?.is_some();
    let derived = g.derived_subgroup();
    let second = g.derived_of(&derived);
    let inv = g.abelian_quotient_invariants(&derived, &second);
    Ok(Prop12Report {
        applicable,
        hypothesis: inv.iter().all(|&x| x <= 4),
        derived_quotient: inv,
        metabelian: second.is_trivial(),
    })
}

/// [G_i, G_j] <= G_{i+j} for all terms of the lower central series.
pub fn check_commutator_filtration(g: &TableGroup) -> bool {
    let lcs = g.lower_central_series();
    let term = |k: usize| lcs.get(k - 1).cloned().unwrap_or_else(|| g.trivial());
    for i in 1..=lcs.len() {
        for j in i..=lcs.len() {
            if !g.commutator_subgroup(&term(i), &term(j)).is_subset(&term(i + j)) {
                return false;
            }
        }
    }
    true
}

/// Quotients of G by the nontrivial subgroups of an elementary abelian center.
pub fn central_quotients(g: &TableGroup) -> Result<Vec<TableGroup>> {
    let z = g.center();
    let zs = z.elements();
    if zs.iter().any(|&x| g.mul(x, x) != 0) {
        return Err(Error::NotApplicable("center is not elementary abelian".into()));
    }
    g.subgroups_of_elementary(&z).iter().map(|n| g.quotient(n)).collect()
}

/// Named groups with Frattini quotient of rank 3, orders at most 64.
pub fn rank3_library() -> Vec<(String, TableGroup)> {
    let mut out: Vec<(String, TableGroup)> = vec![
        ("C2^3".into(), elementary_abelian(3)),
        ("C2xC2xC4".into(), abelian(&[2, 2, 4])),
        ("C2xC2xC8".into(), abelian(&[2, 2, 8])),
        ("C2xC4xC4".into(), abelian(&[2, 4, 4])),
        ("C2xC2xC16".into(), abelian(&[2, 2, 16])),
        ("C2xC4xC8".into(), abelian(&[2, 4, 8])),
        ("C4xC4xC4".into(), abelian(&[4, 4, 4])),
        ("D4xC2".into(), direct_product(&dihedral(8), &cyclic(2))),
        ("Q8xC2".into(), direct_product(&quaternion(), &cyclic(2))),
        ("D8xC2".into(), direct_product(&dihedral(16), &cyclic(2))),
        ("SD16xC2".into(), direct_product(&semidihedral(16), &cyclic(2))),
        ("Q16xC2".into(), direct_product(&generalized_quaternion(16), &cyclic(2))),
        ("D4xC4".into(), direct_product(&dihedral(8), &cyclic(4))),
        ("Q8xC4".into(), direct_product(&quaternion(), &cyclic(4))),
        ("D4xC2xC2".into(), direct_product(&dihedral(8), &elementary_abelian(2))),
    ];
    let g = build_64_150().to_table_group();
    for (i, q) in central_quotients(&g).expect("center of 64.150 is elementary").into_iter().enumerate() {
        out.push((format!("64.150/N{}", i + 1), q));
    }
    out.push(("64.150".into(), g));
    out.retain(|(_, g)| g.frattini_rank() == 3);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_groups_validate() {
        assert_eq!(dihedral(8).order(), 8);
        assert!(!dihedral(8).is_abelian());
        assert!(semidihedral(16).element_order(1) == 8);
        let q = quaternion();
        assert_eq!((0..8).filter(|&x| q.element_order(x) == 2).count(), 1);
        assert!(TableGroup::new(2, vec![0, 1, 1, 1]).is_err());
    }

    #[test]
    fn table_text_round_trip() {
        let g = dihedral(8);
        let h = TableGroup::from_table_text(&g.to_table_text()).unwrap();
        assert_eq!(g, h);
        assert!(TableGroup::from_table_text("2\n0 1\n").is_err());
    }

    #[test]
    fn quaternion_series() {
        let q = quaternion();
        let s = q.lower_central_series();
        assert_eq!(s.iter().map(Subgroup::order).collect::<Vec<_>>(), [8, 2, 1]);
        assert_eq!(q.maximal_subgroups().len(), 3);
        assert!(q.maximal_subgroups().iter().all(|h| h.order() == 4));
    }

    #[test]
    fn model_64_150() {
        let e = build_64_150();
        let g = e.to_table_group();
        assert_eq!(g.order(), 64);
        let d = g.derived_subgroup();
        assert_eq!(d.order(), 8);
        assert!(d.elements().iter().all(|&x| g.mul(x, x) == 0));
        assert_eq!(g.mul(e.generator(0), e.generator(0)), e.central(0));
        assert_eq!(g.maximal_subgroups().len(), 7);
        let lcs = g.lower_central_series();
        assert_eq!(lcs.len(), 3);
        assert!(lcs[2].is_trivial());
    }

    #[test]
    fn abelian_invariants() {
        let g = abelian(&[2, 4, 8]);
        assert_eq!(g.abelian_quotient_invariants(&g.whole(), &g.trivial()), [2, 4, 8]);
    }

    #[test]
    fn class3_covers() {
        let g = class3_cover_64_150(1).unwrap();
        assert_eq!(g.order(), 128);
        assert_eq!(g.lower_central_series().len(), 4);
        assert!(check_prop11(&g).unwrap().holds());
    }
}
