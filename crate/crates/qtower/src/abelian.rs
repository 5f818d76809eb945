//! Finite abelian groups given by a Cayley table, and Smith normal form.

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries,
/// ascending divisibility, absolute values).
pub fn smith_diagonal(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut done = true;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                if q != 0 {
                    for i in t..rows {
                        m[i][j] -= q * m[i][t];
                    }
                }
                if m[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                let p = m[t][t];
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| (i == t || j == t) && m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].abs())
                .unwrap();
            m.swap(t, pivot.0);
            for row in m.iter_mut() {
                row.swap(t, pivot.1);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// Invariant factors of Z^k / (rows of m), with the trivial factors 1 dropped.
pub fn invariant_factors(m: Vec<Vec<i128>>) -> Vec<u64> {
    smith_diagonal(m)
        .into_iter()
        .filter(|&x| x != 1)
        .map(|x| x as u64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub order: usize,
    pub table: Vec<u32>,
}

impl AbelianGroup {
    /// `table[i * order + j]` is the product of i and j; element 0 is the identity.
    pub fn new(order: usize, table: Vec<u32>) -> Self {
        assert_eq!(table.len(), order * order);
        Self { order, table }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Elementary divisors in ascending divisibility, 1s dropped.
    pub fn invariants(&self) -> Vec<u64> {
        let n = self.order;
        let mut coords: Vec<Option<Vec<i128>>> = vec![None; n];
        coords[0] = Some(Vec::new());
        let mut members = vec![0usize];
        let mut gens: Vec<usize> = Vec::new();
        let mut rels: Vec<Vec<i128>> = Vec::new();
        while members.len() < n {
            let g = (0..n).find(|&x| coords[x].is_none()).unwrap();
            let k = gens.len();
            let mut x = g;
            let mut m = 1i128;
            while coords[x].is_none() {
                x = self.mul(x, g);
                m += 1;
            }
            let mut rel: Vec<i128> = coords[x].clone().unwrap().iter().map(|c| -c).collect();
            rel.push(m);
            rels.push(rel);
            gens.push(g);
            for c in coords.iter_mut().flatten() {
                c.push(0);
            }
            let old = members.clone();
            let mut power = g;
            for e in 1..m {
                for &h in &old {
                    let y = self.mul(h, power);
                    let mut c = coords[h].clone().unwrap();
                    c[k] = e;
                    coords[y] = Some(c);
                    members.push(y);
                }
                power = self.mul(power, g);
            }
        }
        let k = gens.len();
        let matrix: Vec<Vec<i128>> = rels
            .into_iter()
            .map(|mut r| {
                r.resize(k, 0);
                r
            })
            .collect();
        invariant_factors(matrix)
    }
}

pub fn two_part(n: u64) -> u64 {
    1 << n.trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_product(ns: &[usize]) -> AbelianGroup {
        let order: usize = ns.iter().product();
        let decode = |mut x: usize| {
            ns.iter()
                .map(|&m| {
                    let c = x % m;
                    x /= m;
                    c
                })
                .collect::<Vec<_>>()
        };
        let encode = |v: &[usize]| {
            let mut x = 0;
            for (i, &m) in ns.iter().enumerate().rev() {
                x = x * m + v[i];
            }
            x
        };
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                let (va, vb) = (decode(a), decode(b));
                let s: Vec<usize> = (0..ns.len()).map(|i| (va[i] + vb[i]) % ns[i]).collect();
                table[a * order + b] = encode(&s) as u32;
            }
        }
        AbelianGroup::new(order, table)
    }

    #[test]
    fn invariants_of_products() {
        assert_eq!(cyclic_product(&[12]).invariants(), vec![12]);
        assert_eq!(cyclic_product(&[4, 6]).invariants(), vec![2, 12]);
        assert_eq!(cyclic_product(&[2, 2, 3]).invariants(), vec![2, 6]);
        assert_eq!(cyclic_product(&[1]).invariants(), Vec::<u64>::new());
        assert_eq!(cyclic_product(&[8, 2, 4]).invariants(), vec![2, 4, 8]);
        assert_eq!(cyclic_product(&[9, 3, 5]).invariants(), vec![3, 45]);
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_diagonal(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(invariant_factors(vec![vec![4, 0], vec![0, 6]]), vec![2, 12]);
    }
}
