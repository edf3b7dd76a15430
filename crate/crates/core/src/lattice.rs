//! Integer lattices in `ℤ^d` held in row Hermite normal form.
//!
//! Linear equivalence of divisor classes is membership of the difference in
//! a relation lattice; the same echelon machinery answers "for which `n` is
//! `offset + n·slope` in the lattice", which drives both parameterized
//! equivalence and the Cartier index.

use serde::Serialize;

/// A sublattice of `ℤ^dim` with a canonical (Hermite) basis.
///
/// Echelon pivots are taken from the last coordinate backwards, so canonical
/// representatives eliminate trailing generators first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice {
    dim: usize,
    /// Row HNF of the coordinate-reversed generators: pivots strictly
    /// increasing, positive, entries above each pivot reduced into `[0, pivot)`.
    basis: Vec<Vec<i64>>,
}

fn reversed(v: &[i64]) -> Vec<i64> {
    v.iter().rev().copied().collect()
}

/// The set of integers `n` with `offset + n·slope ∈ Λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solutions {
    Empty,
    Single(i64),
    /// `n ≡ residue (mod modulus)`, `0 ≤ residue < modulus`.
    Progression {
        modulus: i64,
        residue: i64,
    },
}

impl Solutions {
    /// `Some(true)` if every `n ≥ n_lo` solves, `Some(false)` if none does,
    /// `None` if the answer depends on `n`.
    pub fn for_all_from(&self, n_lo: i64) -> Option<bool> {
        match *self {
            Solutions::Empty => Some(false),
            Solutions::Single(n) if n < n_lo => Some(false),
            Solutions::Single(_) => None,
            Solutions::Progression { modulus: 1, .. } => Some(true),
            Solutions::Progression { .. } => None,
        }
    }

    pub fn contains(&self, n: i64) -> bool {
        match *self {
            Solutions::Empty => false,
            Solutions::Single(m) => m == n,
            Solutions::Progression { modulus, residue } => n.rem_euclid(modulus) == residue,
        }
    }
}

fn pivot_of(row: &[i64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
pub fn hermite_normal_form(dim: usize, rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    for r in &m {
        assert_eq!(r.len(), dim, "lattice generator has wrong length");
    }
    let mut top = 0;
    for col in 0..dim {
        if top == m.len() {
            break;
        }
        // Euclid on the column below `top` until a single nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in top..m.len() {
                if m[i][col] != 0 && best.is_none_or(|b| m[i][col].abs() < m[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(top, b);
            let mut done = true;
            for i in top + 1..m.len() {
                if m[i][col] != 0 {
                    let q = m[i][col].div_euclid(m[top][col]);
                    let pivot = m[top].clone();
                    for (x, y) in m[i][col..dim].iter_mut().zip(&pivot[col..dim]) {
                        *x -= q * y;
                    }
                    if m[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[top][col] == 0 {
            continue;
        }
        if m[top][col] < 0 {
            for x in m[top].iter_mut() {
                *x = -*x;
            }
        }
        let p = m[top][col];
        for i in 0..top {
            let q = m[i][col].div_euclid(p);
            if q != 0 {
                let pivot = m[top].clone();
                for (x, y) in m[i][col..dim].iter_mut().zip(&pivot[col..dim]) {
                    *x -= q * y;
                }
            }
        }
        top += 1;
    }
    m.truncate(top);
    m.retain(|r| r.iter().any(|&x| x != 0));
    m
}

impl Lattice {
    pub fn new(dim: usize, generators: &[Vec<i64>]) -> Self {
        let rev: Vec<Vec<i64>> = generators.iter().map(|g| reversed(g)).collect();
        Lattice { dim, basis: hermite_normal_form(dim, &rev) }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Hermite basis in the caller's coordinate order.
    pub fn basis(&self) -> Vec<Vec<i64>> {
        self.basis.iter().map(|r| reversed(r)).collect()
    }

    /// Canonical representative of `v + Λ`.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.dim);
        let mut w = reversed(v);
        for row in &self.basis {
            let p = pivot_of(row).expect("basis rows are nonzero");
            let q = w[p].div_euclid(row[p]);
            if q != 0 {
                for (x, r) in w.iter_mut().zip(row) {
                    *x -= q * r;
                }
            }
        }
        w.reverse();
        w
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// All integers `n` with `offset + n·slope ∈ Λ`.
    pub fn affine_solutions(&self, offset: &[i64], slope: &[i64]) -> Solutions {
        let d = self.dim;
        let mut gens: Vec<Vec<i64>> = self
            .basis
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(0);
                r
            })
            .collect();
        let mut s = reversed(slope);
        s.push(1);
        gens.push(s);
        let aug = hermite_normal_form(d + 1, &gens);
        // Reduce (-offset, 0) using only rows pivoting in the first d columns.
        let mut w: Vec<i64> = offset.iter().rev().map(|x| -x).collect();
        w.push(0);
        let mut last_row = None;
        for row in &aug {
            let p = pivot_of(row).expect("nonzero");
            if p == d {
                last_row = Some(row[d]);
                continue;
            }
            let q = w[p].div_euclid(row[p]);
            if q != 0 {
                for (x, r) in w.iter_mut().zip(row) {
                    *x -= q * r;
                }
            }
        }
        if w[..d].iter().any(|&x| x != 0) {
            return Solutions::Empty;
        }
        // (-offset, 0) = γ + (0, c); n solves iff c + n lies in the last-pivot ideal.
        let c = w[d];
        match last_row {
            Some(m) => Solutions::Progression { modulus: m, residue: (-c).rem_euclid(m) },
            None => Solutions::Single(-c),
        }
    }

    /// Lattice spanned by `self` and extra generators.
    pub fn extended(&self, extra: &[Vec<i64>]) -> Lattice {
        let mut gens = self.basis();
        gens.extend(extra.iter().cloned());
        Lattice::new(self.dim, &gens)
    }
}
