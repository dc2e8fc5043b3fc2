//! Exact sparse linear algebra over cyclotomic fields: incremental row echelon
//! forms, nullspaces, and multiplicative span closure of endomorphisms.

use std::collections::{BTreeMap, VecDeque};

use crate::cyclotomic::CycloNum;
use crate::tensor_endo::SparseEndo;

/// A sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, CycloNum)>;

/// Incrementally built echelon basis. Every stored row has leading entry 1 at its
/// pivot column and no entries to the left of it.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

fn sub_scaled(work: &mut BTreeMap<usize, CycloNum>, coef: &CycloNum, row: &SparseVec) {
    for (c, v) in row.iter().skip(1) {
        let delta = coef * v;
        match work.get_mut(c) {
            Some(slot) => {
                *slot -= &delta;
                if slot.is_zero() {
                    work.remove(c);
                }
            }
            None => {
                work.insert(*c, -delta);
            }
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn row(&self, pivot: usize) -> Option<&SparseVec> {
        self.rows.get(&pivot)
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut work: BTreeMap<usize, CycloNum> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        let mut cursor = 0usize;
        while let Some((&col, _)) = work.range(cursor..).next() {
            if let Some(row) = self.rows.get(&col) {
                let coef = work.remove(&col).expect("present");
                sub_scaled(&mut work, &coef, row);
            }
            cursor = col + 1;
        }
        work.into_iter().collect()
    }

    /// Adds `v` to the row space. Returns true when `v` was independent.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let rem = self.reduce(v);
        let Some((pivot, lead)) = rem.first().cloned() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero leading entry");
        let row: SparseVec = rem
            .into_iter()
            .map(|(c, x)| if c == pivot { (c, CycloNum::one(x.conductor())) } else { (c, &x * &inv) })
            .collect();
        self.rows.insert(pivot, row);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Basis of `{ y : row · y = 0 for every stored row }` in `ncols` unknowns.
    pub fn nullspace(&self, ncols: usize, conductor: u32) -> Vec<SparseVec> {
        let pivot_set: std::collections::BTreeSet<usize> = self.rows.keys().copied().collect();
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !pivot_set.contains(c)) {
            let mut y: BTreeMap<usize, CycloNum> = BTreeMap::new();
            y.insert(free, CycloNum::one(conductor));
            for (&p, row) in self.rows.iter().rev() {
                if p > free {
                    continue;
                }
                let mut acc = CycloNum::zero(conductor);
                for (c, v) in row.iter().skip(1) {
                    if let Some(yc) = y.get(c) {
                        acc += &(v * yc);
                    }
                }
                if !acc.is_zero() {
                    y.insert(p, -acc);
                }
            }
            out.push(y.into_iter().collect());
        }
        out
    }
}

/// Flattens an endomorphism of V^⊗k into a vector indexed by `row * 2^k + col`.
pub fn flatten(a: &SparseEndo) -> SparseVec {
    let d = a.dim();
    let mut out = Vec::with_capacity(a.nnz());
    for (r, row) in a.rows().iter().enumerate() {
        for (c, v) in row {
            out.push((r * d + *c as usize, v.clone()));
        }
    }
    out
}

/// Inverse of [`flatten`].
pub fn unflatten(k: usize, conductor: u32, v: &SparseVec) -> SparseEndo {
    let d = 1usize << k;
    SparseEndo::from_entries(k, conductor, v.iter().map(|(i, x)| (i / d, i % d, x.clone())))
}

/// Result of a multiplicative span closure.
#[derive(Clone, Debug)]
pub struct SpanClosure {
    pub basis: Vec<SparseEndo>,
    /// True when the closure stopped early because `limit` was reached.
    pub truncated: bool,
}

impl SpanClosure {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// The unital algebra generated by `gens` inside End(V^⊗k): the smallest subspace
/// containing the identity and closed under left multiplication by every generator.
pub fn algebra_closure(k: usize, conductor: u32, gens: &[SparseEndo], limit: Option<usize>) -> SpanClosure {
    let gens: Vec<SparseEndo> = gens.iter().map(|g| g.lift_to(k)).collect();
    let seed = SparseEndo::identity(k, conductor);
    closure_from(vec![seed], &gens, &[], limit)
}

/// The smallest subspace containing `seeds` and closed under left multiplication by
/// `left` and right multiplication by `right`.
pub fn closure_from(
    seeds: Vec<SparseEndo>,
    left: &[SparseEndo],
    right: &[SparseEndo],
    limit: Option<usize>,
) -> SpanClosure {
    let mut ech = Echelon::new();
    let mut basis = Vec::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if ech.insert(&flatten(&s)) {
            basis.push(s.clone());
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        if limit.is_some_and(|l| basis.len() >= l) {
            return SpanClosure { basis, truncated: true };
        }
        let products = left.iter().map(|g| g.mul(&x)).chain(right.iter().map(|g| x.mul(g)));
        for y in products {
            if ech.insert(&flatten(&y)) {
                basis.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    SpanClosure { basis, truncated: false }
}

/// Rank of a family of endomorphisms viewed as vectors.
pub fn rank_of(elems: &[SparseEndo]) -> usize {
    let mut ech = Echelon::new();
    elems.iter().filter(|e| ech.insert(&flatten(e))).count()
}
