//! Exact sparse endomorphisms of V^⊗k.
//!
//! Basis vectors v_r of V^⊗k are indexed by sign tuples r ∈ {−1,+1}^k. Internally a
//! tuple is an integer whose bit `i − 1` describes slot `i`: a set bit is +1 and a
//! clear bit is −1. A 2×2 matrix acting on V uses the same convention, so row and
//! column 0 belong to v_{−1} and row and column 1 belong to v_{+1}.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::groups::{generators, Family, SubgroupSpec};
use crate::linalg::{Echelon, SparseVec};

/// A 2×2 matrix over a cyclotomic field, `m[row][col]`.
pub type Mat2 = [[CycloNum; 2]; 2];

/// A sign tuple r ∈ {−1,+1}^k with slot 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignTuple(pub Vec<i8>);

impl SignTuple {
    pub fn from_index(k: usize, idx: usize) -> Self {
        SignTuple((0..k).map(|i| if idx >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().enumerate().filter(|(_, &s)| s > 0).map(|(i, _)| 1usize << i).sum()
    }

    pub fn parse(s: &[i64]) -> Result<Self> {
        s.iter()
            .map(|&x| match x {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                _ => Err(Error::Parse(format!("sign tuple entry {x} is not ±1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignTuple)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// |r|, the number of −1 entries.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&s| s < 0).count()
    }

    pub fn negate(&self) -> Self {
        SignTuple(self.0.iter().map(|&s| -s).collect())
    }

    /// Positions (1-based) of the −1 entries.
    pub fn minus_positions(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &s)| s < 0).map(|(i, _)| i + 1).collect()
    }

    /// r ≻ s: smaller weight, or equal weight and lexicographically larger with 1 > −1.
    pub fn succ(&self, other: &SignTuple) -> bool {
        succ_order(self, other) == Ordering::Less
    }
}

impl std::fmt::Display for SignTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.0.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
        write!(f, "({s})")
    }
}

/// Number of −1 entries of the tuple with index `idx` in V^⊗k.
pub fn weight_of(k: usize, idx: usize) -> usize {
    k - (idx & ((1usize << k) - 1)).count_ones() as usize
}

/// Total order listing ≻-larger tuples first.
pub fn succ_order(a: &SignTuple, b: &SignTuple) -> Ordering {
    a.weight().cmp(&b.weight()).then_with(|| b.0.cmp(&a.0))
}

/// Comparator on indices matching [`succ_order`].
pub fn succ_order_idx(k: usize, a: usize, b: usize) -> Ordering {
    weight_of(k, a).cmp(&weight_of(k, b)).then_with(|| {
        for i in 0..k {
            let (x, y) = (a >> i & 1, b >> i & 1);
            if x != y {
                return y.cmp(&x);
            }
        }
        Ordering::Equal
    })
}

/// All indices of V^⊗k in ≻-descending order (all-ones tuple first).
pub fn succ_sorted_indices(k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..1usize << k).collect();
    v.sort_by(|&a, &b| succ_order_idx(k, a, b));
    v
}

/// Index of −r.
pub fn neg_index(k: usize, idx: usize) -> usize {
    idx ^ ((1usize << k) - 1)
}

/// An exact sparse endomorphism of V^⊗k stored as sorted rows.
#[derive(Clone, Debug)]
pub struct SparseEndo {
    k: usize,
    conductor: u32,
    rows: Vec<Vec<(u32, CycloNum)>>,
}

fn lcm(a: u32, b: u32) -> u32 {
    num_integer::Integer::lcm(&a, &b)
}

impl SparseEndo {
    pub fn zero(k: usize, conductor: u32) -> Self {
        SparseEndo { k, conductor, rows: vec![Vec::new(); 1 << k] }
    }

    pub fn identity(k: usize, conductor: u32) -> Self {
        let one = CycloNum::one(conductor);
        SparseEndo { k, conductor, rows: (0..1u32 << k).map(|i| vec![(i, one.clone())]).collect() }
    }

    /// Builds from (row, col, value) triples; duplicates are summed and zeros dropped.
    pub fn from_entries(k: usize, conductor: u32, entries: impl IntoIterator<Item = (usize, usize, CycloNum)>) -> Self {
        let mut maps: Vec<BTreeMap<u32, CycloNum>> = vec![BTreeMap::new(); 1 << k];
        let mut cond = conductor;
        let mut raw = Vec::new();
        for (r, c, v) in entries {
            cond = lcm(cond, v.conductor());
            raw.push((r, c, v));
        }
        for (r, c, v) in raw {
            let v = v.embed_into(cond).expect("lcm");
            match maps[r].get_mut(&(c as u32)) {
                Some(slot) => *slot += &v,
                None => {
                    maps[r].insert(c as u32, v);
                }
            }
        }
        let rows = maps
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseEndo { k, conductor: cond, rows }
    }

    /// The matrix unit E_{r,s}.
    pub fn matrix_unit(k: usize, conductor: u32, r: usize, s: usize) -> Self {
        Self::from_entries(k, conductor, [(r, s, CycloNum::one(conductor))])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn dim(&self) -> usize {
        1 << self.k
    }

    pub fn rows(&self) -> &[Vec<(u32, CycloNum)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> CycloNum {
        match self.rows[r].binary_search_by_key(&(c as u32), |(j, _)| *j) {
            Ok(pos) => self.rows[r][pos].1.clone(),
            Err(_) => CycloNum::zero(self.conductor),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &CycloNum)> {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c as usize, v)))
    }

    /// Re-expresses all entries in Q(ζ_m); `m` must be a multiple of the conductor.
    pub fn with_conductor(&self, m: u32) -> Self {
        if m == self.conductor {
            return self.clone();
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(c, v)| (*c, v.embed_into(m).expect("conductor divides"))).collect())
            .collect();
        SparseEndo { k: self.k, conductor: m, rows }
    }

    /// a ⊗ 1 on V^⊗m for m ≥ k (new slots appended on the right).
    pub fn lift_to(&self, m: usize) -> Self {
        assert!(m >= self.k, "cannot lift from level {} down to {m}", self.k);
        if m == self.k {
            return self.clone();
        }
        let d = self.dim() as u32;
        let copies = 1u32 << (m - self.k);
        let mut rows = Vec::with_capacity(1 << m);
        for x in 0..copies {
            for row in &self.rows {
                rows.push(row.iter().map(|(c, v)| (c + x * d, v.clone())).collect());
            }
        }
        SparseEndo { k: m, conductor: self.conductor, rows }
    }

    fn aligned(&self, other: &SparseEndo) -> (SparseEndo, SparseEndo) {
        let k = self.k.max(other.k);
        let n = lcm(self.conductor, other.conductor);
        (self.lift_to(k).with_conductor(n), other.lift_to(k).with_conductor(n))
    }

    fn needs_align(&self, other: &SparseEndo) -> bool {
        self.k != other.k || self.conductor != other.conductor
    }

    /// Product `self · other`; operands of different levels are lifted to the larger one.
    pub fn mul(&self, other: &SparseEndo) -> SparseEndo {
        if self.needs_align(other) {
            let (a, b) = self.aligned(other);
            return a.mul(&b);
        }
        let d = self.dim();
        let mut acc: Vec<Option<CycloNum>> = vec![None; d];
        let mut touched: Vec<u32> = Vec::new();
        let mut rows = Vec::with_capacity(d);
        for row in &self.rows {
            for (j, a) in row {
                let a_unit = a.is_one();
                for (l, b) in &other.rows[*j as usize] {
                    let prod = if a_unit { b.clone() } else { a * b };
                    match &mut acc[*l as usize] {
                        Some(slot) => *slot += &prod,
                        slot @ None => {
                            *slot = Some(prod);
                            touched.push(*l);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let mut out = Vec::with_capacity(touched.len());
            for &l in &touched {
                let v = acc[l as usize].take().expect("touched");
                if !v.is_zero() {
                    out.push((l, v));
                }
            }
            touched.clear();
            rows.push(out);
        }
        SparseEndo { k: self.k, conductor: self.conductor, rows }
    }

    fn combine(&self, other: &SparseEndo, sign: i64) -> SparseEndo {
        if self.needs_align(other) {
            let (a, b) = self.aligned(other);
            return a.combine(&b, sign);
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(x, y)| {
                let mut out = Vec::with_capacity(x.len() + y.len());
                let (mut i, mut j) = (0, 0);
                while i < x.len() || j < y.len() {
                    let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
                    let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
                    if take_x {
                        out.push(x[i].clone());
                        i += 1;
                    } else if take_y {
                        let v = if sign < 0 { -&y[j].1 } else { y[j].1.clone() };
                        out.push((y[j].0, v));
                        j += 1;
                    } else {
                        let v = if sign < 0 { &x[i].1 - &y[j].1 } else { &x[i].1 + &y[j].1 };
                        if !v.is_zero() {
                            out.push((x[i].0, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        SparseEndo { k: self.k, conductor: self.conductor, rows }
    }

    pub fn add(&self, other: &SparseEndo) -> SparseEndo {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &SparseEndo) -> SparseEndo {
        self.combine(other, -1)
    }

    pub fn scale(&self, c: &CycloNum) -> SparseEndo {
        let n = lcm(self.conductor, c.conductor());
        let c = c.embed_into(n).expect("lcm");
        let base = self.with_conductor(n);
        if c.is_zero() {
            return SparseEndo::zero(self.k, n);
        }
        let rows = base.rows.iter().map(|row| row.iter().map(|(j, v)| (*j, v * &c)).collect()).collect();
        SparseEndo { k: self.k, conductor: n, rows }
    }

    /// Multiplies by the rational p/q.
    pub fn scale_q(&self, p: i64, q: i64) -> SparseEndo {
        self.scale(&CycloNum::from_ratio(1, p, q))
    }

    pub fn trace(&self) -> CycloNum {
        let mut acc = CycloNum::zero(self.conductor);
        for (r, row) in self.rows.iter().enumerate() {
            if let Ok(pos) = row.binary_search_by_key(&(r as u32), |(j, _)| *j) {
                acc += &row[pos].1;
            }
        }
        acc
    }

    pub fn transpose(&self) -> SparseEndo {
        SparseEndo::from_entries(self.k, self.conductor, self.entries().map(|(r, c, v)| (c, r, v.clone())))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseEndo {
        SparseEndo::from_entries(self.k, self.conductor, self.entries().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn apply(&self, v: &BTreeMap<usize, CycloNum>) -> BTreeMap<usize, CycloNum> {
        let mut out: BTreeMap<usize, CycloNum> = BTreeMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: Option<CycloNum> = None;
            for (c, a) in row {
                if let Some(x) = v.get(&(*c as usize)) {
                    let p = a * x;
                    acc = Some(match acc {
                        Some(s) => &s + &p,
                        None => p,
                    });
                }
            }
            if let Some(s) = acc.filter(|s| !s.is_zero()) {
                out.insert(r, s);
            }
        }
        out
    }

    /// Kronecker product self ⊗ other on V^⊗(k+l).
    pub fn tensor(&self, other: &SparseEndo) -> SparseEndo {
        let n = lcm(self.conductor, other.conductor);
        let k = self.k + other.k;
        let shift = self.k;
        let mut entries = Vec::new();
        for (r2, c2, b) in other.entries() {
            for (r1, c1, a) in self.entries() {
                entries.push((r1 | r2 << shift, c1 | c2 << shift, a * b));
            }
        }
        SparseEndo::from_entries(k, n, entries)
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn commutes_with(&self, other: &SparseEndo) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// SHA-256 over the canonical entry list, as lowercase hex.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.k as u64).to_le_bytes());
        for (r, c, v) in self.entries() {
            h.update((r as u64).to_le_bytes());
            h.update((c as u64).to_le_bytes());
            h.update(serde_json::to_string(v).expect("serializable").as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> EndoJson {
        let order = succ_sorted_indices(self.k);
        let mut rank = vec![0usize; self.dim()];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos;
        }
        let mut es: Vec<(usize, usize, &CycloNum)> = self.entries().collect();
        es.sort_by_key(|(r, c, _)| (rank[*r], rank[*c]));
        EndoJson {
            k: self.k,
            entries: es
                .into_iter()
                .map(|(r, c, v)| (SignTuple::from_index(self.k, r), SignTuple::from_index(self.k, c), v.clone()))
                .collect(),
        }
    }

    pub fn from_json(j: &EndoJson) -> Result<SparseEndo> {
        let mut cond = 1;
        for (r, c, v) in &j.entries {
            if r.k() != j.k || c.k() != j.k {
                return Err(Error::Parse(format!("tuple length differs from k = {}", j.k)));
            }
            if r.0.iter().chain(&c.0).any(|&s| s != 1 && s != -1) {
                return Err(Error::Parse("sign tuple entries must be ±1".into()));
            }
            cond = lcm(cond, v.conductor());
        }
        Ok(SparseEndo::from_entries(
            j.k,
            cond,
            j.entries.iter().map(|(r, c, v)| (r.to_index(), c.to_index(), v.clone())),
        ))
    }
}

impl PartialEq for SparseEndo {
    fn eq(&self, other: &Self) -> bool {
        if self.k != other.k {
            let (a, b) = self.aligned(other);
            return a == b;
        }
        self.rows.iter().zip(&other.rows).all(|(x, y)| {
            x.len() == y.len() && x.iter().zip(y).all(|((i, a), (j, b))| i == j && a == b)
        })
    }
}

/// JSON form `{"k": .., "entries": [[row-tuple, col-tuple, value], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EndoJson {
    pub k: usize,
    pub entries: Vec<(SignTuple, SignTuple, CycloNum)>,
}

/// g^⊗k for a 2×2 matrix g.
pub fn group_action(g: &Mat2, k: usize) -> SparseEndo {
    let n = g.iter().flatten().map(CycloNum::conductor).fold(1, lcm);
    let g: Vec<Vec<CycloNum>> = g.iter().map(|r| r.iter().map(|x| x.embed_into(n).expect("lcm")).collect()).collect();
    let mut cur = SparseEndo::identity(0, n);
    for j in 0..k {
        let mut rows = Vec::with_capacity(2 * cur.rows.len());
        for s in 0..2usize {
            for row in &cur.rows {
                let mut out = Vec::new();
                for t in 0..2usize {
                    if g[s][t].is_zero() {
                        continue;
                    }
                    for (c, v) in row {
                        out.push((c | (t as u32) << j, v * &g[s][t]));
                    }
                }
                out.sort_by_key(|(c, _)| *c);
                rows.push(out);
            }
        }
        cur = SparseEndo { k: j + 1, conductor: n, rows };
    }
    cur
}

/// The Temperley–Lieb generator e_i on V^⊗k, acting in slots i and i+1.
pub fn tl_generator(k: usize, i: usize) -> Result<SparseEndo> {
    if i == 0 || i >= k {
        return Err(Error::Domain(format!("e_{i} needs 1 <= i <= k-1 (k = {k})")));
    }
    let (b0, b1) = (i - 1, i);
    let mask = (1usize << b0) | (1usize << b1);
    let mut entries = Vec::new();
    for p in 0..1usize << k {
        if (p >> b0 & 1) != (p >> b1 & 1) {
            entries.push((p, p, CycloNum::one(1)));
            entries.push((p, p ^ mask, CycloNum::from_int(1, -1)));
        }
    }
    Ok(SparseEndo::from_entries(k, 1, entries))
}

/// ε_k: End(V^⊗k) → End(V^⊗(k−1)), averaging over the last slot.
pub fn conditional_expectation(a: &SparseEndo) -> Result<SparseEndo> {
    let k = a.k();
    if k == 0 {
        return Err(Error::Domain("conditional expectation needs k >= 1".into()));
    }
    let half = CycloNum::from_ratio(1, 1, 2);
    let top = 1usize << (k - 1);
    let mut entries = Vec::new();
    for (r, c, v) in a.entries() {
        if (r >= top) == (c >= top) {
            entries.push((r & (top - 1), c & (top - 1), v * &half));
        }
    }
    Ok(SparseEndo::from_entries(k - 1, a.conductor(), entries))
}

/// For a on V^⊗(k+1), the unique b on V^⊗k with a·e_k = (b ⊗ 1)·e_k.
///
/// Writing tuples as [x, c] with c the last slot of b's column,
/// b^r_{[x,c]} = a^{[r,−c]}_{[x,c,−c]} − a^{[r,−c]}_{[x,−c,c]}.
pub fn unique_compression(a: &SparseEndo) -> Result<SparseEndo> {
    let kp1 = a.k();
    if kp1 < 2 {
        return Err(Error::Domain("compression needs an operator on at least two slots".into()));
    }
    let k = kp1 - 1;
    let top = 1usize << k;
    let half = 1usize << (k - 1);
    let mut entries = Vec::new();
    for r in 0..top {
        for cbit in 0..2usize {
            let out_row = r | (1 - cbit) << k;
            for x in 0..half {
                let col = x | cbit << (k - 1);
                let p = x | cbit << (k - 1) | (1 - cbit) << k;
                let m = x | (1 - cbit) << (k - 1) | cbit << k;
                let v = &a.get(out_row, p) - &a.get(out_row, m);
                if !v.is_zero() {
                    entries.push((r, col, v));
                }
            }
        }
    }
    let b = SparseEndo::from_entries(k, a.conductor(), entries);
    let ek = tl_generator(kp1, k)?;
    debug_assert!(a.mul(&ek) == b.mul(&ek));
    Ok(b)
}

/// Checks a·e_k = (b ⊗ 1)·e_k exactly.
pub fn compression_identity_holds(a: &SparseEndo, b: &SparseEndo) -> bool {
    let ek = tl_generator(a.k(), a.k() - 1).expect("k >= 2");
    a.mul(&ek) == b.mul(&ek)
}

/// Default largest k accepted by [`commutant_basis`] for cyclic and binary dihedral groups.
pub const COMMUTANT_GUARD_MONOMIAL: usize = 8;
/// Default largest k accepted by [`commutant_basis`] for T, O and I.
pub const COMMUTANT_GUARD_EXCEPTIONAL: usize = 5;

/// Exponent e with x = ζ_m^e, if x is an m-th root of unity.
fn root_exponent(x: &CycloNum, m: u32) -> Option<u32> {
    (0..m).find(|&e| &CycloNum::root_of_unity(m, e as i64) == x)
}

/// ζ_m^w written in Q(ζ_n), where m is n or 2n with n odd.
fn root_in_field(m: u32, w: u32, n: u32) -> CycloNum {
    if m == n {
        return CycloNum::root_of_unity(n, w as i64);
    }
    // ζ_{2n} = −ζ_n^{(n+1)/2} for odd n.
    let z = CycloNum::root_of_unity(n, (w as i64) * ((n as i64 + 1) / 2));
    if w % 2 == 1 {
        -z
    } else {
        z
    }
}

/// Permutation data of a monomial 2×2 matrix: (swaps basis vectors, exponent of
/// the coefficient of g·v_0, exponent of the coefficient of g·v_1).
fn monomial_data(g: &Mat2, m: u32) -> Option<(bool, u32, u32)> {
    let diag = g[0][1].is_zero() && g[1][0].is_zero();
    let anti = g[0][0].is_zero() && g[1][1].is_zero();
    if diag {
        Some((false, root_exponent(&g[0][0], m)?, root_exponent(&g[1][1], m)?))
    } else if anti {
        Some((true, root_exponent(&g[1][0], m)?, root_exponent(&g[0][1], m)?))
    } else {
        None
    }
}

/// Union-find over matrix positions with root-of-unity weights:
/// X_p = ζ_m^{weight[p]} X_{parent[p]}.
struct WeightedUnionFind {
    parent: Vec<u32>,
    weight: Vec<u32>,
    vanishes: Vec<bool>,
    m: u32,
}

impl WeightedUnionFind {
    fn new(size: usize, m: u32) -> Self {
        WeightedUnionFind { parent: (0..size as u32).collect(), weight: vec![0; size], vanishes: vec![false; size], m }
    }

    fn find(&mut self, p: usize) -> (usize, u32) {
        let mut path = Vec::new();
        let mut x = p;
        while self.parent[x] as usize != x {
            path.push(x);
            x = self.parent[x] as usize;
        }
        let root = x;
        // Walk back from the node nearest the root, accumulating weights.
        let mut acc = 0u32;
        for &y in path.iter().rev() {
            acc = (acc + self.weight[y]) % self.m;
            self.weight[y] = acc;
            self.parent[y] = root as u32;
        }
        (root, if p == root { 0 } else { self.weight[p] })
    }

    /// Records X_q = ζ^e X_p.
    fn relate(&mut self, p: usize, q: usize, e: u32) {
        let (rp, wp) = self.find(p);
        let (rq, wq) = self.find(q);
        let m = self.m;
        if rp == rq {
            if wq != (e + wp) % m {
                self.vanishes[rp] = true;
            }
            return;
        }
        self.parent[rq] = rp as u32;
        self.weight[rq] = (e + wp + m - wq) % m;
        if self.vanishes[rq] {
            self.vanishes[rp] = true;
        }
    }
}

/// Exact basis of Z_k(G) = {X : X g^⊗k = g^⊗k X for every generator g}, with the
/// default resource guard.
pub fn commutant_basis(spec: &SubgroupSpec, k: usize) -> Result<Vec<SparseEndo>> {
    let limit = match spec.family {
        Family::Cyclic(_) | Family::BinaryDihedral(_) => COMMUTANT_GUARD_MONOMIAL,
        _ => COMMUTANT_GUARD_EXCEPTIONAL,
    };
    commutant_basis_with_guard(spec, k, limit)
}

/// [`commutant_basis`] with an explicit guard on k.
///
/// Monomial generators are handled by orbit bookkeeping on matrix positions; the
/// remaining generators are imposed by an exact nullspace computation on the
/// resulting orbit basis.
pub fn commutant_basis_with_guard(spec: &SubgroupSpec, k: usize, limit: usize) -> Result<Vec<SparseEndo>> {
    if !spec.is_finite() {
        return Err(Error::Unsupported { family: spec.to_string(), what: "commutant solving".into() });
    }
    if k > limit {
        return Err(Error::GuardExceeded { what: format!("commutant of {spec}"), k, limit });
    }
    let n = spec.conductor();
    let m = if n.is_multiple_of(2) { n } else { 2 * n };
    let d = 1usize << k;
    let gens = generators(spec)?;
    let mut uf = WeightedUnionFind::new(d * d, m);
    let mut dense = Vec::new();
    for g in &gens {
        let Some((swap, e0, e1)) = monomial_data(&g.matrix, m) else {
            dense.push(group_action(&g.matrix, k));
            continue;
        };
        let flip = if swap { d - 1 } else { 0 };
        let exps: Vec<u32> = (0..d)
            .map(|c| {
                let ones = c.count_ones();
                ((k as u32 - ones) * e0 + ones * e1) % m
            })
            .collect();
        for a in 0..d {
            for b in 0..d {
                // Γ E_{a,b} Γ^{-1} = c_a c_b^{-1} E_{σa,σb}, so X_{σa,σb} = c_a c_b^{-1} X_{a,b}.
                let e = (exps[a] + m - exps[b]) % m;
                uf.relate(a * d + b, (a ^ flip) * d + (b ^ flip), e);
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<(usize, usize, CycloNum)>> = BTreeMap::new();
    for p in 0..d * d {
        let (root, w) = uf.find(p);
        if uf.vanishes[root] {
            continue;
        }
        let val = root_in_field(m, w, n);
        components.entry(root).or_default().push((p / d, p % d, val));
    }
    let orbit_basis: Vec<SparseEndo> =
        components.into_values().map(|entries| SparseEndo::from_entries(k, n, entries)).collect();
    if dense.is_empty() {
        return Ok(orbit_basis);
    }
    // Impose Σ_j x_j (B_j Γ − Γ B_j) = 0 for each dense generator Γ.
    let cols = orbit_basis.len();
    let mut ech = Echelon::new();
    for gamma in &dense {
        let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (j, b) in orbit_basis.iter().enumerate() {
            let c = b.mul(gamma).sub(&gamma.mul(b));
            for (r, cc, v) in c.entries() {
                rows.entry(r * d + cc).or_default().push((j, v.clone()));
            }
        }
        for row in rows.values() {
            ech.insert(row);
            if ech.rank() == cols {
                return Ok(Vec::new());
            }
        }
    }
    Ok(ech
        .nullspace(cols, n)
        .into_iter()
        .map(|combo| {
            combo.iter().fold(SparseEndo::zero(k, n), |acc, (j, x)| acc.add(&orbit_basis[*j].scale(x)))
        })
        .collect())
}
