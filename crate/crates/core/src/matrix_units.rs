//! Explicit bases of the centralizer algebras for the cyclic, binary dihedral and
//! infinite families: matrix units, central idempotents and irreducible modules,
//! together with the planar rook algebra used to identify Z_k(C_∞) and Z_k(D_∞).

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::groups::{generators, n_tilde, SubgroupSpec};
use crate::linalg::{Echelon, SparseVec};
use crate::tensor_endo::{group_action, neg_index, succ_order_idx, succ_sorted_indices, weight_of, SignTuple, SparseEndo};

/// Blocks up to this size get an exhaustive multiplication table check.
pub const EXHAUSTIVE_BLOCK_LIMIT: usize = 5;

/// Number of sampled products per block pair above [`EXHAUSTIVE_BLOCK_LIMIT`].
pub const SAMPLED_PRODUCTS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitFamily {
    /// E_{r,s} in Z_k(C_n).
    Cyclic,
    /// E_{r,s} + E_{−r,−s}, the spanning elements of Z_k(D_n); not matrix units in general.
    DihedralPair,
    /// e_{r,s} = E_{r,s} + E_{−r,−s} with r, s ∈ K_ℓ, 1 ≤ ℓ ≤ n−1.
    DihedralTwoDim,
    /// e⁺_{r,s} for ℓ ∈ {0, n}.
    DihedralOneDimPlus,
    /// e⁻_{r,s} for ℓ ∈ {0, n}.
    DihedralOneDimMinus,
    /// E_{r,s} with |r| = |s|, identified with X_{R,S}.
    PlanarRook,
}

/// One labelled basis element. `twist` is i^{ℓ−k} ∈ {±1} for the one-dimensional
/// dihedral families and 1 otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixUnitLabel {
    pub family: UnitFamily,
    pub node: String,
    pub ell: i64,
    pub a: usize,
    pub row: SignTuple,
    pub col: SignTuple,
    pub twist: i8,
}

impl MatrixUnitLabel {
    pub fn k(&self) -> usize {
        self.row.k()
    }

    pub fn row_index(&self) -> usize {
        self.row.to_index()
    }

    pub fn col_index(&self) -> usize {
        self.col.to_index()
    }

    /// The endomorphism of V^⊗k this label stands for, with rational entries.
    pub fn realize(&self) -> SparseEndo {
        let k = self.k();
        let (r, s) = (self.row_index(), self.col_index());
        let (nr, ns) = (neg_index(k, r), neg_index(k, s));
        let one = || CycloNum::one(1);
        match self.family {
            UnitFamily::Cyclic | UnitFamily::PlanarRook => SparseEndo::matrix_unit(k, 1, r, s),
            UnitFamily::DihedralPair | UnitFamily::DihedralTwoDim => {
                SparseEndo::from_entries(k, 1, [(r, s, one()), (nr, ns, one())])
            }
            UnitFamily::DihedralOneDimPlus | UnitFamily::DihedralOneDimMinus => {
                let sign = if self.family == UnitFamily::DihedralOneDimPlus { 1 } else { -1 };
                let half = CycloNum::from_ratio(1, 1, 2);
                let cross = CycloNum::from_ratio(1, sign * self.twist as i64, 2);
                SparseEndo::from_entries(
                    k,
                    1,
                    [(r, s, half.clone()), (nr, ns, half), (r, ns, cross.clone()), (nr, s, cross)],
                )
            }
        }
    }
}

/// Least a ∈ {0..k} with k − 2a ≡ ℓ (mod `modulus`).
pub fn a_ell(modulus: u32, k: usize, ell: u32) -> Option<usize> {
    let m = modulus as i64;
    (0..=k).find(|&a| (k as i64 - 2 * a as i64 - ell as i64).rem_euclid(m) == 0)
}

fn residue(x: i64, m: u32) -> u32 {
    x.rem_euclid(m as i64) as u32
}

fn check_level(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("matrix-unit bases need k ≥ 1".into()));
    }
    if k > 20 {
        return Err(Error::Domain(format!("k = {k} exceeds the supported tensor power 20")));
    }
    Ok(())
}

/// i^e for even e, as ±1 computed in Q(ζ_4).
pub fn i_power_sign(e: i64) -> Result<i8> {
    if e.rem_euclid(2) != 0 {
        return Err(Error::Domain(format!("i^{e} is not real: the exponent must be even")));
    }
    let v = CycloNum::root_of_unity(4, e).to_rational().expect("even powers of i are rational");
    Ok(if v.is_one() { 1 } else { -1 })
}

fn label(family: UnitFamily, node: &str, ell: i64, a: usize, k: usize, r: usize, s: usize, twist: i8) -> MatrixUnitLabel {
    MatrixUnitLabel {
        family,
        node: node.to_string(),
        ell,
        a,
        row: SignTuple::from_index(k, r),
        col: SignTuple::from_index(k, s),
        twist,
    }
}

fn check_cyclic(n: u32, k: usize) -> Result<()> {
    check_level(k)?;
    if n == 0 {
        return Err(Error::Domain("C_n needs n ≥ 1".into()));
    }
    Ok(())
}

/// Λ_k(C_n) as residues ℓ = k − 2a mod n.
pub fn cyclic_lambda(n: u32, k: usize) -> BTreeSet<u32> {
    (0..=k).map(|a| residue(k as i64 - 2 * a as i64, n)).collect()
}

/// B^k(C_n): all E_{r,s} with |r| ≡ |s| mod ñ, rows and columns in ≻-descending order.
pub fn cyclic_basis(n: u32, k: usize) -> Result<Vec<MatrixUnitLabel>> {
    check_cyclic(n, k)?;
    let nt = n_tilde(n) as usize;
    let order = succ_sorted_indices(k);
    let mut out = Vec::new();
    for &r in &order {
        let wr = weight_of(k, r);
        let ell = residue(k as i64 - 2 * wr as i64, n);
        let a = a_ell(n, k, ell).expect("ℓ comes from a weight");
        let node = ell.to_string();
        for &s in &order {
            if (wr + nt - weight_of(k, s) % nt).is_multiple_of(nt) {
                out.push(label(UnitFamily::Cyclic, &node, ell as i64, a, k, r, s, 1));
            }
        }
    }
    Ok(out)
}

/// B^k(C_n) grouped into matrix summands, one per ℓ ∈ Λ_k(C_n).
pub fn cyclic_blocks(n: u32, k: usize) -> Result<Vec<MatrixBlock>> {
    check_cyclic(n, k)?;
    let mut rows: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for r in succ_sorted_indices(k) {
        rows.entry(residue(k as i64 - 2 * weight_of(k, r) as i64, n)).or_default().push(r);
    }
    Ok(rows
        .into_iter()
        .map(|(ell, rs)| {
            let a = a_ell(n, k, ell).expect("ℓ comes from a weight");
            let node = ell.to_string();
            let units = rs
                .iter()
                .cartesian_product(&rs)
                .map(|(&r, &s)| label(UnitFamily::Cyclic, &node, ell as i64, a, k, r, s, 1))
                .collect();
            MatrixBlock { node, ell, size: rs.len(), units }
        })
        .collect())
}

/// A central element labelled by a node of the representation graph.
#[derive(Clone, Debug)]
pub struct CentralElement {
    pub node: String,
    pub element: SparseEndo,
}

/// z_ℓ = Σ E_{r,r} over k − 2|r| ≡ ℓ mod n, one per ℓ ∈ Λ_k(C_n).
pub fn cyclic_central_basis(n: u32, k: usize) -> Result<Vec<CentralElement>> {
    check_cyclic(n, k)?;
    let mut diag: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for r in 0..1usize << k {
        diag.entry(residue(k as i64 - 2 * weight_of(k, r) as i64, n)).or_default().push(r);
    }
    Ok(diag
        .into_iter()
        .map(|(ell, rs)| CentralElement {
            node: ell.to_string(),
            element: SparseEndo::from_entries(k, 1, rs.into_iter().map(|r| (r, r, CycloNum::one(1)))),
        })
        .collect())
}

/// An irreducible Z_k-module given by explicit vectors of V^⊗k.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    pub group: String,
    pub node: String,
    pub k: usize,
    pub vectors: Vec<BTreeMap<usize, CycloNum>>,
}

fn to_sparse(v: &BTreeMap<usize, CycloNum>) -> SparseVec {
    v.iter().map(|(i, x)| (*i, x.clone())).collect()
}

impl ModuleBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new();
        for v in &self.vectors {
            ech.insert(&to_sparse(v));
        }
        ech
    }

    pub fn is_independent(&self) -> bool {
        self.echelon().rank() == self.vectors.len()
    }

    /// True when every operator maps the span into itself.
    pub fn invariant_under(&self, ops: &[SparseEndo]) -> bool {
        let ech = self.echelon();
        ops.iter().all(|op| self.vectors.iter().all(|v| ech.contains(&to_sparse(&op.apply(v)))))
    }

    pub fn to_json(&self) -> ModuleJson {
        ModuleJson {
            group: self.group.clone(),
            node: self.node.clone(),
            k: self.k,
            dim: self.dim(),
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|(i, x)| (SignTuple::from_index(self.k, *i), x.clone())).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuleJson {
    pub group: String,
    pub node: String,
    pub k: usize,
    pub dim: usize,
    pub vectors: Vec<Vec<(SignTuple, CycloNum)>>,
}

fn basis_vector(i: usize) -> BTreeMap<usize, CycloNum> {
    BTreeMap::from([(i, CycloNum::one(1))])
}

/// Z_k^{(ℓ)}(C_n) = span{v_r : k − 2|r| ≡ ℓ mod n}, in ≻-descending order.
pub fn cyclic_module_basis(n: u32, k: usize, ell: u32) -> Result<ModuleBasis> {
    check_cyclic(n, k)?;
    let ell = ell % n;
    if !cyclic_lambda(n, k).contains(&ell) {
        return Err(Error::Domain(format!("{ell} is not in Λ_{k}(C{n})")));
    }
    let vectors = succ_sorted_indices(k)
        .into_iter()
        .filter(|&r| residue(k as i64 - 2 * weight_of(k, r) as i64, n) == ell)
        .map(basis_vector)
        .collect();
    Ok(ModuleBasis { group: format!("C{n}"), node: ell.to_string(), k, vectors })
}

/// Σ_{b ≡ a mod m} C(k, b), the coefficient of z^a in (1+z)^k reduced by z^m = 1.
pub fn wrapped_binomial(k: usize, a: usize, m: usize) -> u128 {
    let mut row = vec![0u128; m];
    row[0] = 1;
    for _ in 0..k {
        let mut next = row.clone();
        for (i, x) in row.iter().enumerate() {
            next[(i + 1) % m] += x;
        }
        row = next;
    }
    row[a % m]
}

/// Matrix units of Z_k(C_∞): E_{r,s} with |r| = |s|, identified with X_{R,S}.
pub fn planar_rook_units(k: usize) -> Result<Vec<MatrixUnitLabel>> {
    check_level(k)?;
    let order = succ_sorted_indices(k);
    let mut out = Vec::new();
    for &r in &order {
        let a = weight_of(k, r);
        let ell = k as i64 - 2 * a as i64;
        let node = ell.to_string();
        for &s in order.iter().filter(|&&s| weight_of(k, s) == a) {
            out.push(label(UnitFamily::PlanarRook, &node, ell, a, k, r, s, 1));
        }
    }
    Ok(out)
}

/// Z_k(C_∞)^{(k−2a)} = span{v_r : |r| = a}.
pub fn cinfty_module_basis(k: usize, a: usize) -> Result<ModuleBasis> {
    check_level(k)?;
    if a > k {
        return Err(Error::Domain(format!("weight {a} exceeds k = {k}")));
    }
    let vectors = succ_sorted_indices(k).into_iter().filter(|&r| weight_of(k, r) == a).map(basis_vector).collect();
    Ok(ModuleBasis { group: "Cinf".into(), node: (k as i64 - 2 * a as i64).to_string(), k, vectors })
}

/// Planar rook algebra P_k on the diagram basis d_{R,S}, with R, S ⊆ {1..k} as bit masks
/// (bit j − 1 for vertex j) and |R| = |S|; the edges join R to S in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RookElement {
    pub terms: BTreeMap<(u32, u32), Rational64>,
}

fn select(src: u32, dom: u32, keep: u32) -> u32 {
    // Images under the order-preserving bijection dom → src of the elements of keep ⊆ dom.
    let d = (0..32).filter(|b| dom >> b & 1 == 1);
    let s = (0..32).filter(|b| src >> b & 1 == 1);
    d.zip(s).filter(|(x, _)| keep >> x & 1 == 1).fold(0, |acc, (_, y)| acc | 1 << y)
}

/// d_{R,S} · d_{T,U}: the first diagram stacked on top of the second.
pub fn rook_compose(a: (u32, u32), b: (u32, u32)) -> (u32, u32) {
    let middle = a.1 & b.0;
    (select(a.0, a.1, middle), select(b.1, b.0, middle))
}

impl RookElement {
    pub fn diagram(top: u32, bottom: u32) -> Self {
        assert_eq!(top.count_ones(), bottom.count_ones(), "planar rook diagrams need |R| = |S|");
        RookElement { terms: BTreeMap::from([((top, bottom), Rational64::one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, key: (u32, u32), c: Rational64) {
        let slot = self.terms.entry(key).or_insert_with(Rational64::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &RookElement, c: Rational64) {
        for (key, v) in &other.terms {
            self.push(*key, c * v);
        }
    }

    pub fn mul(&self, other: &RookElement) -> RookElement {
        let mut out = RookElement::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.push(rook_compose(*a, *b), x * y);
            }
        }
        out
    }

    /// X_{R,S} = Σ_{T ⊆ R} (−1)^{|R∖T|} d_{T,σ(T)} with σ : R → S order preserving.
    pub fn unit(r: u32, s: u32) -> RookElement {
        let bits: Vec<u32> = (0..32).filter(|b| r >> b & 1 == 1).collect();
        let mut out = RookElement::default();
        for sub in bits.iter().copied().powerset() {
            let t = sub.iter().fold(0u32, |acc, b| acc | 1 << b);
            let sign = if (bits.len() - sub.len()).is_multiple_of(2) { 1 } else { -1 };
            out.push((t, select(s, r, t)), Rational64::from_integer(sign));
        }
        out
    }
}

/// Positions of −1 in the tuple with index `idx`, as a bit mask.
pub fn minus_mask(k: usize, idx: usize) -> u32 {
    (!idx & ((1usize << k) - 1)) as u32
}

fn rational_entry(x: &CycloNum) -> Result<Rational64> {
    let q = x.to_rational().ok_or_else(|| Error::Domain("expected a rational entry".into()))?;
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(p), Some(d)) => Ok(Rational64::new(p, d)),
        _ => Err(Error::Domain(format!("entry {q} out of range"))),
    }
}

/// The linear map Σ A_{r,s} E_{r,s} ↦ Σ A_{r,s} X_{R,S} on Z_k(C_∞).
pub fn cinfty_to_rook(a: &SparseEndo) -> Result<RookElement> {
    let k = a.k();
    let mut out = RookElement::default();
    for (r, s, v) in a.entries() {
        if weight_of(k, r) != weight_of(k, s) {
            return Err(Error::Domain("entry outside Z_k(C_∞)".into()));
        }
        out.add_scaled(&RookElement::unit(minus_mask(k, r), minus_mask(k, s)), rational_entry(v)?);
    }
    Ok(out)
}

/// Outcome of a homomorphism check over all ordered pairs of basis elements.
#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub k: usize,
    pub basis_size: usize,
    pub products_checked: usize,
    pub failures: usize,
    pub images_independent: bool,
}

impl IsoReport {
    pub fn holds(&self) -> bool {
        self.failures == 0 && self.images_independent
    }
}

fn images_independent(images: &[RookElement]) -> bool {
    let mut keys: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut ech = Echelon::new();
    let mut ok = true;
    for img in images {
        let v: SparseVec = img
            .terms
            .iter()
            .map(|(key, c)| {
                let next = keys.len();
                (*keys.entry(*key).or_insert(next), CycloNum::from_ratio(1, *c.numer(), *c.denom()))
            })
            .sorted_by_key(|(i, _)| *i)
            .collect();
        ok &= ech.insert(&v);
    }
    ok
}

/// Checks that E_{r,s} ↦ X_{R,S} is an injective algebra map Z_k(C_∞) → P_k by comparing
/// products computed on V^⊗k with products of rook diagrams.
pub fn planar_rook_iso_check(k: usize) -> Result<IsoReport> {
    let units: Vec<SparseEndo> = planar_rook_units(k)?.iter().map(MatrixUnitLabel::realize).collect();
    iso_check(k, &units, cinfty_to_rook)
}

fn iso_check(k: usize, basis: &[SparseEndo], phi: impl Fn(&SparseEndo) -> Result<RookElement>) -> Result<IsoReport> {
    let images: Vec<RookElement> = basis.iter().map(&phi).collect::<Result<_>>()?;
    let mut failures = 0;
    for (a, ia) in basis.iter().zip(&images) {
        for (b, ib) in basis.iter().zip(&images) {
            if phi(&a.mul(b))? != ia.mul(ib) {
                failures += 1;
            }
        }
    }
    Ok(IsoReport {
        k,
        basis_size: basis.len(),
        products_checked: basis.len() * basis.len(),
        failures,
        images_independent: images_independent(&images),
    })
}

// ----- binary dihedral groups -----

fn check_dihedral(n: u32, k: usize) -> Result<()> {
    check_level(k)?;
    if n < 2 {
        return Err(Error::Domain("D_n needs n ≥ 2".into()));
    }
    Ok(())
}

fn fold(x: u32, n: u32) -> u32 {
    x.min(2 * n - x)
}

/// Λ_k(D_n) as values ℓ ∈ {0..n}, before 0 and n are split into ℓ and ℓ′.
pub fn dihedral_lambda(n: u32, k: usize) -> BTreeSet<u32> {
    (0..=k).map(|a| fold(residue(k as i64 - 2 * a as i64, 2 * n), n)).collect()
}

/// K_ℓ in ≻-descending order. For 1 ≤ ℓ ≤ n−1 this is every r with k − 2|r| ≡ ℓ mod 2n;
/// for ℓ ∈ {0, n} only the r with r ≻ −r are kept.
pub fn k_set(n: u32, k: usize, ell: u32) -> Vec<usize> {
    let one_dim = ell == 0 || ell == n;
    succ_sorted_indices(k)
        .into_iter()
        .filter(|&r| residue(k as i64 - 2 * weight_of(k, r) as i64, 2 * n) == ell)
        .filter(|&r| !one_dim || succ_order_idx(k, r, neg_index(k, r)).is_lt())
        .collect()
}

/// K_ℓ with the r ≻ −r condition imposed for every ℓ. For 1 ≤ ℓ ≤ n−1 this drops the
/// tuples with |r| > k/2 and undercounts the module whenever such tuples exist.
pub fn k_set_as_printed(n: u32, k: usize, ell: u32) -> Vec<usize> {
    k_set(n, k, ell).into_iter().filter(|&r| succ_order_idx(k, r, neg_index(k, r)).is_lt()).collect()
}

/// B^k(D_n): E_{r,s} + E_{−r,−s} with r ≻ −r and |r| ≡ |s| mod n.
pub fn dihedral_basis(n: u32, k: usize) -> Result<Vec<MatrixUnitLabel>> {
    check_dihedral(n, k)?;
    let order = succ_sorted_indices(k);
    let n_us = n as usize;
    let mut out = Vec::new();
    for &r in order.iter().filter(|&&r| succ_order_idx(k, r, neg_index(k, r)).is_lt()) {
        let wr = weight_of(k, r);
        let ell = fold(residue(k as i64 - 2 * wr as i64, 2 * n), n);
        let a = a_ell(2 * n, k, ell).expect("ℓ comes from a weight");
        let node = ell.to_string();
        for &s in order.iter().filter(|&&s| (weight_of(k, s) + n_us - wr % n_us).is_multiple_of(n_us)) {
            out.push(label(UnitFamily::DihedralPair, &node, ell as i64, a, k, r, s, 1));
        }
    }
    Ok(out)
}

/// One matrix summand of Z_k(D_n) with its units in row-major ≻ order.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixBlock {
    pub node: String,
    pub ell: u32,
    pub size: usize,
    pub units: Vec<MatrixUnitLabel>,
}

impl MatrixBlock {
    /// The unit in row i and column j of the block.
    pub fn unit(&self, i: usize, j: usize) -> &MatrixUnitLabel {
        &self.units[i * self.size + j]
    }
}

fn dihedral_node(n: u32, ell: u32, primed: bool) -> String {
    if primed {
        format!("{ell}'")
    } else {
        debug_assert!(ell <= n);
        ell.to_string()
    }
}

fn blocks_for(n: u32, k: usize, ell: u32, ks: &[usize]) -> Result<Vec<MatrixBlock>> {
    let a = a_ell(2 * n, k, ell).expect("ℓ ∈ Λ_k");
    let size = ks.len();
    let grid = |family: UnitFamily, node: &str, twist: i8| -> MatrixBlock {
        let units = ks.iter().cartesian_product(ks).map(|(&r, &s)| label(family, node, ell as i64, a, k, r, s, twist)).collect();
        MatrixBlock { node: node.to_string(), ell, size, units }
    };
    if ell == 0 || ell == n {
        let twist = i_power_sign(ell as i64 - k as i64)?;
        Ok(vec![
            grid(UnitFamily::DihedralOneDimPlus, &dihedral_node(n, ell, false), twist),
            grid(UnitFamily::DihedralOneDimMinus, &dihedral_node(n, ell, true), twist),
        ])
    } else {
        Ok(vec![grid(UnitFamily::DihedralTwoDim, &dihedral_node(n, ell, false), 1)])
    }
}

/// B^k_mat(D_n): one block per irreducible Z_k(D_n)-module, ℓ′ directly after ℓ.
pub fn dihedral_matrix_unit_basis(n: u32, k: usize) -> Result<Vec<MatrixBlock>> {
    check_dihedral(n, k)?;
    let mut out = Vec::new();
    for ell in dihedral_lambda(n, k) {
        out.extend(blocks_for(n, k, ell, &k_set(n, k, ell))?);
    }
    Ok(out)
}

/// The central idempotents z_ℓ and z_ℓ^± as sums of the diagonal units of each block.
pub fn dihedral_central_basis(n: u32, k: usize) -> Result<Vec<CentralElement>> {
    Ok(dihedral_matrix_unit_basis(n, k)?
        .into_iter()
        .map(|b| {
            let element = (0..b.size).fold(SparseEndo::zero(k, 1), |acc, i| acc.add(&b.unit(i, i).realize()));
            CentralElement { node: b.node, element }
        })
        .collect())
}

/// Parses "ℓ" or "ℓ'" into (ℓ, primed) and checks it against the nodes of D_n.
pub fn parse_dihedral_label(n: u32, text: &str) -> Result<(u32, bool)> {
    let (body, primed) = match text.strip_suffix('\'') {
        Some(b) => (b, true),
        None => (text, false),
    };
    let ell: u32 = body.parse().map_err(|_| Error::Parse(format!("bad D{n} node label {text:?}")))?;
    let valid = if primed { ell == 0 || ell == n } else { ell <= n };
    if !valid {
        return Err(Error::Domain(format!("D{n} has no node {text:?}")));
    }
    Ok((ell, primed))
}

/// The irreducible Z_k(D_n)-module for a node label: span{v_t : t ∈ K_ℓ} for two-dimensional
/// nodes and span{v_t ± i^{ℓ−k} v_{−t}} for ℓ and ℓ′ with ℓ ∈ {0, n}.
pub fn dihedral_module_basis(n: u32, k: usize, node: &str) -> Result<ModuleBasis> {
    check_dihedral(n, k)?;
    let (ell, primed) = parse_dihedral_label(n, node)?;
    if !dihedral_lambda(n, k).contains(&ell) {
        return Err(Error::Domain(format!("{node} is not in Λ_{k}(D{n})")));
    }
    let ks = k_set(n, k, ell);
    let vectors = if ell == 0 || ell == n {
        let twist = i_power_sign(ell as i64 - k as i64)? as i64 * if primed { -1 } else { 1 };
        ks.iter()
            .map(|&t| BTreeMap::from([(t, CycloNum::one(1)), (neg_index(k, t), CycloNum::from_int(1, twist))]))
            .collect()
    } else {
        ks.into_iter().map(basis_vector).collect()
    };
    Ok(ModuleBasis { group: format!("D{n}"), node: node.to_string(), k, vectors })
}

/// For each r ∈ K_ℓ with 1 ≤ ℓ ≤ n−1, checks that (i^{ℓ−k} v_{−r}, v_r) is a standard basis of
/// D_n^{(ℓ)}: g acts as diag(ζ^{−ℓ}, ζ^ℓ) and h as the swap scaled by i^ℓ, with ζ = ζ_{2n}.
pub fn standard_basis_check(n: u32, k: usize, ell: u32) -> Result<bool> {
    check_dihedral(n, k)?;
    if ell == 0 || ell >= n {
        return Err(Error::Domain(format!("ℓ = {ell} is not two-dimensional for D{n}")));
    }
    let gens = generators(&SubgroupSpec::dihedral(n))?;
    let g = group_action(&gens[0].matrix, k);
    let h = group_action(&gens[1].matrix, k);
    let twist = CycloNum::from_int(1, i_power_sign(ell as i64 - k as i64)? as i64);
    let zeta = |e: i64| CycloNum::root_of_unity(2 * n, e);
    let i_ell = CycloNum::root_of_unity(4, ell as i64);
    let scaled = |i: usize, c: &CycloNum| BTreeMap::from([(i, c.clone())]);
    for r in k_set(n, k, ell) {
        let first = scaled(neg_index(k, r), &twist);
        let second = scaled(r, &CycloNum::one(1));
        let times = |v: &BTreeMap<usize, CycloNum>, c: &CycloNum| -> BTreeMap<usize, CycloNum> {
            v.iter().map(|(i, x)| (*i, x * c)).collect()
        };
        let ok = g.apply(&first) == times(&first, &zeta(-(ell as i64)))
            && g.apply(&second) == times(&second, &zeta(ell as i64))
            && h.apply(&first) == times(&second, &i_ell)
            && h.apply(&second) == times(&first, &i_ell);
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

// ----- infinite dihedral group -----

/// B^k(D_∞): E_{r,s} + E_{−r,−s} with r ≻ −r and |r| = |s|.
pub fn dinfty_basis(k: usize) -> Result<Vec<MatrixUnitLabel>> {
    check_level(k)?;
    let order = succ_sorted_indices(k);
    let mut out = Vec::new();
    for &r in order.iter().filter(|&&r| succ_order_idx(k, r, neg_index(k, r)).is_lt()) {
        let a = weight_of(k, r);
        let ell = (k - 2 * a) as u32;
        for &s in order.iter().filter(|&&s| weight_of(k, s) == a) {
            out.push(label(UnitFamily::DihedralPair, &ell.to_string(), ell as i64, a, k, r, s, 1));
        }
    }
    Ok(out)
}

/// Matrix units of Z_k(D_∞): e_{r,s} for |r| = |s| < k/2 and e^±_{r,s} for |r| = |s| = k/2
/// with r ≻ −r, s ≻ −s.
pub fn dinfty_matrix_units(k: usize) -> Result<Vec<MatrixBlock>> {
    check_level(k)?;
    let mut out = Vec::new();
    for a in (0..=k / 2).rev() {
        let ell = (k - 2 * a) as u32;
        let ks: Vec<usize> = succ_sorted_indices(k)
            .into_iter()
            .filter(|&r| weight_of(k, r) == a)
            .filter(|&r| ell != 0 || succ_order_idx(k, r, neg_index(k, r)).is_lt())
            .collect();
        let size = ks.len();
        let grid = |family: UnitFamily, node: String, twist: i8| MatrixBlock {
            node: node.clone(),
            ell,
            size,
            units: ks.iter().cartesian_product(&ks).map(|(&r, &s)| label(family, &node, ell as i64, a, k, r, s, twist)).collect(),
        };
        if ell == 0 {
            let twist = i_power_sign(-(k as i64))?;
            out.push(grid(UnitFamily::DihedralOneDimPlus, "0".into(), twist));
            out.push(grid(UnitFamily::DihedralOneDimMinus, "0'".into(), twist));
        } else {
            out.push(grid(UnitFamily::DihedralTwoDim, ell.to_string(), 1));
        }
    }
    Ok(out)
}

/// Irreducible Z_k(D_∞)-module dimensions keyed by node: C(k, (k−ℓ)/2) for ℓ ≥ 1 and
/// ½C(k, k/2) for each of 0 and 0′.
pub fn dinfty_module_dims(k: usize) -> BTreeMap<String, u128> {
    let binom = |a: usize| (0..a).fold(1u128, |acc, i| acc * (k - i) as u128 / (i + 1) as u128);
    let mut out = BTreeMap::new();
    for a in 0..=k / 2 {
        let ell = k - 2 * a;
        if ell == 0 {
            out.insert("0".to_string(), binom(a) / 2);
            out.insert("0'".to_string(), binom(a) / 2);
        } else {
            out.insert(ell.to_string(), binom(a));
        }
    }
    out
}

/// Q_k ⊆ P_k and the map of Z_k(D_∞) into it: e_{r,s} ↦ X_{R,S} below the middle weight,
/// e⁺_{r,s} ↦ X_{R,S} and e⁻_{r,s} ↦ X_{−R,−S} at weight k/2 with R ≻ −R and S ≻ −S.
pub fn dinfty_to_rook(a: &SparseEndo) -> Result<RookElement> {
    let k = a.k();
    let twist = Rational64::from_integer(if k.is_multiple_of(2) { i_power_sign(-(k as i64))? as i64 } else { 1 });
    let mut out = RookElement::default();
    for (r, s, v) in a.entries() {
        let w = weight_of(k, r);
        if w != weight_of(k, s) {
            return Err(Error::Domain("entry outside Z_k(D_∞)".into()));
        }
        let r_top = succ_order_idx(k, r, neg_index(k, r)).is_lt();
        if !r_top {
            continue;
        }
        let x = rational_entry(v)?;
        if 2 * w < k {
            out.add_scaled(&RookElement::unit(minus_mask(k, r), minus_mask(k, s)), x);
            continue;
        }
        // Middle weight: pair the coordinates on (r, s) and (r, −s) with s ≻ −s.
        let s_top = succ_order_idx(k, s, neg_index(k, s)).is_lt();
        let base = if s_top { s } else { neg_index(k, s) };
        let (rm, sm) = (minus_mask(k, r), minus_mask(k, base));
        let full = ((1usize << k) - 1) as u32;
        // A_{r,s} contributes ½(c⁺ + c⁻) and A_{r,−s} contributes ½τ(c⁺ − c⁻), so
        // c⁺ = A_{r,s} + τA_{r,−s} and c⁻ = A_{r,s} − τA_{r,−s}.
        let (plus, minus) = if s_top { (x, x) } else { (twist * x, -twist * x) };
        out.add_scaled(&RookElement::unit(rm, sm), plus);
        out.add_scaled(&RookElement::unit(full & !rm, full & !sm), minus);
    }
    Ok(out)
}

/// Checks that the map of [`dinfty_to_rook`] is an injective algebra map on the matrix-unit basis.
pub fn dinfty_iso_check(k: usize) -> Result<IsoReport> {
    let units: Vec<SparseEndo> =
        dinfty_matrix_units(k)?.iter().flat_map(|b| b.units.iter().map(MatrixUnitLabel::realize)).collect();
    iso_check(k, &units, dinfty_to_rook)
}

// ----- generic verification -----

/// Result of checking e_{r,s} e_{t,u} = δ_{s,t} e_{r,u} within blocks and 0 across blocks.
#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub products_checked: usize,
    pub failures: usize,
}

impl TableReport {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Exhaustive for blocks of size ≤ [`EXHAUSTIVE_BLOCK_LIMIT`], sampled otherwise.
pub fn matrix_unit_table_check(blocks: &[MatrixBlock], seed: u64) -> TableReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized: Vec<Vec<SparseEndo>> = blocks.iter().map(|b| b.units.iter().map(MatrixUnitLabel::realize).collect()).collect();
    let mut report = TableReport { products_checked: 0, failures: 0 };
    for (bi, x) in blocks.iter().enumerate() {
        for (bj, y) in blocks.iter().enumerate() {
            let quads: Vec<(usize, usize, usize, usize)> = if x.size <= EXHAUSTIVE_BLOCK_LIMIT && y.size <= EXHAUSTIVE_BLOCK_LIMIT {
                (0..x.size)
                    .cartesian_product(0..x.size)
                    .cartesian_product((0..y.size).cartesian_product(0..y.size))
                    .map(|((r, s), (t, u))| (r, s, t, u))
                    .collect()
            } else {
                (0..SAMPLED_PRODUCTS)
                    .map(|i| {
                        let r = rng.gen_range(0..x.size);
                        let s = rng.gen_range(0..x.size);
                        // Half of the samples hit the nonzero case inside a block.
                        let t = if bi == bj && i % 2 == 0 { s } else { rng.gen_range(0..y.size) };
                        (r, s, t, rng.gen_range(0..y.size))
                    })
                    .collect()
            };
            for (r, s, t, u) in quads {
                let lhs = realized[bi][r * x.size + s].mul(&realized[bj][t * y.size + u]);
                let ok = if bi == bj && s == t {
                    lhs == realized[bi][r * x.size + u]
                } else {
                    lhs.is_zero()
                };
                report.products_checked += 1;
                if !ok {
                    report.failures += 1;
                }
            }
        }
    }
    report
}

/// Checks e_{r,s} v_t = δ_{s,t} v_r for a block acting on the module with the same node,
/// and that every other block annihilates the module.
pub fn module_action_check(blocks: &[MatrixBlock], module: &ModuleBasis) -> bool {
    blocks.iter().all(|b| {
        b.units.iter().enumerate().all(|(idx, unit)| {
            let (r, s) = (idx / b.size.max(1), idx % b.size.max(1));
            let e = unit.realize();
            module.vectors.iter().enumerate().all(|(t, v)| {
                let image = e.apply(v);
                if b.node == module.node && s == t {
                    image == module.vectors[r]
                } else {
                    image.is_empty()
                }
            })
        })
    })
}

/// Elements of `a` that commute with every generator of the group.
pub fn commute_with_generators(spec: &SubgroupSpec, k: usize, elems: &[SparseEndo]) -> Result<bool> {
    let gens: Vec<SparseEndo> = generators(spec)?.iter().map(|g| group_action(&g.matrix, k)).collect();
    Ok(elems.iter().all(|x| gens.iter().all(|g| x.commutes_with(g))))
}

/// Chooses `count` distinct labels at random, or all of them when there are fewer.
pub fn sample_labels(labels: &[MatrixUnitLabel], count: usize, seed: u64) -> Vec<&MatrixUnitLabel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut refs: Vec<&MatrixUnitLabel> = labels.iter().collect();
    refs.shuffle(&mut rng);
    refs.truncate(count);
    refs
}

/// Σ_λ (block size)².
pub fn sum_of_block_squares(blocks: &[MatrixBlock]) -> usize {
    blocks.iter().map(|b| b.size * b.size).sum()
}

/// True when the elements are central idempotents, pairwise orthogonal, summing to 1,
/// and commute with every element of `basis`.
pub fn central_idempotents_check(central: &[CentralElement], basis: &[SparseEndo]) -> bool {
    let Some(first) = central.first() else { return false };
    let k = first.element.k();
    let total = central.iter().fold(SparseEndo::zero(k, 1), |acc, z| acc.add(&z.element));
    let orthogonal = central.iter().enumerate().all(|(i, x)| {
        central.iter().enumerate().all(|(j, y)| {
            let p = x.element.mul(&y.element);
            if i == j {
                p == x.element
            } else {
                p.is_zero()
            }
        })
    });
    let commute = central.iter().all(|z| basis.iter().all(|b| z.element.commutes_with(b)));
    total == SparseEndo::identity(k, 1) && orthogonal && commute && central.iter().all(|z| !z.element.is_zero())
}
