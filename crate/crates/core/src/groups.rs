//! Finite and infinite subgroups of SU(2): generators, element enumeration,
//! conjugacy classes, irreducible characters, and character projectors on V^⊗k.
//!
//! Quaternions a + bi + cj + dk are realized as [[a+bi, c+di], [−c+di, a−bi]].

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::tensor_endo::{group_action, Mat2, SparseEndo};

/// The subgroup families in scope, plus SU(2) itself for the Temperley–Lieb case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Cyclic(u32),
    BinaryDihedral(u32),
    BinaryTetrahedral,
    BinaryOctahedral,
    BinaryIcosahedral,
    CyclicInfinite,
    BinaryDihedralInfinite,
    SpecialUnitary,
}

/// A subgroup of SU(2) named by its family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub family: Family,
}

impl SubgroupSpec {
    pub fn cyclic(n: u32) -> Self {
        SubgroupSpec { family: Family::Cyclic(n) }
    }
    pub fn dihedral(n: u32) -> Self {
        SubgroupSpec { family: Family::BinaryDihedral(n) }
    }
    pub fn tetrahedral() -> Self {
        SubgroupSpec { family: Family::BinaryTetrahedral }
    }
    pub fn octahedral() -> Self {
        SubgroupSpec { family: Family::BinaryOctahedral }
    }
    pub fn icosahedral() -> Self {
        SubgroupSpec { family: Family::BinaryIcosahedral }
    }
    pub fn cyclic_infinite() -> Self {
        SubgroupSpec { family: Family::CyclicInfinite }
    }
    pub fn dihedral_infinite() -> Self {
        SubgroupSpec { family: Family::BinaryDihedralInfinite }
    }
    pub fn su2() -> Self {
        SubgroupSpec { family: Family::SpecialUnitary }
    }

    /// Parses selectors such as `C8`, `D5`, `T`, `O`, `I`, `Cinf`, `Dinf`, `SU2`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("unknown group selector {s:?}"));
        let num = |rest: &str| rest.parse::<u32>().map_err(|_| bad());
        let spec = match t {
            "T" => Self::tetrahedral(),
            "O" => Self::octahedral(),
            "I" => Self::icosahedral(),
            "Cinf" => Self::cyclic_infinite(),
            "Dinf" => Self::dihedral_infinite(),
            "SU2" => Self::su2(),
            _ if t.starts_with('C') => {
                let n = num(&t[1..])?;
                if n == 0 {
                    return Err(bad());
                }
                Self::cyclic(n)
            }
            _ if t.starts_with('D') => {
                let n = num(&t[1..])?;
                if n < 2 {
                    return Err(Error::Domain(format!("binary dihedral groups need n >= 2, got {n}")));
                }
                Self::dihedral(n)
            }
            _ => return Err(bad()),
        };
        Ok(spec)
    }

    pub fn order(&self) -> Option<u64> {
        match self.family {
            Family::Cyclic(n) => Some(n as u64),
            Family::BinaryDihedral(n) => Some(4 * n as u64),
            Family::BinaryTetrahedral => Some(24),
            Family::BinaryOctahedral => Some(48),
            Family::BinaryIcosahedral => Some(120),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Smallest conductor containing every generator entry.
    pub fn conductor(&self) -> u32 {
        match self.family {
            Family::Cyclic(n) => n,
            Family::BinaryDihedral(n) => 4u32.lcm(&(2 * n)),
            Family::BinaryTetrahedral | Family::BinaryOctahedral => 8,
            Family::BinaryIcosahedral => 20,
            Family::BinaryDihedralInfinite => 4,
            Family::CyclicInfinite | Family::SpecialUnitary => 1,
        }
    }

    /// Conductor containing generator entries and all character values.
    pub fn character_conductor(&self) -> u32 {
        match self.family {
            Family::BinaryTetrahedral => 24,
            _ => self.conductor(),
        }
    }

    /// ñ = n/2 for even n and n for odd n (cyclic family only).
    pub fn n_tilde(&self) -> Option<u32> {
        match self.family {
            Family::Cyclic(n) => Some(n_tilde(n)),
            _ => None,
        }
    }

    fn family_name(&self) -> String {
        self.to_string()
    }
}

/// ñ = n/2 for even n and n for odd n.
pub fn n_tilde(n: u32) -> u32 {
    if n.is_multiple_of(2) {
        n / 2
    } else {
        n
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Cyclic(n) => write!(f, "C{n}"),
            Family::BinaryDihedral(n) => write!(f, "D{n}"),
            Family::BinaryTetrahedral => write!(f, "T"),
            Family::BinaryOctahedral => write!(f, "O"),
            Family::BinaryIcosahedral => write!(f, "I"),
            Family::CyclicInfinite => write!(f, "Cinf"),
            Family::BinaryDihedralInfinite => write!(f, "Dinf"),
            Family::SpecialUnitary => write!(f, "SU2"),
        }
    }
}

/// An element of SU(2) given by its exact 2×2 matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub matrix: Mat2,
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

impl GroupElement {
    pub fn new(matrix: Mat2) -> Self {
        GroupElement { matrix }
    }

    pub fn identity(n: u32) -> Self {
        let (o, z) = (CycloNum::one(n), CycloNum::zero(n));
        GroupElement::new([[o.clone(), z.clone()], [z, o]])
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(mat_mul(&self.matrix, &other.matrix))
    }

    pub fn det(&self) -> CycloNum {
        let m = &self.matrix;
        &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
    }

    /// Inverse computed as the adjugate, valid for determinant 1.
    pub fn inverse(&self) -> GroupElement {
        let m = &self.matrix;
        GroupElement::new([[m[1][1].clone(), -&m[0][1]], [-&m[1][0], m[0][0].clone()]])
    }

    pub fn adjoint(&self) -> GroupElement {
        let m = &self.matrix;
        GroupElement::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> CycloNum {
        &self.matrix[0][0] + &self.matrix[1][1]
    }

    /// Determinant 1 and unitary, checked exactly.
    pub fn in_su2(&self) -> bool {
        let n = self.matrix[0][0].conductor();
        self.det().is_one() && self.mul(&self.adjoint()) == GroupElement::identity(n)
    }

    /// True when each row has exactly one nonzero entry (diagonal or antidiagonal).
    pub fn is_monomial(&self) -> bool {
        let m = &self.matrix;
        (m[0][1].is_zero() && m[1][0].is_zero()) || (m[0][0].is_zero() && m[1][1].is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.matrix[0][0].is_one() && self.matrix[1][1].is_one() && self.matrix[0][1].is_zero() && self.matrix[1][0].is_zero()
    }
}

fn mat_from(n: u32, f: impl Fn(usize, usize) -> CycloNum) -> Mat2 {
    let e = |i, j| f(i, j).embed_into(n).expect("conductor");
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn z(n: u32, j: i64) -> CycloNum {
    CycloNum::root_of_unity(n, j)
}

fn rat(p: i64, q: i64) -> CycloNum {
    CycloNum::from_ratio(1, p, q)
}

fn tetrahedral_generators(n: u32) -> Vec<GroupElement> {
    let i = z(4, 1);
    let qi = mat_from(n, |r, c| match (r, c) {
        (0, 0) => i.clone(),
        (1, 1) => -&i,
        _ => rat(0, 1),
    });
    let qj = mat_from(n, |r, c| match (r, c) {
        (0, 1) => rat(1, 1),
        (1, 0) => rat(-1, 1),
        _ => rat(0, 1),
    });
    // (−1 + i + j + k)/2
    let half = rat(1, 2);
    let gamma = mat_from(n, |r, c| {
        let base = match (r, c) {
            (0, 0) => &rat(-1, 1) + &i,
            (0, 1) => &rat(1, 1) + &i,
            (1, 0) => &rat(-1, 1) + &i,
            _ => &rat(-1, 1) - &i,
        };
        &base * &half
    });
    vec![GroupElement::new(qi), GroupElement::new(qj), GroupElement::new(gamma)]
}

/// Generators of the group, monomial ones first.
pub fn generators(spec: &SubgroupSpec) -> Result<Vec<GroupElement>> {
    let n = spec.conductor();
    Ok(match spec.family {
        Family::Cyclic(m) => {
            let g = mat_from(n, |r, c| match (r, c) {
                (0, 0) => z(m, -1),
                (1, 1) => z(m, 1),
                _ => rat(0, 1),
            });
            vec![GroupElement::new(g)]
        }
        Family::BinaryDihedral(m) => {
            let g = mat_from(n, |r, c| match (r, c) {
                (0, 0) => z(2 * m, -1),
                (1, 1) => z(2 * m, 1),
                _ => rat(0, 1),
            });
            let h = mat_from(n, |r, c| if r != c { z(4, 1) } else { rat(0, 1) });
            vec![GroupElement::new(g), GroupElement::new(h)]
        }
        Family::BinaryTetrahedral => tetrahedral_generators(n),
        Family::BinaryOctahedral => {
            let mut gens = tetrahedral_generators(n);
            // (1 + i)/√2 = ζ_8
            let delta = mat_from(n, |r, c| match (r, c) {
                (0, 0) => z(8, 1),
                (1, 1) => z(8, -1),
                _ => rat(0, 1),
            });
            gens.insert(2, GroupElement::new(delta));
            gens
        }
        Family::BinaryIcosahedral => {
            let mut gens = tetrahedral_generators(n);
            // (φ + φ⁻¹ i + j)/2 with φ⁻¹ = ζ_5 + ζ_5⁴ and φ = 1 + φ⁻¹
            let phi_inv = &z(5, 1) + &z(5, 4);
            let phi = &rat(1, 1) + &phi_inv;
            let i = z(4, 1);
            let half = rat(1, 2);
            let q = mat_from(n, |r, c| match (r, c) {
                (0, 0) => &(&phi + &(&phi_inv * &i)) * &half,
                (0, 1) => half.clone(),
                (1, 0) => -&half,
                _ => &(&phi - &(&phi_inv * &i)) * &half,
            });
            gens.push(GroupElement::new(q));
            gens
        }
        _ => {
            return Err(Error::Unsupported {
                family: spec.family_name(),
                what: "explicit generators (the infinite families are handled combinatorially)".into(),
            })
        }
    })
}

/// Character values of one irreducible representation.
#[derive(Clone, Debug, Serialize)]
pub struct IrrepData {
    pub label: String,
    pub dim: usize,
    /// Images of the generators, when an explicit model is available.
    pub matrices: Option<Vec<Vec<Vec<CycloNum>>>>,
    /// Character value on each conjugacy class, in the group's class order.
    pub character: Vec<CycloNum>,
}

/// A finite subgroup with all derived data.
#[derive(Debug)]
pub struct FiniteGroup {
    pub spec: SubgroupSpec,
    pub generators: Vec<GroupElement>,
    pub elements: Vec<GroupElement>,
    /// For element x ≠ 1: (generator index s, element index y) with x = s·y.
    pub parents: Vec<Option<(usize, usize)>>,
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    pub irreps: Vec<IrrepData>,
}

fn closure(gens: &[GroupElement], n: u32) -> (Vec<GroupElement>, Vec<Option<(usize, usize)>>) {
    let id = GroupElement::identity(n);
    let mut index: HashMap<GroupElement, usize> = HashMap::new();
    let mut elems = vec![id.clone()];
    let mut parents = vec![None];
    index.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (si, s) in gens.iter().enumerate() {
            let y = s.mul(&elems[x]);
            if !index.contains_key(&y) {
                index.insert(y.clone(), elems.len());
                parents.push(Some((si, x)));
                queue.push_back(elems.len());
                elems.push(y);
            }
        }
    }
    (elems, parents)
}

type DenseMat = Vec<Vec<CycloNum>>;

fn dense_mul(a: &DenseMat, b: &DenseMat) -> DenseMat {
    let d = a.len();
    let n = a[0][0].conductor();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut acc = CycloNum::zero(n);
                    for l in 0..d {
                        acc += &(&a[i][l] * &b[l][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

impl FiniteGroup {
    fn build(spec: SubgroupSpec) -> Result<FiniteGroup> {
        let order = spec.order().ok_or_else(|| Error::Unsupported {
            family: spec.family_name(),
            what: "element enumeration".into(),
        })?;
        let n = spec.character_conductor();
        let generators: Vec<GroupElement> = generators(&spec)?
            .into_iter()
            .map(|g| GroupElement::new(mat_from(n, |r, c| g.matrix[r][c].clone())))
            .collect();
        let (elements, parents) = closure(&generators, n);
        if elements.len() as u64 != order {
            return Err(Error::Domain(format!(
                "generators of {spec} closed to {} elements instead of {order}",
                elements.len()
            )));
        }
        let index: HashMap<&GroupElement, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..elements.len() {
            if class_of[x] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            for g in &elements {
                let y = g.mul(&elements[x]).mul(&g.inverse());
                let yi = index[&y];
                if class_of[yi] == usize::MAX {
                    class_of[yi] = c;
                    members.push(yi);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        let mut group = FiniteGroup { spec, generators, elements, parents, classes, class_of, irreps: Vec::new() };
        group.irreps = group.compute_irreps()?;
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn conductor(&self) -> u32 {
        self.spec.character_conductor()
    }

    /// Evaluates a representation given by generator images on every element.
    pub fn evaluate_rep(&self, gen_images: &[DenseMat]) -> Vec<DenseMat> {
        let n = self.conductor();
        let d = gen_images[0].len();
        let ident: DenseMat =
            (0..d).map(|i| (0..d).map(|j| CycloNum::from_int(n, (i == j) as i64)).collect()).collect();
        let mut out: Vec<DenseMat> = Vec::with_capacity(self.order());
        for p in &self.parents {
            let m = match p {
                None => ident.clone(),
                Some((s, y)) => dense_mul(&gen_images[*s], &out[*y]),
            };
            out.push(m);
        }
        out
    }

    fn character_from_values(&self, per_element: &[CycloNum]) -> Vec<CycloNum> {
        self.classes.iter().map(|c| per_element[c[0]].clone()).collect()
    }

    fn expand(&self, per_class: &[CycloNum]) -> Vec<CycloNum> {
        self.class_of.iter().map(|&c| per_class[c].clone()).collect()
    }

    fn defining_character(&self) -> Vec<CycloNum> {
        self.classes.iter().map(|c| self.elements[c[0]].trace()).collect()
    }

    fn explicit_irrep(&self, label: String, images: Vec<DenseMat>) -> IrrepData {
        let dim = images[0].len();
        let mats = self.evaluate_rep(&images);
        let per_element: Vec<CycloNum> = mats
            .iter()
            .map(|m| {
                let mut t = CycloNum::zero(self.conductor());
                for (i, row) in m.iter().enumerate() {
                    t += &row[i];
                }
                t
            })
            .collect();
        IrrepData { label, dim, matrices: Some(images), character: self.character_from_values(&per_element) }
    }

    fn character_irrep(&self, label: &str, character: Vec<CycloNum>) -> IrrepData {
        let dim = character[self.class_of[0]].to_rational().and_then(|q| num_traits::ToPrimitive::to_usize(&q.to_integer())).unwrap_or(0);
        IrrepData { label: label.to_string(), dim, matrices: None, character }
    }

    fn compute_irreps(&self) -> Result<Vec<IrrepData>> {
        let n = self.conductor();
        let c = |x: CycloNum| x.embed_into(n).expect("conductor");
        let one_by_one = |v: CycloNum| vec![vec![c(v)]];
        let mut out = Vec::new();
        match self.spec.family {
            Family::Cyclic(m) => {
                for l in 0..m {
                    out.push(self.explicit_irrep(l.to_string(), vec![one_by_one(z(m, l as i64))]));
                }
            }
            Family::BinaryDihedral(m) => {
                let i = z(4, 1);
                let ipow = |e: u32| i.pow(e as i64).expect("unit");
                out.push(self.explicit_irrep("0".into(), vec![one_by_one(rat(1, 1)), one_by_one(rat(1, 1))]));
                out.push(self.explicit_irrep("0'".into(), vec![one_by_one(rat(1, 1)), one_by_one(rat(-1, 1))]));
                for l in 1..m {
                    let zero = CycloNum::zero(n);
                    let g = vec![vec![c(z(2 * m, -(l as i64))), zero.clone()], vec![zero.clone(), c(z(2 * m, l as i64))]];
                    let h = vec![vec![zero.clone(), c(ipow(l))], vec![c(ipow(l)), zero.clone()]];
                    out.push(self.explicit_irrep(l.to_string(), vec![g, h]));
                }
                out.push(self.explicit_irrep(m.to_string(), vec![one_by_one(rat(-1, 1)), one_by_one(ipow(m))]));
                out.push(self.explicit_irrep(format!("{m}'"), vec![one_by_one(rat(-1, 1)), one_by_one(-ipow(m))]));
            }
            Family::BinaryTetrahedral => out = self.tetrahedral_characters()?,
            Family::BinaryOctahedral => out = self.octahedral_characters()?,
            Family::BinaryIcosahedral => out = self.icosahedral_characters()?,
            _ => unreachable!("finite families only"),
        }
        Ok(out)
    }

    fn prod(a: &[CycloNum], b: &[CycloNum]) -> Vec<CycloNum> {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }

    fn minus(a: &[CycloNum], b: &[CycloNum]) -> Vec<CycloNum> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn trivial(&self) -> Vec<CycloNum> {
        vec![CycloNum::one(self.conductor()); self.classes.len()]
    }

    /// Characters along a path 0 – 1 – 2 – … with χ_{j+1} = χ_j χ_V − χ_{j−1}.
    fn chain(&self, len: usize) -> Vec<Vec<CycloNum>> {
        let v = self.defining_character();
        let mut chars = vec![self.trivial(), v.clone()];
        while chars.len() < len {
            let j = chars.len() - 1;
            let next = Self::minus(&Self::prod(&chars[j], &v), &chars[j - 1]);
            chars.push(next);
        }
        chars
    }

    /// Index of the element with the given matrix.
    fn find(&self, g: &GroupElement) -> usize {
        self.elements.iter().position(|x| x == g).expect("element of the group")
    }

    /// Elements generated by `gens`, as a membership mask.
    fn subgroup_mask(&self, gens: &[GroupElement]) -> Vec<bool> {
        let (sub, _) = closure(gens, self.conductor());
        let mut mask = vec![false; self.order()];
        for s in &sub {
            mask[self.find(s)] = true;
        }
        mask
    }

    fn tetrahedral_characters(&self) -> Result<Vec<IrrepData>> {
        let n = self.conductor();
        let chain = self.chain(3);
        let v = self.defining_character();
        // The commutator subgroup is Q8 and T/Q8 is cyclic of order 3, generated by γ.
        let comms: Vec<GroupElement> = self
            .elements
            .iter()
            .flat_map(|a| self.elements.iter().map(move |b| a.mul(b).mul(&a.inverse()).mul(&b.inverse())))
            .collect();
        let normal = self.subgroup_mask(&comms);
        let gamma = &self.generators[2];
        let gamma_inv = gamma.inverse();
        let mut lin = vec![CycloNum::zero(n); self.order()];
        for (x, g) in self.elements.iter().enumerate() {
            let mut y = g.clone();
            let mut m = 0i64;
            while !normal[self.find(&y)] {
                y = gamma_inv.mul(&y);
                m += 1;
                if m > 2 {
                    return Err(Error::Domain("T/[T,T] is not of order 3".into()));
                }
            }
            lin[x] = z(3, m).embed_into(n).expect("24");
        }
        let four_plus = self.character_from_values(&lin);
        let four_minus: Vec<CycloNum> = four_plus.iter().map(CycloNum::conj).collect();
        let three_plus = Self::prod(&v, &four_plus);
        let three_minus = Self::prod(&v, &four_minus);
        Ok(vec![
            self.character_irrep("0", chain[0].clone()),
            self.character_irrep("1", chain[1].clone()),
            self.character_irrep("2", chain[2].clone()),
            self.character_irrep("3+", three_plus),
            self.character_irrep("3-", three_minus),
            self.character_irrep("4+", four_plus),
            self.character_irrep("4-", four_minus),
        ])
    }

    fn octahedral_characters(&self) -> Result<Vec<IrrepData>> {
        let n = self.conductor();
        let chain = self.chain(4);
        let v = self.defining_character();
        // Generators are [i, j, δ, γ]; the tetrahedral subgroup is generated by i, j, γ.
        let t_gens = [self.generators[0].clone(), self.generators[1].clone(), self.generators[3].clone()];
        let in_t = self.subgroup_mask(&t_gens);
        let sign_el: Vec<CycloNum> = in_t.iter().map(|&b| CycloNum::from_int(n, if b { 1 } else { -1 })).collect();
        let six = self.character_from_values(&sign_el);
        let five = Self::prod(&six, &v);
        let four_plus = Self::minus(&Self::prod(&five, &v), &six);
        let four_minus = Self::minus(&Self::minus(&Self::prod(&chain[3], &v), &chain[2]), &four_plus);
        Ok(vec![
            self.character_irrep("0", chain[0].clone()),
            self.character_irrep("1", chain[1].clone()),
            self.character_irrep("2", chain[2].clone()),
            self.character_irrep("3", chain[3].clone()),
            self.character_irrep("4+", four_plus),
            self.character_irrep("4-", four_minus),
            self.character_irrep("5", five),
            self.character_irrep("6", six),
        ])
    }

    fn icosahedral_characters(&self) -> Result<Vec<IrrepData>> {
        let chain = self.chain(6);
        let v = self.defining_character();
        // √5 ↦ −√5 is realized by ζ_20 ↦ ζ_20^17.
        let seven: Vec<CycloNum> = v.iter().map(|x| x.galois(17)).collect();
        let six_plus = Self::prod(&seven, &v);
        let six_minus = Self::minus(&Self::minus(&Self::prod(&chain[5], &v), &chain[4]), &six_plus);
        let mut out: Vec<IrrepData> =
            chain.iter().enumerate().map(|(j, ch)| self.character_irrep(&j.to_string(), ch.clone())).collect();
        out.push(self.character_irrep("6+", six_plus));
        out.push(self.character_irrep("6-", six_minus));
        out.push(self.character_irrep("7", seven));
        Ok(out)
    }

    /// ⟨χ_a, χ_b⟩ = |G|⁻¹ Σ_g χ_a(g) conj(χ_b(g)).
    pub fn inner_product(&self, a: &[CycloNum], b: &[CycloNum]) -> CycloNum {
        let n = self.conductor();
        let mut acc = CycloNum::zero(n);
        for (ci, members) in self.classes.iter().enumerate() {
            let term = &(&a[ci] * &b[ci].conj()) * &CycloNum::from_int(n, members.len() as i64);
            acc += &term;
        }
        &acc * &CycloNum::from_ratio(1, 1, self.order() as i64)
    }

    pub fn irrep(&self, label: &str) -> Result<&IrrepData> {
        self.irreps
            .iter()
            .find(|r| r.label == label)
            .ok_or_else(|| Error::Domain(format!("{} has no irreducible representation labelled {label:?}", self.spec)))
    }

    /// Character of V ⊗ G^λ decomposed into irreducibles: label ↦ multiplicity.
    pub fn tensor_with_v(&self, label: &str) -> Result<Vec<(String, i64)>> {
        let v = self.defining_character();
        let prod = Self::prod(&self.irrep(label)?.character, &v);
        let mut out = Vec::new();
        for r in &self.irreps {
            let m = self.inner_product(&prod, &r.character);
            let m = m
                .to_rational()
                .filter(|q| q.is_integer())
                .and_then(|q| num_traits::ToPrimitive::to_i64(&q.to_integer()))
                .ok_or_else(|| Error::Domain(format!("non-integral multiplicity {m}")))?;
            if m != 0 {
                out.push((r.label.clone(), m));
            }
        }
        Ok(out)
    }

    /// Row-orthonormality of the character table, checked exactly.
    pub fn characters_orthonormal(&self) -> bool {
        self.irreps.len() == self.classes.len()
            && self.irreps.iter().enumerate().all(|(i, a)| {
                self.irreps.iter().enumerate().all(|(j, b)| {
                    let ip = self.inner_product(&a.character, &b.character);
                    if i == j {
                        ip.is_one()
                    } else {
                        ip.is_zero()
                    }
                })
            })
    }

    /// Per-element character values of an irrep.
    pub fn character_on_elements(&self, label: &str) -> Result<Vec<CycloNum>> {
        Ok(self.expand(&self.irrep(label)?.character))
    }
}

/// Cached group data for a finite family.
pub fn finite_group(spec: &SubgroupSpec) -> Result<Arc<FiniteGroup>> {
    static CACHE: OnceLock<Mutex<HashMap<SubgroupSpec, Arc<FiniteGroup>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().expect("group cache").get(spec) {
        return Ok(g.clone());
    }
    let g = Arc::new(FiniteGroup::build(*spec)?);
    cache.lock().expect("group cache").insert(*spec, g.clone());
    Ok(g)
}

pub fn enumerate_elements(spec: &SubgroupSpec) -> Result<Vec<GroupElement>> {
    Ok(finite_group(spec)?.elements.clone())
}

pub fn irreps(spec: &SubgroupSpec) -> Result<Vec<IrrepData>> {
    Ok(finite_group(spec)?.irreps.clone())
}

/// f_β = (d^β/|G|) Σ_g conj(χ_β(g)) g^⊗k, the isotypic projector of V^⊗k.
pub fn character_projector(spec: &SubgroupSpec, label: &str, k: usize) -> Result<SparseEndo> {
    let g = finite_group(spec)?;
    let irrep = g.irrep(label)?;
    let n = g.conductor();
    let mut acc = SparseEndo::zero(k, n);
    for (ci, members) in g.classes.iter().enumerate() {
        let coef = irrep.character[ci].conj();
        if coef.is_zero() {
            continue;
        }
        let mut class_sum = SparseEndo::zero(k, n);
        for &x in members {
            class_sum = class_sum.add(&group_action(&g.elements[x].matrix, k));
        }
        acc = acc.add(&class_sum.scale(&coef));
    }
    Ok(acc.scale(&CycloNum::from_ratio(1, irrep.dim as i64, g.order() as i64)))
}

/// JSON dump of the group data.
#[derive(Serialize)]
pub struct GroupJson {
    pub family: String,
    pub order: usize,
    pub elements: Vec<Mat2Json>,
    pub irreps: Vec<IrrepData>,
}

pub type Mat2Json = Vec<Vec<CycloNum>>;

pub fn group_json(spec: &SubgroupSpec) -> Result<GroupJson> {
    let g = finite_group(spec)?;
    Ok(GroupJson {
        family: spec.to_string(),
        order: g.order(),
        elements: g.elements.iter().map(|e| e.matrix.iter().map(|r| r.to_vec()).collect()).collect(),
        irreps: g.irreps.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_membership() {
        for (sel, order) in [("C3", 3), ("C4", 4), ("D2", 8), ("D3", 12), ("T", 24), ("O", 48), ("I", 120)] {
            let spec = SubgroupSpec::parse(sel).unwrap();
            let g = finite_group(&spec).unwrap();
            assert_eq!(g.order(), order, "{sel}");
            assert!(g.elements.iter().all(GroupElement::in_su2), "{sel}");
        }
    }

    #[test]
    fn minus_one_membership() {
        let minus = |n: u32| {
            let (m, z0) = (CycloNum::from_int(n, -1), CycloNum::zero(n));
            GroupElement::new([[m.clone(), z0.clone()], [z0, m]])
        };
        for sel in ["C4", "C6", "D3", "T", "O", "I"] {
            let g = finite_group(&SubgroupSpec::parse(sel).unwrap()).unwrap();
            assert!(g.elements.contains(&minus(g.conductor())), "{sel}");
        }
        let g = finite_group(&SubgroupSpec::cyclic(5)).unwrap();
        assert!(!g.elements.contains(&minus(5)));
    }

    #[test]
    fn characters_are_orthonormal_and_dims_square_sum() {
        for sel in ["C1", "C2", "C5", "D2", "D4", "D5", "T", "O", "I"] {
            let spec = SubgroupSpec::parse(sel).unwrap();
            let g = finite_group(&spec).unwrap();
            assert!(g.characters_orthonormal(), "{sel}");
            let s: usize = g.irreps.iter().map(|r| r.dim * r.dim).sum();
            assert_eq!(s, g.order(), "{sel}");
        }
    }

    #[test]
    fn dihedral_irreps_satisfy_relations() {
        let g = finite_group(&SubgroupSpec::dihedral(4)).unwrap();
        let dims: Vec<usize> = g.irreps.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![1, 1, 2, 2, 2, 1, 1]);
        for r in &g.irreps {
            let m = r.matrices.as_ref().unwrap();
            let (gm, hm) = (&m[0], &m[1]);
            let pow = |a: &DenseMat, e: usize| (1..e).fold(a.clone(), |acc, _| dense_mul(&acc, a));
            let gn = pow(gm, 4);
            assert_eq!(pow(gm, 8), dense_mul(&gn, &gn));
            assert!(pow(gm, 8).iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, x)| x == &CycloNum::from_int(1, (i == j) as i64))));
            assert_eq!(gn, dense_mul(hm, hm));
            let h3 = pow(hm, 3);
            assert_eq!(dense_mul(&dense_mul(&h3, gm), hm), pow(gm, 7));
        }
    }

    #[test]
    fn tetrahedral_dims() {
        let mut dims: Vec<usize> = irreps(&SubgroupSpec::tetrahedral()).unwrap().iter().map(|r| r.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn projector_examples() {
        let p = character_projector(&SubgroupSpec::cyclic(2), "0", 1).unwrap();
        assert!(p.is_zero(), "V has no trivial summand for C2");
        let p = character_projector(&SubgroupSpec::cyclic(4), "1", 1).unwrap();
        assert!(p.is_idempotent());
        assert!(p.trace().is_one());
        let t = character_projector(&SubgroupSpec::tetrahedral(), "2", 2).unwrap();
        assert!(t.is_idempotent());
        assert_eq!(t.trace(), CycloNum::from_int(1, 3));
    }
}
