//! Two-row diagram calculi for Z_k(C_n) and Z_k(D_n).
//!
//! A cyclic diagram records the sign pattern of a matrix unit E_{r,s}: the top set is the
//! positions of −1 in r and the bottom set the positions of −1 in s. A dihedral diagram is a
//! set partition of {1..k, 1′..k′} into at most two blocks; it is stored as one block (its
//! top and bottom parts) with the other block implicit as the complement.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::groups::n_tilde;
use crate::tensor_endo::{neg_index, succ_order_idx, SignTuple, SparseEndo};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramFamily {
    Cyclic,
    Dihedral,
}

/// A vertex of a two-row diagram: `Top(i)` is i and `Bottom(i)` is i′.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Top(usize),
    Bottom(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Top(i) => write!(f, "{i}"),
            Vertex::Bottom(i) => write!(f, "{i}'"),
        }
    }
}

/// A diagram on two rows of k vertices. Bit i − 1 of `top` (resp. `bottom`) marks vertex i
/// (resp. i′). For the cyclic family the marked vertices carry −1. For the dihedral family
/// the marked vertices form one block, chosen so that the top tuple r satisfies r ≻ −r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoRowDiagram {
    pub family: DiagramFamily,
    pub n: u32,
    pub k: usize,
    pub top: u32,
    pub bottom: u32,
}

fn full_mask(k: usize) -> u32 {
    ((1u64 << k) - 1) as u32
}

fn mask_to_index(k: usize, mask: u32) -> usize {
    (!mask & full_mask(k)) as usize
}

fn index_to_mask(k: usize, idx: usize) -> u32 {
    !(idx as u32) & full_mask(k)
}

fn positions(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b as usize + 1).collect()
}

fn modulus(family: DiagramFamily, n: u32) -> u32 {
    match family {
        DiagramFamily::Cyclic => n_tilde(n),
        DiagramFamily::Dihedral => n,
    }
}

fn check_params(family: DiagramFamily, n: u32, k: usize) -> Result<()> {
    if k == 0 || k > 16 {
        return Err(Error::Domain(format!("diagrams need 1 ≤ k ≤ 16, got {k}")));
    }
    let min_n = if family == DiagramFamily::Dihedral { 2 } else { 1 };
    if n < min_n {
        return Err(Error::Domain(format!("n = {n} is too small for the {family:?} family")));
    }
    Ok(())
}

impl TwoRowDiagram {
    /// The diagram d_{r,s}; rejects pairs violating |r| ≡ |s| (mod ñ for C_n, mod n for D_n).
    pub fn from_pair(r: &SignTuple, s: &SignTuple, family: DiagramFamily, n: u32) -> Result<Self> {
        let k = r.k();
        if s.k() != k {
            return Err(Error::Domain(format!("tuples of lengths {k} and {} do not form a diagram", s.k())));
        }
        check_params(family, n, k)?;
        let m = modulus(family, n) as usize;
        if r.weight() % m != s.weight() % m {
            return Err(Error::Domain(format!(
                "|r| = {} and |s| = {} differ mod {m}",
                r.weight(),
                s.weight()
            )));
        }
        let d = TwoRowDiagram {
            family,
            n,
            k,
            top: index_to_mask(k, r.to_index()),
            bottom: index_to_mask(k, s.to_index()),
        };
        Ok(d.canonical())
    }

    /// Flips the dihedral block labelling so that the top tuple r satisfies r ≻ −r.
    fn canonical(self) -> Self {
        if self.family == DiagramFamily::Cyclic {
            return self;
        }
        let r = mask_to_index(self.k, self.top);
        if succ_order_idx(self.k, r, neg_index(self.k, r)).is_lt() {
            self
        } else {
            TwoRowDiagram { top: self.top ^ full_mask(self.k), bottom: self.bottom ^ full_mask(self.k), ..self }
        }
    }

    /// Sign tuples (r, s) of the diagram; for dihedral diagrams this is the ≻-canonical pair.
    pub fn pair(&self) -> (SignTuple, SignTuple) {
        (
            SignTuple::from_index(self.k, mask_to_index(self.k, self.top)),
            SignTuple::from_index(self.k, mask_to_index(self.k, self.bottom)),
        )
    }

    pub fn top_block(&self) -> Vec<usize> {
        positions(self.top)
    }

    pub fn bottom_block(&self) -> Vec<usize> {
        positions(self.bottom)
    }

    /// The nonempty blocks of the underlying set partition (dihedral family only).
    pub fn blocks(&self) -> Vec<BTreeSet<Vertex>> {
        let full = full_mask(self.k);
        let block = |t: u32, b: u32| -> BTreeSet<Vertex> {
            positions(t).into_iter().map(Vertex::Top).chain(positions(b).into_iter().map(Vertex::Bottom)).collect()
        };
        let mut out: Vec<BTreeSet<Vertex>> =
            [block(self.top, self.bottom), block(self.top ^ full, self.bottom ^ full)].into_iter().filter(|b| !b.is_empty()).collect();
        out.sort();
        out
    }

    /// Multiset of (t(B), b(B)) over the nonempty blocks, sorted.
    pub fn shape(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .blocks()
            .iter()
            .map(|b| {
                let t = b.iter().filter(|v| matches!(v, Vertex::Top(_))).count();
                (t, b.len() - t)
            })
            .collect();
        out.sort();
        out
    }

    /// d1 · d2 with d1 placed on top of d2; `None` is the zero product.
    pub fn multiply(&self, other: &TwoRowDiagram) -> Result<Option<TwoRowDiagram>> {
        if (self.family, self.n, self.k) != (other.family, other.n, other.k) {
            return Err(Error::Domain("diagrams of different families or sizes cannot be multiplied".into()));
        }
        let full = full_mask(self.k);
        let product = |bottom: u32| TwoRowDiagram { bottom, ..*self }.canonical();
        Ok(match self.family {
            DiagramFamily::Cyclic => (self.bottom == other.top).then(|| product(other.bottom)),
            DiagramFamily::Dihedral => {
                if self.bottom == other.top {
                    Some(product(other.bottom))
                } else if self.bottom == other.top ^ full {
                    // The partitions agree with the + and − labels exchanged.
                    Some(product(other.bottom ^ full))
                } else {
                    None
                }
            }
        })
    }

    /// The matrix of the diagram on V^⊗k, read off entry by entry from the vertex labelling
    /// rule: for cyclic diagrams the labelling must reproduce the marked signs, and for
    /// dihedral diagrams two vertices must carry equal signs exactly when they share a block.
    pub fn action(&self) -> SparseEndo {
        let k = self.k;
        let dim = 1usize << k;
        let mut entries = Vec::new();
        for t in 0..dim {
            for u in 0..dim {
                let labels: Vec<i8> = (0..k)
                    .map(|i| if t >> i & 1 == 1 { 1 } else { -1 })
                    .chain((0..k).map(|i| if u >> i & 1 == 1 { 1 } else { -1 }))
                    .collect();
                let marked: Vec<bool> = (0..k).map(|i| self.top >> i & 1 == 1).chain((0..k).map(|i| self.bottom >> i & 1 == 1)).collect();
                let hit = match self.family {
                    DiagramFamily::Cyclic => labels.iter().zip(&marked).all(|(&x, &m)| (x < 0) == m),
                    DiagramFamily::Dihedral => (0..2 * k).all(|a| (0..2 * k).all(|b| (labels[a] == labels[b]) == (marked[a] == marked[b]))),
                };
                if hit {
                    entries.push((t, u, CycloNum::one(1)));
                }
            }
        }
        SparseEndo::from_entries(k, 1, entries)
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson { family: self.family, n: self.n, k: self.k, top: self.top_block(), bottom: self.bottom_block() }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Self> {
        let mask = |v: &[usize]| -> Result<u32> {
            v.iter().try_fold(0u32, |acc, &i| {
                if i == 0 || i > j.k {
                    Err(Error::Parse(format!("vertex {i} is outside 1..={}", j.k)))
                } else {
                    Ok(acc | 1 << (i - 1))
                }
            })
        };
        let (top, bottom) = (mask(&j.top)?, mask(&j.bottom)?);
        let r = SignTuple::from_index(j.k, mask_to_index(j.k, top));
        let s = SignTuple::from_index(j.k, mask_to_index(j.k, bottom));
        Self::from_pair(&r, &s, j.family, j.n)
    }

    /// Two-line rendering of the vertex signs with the block listing for dihedral diagrams.
    pub fn render_ascii(&self) -> String {
        let (r, s) = self.pair();
        let row = |t: &SignTuple| t.0.iter().map(|&x| if x > 0 { "+" } else { "-" }).collect::<Vec<_>>().join(" ");
        let mut out = format!("{}\n{}\n", row(&r), row(&s));
        if self.family == DiagramFamily::Dihedral {
            let blocks: Vec<String> = self
                .blocks()
                .iter()
                .map(|b| format!("{{{}}}", b.iter().map(Vertex::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            out.push_str(&format!("{{{}}}\n", blocks.join(", ")));
        }
        out
    }
}

/// JSON form of a diagram; `top` and `bottom` list 1-based vertex numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub family: DiagramFamily,
    pub n: u32,
    pub k: usize,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

/// All canonical diagrams for Z_k(C_n) or Z_k(D_n).
pub fn enumerate_diagrams(family: DiagramFamily, n: u32, k: usize) -> Result<Vec<TwoRowDiagram>> {
    check_params(family, n, k)?;
    let m = modulus(family, n);
    let mut out = Vec::new();
    for top in 0..=full_mask(k) {
        let d = TwoRowDiagram { family, n, k, top, bottom: 0 };
        if d.canonical().top != top {
            continue;
        }
        for bottom in 0..=full_mask(k) {
            if top.count_ones() % m == bottom.count_ones() % m {
                out.push(TwoRowDiagram { bottom, ..d });
            }
        }
    }
    Ok(out)
}
