//! Bratteli diagrams: level sets Λ_k(G), multiplicities m_k^λ as walk counts,
//! centralizer dimensions, and the classification of edges into reflected and new.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::repgraph::RepGraph;

/// m_k^λ for k = 0..=K, indexed by graph node.
#[derive(Clone, Debug)]
pub struct MultiplicityTable {
    pub graph: RepGraph,
    pub levels: Vec<Vec<BigUint>>,
}

impl MultiplicityTable {
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn get(&self, k: usize, label: &str) -> Result<BigUint> {
        let v = self.graph.node(label)?;
        self.levels.get(k).map(|l| l[v].clone()).ok_or_else(|| Error::Domain(format!("level {k} not computed")))
    }

    /// Λ_k: nodes with m_k^λ > 0.
    pub fn support(&self, k: usize) -> Vec<usize> {
        (0..self.graph.len()).filter(|&v| !self.levels[k][v].is_zero()).collect()
    }

    /// Nonzero multiplicities at level k, keyed by label.
    pub fn level_map(&self, k: usize) -> BTreeMap<String, BigUint> {
        self.support(k).into_iter().map(|v| (self.graph.labels[v].clone(), self.levels[k][v].clone())).collect()
    }

    /// Σ_λ (m_k^λ)².
    pub fn sum_of_squares(&self, k: usize) -> BigUint {
        self.levels[k].iter().map(|m| m * m).sum()
    }

    /// Σ_λ d^λ m_k^λ.
    pub fn weighted_sum(&self, k: usize) -> BigUint {
        self.levels[k].iter().zip(&self.graph.dims).map(|(m, d)| m * BigUint::from(*d)).sum()
    }

    pub fn to_json(&self, k: usize) -> BratteliJson {
        BratteliJson {
            group: self.graph.spec.to_string(),
            k,
            multiplicities: self.level_map(k).into_iter().map(|(l, m)| (l, m.to_string())).collect(),
            dim: self.sum_of_squares(k).to_string(),
        }
    }
}

/// CLI-facing level summary; big integers are written as decimal strings.
#[derive(Clone, Debug, Serialize)]
pub struct BratteliJson {
    pub group: String,
    pub k: usize,
    pub multiplicities: BTreeMap<String, String>,
    pub dim: String,
}

fn walk_levels(graph: &RepGraph, k_max: usize) -> Vec<Vec<BigUint>> {
    let n = graph.len();
    let mut cur = vec![BigUint::zero(); n];
    cur[graph.trivial_node()] = BigUint::one();
    let mut levels = vec![cur];
    for _ in 0..k_max {
        let prev = levels.last().expect("nonempty");
        let mut next = vec![BigUint::zero(); n];
        for (v, m) in prev.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for (u, a) in graph.neighbors(v) {
                next[u] += m * BigUint::from(a);
            }
        }
        levels.push(next);
    }
    levels
}

fn check_depth(graph: &RepGraph, needed: usize) -> Result<()> {
    match graph.truncation {
        Some(depth) if depth < needed => Err(Error::Domain(format!(
            "truncation depth {depth} of {} is below the required {needed}",
            graph.spec
        ))),
        _ => Ok(()),
    }
}

/// m_k^λ = number of length-k walks from 0 to λ, for k = 0..=K.
pub fn multiplicities(graph: &RepGraph, k_max: usize) -> Result<MultiplicityTable> {
    check_depth(graph, k_max)?;
    Ok(MultiplicityTable { graph: graph.clone(), levels: walk_levels(graph, k_max) })
}

/// dim Z_k(G) = m_{2k}^0, cross-checked against Σ_λ (m_k^λ)².
pub fn dim_centralizer_walks(graph: &RepGraph, k: usize) -> Result<BigUint> {
    // Closed walks of length 2k never leave distance k from 0.
    check_depth(graph, k)?;
    let levels = walk_levels(graph, 2 * k);
    let closed = levels[2 * k][graph.trivial_node()].clone();
    let squares: BigUint = levels[k].iter().map(|m| m * m).sum();
    if closed != squares {
        return Err(Error::Domain(format!("closed walks {closed} differ from the sum of squares {squares}")));
    }
    Ok(closed)
}

#[derive(Clone, Debug, Serialize)]
pub struct BimoduleReport {
    pub k: usize,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// 2^k = Σ_{λ∈Λ_k} d^λ m_k^λ.
pub fn bimodule_identity_check(graph: &RepGraph, k: usize) -> Result<BimoduleReport> {
    let table = multiplicities(graph, k)?;
    let lhs = BigUint::one() << k;
    let rhs = table.weighted_sum(k);
    Ok(BimoduleReport { k, lhs: lhs.to_string(), rhs: rhs.to_string(), holds: lhs == rhs })
}

/// A Bratteli edge from λ at level k to μ at level k+1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BratteliEdge {
    pub from: String,
    pub to: String,
    pub multiplicity: u32,
}

/// Edges between levels k and k+1, split by whether μ already appears at level k−1.
#[derive(Clone, Debug, Serialize)]
pub struct LevelEdges {
    pub k: usize,
    pub reflected: Vec<BratteliEdge>,
    pub new: Vec<BratteliEdge>,
}

/// Classification of all edges between consecutive levels 0..=K.
pub fn classify_edges(graph: &RepGraph, k_max: usize) -> Result<Vec<LevelEdges>> {
    let table = multiplicities(graph, k_max)?;
    let mut out = Vec::new();
    for k in 0..k_max {
        let before: BTreeSet<usize> = if k == 0 { BTreeSet::new() } else { table.support(k - 1).into_iter().collect() };
        let next: BTreeSet<usize> = table.support(k + 1).into_iter().collect();
        let mut level = LevelEdges { k, reflected: Vec::new(), new: Vec::new() };
        for v in table.support(k) {
            for (u, a) in graph.neighbors(v) {
                if !next.contains(&u) {
                    continue;
                }
                let e = BratteliEdge { from: graph.labels[v].clone(), to: graph.labels[u].clone(), multiplicity: a };
                if before.contains(&u) {
                    level.reflected.push(e);
                } else {
                    level.new.push(e);
                }
            }
        }
        out.push(level);
    }
    Ok(out)
}

/// Undirected label pairs of all new edges, with multiplicities.
pub fn new_edge_union(levels: &[LevelEdges]) -> BTreeMap<(String, String), u32> {
    let mut out = BTreeMap::new();
    for l in levels {
        for e in &l.new {
            let key = if e.from <= e.to { (e.from.clone(), e.to.clone()) } else { (e.to.clone(), e.from.clone()) };
            out.insert(key, e.multiplicity);
        }
    }
    out
}

/// True when the new edges reassemble exactly the edges of the representation graph.
pub fn new_edges_rebuild_graph(graph: &RepGraph, levels: &[LevelEdges]) -> bool {
    let union = new_edge_union(levels);
    let edges: BTreeMap<(String, String), u32> = graph
        .edges()
        .into_iter()
        .map(|(a, b, m)| {
            let (x, y) = (graph.labels[a].clone(), graph.labels[b].clone());
            (if x <= y { (x, y) } else { (y, x) }, if a == b { m / 2 } else { m })
        })
        .collect();
    union == edges
}

/// DOT rendering of levels 0..=K with ranks per level; new edges are highlighted.
pub fn to_dot(graph: &RepGraph, k_max: usize) -> Result<String> {
    let table = multiplicities(graph, k_max)?;
    let classes = classify_edges(graph, k_max)?;
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"bratteli_{}\" {{\n  rankdir=TB;", graph.spec);
    for k in 0..=k_max {
        let _ = write!(out, "  {{ rank=same;");
        for v in table.support(k) {
            let _ = write!(out, " \"{k}:{}\" [label=\"{}\", xlabel=\"{}\"];", graph.labels[v], graph.labels[v], table.levels[k][v]);
        }
        out.push_str(" }\n");
    }
    for level in &classes {
        for (edges, attrs) in [(&level.reflected, ""), (&level.new, " color=red penwidth=2 highlight=true")] {
            for e in edges {
                let _ = writeln!(
                    out,
                    "  \"{}:{}\" -> \"{}:{}\" [multiplicity={}{attrs}];",
                    level.k,
                    e.from,
                    level.k + 1,
                    e.to,
                    e.multiplicity
                );
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::SubgroupSpec;
    use crate::repgraph::build_graph;

    fn graph(sel: &str) -> RepGraph {
        build_graph(&SubgroupSpec::parse(sel).unwrap(), None).unwrap()
    }

    #[test]
    fn su2_levels() {
        let g = build_graph(&SubgroupSpec::su2(), Some(8)).unwrap();
        let t = multiplicities(&g, 4).unwrap();
        let m = |l: &str| t.get(4, l).unwrap();
        assert_eq!((m("0"), m("2"), m("4")), (2u32.into(), 3u32.into(), 1u32.into()));
        assert_eq!(dim_centralizer_walks(&g, 3).unwrap(), 5u32.into());
    }

    #[test]
    fn cyclic_example() {
        let g = graph("C8");
        let t = multiplicities(&g, 6).unwrap();
        let m: Vec<BigUint> = ["0", "2", "4", "6"].iter().map(|l| t.get(6, l).unwrap()).collect();
        assert_eq!(m, vec![20u32.into(), 16u32.into(), 12u32.into(), 16u32.into()]);
        assert_eq!(dim_centralizer_walks(&g, 6).unwrap(), 1056u32.into());
        assert_eq!(dim_centralizer_walks(&graph("D5"), 4).unwrap(), 35u32.into());
    }

    #[test]
    fn bimodule_and_levels() {
        assert!(bimodule_identity_check(&graph("T"), 4).unwrap().holds);
        assert!(bimodule_identity_check(&graph("C3"), 5).unwrap().holds);
        assert!(bimodule_identity_check(&graph("C3"), 0).unwrap().holds);
        let o = graph("O");
        let classes = classify_edges(&o, 8).unwrap();
        assert!(new_edges_rebuild_graph(&o, &classes));
        let c5 = classify_edges(&graph("C5"), 9).unwrap();
        assert!(c5.iter().filter(|l| l.k >= 5).all(|l| l.new.is_empty()));
        let su2 = build_graph(&SubgroupSpec::su2(), Some(10)).unwrap();
        assert!(classify_edges(&su2, 10).unwrap().iter().all(|l| l.new.len() == 1));
    }
}
