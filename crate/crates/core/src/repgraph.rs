//! Representation graphs R_V(G): the affine Dynkin diagrams of the McKay
//! correspondence, with node dimensions, branch node, diameter and Cartan matrix.

use std::collections::VecDeque;
use std::fmt::Write as _;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{finite_group, n_tilde, Family, SubgroupSpec};

/// Nodes Λ(G) with dimensions d^λ and symmetric edge multiplicities a_{λ,μ}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepGraph {
    pub spec: SubgroupSpec,
    pub labels: Vec<String>,
    pub dims: Vec<u64>,
    pub adj: Vec<Vec<u32>>,
    /// Depth bound for the infinite families (and SU₂).
    pub truncation: Option<usize>,
}

impl RepGraph {
    fn from_edges(spec: SubgroupSpec, labels: Vec<String>, dims: Vec<u64>, edges: &[(usize, usize)], truncation: Option<usize>) -> Self {
        let n = labels.len();
        let mut adj = vec![vec![0u32; n]; n];
        for &(a, b) in edges {
            if a == b {
                adj[a][a] += 2;
            } else {
                adj[a][b] += 1;
                adj[b][a] += 1;
            }
        }
        RepGraph { spec, labels, dims, adj, truncation }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn node(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::Domain(format!("{} has no node {label:?}", self.spec)))
    }

    /// Index of the trivial node 0.
    pub fn trivial_node(&self) -> usize {
        self.index_of("0").expect("every graph has node 0")
    }

    /// Index of the node of the defining module V.
    pub fn defining_node(&self) -> usize {
        self.index_of("1").unwrap_or_else(|| self.trivial_node())
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.adj[v].iter().enumerate().filter(|(_, &a)| a > 0).map(|(u, &a)| (u, a))
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].iter().sum()
    }

    /// Edges (λ, μ, a_{λ,μ}) with λ ≤ μ.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        (0..self.len())
            .flat_map(|a| (a..self.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adj[a][b] > 0).map(|(a, b)| (a, b, self.adj[a][b]))
            .collect()
    }

    /// Breadth-first distances from node 0.
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let start = self.trivial_node();
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].expect("visited");
            for (u, _) in self.neighbors(v) {
                if dist[u].is_none() {
                    dist[u] = Some(dv + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances().iter().all(Option::is_some)
    }

    /// Largest graph distance from node 0 within the (possibly truncated) graph.
    pub fn max_distance_from_trivial(&self) -> usize {
        self.distances().into_iter().flatten().max().unwrap_or(0)
    }

    /// c_{λ,μ} = 2δ_{λ,μ} − a_{λ,μ}.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.len())
            .map(|a| (0..self.len()).map(|b| 2 * (a == b) as i64 - self.adj[a][b] as i64).collect())
            .collect()
    }

    /// Σ_μ a_{λ,μ} d^μ = 2 d^λ for every node (nodes on a truncation boundary excepted).
    pub fn dimension_vector_in_cartan_kernel(&self) -> bool {
        let boundary = self.boundary_nodes();
        (0..self.len()).filter(|v| !boundary.contains(v)).all(|v| {
            let s: u64 = self.neighbors(v).map(|(u, a)| a as u64 * self.dims[u]).sum();
            s == 2 * self.dims[v]
        })
    }

    fn boundary_nodes(&self) -> Vec<usize> {
        match self.truncation {
            None => Vec::new(),
            Some(depth) => {
                let dist = self.distances();
                (0..self.len()).filter(|&v| dist[v] == Some(depth)).collect()
            }
        }
    }

    /// Name of the affine Dynkin type of a finite family.
    pub fn affine_type(&self) -> Option<String> {
        match self.spec.family {
            Family::Cyclic(n) => Some(format!("A~{}", n - 1)),
            Family::BinaryDihedral(n) => Some(format!("D~{}", n + 2)),
            Family::BinaryTetrahedral => Some("E~6".into()),
            Family::BinaryOctahedral => Some("E~7".into()),
            Family::BinaryIcosahedral => Some("E~8".into()),
            _ => None,
        }
    }

    /// Graph isomorphism (ignoring labels) with the affine Dynkin diagram of the
    /// matching type, built independently from its arm structure.
    pub fn matches_affine_type(&self) -> Option<bool> {
        let reference = affine_dynkin_adjacency(&self.spec)?;
        Some(isomorphic(&self.adj, &reference))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", self.spec);
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{l}\", dim={}, xlabel=\"{}\"];", self.dims[i], self.dims[i]);
        }
        for (a, b, m) in self.edges() {
            let _ = writeln!(out, "  n{a} -- n{b} [multiplicity={m}];");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            group: self.spec.to_string(),
            nodes: self.labels.iter().zip(&self.dims).map(|(l, d)| NodeJson { label: l.clone(), dim: *d }).collect(),
            edges: self.edges().into_iter().map(|(a, b, m)| (self.labels[a].clone(), self.labels[b].clone(), m)).collect(),
            branch_node: branch_and_diameter(self).0,
            diameter: branch_and_diameter(self).1,
            truncation: self.truncation,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeJson {
    pub label: String,
    pub dim: u64,
}

/// JSON adjacency dump.
#[derive(Clone, Debug, Serialize)]
pub struct GraphJson {
    pub group: String,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<(String, String, u32)>,
    pub branch_node: Option<String>,
    /// `None` encodes ∞.
    pub diameter: Option<usize>,
    pub truncation: Option<usize>,
}

fn labelled(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// The representation graph of `spec`; infinite families and SU₂ need a depth.
pub fn build_graph(spec: &SubgroupSpec, truncation: Option<usize>) -> Result<RepGraph> {
    let s = *spec;
    let need_depth = || truncation.ok_or_else(|| Error::MissingTruncation(spec.to_string()));
    Ok(match spec.family {
        Family::Cyclic(n) => {
            let n = n as usize;
            let labels = (0..n).map(|l| l.to_string()).collect();
            let edges: Vec<(usize, usize)> = (0..n).map(|l| (l, (l + 1) % n)).collect();
            RepGraph::from_edges(s, labels, vec![1; n], &edges, None)
        }
        Family::BinaryDihedral(n) => {
            let n = n as usize;
            // Order: 0, 0', 1, …, n−1, n, n'.
            let mut labels = labelled(&["0", "0'"]);
            labels.extend((1..n).map(|l| l.to_string()));
            labels.push(n.to_string());
            labels.push(format!("{n}'"));
            let mut dims = vec![1, 1];
            dims.extend(std::iter::repeat_n(2, n - 1));
            dims.extend([1, 1]);
            let last = n; // index of node n−1
            let mut edges = vec![(0, 2), (1, 2)];
            edges.extend((2..last).map(|i| (i, i + 1)));
            edges.push((last, n + 1));
            edges.push((last, n + 2));
            RepGraph::from_edges(s, labels, dims, &edges, None)
        }
        Family::BinaryTetrahedral => {
            let labels = labelled(&["0", "1", "2", "3+", "3-", "4+", "4-"]);
            let edges = [(0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (4, 6)];
            RepGraph::from_edges(s, labels, vec![1, 2, 3, 2, 2, 1, 1], &edges, None)
        }
        Family::BinaryOctahedral => {
            let labels = labelled(&["0", "1", "2", "3", "4+", "4-", "5", "6"]);
            let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (4, 6), (6, 7)];
            RepGraph::from_edges(s, labels, vec![1, 2, 3, 4, 3, 2, 2, 1], &edges, None)
        }
        Family::BinaryIcosahedral => {
            let labels = labelled(&["0", "1", "2", "3", "4", "5", "6+", "6-", "7"]);
            let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (5, 7), (6, 8)];
            RepGraph::from_edges(s, labels, vec![1, 2, 3, 4, 5, 6, 4, 3, 2], &edges, None)
        }
        Family::SpecialUnitary => {
            let depth = need_depth()?;
            let labels = (0..=depth).map(|l| l.to_string()).collect();
            let dims = (0..=depth as u64).map(|l| l + 1).collect();
            let edges: Vec<(usize, usize)> = (0..depth).map(|l| (l, l + 1)).collect();
            RepGraph::from_edges(s, labels, dims, &edges, Some(depth))
        }
        Family::CyclicInfinite => {
            let depth = need_depth()? as i64;
            // Order: 0, 1, −1, 2, −2, …
            let ells: Vec<i64> = std::iter::once(0).chain((1..=depth).flat_map(|l| [l, -l])).collect();
            let pos = |l: i64| ells.iter().position(|&x| x == l).expect("in range");
            let labels = ells.iter().map(|l| l.to_string()).collect();
            let edges: Vec<(usize, usize)> = (-depth..depth).map(|l| (pos(l), pos(l + 1))).collect();
            RepGraph::from_edges(s, labels, vec![1; ells.len()], &edges, Some(depth as usize))
        }
        Family::BinaryDihedralInfinite => {
            let depth = need_depth()?.max(1);
            let mut labels = labelled(&["0", "0'"]);
            labels.extend((1..=depth).map(|l| l.to_string()));
            let mut dims = vec![1, 1];
            dims.extend(std::iter::repeat_n(2, depth));
            let mut edges = vec![(0, 2), (1, 2)];
            edges.extend((2..depth + 1).map(|i| (i, i + 1)));
            RepGraph::from_edges(s, labels, dims, &edges, Some(depth))
        }
    })
}

/// (branch node label, diameter) with `None` meaning none and ∞ respectively.
pub fn branch_and_diameter(graph: &RepGraph) -> (Option<String>, Option<usize>) {
    match graph.spec.family {
        Family::SpecialUnitary => (None, None),
        Family::Cyclic(n) => (Some("0".into()), Some(n_tilde(n) as usize)),
        Family::CyclicInfinite => (Some("0".into()), None),
        Family::BinaryDihedralInfinite => (Some("1".into()), None),
        _ => {
            // The branch node nearest to 0 (for D_n with n > 2 there are two).
            let dist = graph.distances();
            let br = (0..graph.len())
                .filter(|&v| graph.neighbors(v).count() > 2)
                .min_by_key(|&v| dist[v])
                .map(|v| graph.labels[v].clone());
            (br, Some(graph.max_distance_from_trivial()))
        }
    }
}

/// One entry of the McKay tensor-rule check.
#[derive(Clone, Debug, Serialize)]
pub struct McKayEntry {
    pub node: String,
    pub neighbor: String,
    pub graph_multiplicity: u32,
    pub character_multiplicity: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct McKayReport {
    pub group: String,
    pub dims_match: bool,
    pub entries: Vec<McKayEntry>,
}

impl McKayReport {
    pub fn all_pass(&self) -> bool {
        self.dims_match && self.entries.iter().all(|e| e.pass)
    }
}

/// Decomposes G^λ ⊗ V by exact character arithmetic and compares with a_{λ,μ}.
pub fn verify_mckay(spec: &SubgroupSpec, graph: &RepGraph) -> Result<McKayReport> {
    let g = finite_group(spec)?;
    let mut dims_match = g.irreps.len() == graph.len();
    let mut entries = Vec::new();
    for (v, label) in graph.labels.iter().enumerate() {
        let irrep = g.irrep(label)?;
        dims_match &= irrep.dim as u64 == graph.dims[v];
        let computed = g.tensor_with_v(label)?;
        for (u, other) in graph.labels.iter().enumerate() {
            let expected = graph.adj[v][u];
            let got = computed.iter().find(|(l, _)| l == other).map_or(0, |(_, m)| *m);
            if expected > 0 || got != 0 {
                entries.push(McKayEntry {
                    node: label.clone(),
                    neighbor: other.clone(),
                    graph_multiplicity: expected,
                    character_multiplicity: got,
                    pass: expected as i64 == got,
                });
            }
        }
        for (l, _) in &computed {
            if graph.index_of(l).is_none() {
                dims_match = false;
            }
        }
    }
    Ok(McKayReport { group: spec.to_string(), dims_match, entries })
}

/// Adjacency of an affine Dynkin diagram described by arm lengths around a centre,
/// or as a cycle for type Ã.
fn affine_dynkin_adjacency(spec: &SubgroupSpec) -> Option<Vec<Vec<u32>>> {
    fn star(arms: &[usize]) -> Vec<Vec<u32>> {
        let n = 1 + arms.iter().sum::<usize>();
        let mut a = vec![vec![0; n]; n];
        let mut next = 1;
        for &len in arms {
            let mut prev = 0;
            for _ in 0..len {
                a[prev][next] += 1;
                a[next][prev] += 1;
                prev = next;
                next += 1;
            }
        }
        a
    }
    Some(match spec.family {
        Family::Cyclic(n) => {
            let n = n as usize;
            let mut a = vec![vec![0; n]; n];
            for i in 0..n {
                a[i][(i + 1) % n] += 1;
                a[(i + 1) % n][i] += 1;
            }
            a
        }
        Family::BinaryDihedral(2) => star(&[1, 1, 1, 1]),
        Family::BinaryDihedral(n) => {
            // Two forks joined by a path of n − 2 edges.
            let n = n as usize;
            let nodes = n + 3;
            let mut a = vec![vec![0; nodes]; nodes];
            let mut link = |x: usize, y: usize| {
                a[x][y] += 1;
                a[y][x] += 1;
            };
            // Spine 0..=n-2, leaves n-1, n at spine 0 and n+1, n+2 at spine n-2.
            for i in 0..n - 2 {
                link(i, i + 1);
            }
            link(0, n - 1);
            link(0, n);
            link(n - 2, n + 1);
            link(n - 2, n + 2);
            a
        }
        Family::BinaryTetrahedral => star(&[2, 2, 2]),
        Family::BinaryOctahedral => star(&[1, 3, 3]),
        Family::BinaryIcosahedral => star(&[1, 2, 5]),
        _ => return None,
    })
}

/// Backtracking isomorphism test for small multigraphs.
fn isomorphic(a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    let deg = |m: &[Vec<u32>], v: usize| m[v].iter().sum::<u32>() + m[v][v];
    let sorted_degrees = |m: &[Vec<u32>]| (0..n).map(|v| deg(m, v)).sorted().collect::<Vec<_>>();
    if sorted_degrees(a) != sorted_degrees(b) {
        return false;
    }
    fn extend(a: &[Vec<u32>], b: &[Vec<u32>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let v = map.len();
        if v == a.len() {
            return true;
        }
        for w in 0..b.len() {
            if used[w] || a[v][v] != b[w][w] {
                continue;
            }
            if (0..v).all(|u| a[u][v] == b[map[u]][w]) {
                map.push(w);
                used[w] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                used[w] = false;
                map.pop();
            }
        }
        false
    }
    extend(a, b, &mut Vec::new(), &mut vec![false; n])
}
