//! Simple and looped graphs.
//!
//! A [`SimpleGraph`] never has loops. A [`LoopedGraph`] keeps its loops in a
//! separate flag set so that the off-diagonal adjacency stays symmetric and
//! loop-free in both types.

mod enumerate;
mod graph6;
mod iso;
mod twins;

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{all_graphs, all_graphs_up_to};
pub use graph6::{emit_graph6, parse_graph6, parse_graph6_lines};
pub use iso::{
    are_isomorphic, canonical_form, canonical_graph6, CanonicalForm, DEFAULT_ISO_BUDGET,
};
pub use twins::{twin_reduce, ClassStatus, TwinReduction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph6: {0}")]
    Graph6(String),
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("simple graphs cannot have a loop at vertex {0}")]
    SelfLoop(usize),
    #[error("isomorphism search exceeded its budget of {0} nodes")]
    BudgetExhausted(u64),
    #[error("sizes: expected {expected} entries, got {got}")]
    SizeMismatch { expected: usize, got: usize },
}

fn empty_rows(n: usize) -> Vec<FixedBitSet> {
    (0..n).map(|_| FixedBitSet::with_capacity(n)).collect()
}

/// Undirected graph without loops or multiple edges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adj: Vec<FixedBitSet>,
}

impl std::fmt::Debug for SimpleGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SimpleGraph({}; {:?})", self.n(), self.edges())
    }
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph { adj: empty_rows(n) }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.connect(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::new(n);
        for v in 1..n {
            g.connect(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.connect(0, n - 1);
        }
        g
    }

    /// `K_{s_1, ..., s_m}`: parts are independent, everything across parts
    /// is adjacent.
    pub fn complete_multipartite(parts: &[usize]) -> Self {
        let n = parts.iter().sum();
        let mut part_of = Vec::with_capacity(n);
        for (i, &s) in parts.iter().enumerate() {
            part_of.extend(std::iter::repeat_n(i, s));
        }
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if part_of[u] != part_of[v] {
                    g.connect(u, v);
                }
            }
        }
        g
    }

    /// The 5-vertex "fullhouse": the complement of `P_3 ∪ 2K_1`.
    pub fn fullhouse() -> Self {
        Self::from_edges(
            5,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4),
            ],
        )
        .expect("valid edges")
    }

    pub fn disjoint_union(&self, other: &SimpleGraph) -> Self {
        let n = self.n();
        let mut g = Self::new(n + other.n());
        for (u, v) in self.edges() {
            g.connect(u, v);
        }
        for (u, v) in other.edges() {
            g.connect(n + u, n + v);
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.n() })
        }
    }

    fn connect(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.connect(u, v);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in self.adj[u].ones().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn is_edgeless(&self) -> bool {
        self.adj.iter().all(|r| r.is_clear())
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.adj[v].is_clear()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = FixedBitSet::with_capacity(n);
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(v) = stack.pop() {
            for w in self.adj[v].ones() {
                if !seen.put(w) {
                    stack.push(w);
                }
            }
        }
        seen.count_ones(..) == n
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.edge_count() + 1 == self.n() && self.is_connected()
    }

    /// Subgraph induced on `keep`, relabelled `0..keep.len()` in that order.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Self {
        let mut g = Self::new(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.connect(i, j);
                }
            }
        }
        g
    }

    pub fn delete_vertex(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.n()).filter(|&u| u != v).collect();
        self.induced_subgraph(&keep)
    }

    /// Loop-free complement.
    pub fn complement(&self) -> Self {
        let n = self.n();
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.connect(u, v);
                }
            }
        }
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut g = Self::new(self.n());
        for (u, v) in self.edges() {
            g.connect(perm[u], perm[v]);
        }
        g
    }

    pub fn to_looped(&self) -> LoopedGraph {
        LoopedGraph {
            adj: self.adj.clone(),
            loops: FixedBitSet::with_capacity(self.n()),
        }
    }

    pub fn to_graph6(&self) -> String {
        emit_graph6(self)
    }
}

/// Undirected graph in which every vertex is either looped or not.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LoopedGraph {
    adj: Vec<FixedBitSet>,
    loops: FixedBitSet,
}

impl std::fmt::Debug for LoopedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LoopedGraph({}; loops {:?}; {:?})",
            self.n(),
            self.looped_vertices(),
            self.edges()
        )
    }
}

/// JSON form of a looped graph: `{n, loops:[...], edges:[[i,j], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopedGraphJson {
    pub n: usize,
    pub loops: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

impl LoopedGraph {
    pub fn new(n: usize) -> Self {
        LoopedGraph {
            adj: empty_rows(n),
            loops: FixedBitSet::with_capacity(n),
        }
    }

    pub fn from_parts(
        n: usize,
        loops: &[usize],
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(n);
        for &v in loops {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { v, n });
            }
            g.set_loop(v, true);
        }
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Adds `uv`; `u == v` sets a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { v: x, n });
            }
        }
        if u == v {
            self.loops.insert(u);
        } else {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
        Ok(())
    }

    pub fn set_loop(&mut self, v: usize, looped: bool) {
        self.loops.set(v, looped);
    }

    #[inline]
    pub fn is_looped(&self, v: usize) -> bool {
        self.loops.contains(v)
    }

    /// Adjacency between distinct vertices.
    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn loops(&self) -> &FixedBitSet {
        &self.loops
    }

    pub fn looped_vertices(&self) -> Vec<usize> {
        self.loops.ones().collect()
    }

    pub fn nonlooped_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.is_looped(v)).collect()
    }

    /// Degree with a loop counted once.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..) + usize::from(self.is_looped(v))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for v in self.adj[u].ones().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    /// Complement: off-diagonal adjacency flipped, loops negated.
    pub fn complement(&self) -> Self {
        let n = self.n();
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.adj[u].insert(v);
                    g.adj[v].insert(u);
                }
            }
            g.set_loop(u, !self.is_looped(u));
        }
        g
    }

    /// The graph with its loops deleted.
    pub fn simple(&self) -> SimpleGraph {
        SimpleGraph {
            adj: self.adj.clone(),
        }
    }

    pub fn induced_subgraph(&self, keep: &[usize]) -> Self {
        let mut g = Self::new(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            g.set_loop(i, self.is_looped(u));
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.adj[i].insert(j);
                    g.adj[j].insert(i);
                }
            }
        }
        g
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut g = Self::new(self.n());
        for v in self.loops.ones() {
            g.set_loop(perm[v], true);
        }
        for (u, v) in self.edges() {
            g.adj[perm[u]].insert(perm[v]);
            g.adj[perm[v]].insert(perm[u]);
        }
        g
    }

    /// Blowup: vertex `v` becomes a clique (looped) or an independent set
    /// (nonlooped) of `sizes[v]` vertices; edges become complete bipartite
    /// joins. Vertices of part `v` come before those of part `v+1`.
    pub fn blowup(&self, sizes: &[usize]) -> Result<SimpleGraph, GraphError> {
        if sizes.len() != self.n() {
            return Err(GraphError::SizeMismatch {
                expected: self.n(),
                got: sizes.len(),
            });
        }
        let mut part = Vec::new();
        for (v, &s) in sizes.iter().enumerate() {
            part.extend(std::iter::repeat_n(v, s));
        }
        let mut g = SimpleGraph::new(part.len());
        for x in 0..part.len() {
            for y in x + 1..part.len() {
                let (a, b) = (part[x], part[y]);
                let adjacent = if a == b {
                    self.is_looped(a)
                } else {
                    self.has_edge(a, b)
                };
                if adjacent {
                    g.connect(x, y);
                }
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> LoopedGraphJson {
        LoopedGraphJson {
            n: self.n(),
            loops: self.looped_vertices(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(json: &LoopedGraphJson) -> Result<Self, GraphError> {
        let edges: Vec<(usize, usize)> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_parts(json.n, &json.loops, &edges)
    }

    /// Graphviz source; looped vertices are drawn filled, nonlooped empty.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {name} {{");
        let _ = writeln!(s, "  node [shape=circle, label=\"\", width=0.2];");
        for v in 0..self.n() {
            if self.is_looped(v) {
                let _ = writeln!(s, "  {v} [style=filled, fillcolor=black];");
            } else {
                let _ = writeln!(s, "  {v} [style=solid];");
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {u} -- {v};");
        }
        s.push_str("}\n");
        s
    }

    /// Adjacency matrix with loops on the diagonal, one row per line.
    pub fn adjacency_text(&self) -> String {
        let n = self.n();
        let mut s = String::new();
        for u in 0..n {
            let row: Vec<&str> = (0..n)
                .map(|v| {
                    let a = if u == v {
                        self.is_looped(u)
                    } else {
                        self.has_edge(u, v)
                    };
                    if a {
                        "1"
                    } else {
                        "0"
                    }
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_looped(n: usize, rng: &mut impl Rng) -> LoopedGraph {
        let mut g = LoopedGraph::new(n);
        for u in 0..n {
            g.set_loop(u, rng.gen_bool(0.5));
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn constructors() {
        assert_eq!(SimpleGraph::complete(4).edge_count(), 6);
        assert_eq!(SimpleGraph::path(4).edge_count(), 3);
        let k222 = SimpleGraph::complete_multipartite(&[2, 2, 2]);
        assert_eq!(k222.edge_count(), 12);
        assert!(!k222.has_edge(0, 1));
        assert!(k222.has_edge(0, 2));
        let fh = SimpleGraph::fullhouse();
        assert_eq!(fh.complement().edges(), vec![(0, 3), (0, 4)]);
        assert_eq!(
            SimpleGraph::from_edges(2, &[(1, 1)]).unwrap_err(),
            GraphError::SelfLoop(1)
        );
        assert!(SimpleGraph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn complement_flips_loops() {
        let mut k = LoopedGraph::new(4);
        for u in 0..4 {
            k.set_loop(u, true);
            for v in u + 1..4 {
                k.add_edge(u, v).unwrap();
            }
        }
        let c = k.complement();
        assert!(c.edges().is_empty());
        assert!(c.looped_vertices().is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..12 {
            let g = random_looped(n, &mut rng);
            assert_eq!(g.complement().complement(), g);
        }
    }

    #[test]
    fn blowup_example() {
        // looped path v1-v2-v3-v4 with v1 nonlooped; sizes 3,1,2,0
        let g = LoopedGraph::from_parts(4, &[1, 2, 3], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = g.blowup(&[3, 1, 2, 0]).unwrap();
        assert_eq!(h.n(), 6);
        assert_eq!(
            h.edges(),
            vec![(0, 3), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)]
        );
        assert!(g.blowup(&[1]).is_err());
    }

    #[test]
    fn json_and_dot() {
        let g = LoopedGraph::from_parts(3, &[0, 2], &[(0, 1), (1, 2)]).unwrap();
        let json = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(json, r#"{"n":3,"loops":[0,2],"edges":[[0,1],[1,2]]}"#);
        let back: LoopedGraphJson = serde_json::from_str(&json).unwrap();
        assert_eq!(LoopedGraph::from_json(&back).unwrap(), g);
        let dot = g.to_dot("P");
        assert!(dot.contains("0 [style=filled, fillcolor=black];"));
        assert!(dot.contains("1 [style=solid];"));
        assert!(dot.contains("1 -- 2;"));
        assert_eq!(g.adjacency_text(), "1 1 0\n1 0 1\n0 1 1\n");
    }

    #[test]
    fn permute_preserves_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_looped(9, &mut rng);
        let mut perm: Vec<usize> = (0..9).collect();
        perm.shuffle(&mut rng);
        let h = g.permute(&perm);
        for u in 0..9 {
            assert_eq!(g.is_looped(u), h.is_looped(perm[u]));
            for v in 0..9 {
                if u != v {
                    assert_eq!(g.has_edge(u, v), h.has_edge(perm[u], perm[v]));
                }
            }
        }
    }

    #[test]
    fn trees_and_connectivity() {
        assert!(SimpleGraph::path(5).is_tree());
        assert!(!SimpleGraph::cycle(5).is_tree());
        assert!(!SimpleGraph::new(2).is_connected());
        assert!(SimpleGraph::new(1).is_tree());
    }
}
