//! Canonical labelling by individualization and refinement.
//!
//! The search tree is the usual one: refine an ordered partition to an
//! equitable one, branch on the first smallest nontrivial cell, and keep
//! the smallest adjacency certificate among the leaves. Vertices of the
//! branching cell that are twins of one another yield identical subtrees,
//! so only one per twin group is explored. There is no automorphism
//! pruning beyond that; a node budget keeps pathological inputs bounded.

use super::{GraphError, LoopedGraph, SimpleGraph};

pub const DEFAULT_ISO_BUDGET: u64 = 1_000_000;

/// Canonical form of a looped graph. Two graphs are isomorphic iff their
/// forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    n: usize,
    cert: Vec<u64>,
    /// `labelling[v]` is the canonical position of input vertex `v`.
    labelling: Vec<usize>,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labelling(&self) -> &[usize] {
        &self.labelling
    }

    /// Certificate only; ignores which labelling produced it.
    pub fn key(&self) -> (usize, &[u64]) {
        (self.n, &self.cert)
    }
}

type Partition = Vec<Vec<usize>>;

fn adjacent(g: &LoopedGraph, u: usize, v: usize) -> bool {
    if u == v {
        g.is_looped(u)
    } else {
        g.has_edge(u, v)
    }
}

/// Refines to the coarsest equitable partition below `part`. Cells split
/// by neighbour count into a splitter, in increasing count order, which is
/// invariant under relabelling.
fn refine(g: &LoopedGraph, part: &mut Partition) {
    let mut changed = true;
    while changed {
        changed = false;
        let mut s = 0;
        while s < part.len() {
            let splitter = part[s].clone();
            let mut next: Partition = Vec::with_capacity(part.len());
            let mut split_any = false;
            for cell in part.drain(..) {
                if cell.len() == 1 {
                    next.push(cell);
                    continue;
                }
                let mut keyed: Vec<(usize, usize)> = cell
                    .iter()
                    .map(|&v| {
                        (
                            splitter
                                .iter()
                                .filter(|&&w| w != v && g.has_edge(v, w))
                                .count(),
                            v,
                        )
                    })
                    .collect();
                keyed.sort_unstable();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                        start = i;
                    }
                }
                if next.last().map(Vec::len) != Some(cell.len()) {
                    split_any = true;
                }
            }
            *part = next;
            if split_any {
                changed = true;
            }
            s += 1;
        }
    }
}

fn certificate(g: &LoopedGraph, order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut bits = Vec::with_capacity((n * (n + 1) / 2).div_ceil(64));
    let mut word = 0u64;
    let mut count = 0;
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i..] {
            word = (word << 1) | u64::from(adjacent(g, u, v));
            count += 1;
            if count == 64 {
                bits.push(word);
                word = 0;
                count = 0;
            }
        }
    }
    if count > 0 {
        bits.push(word << (64 - count));
    }
    bits
}

fn are_twins(g: &LoopedGraph, u: usize, v: usize) -> bool {
    if g.is_looped(u) != g.is_looped(v) {
        return false;
    }
    (0..g.n())
        .filter(|&x| x != u && x != v)
        .all(|x| g.has_edge(u, x) == g.has_edge(v, x))
}

struct Search<'a> {
    g: &'a LoopedGraph,
    best: Option<(Vec<u64>, Vec<usize>)>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn descend(&mut self, part: Partition) -> Result<(), GraphError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GraphError::BudgetExhausted(self.budget));
        }
        let target = part
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i);
        let Some(t) = target else {
            let order: Vec<usize> = part.into_iter().map(|c| c[0]).collect();
            let cert = certificate(self.g, &order);
            if self.best.as_ref().is_none_or(|(b, _)| cert < *b) {
                self.best = Some((cert, order));
            }
            return Ok(());
        };
        let cell = &part[t];
        let mut tried: Vec<usize> = Vec::new();
        for &v in cell {
            if tried.iter().any(|&u| are_twins(self.g, u, v)) {
                continue;
            }
            tried.push(v);
            let mut next: Partition = Vec::with_capacity(part.len() + 1);
            next.extend(part[..t].iter().cloned());
            next.push(vec![v]);
            next.push(cell.iter().copied().filter(|&u| u != v).collect());
            next.extend(part[t + 1..].iter().cloned());
            refine(self.g, &mut next);
            self.descend(next)?;
        }
        Ok(())
    }
}

pub fn canonical_form(g: &LoopedGraph, budget: u64) -> Result<CanonicalForm, GraphError> {
    let n = g.n();
    let nonlooped: Vec<usize> = (0..n).filter(|&v| !g.is_looped(v)).collect();
    let looped: Vec<usize> = (0..n).filter(|&v| g.is_looped(v)).collect();
    let mut part: Partition = [nonlooped, looped]
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect();
    refine(g, &mut part);
    let mut search = Search {
        g,
        best: None,
        nodes: 0,
        budget,
    };
    search.descend(part)?;
    let (cert, order) = search.best.unwrap_or_default();
    let mut labelling = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        labelling[v] = pos;
    }
    Ok(CanonicalForm { n, cert, labelling })
}

pub fn are_isomorphic(g: &LoopedGraph, h: &LoopedGraph, budget: u64) -> Result<bool, GraphError> {
    if g.n() != h.n() || g.loops().count_ones(..) != h.loops().count_ones(..) {
        return Ok(false);
    }
    let mut dg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..h.n()).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return Ok(false);
    }
    Ok(canonical_form(g, budget)?.key() == canonical_form(h, budget)?.key())
}

/// graph6 string of the canonically relabelled graph.
pub fn canonical_graph6(g: &SimpleGraph) -> Result<String, GraphError> {
    let cf = canonical_form(&g.to_looped(), DEFAULT_ISO_BUDGET)?;
    Ok(g.permute(cf.labelling()).to_graph6())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::graphs::tests::random_looped;

    #[test]
    fn relabelling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..14 {
            for _ in 0..20 {
                let g = random_looped(n, &mut rng);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let h = g.permute(&perm);
                assert!(are_isomorphic(&g, &h, DEFAULT_ISO_BUDGET).unwrap());
                let cg = canonical_form(&g, DEFAULT_ISO_BUDGET).unwrap();
                assert_eq!(
                    g.permute(cg.labelling()),
                    h.permute(canonical_form(&h, DEFAULT_ISO_BUDGET).unwrap().labelling())
                );
            }
        }
    }

    #[test]
    fn distinguishes() {
        let k3 = SimpleGraph::complete(3).to_looped();
        let p3 = SimpleGraph::path(3).to_looped();
        assert!(!are_isomorphic(&k3, &p3, DEFAULT_ISO_BUDGET).unwrap());
        // same degree sequence: C_6 vs 2 C_3
        let c6 = SimpleGraph::cycle(6).to_looped();
        let two_c3 = SimpleGraph::cycle(3)
            .disjoint_union(&SimpleGraph::cycle(3))
            .to_looped();
        assert!(!are_isomorphic(&c6, &two_c3, DEFAULT_ISO_BUDGET).unwrap());
        // loops matter
        let mut a = LoopedGraph::from_parts(2, &[0], &[(0, 1)]).unwrap();
        let b = LoopedGraph::from_parts(2, &[1], &[(0, 1)]).unwrap();
        assert!(are_isomorphic(&a, &b, DEFAULT_ISO_BUDGET).unwrap());
        a.set_loop(1, true);
        assert!(!are_isomorphic(&a, &b, DEFAULT_ISO_BUDGET).unwrap());
    }

    #[test]
    fn symmetric_graphs_stay_cheap() {
        let k = SimpleGraph::complete(30).to_looped();
        assert!(canonical_form(&k, 1_000).is_ok());
        let m = SimpleGraph::complete_multipartite(&[10, 10, 10, 10]).to_looped();
        assert!(canonical_form(&m, 1_000).is_ok());
    }

    #[test]
    fn budget_is_reported() {
        let c = SimpleGraph::cycle(12).to_looped();
        assert_eq!(canonical_form(&c, 3), Err(GraphError::BudgetExhausted(3)));
    }
}
