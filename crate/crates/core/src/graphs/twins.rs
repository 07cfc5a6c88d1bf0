use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{LoopedGraph, SimpleGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassStatus {
    /// Singleton class.
    Free,
    /// Clique on at least two vertices.
    Looped,
    /// Independent set on at least two vertices.
    Nonlooped,
}

/// Partition of a simple graph into twin classes, with the quotient graph.
///
/// Quotient vertex `i` is `classes[i]`; it is looped exactly when its
/// status is [`ClassStatus::Looped`].
#[derive(Clone, Debug)]
pub struct TwinReduction {
    pub classes: Vec<Vec<usize>>,
    pub status: Vec<ClassStatus>,
    pub quotient: LoopedGraph,
    /// `class_of[v]` is the index of the class containing `v`.
    pub class_of: Vec<usize>,
}

impl TwinReduction {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// Groups vertices with equal open neighbourhoods (independent twins) or
/// equal closed neighbourhoods (true twins).
///
/// A vertex cannot have both kinds of twin, and both relations are
/// equivalences, so one pass reaches the fixpoint. Classes are ordered by
/// their smallest vertex.
pub fn twin_reduce(g: &SimpleGraph) -> TwinReduction {
    let n = g.n();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();

    let mut open: HashMap<&FixedBitSet, Vec<usize>> = HashMap::new();
    for v in 0..n {
        open.entry(g.neighbors(v)).or_default().push(v);
    }
    let closed_rows: Vec<FixedBitSet> = (0..n)
        .map(|v| {
            let mut r = g.neighbors(v).clone();
            r.insert(v);
            r
        })
        .collect();
    let mut closed: HashMap<&FixedBitSet, Vec<usize>> = HashMap::new();
    for (v, row) in closed_rows.iter().enumerate() {
        closed.entry(row).or_default().push(v);
    }

    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let a = &open[g.neighbors(v)];
        let b = &closed[&closed_rows[v]];
        let members = if a.len() >= b.len() { a } else { b };
        let idx = classes.len();
        for &u in members {
            class_of[u] = idx;
        }
        classes.push(members.clone());
    }

    let status: Vec<ClassStatus> = classes
        .iter()
        .map(|c| match c.as_slice() {
            [_] => ClassStatus::Free,
            [a, b, ..] if g.has_edge(*a, *b) => ClassStatus::Looped,
            _ => ClassStatus::Nonlooped,
        })
        .collect();

    let m = classes.len();
    let mut quotient = LoopedGraph::new(m);
    for i in 0..m {
        quotient.set_loop(i, status[i] == ClassStatus::Looped);
        for j in i + 1..m {
            if g.has_edge(classes[i][0], classes[j][0]) {
                quotient.add_edge(i, j).expect("in range");
            }
        }
    }
    TwinReduction {
        classes,
        status,
        quotient,
        class_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{all_graphs_up_to, are_isomorphic, DEFAULT_ISO_BUDGET};

    fn check_invariants(g: &SimpleGraph, r: &TwinReduction) {
        for (ci, c) in r.classes.iter().enumerate() {
            for &u in c {
                assert_eq!(r.class_of[u], ci);
                for &v in c {
                    if u < v {
                        assert_eq!(g.has_edge(u, v), r.status[ci] == ClassStatus::Looped);
                    }
                }
                for x in 0..g.n() {
                    if r.class_of[x] != ci {
                        assert_eq!(g.has_edge(u, x), g.has_edge(c[0], x));
                    }
                }
            }
        }
    }

    #[test]
    fn examples() {
        let r = twin_reduce(&SimpleGraph::complete_multipartite(&[2, 2, 2]));
        assert_eq!(r.classes, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        assert!(r.status.iter().all(|&s| s == ClassStatus::Nonlooped));
        assert_eq!(r.quotient.edges(), vec![(0, 1), (0, 2), (1, 2)]);

        let r = twin_reduce(&SimpleGraph::complete(5));
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.status, vec![ClassStatus::Looped]);
        assert!(r.quotient.is_looped(0));

        let r = twin_reduce(&SimpleGraph::path(4));
        assert_eq!(r.classes.len(), 4);
        assert!(r.status.iter().all(|&s| s == ClassStatus::Free));
    }

    #[test]
    fn quotient_is_reduced_and_reconstructs() {
        for g in all_graphs_up_to(6) {
            let r = twin_reduce(&g);
            check_invariants(&g, &r);

            let back = r.quotient.blowup(&r.sizes()).unwrap();
            assert!(are_isomorphic(&back.to_looped(), &g.to_looped(), DEFAULT_ISO_BUDGET).unwrap());

            // distinct quotient vertices are never twins of each other
            let q = &r.quotient;
            for i in 0..q.n() {
                for j in i + 1..q.n() {
                    let same_outside = (0..q.n())
                        .filter(|&x| x != i && x != j)
                        .all(|x| q.has_edge(i, x) == q.has_edge(j, x));
                    if !same_outside {
                        continue;
                    }
                    let si = r.status[i];
                    let sj = r.status[j];
                    let mergeable = if q.has_edge(i, j) {
                        si != ClassStatus::Nonlooped && sj != ClassStatus::Nonlooped
                    } else {
                        si != ClassStatus::Looped && sj != ClassStatus::Looped
                    };
                    assert!(!mergeable, "{g:?}: classes {i} and {j} should have merged");
                }
            }
        }
    }
}
