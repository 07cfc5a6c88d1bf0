//! Blowup recognition and minimum rank.
//!
//! Membership is a constraint problem on the vertices of `G`: each
//! non-isolated vertex picks a pattern vertex, and every pair of distinct
//! vertices must be adjacent exactly when their images are adjacent (or
//! coincide on a looped vertex). The search uses bitset domains, forward
//! checking, smallest-domain-first branching, and breaks the symmetry of
//! twin vertices by forcing their images to be nondecreasing.
//!
//! Classes of twins are not required to land on a single pattern vertex: a
//! clique of twins may spread over several pairwise adjacent nonlooped
//! pattern vertices, and an independent set of twins over pairwise
//! nonadjacent looped ones.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::FieldCtx;
use crate::graphs::{twin_reduce, LoopedGraph, SimpleGraph};
use crate::patterns::{generate, PatternError, PatternSet, DEFAULT_VERTEX_BUDGET};
use crate::projgeo::point_count;

/// Image of every vertex of `G`; isolated vertices map to `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupWitness {
    pub assignment: Vec<Option<usize>>,
}

impl BlowupWitness {
    /// Number of vertices of `G` sent to each pattern vertex.
    pub fn part_sizes(&self, pattern_order: usize) -> Vec<usize> {
        let mut sizes = vec![0; pattern_order];
        for p in self.assignment.iter().flatten() {
            sizes[*p] += 1;
        }
        sizes
    }
}

/// Checks the blowup definition pair by pair.
pub fn verify_witness(g: &SimpleGraph, h: &LoopedGraph, w: &BlowupWitness) -> bool {
    let n = g.n();
    if w.assignment.len() != n {
        return false;
    }
    for u in 0..n {
        match w.assignment[u] {
            None if g.degree(u) > 0 => return false,
            Some(p) if p >= h.n() => return false,
            _ => {}
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let expect = match (w.assignment[u], w.assignment[v]) {
                (Some(a), Some(b)) if a == b => h.is_looped(a),
                (Some(a), Some(b)) => h.has_edge(a, b),
                _ => false,
            };
            if g.has_edge(u, v) != expect {
                return false;
            }
        }
    }
    true
}

struct Csp<'a> {
    /// `G` without its isolated vertices; variables are its vertices.
    g: &'a SimpleGraph,
    closed: Vec<FixedBitSet>,
    open_compl: Vec<FixedBitSet>,
    /// Twin class index and position within the class, per variable.
    class: Vec<(usize, usize)>,
}

impl Csp<'_> {
    fn solve(&self, domains: &[FixedBitSet], assigned: &mut [Option<usize>]) -> bool {
        let next = (0..self.g.n())
            .filter(|&i| assigned[i].is_none())
            .min_by_key(|&i| (domains[i].count_ones(..), i));
        let Some(i) = next else {
            return true;
        };
        let candidates: Vec<usize> = domains[i].ones().collect();
        for p in candidates {
            let mut trial = domains.to_vec();
            if self.propagate(i, p, &mut trial, assigned) {
                assigned[i] = Some(p);
                if self.solve(&trial, assigned) {
                    return true;
                }
                assigned[i] = None;
            }
        }
        false
    }

    fn propagate(
        &self,
        i: usize,
        p: usize,
        domains: &mut [FixedBitSet],
        assigned: &[Option<usize>],
    ) -> bool {
        let (ci, pi) = self.class[i];
        for j in 0..self.g.n() {
            if j == i || assigned[j].is_some() {
                continue;
            }
            let d = &mut domains[j];
            if self.g.has_edge(i, j) {
                d.intersect_with(&self.closed[p]);
            } else {
                d.intersect_with(&self.open_compl[p]);
            }
            let (cj, pj) = self.class[j];
            if cj == ci {
                if pj > pi {
                    d.set_range(..p, false);
                } else {
                    d.set_range(p + 1.., false);
                }
            }
            if d.is_clear() {
                return false;
            }
        }
        true
    }
}

/// Finds a witness that `G` minus its isolated vertices is a blowup of `h`.
/// The returned witness is checked against the definition.
pub fn is_blowup(g: &SimpleGraph, h: &LoopedGraph) -> Option<BlowupWitness> {
    let vars: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    let m = h.n();
    if vars.is_empty() {
        return Some(BlowupWitness {
            assignment: vec![None; g.n()],
        });
    }
    if m == 0 {
        return None;
    }

    let core = g.induced_subgraph(&vars);
    let reduction = twin_reduce(&core);
    if reduction.classes.len() > m {
        return None;
    }
    let mut class = vec![(0, 0); vars.len()];
    for (ci, members) in reduction.classes.iter().enumerate() {
        for (pos, &v) in members.iter().enumerate() {
            class[v] = (ci, pos);
        }
    }

    let closed: Vec<FixedBitSet> = (0..m)
        .map(|p| {
            let mut s = h.neighbors(p).clone();
            s.set(p, h.is_looped(p));
            s
        })
        .collect();
    let open_compl: Vec<FixedBitSet> = closed
        .iter()
        .map(|s| {
            let mut c = s.clone();
            c.toggle_range(..);
            c
        })
        .collect();

    let csp = Csp {
        g: &core,
        closed,
        open_compl,
        class,
    };
    let domains: Vec<FixedBitSet> = (0..vars.len())
        .map(|_| {
            let mut d = FixedBitSet::with_capacity(m);
            d.insert_range(..);
            d
        })
        .collect();
    let mut assigned = vec![None; vars.len()];
    if !csp.solve(&domains, &mut assigned) {
        return None;
    }
    let mut assignment = vec![None; g.n()];
    for (i, &v) in vars.iter().enumerate() {
        assignment[v] = assigned[i];
    }
    let w = BlowupWitness { assignment };
    assert!(
        verify_witness(g, h, &w),
        "blowup search returned an invalid witness"
    );
    Some(w)
}

/// Lazily generated pattern sets for one field, shared across queries.
pub struct PatternCache {
    field: Arc<FieldCtx>,
    budget: u64,
    sets: Mutex<HashMap<usize, Arc<PatternSet>>>,
}

impl PatternCache {
    pub fn new(field: Arc<FieldCtx>, budget: u64) -> Self {
        PatternCache {
            field,
            budget,
            sets: Mutex::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn get(&self, k: usize) -> Result<Arc<PatternSet>, PatternError> {
        if let Some(ps) = self.sets.lock().expect("poisoned").get(&k) {
            return Ok(ps.clone());
        }
        let ps = Arc::new(generate(&self.field, k, self.budget)?);
        Ok(self
            .sets
            .lock()
            .expect("poisoned")
            .entry(k)
            .or_insert(ps)
            .clone())
    }
}

/// A successful membership test: the first pattern (in pattern order)
/// admitting `G` as a blowup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub k: usize,
    pub pattern: usize,
    pub witness: BlowupWitness,
}

/// Tests `G` against every pattern of order `k`.
pub fn member(
    g: &SimpleGraph,
    cache: &PatternCache,
    k: usize,
) -> Result<Option<Membership>, PatternError> {
    let ps = cache.get(k)?;
    let found: Vec<Option<BlowupWitness>> = ps
        .patterns
        .par_iter()
        .map(|p| is_blowup(g, &p.graph))
        .collect();
    Ok(found.into_iter().enumerate().find_map(|(pattern, w)| {
        w.map(|witness| Membership {
            k,
            pattern,
            witness,
        })
    }))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinRankError {
    /// Every order up to `lower_bound` was rejected before the search had
    /// to stop.
    #[error("mr > {lower_bound}: {reason}")]
    Exceeded { lower_bound: usize, reason: String },
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MinRankOptions {
    /// Largest order to try; `None` runs until the pattern budget stops it.
    pub max_k: Option<usize>,
}

/// Minimum rank over the cache's field, with the membership certificate at
/// the returned order. Edgeless graphs have rank 0 and no pattern.
pub fn min_rank_certified(
    g: &SimpleGraph,
    cache: &PatternCache,
    opts: MinRankOptions,
) -> Result<(usize, Option<Membership>), MinRankError> {
    let core_n = (0..g.n()).filter(|&v| g.degree(v) > 0).count();
    if core_n == 0 {
        return Ok((0, None));
    }
    let classes = twin_reduce(g).classes.len() as u64;
    let q = cache.field().q();
    for k in 1.. {
        if opts.max_k.is_some_and(|m| k > m) {
            return Err(MinRankError::Exceeded {
                lower_bound: k - 1,
                reason: format!("stopped at the order limit {}", k - 1),
            });
        }
        // a blowup of a pattern has at most as many twin classes as the
        // pattern has vertices, plus one for isolated vertices
        if point_count(q, k).is_some_and(|pts| pts + 1 < classes) {
            continue;
        }
        match member(g, cache, k) {
            Ok(Some(m)) => {
                assert!(
                    k <= core_n,
                    "minimum rank {k} exceeds the number of non-isolated vertices"
                );
                return Ok((k, Some(m)));
            }
            Ok(None) => {}
            Err(e) => {
                return Err(MinRankError::Exceeded {
                    lower_bound: k - 1,
                    reason: e.to_string(),
                })
            }
        }
    }
    unreachable!()
}

pub fn min_rank(
    g: &SimpleGraph,
    cache: &PatternCache,
    opts: MinRankOptions,
) -> Result<usize, MinRankError> {
    min_rank_certified(g, cache, opts).map(|(k, _)| k)
}

/// Whether `K_{s_1,...,s_n}` has minimum rank at most 3.
pub fn multipartite_bound_check(
    parts: &[usize],
    cache: &PatternCache,
) -> Result<bool, MinRankError> {
    let g = SimpleGraph::complete_multipartite(parts);
    match min_rank(&g, cache, MinRankOptions { max_k: Some(3) }) {
        Ok(_) => Ok(true),
        Err(MinRankError::Exceeded { lower_bound: 3, .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Convenience cache with the default vertex budget.
pub fn cache_for(q: u64) -> Result<PatternCache, crate::gf::FieldError> {
    Ok(PatternCache::new(
        Arc::new(FieldCtx::with_order(q)?),
        DEFAULT_VERTEX_BUDGET,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::all_graphs_up_to;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fullhouse() {
        let fh = SimpleGraph::fullhouse();
        let c2 = cache_for(2).unwrap();
        for p in &c2.get(2).unwrap().patterns {
            assert!(is_blowup(&fh, &p.graph).is_none());
        }
        assert!(is_blowup(&fh, &c2.get(3).unwrap().patterns[0].graph).is_some());
        assert_eq!(min_rank(&fh, &c2, MinRankOptions::default()).unwrap(), 3);
        assert_eq!(
            min_rank(&fh, &cache_for(3).unwrap(), MinRankOptions::default()).unwrap(),
            2
        );
    }

    #[test]
    fn edge_onto_two_nonlooped_vertices() {
        // K_2 is a single class of true twins, yet over GF(2) with the
        // symplectic k = 2 pattern it must use two distinct nonlooped vertices
        let c2 = cache_for(2).unwrap();
        let symplectic = &c2.get(2).unwrap().patterns[1].graph;
        assert!(symplectic.looped_vertices().is_empty());
        let w = is_blowup(&SimpleGraph::complete(2), symplectic).unwrap();
        assert_ne!(w.assignment[0], w.assignment[1]);
        // K_{2,2,2} spreads onto the symplectic triangle as well
        assert!(is_blowup(&SimpleGraph::complete_multipartite(&[2, 2, 2]), symplectic).is_some());
    }

    #[test]
    fn looped_path_example() {
        let h = LoopedGraph::from_parts(4, &[1, 2, 3], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let g = h.blowup(&[3, 1, 2, 0]).unwrap();
        let w = is_blowup(&g, &h).unwrap();
        let mut sizes = w.part_sizes(4);
        sizes.sort_unstable();
        assert_eq!(sizes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn small_values() {
        let c2 = cache_for(2).unwrap();
        let c5 = cache_for(5).unwrap();
        let opts = MinRankOptions::default();
        for n in 1..7 {
            assert_eq!(min_rank(&SimpleGraph::new(n), &c2, opts).unwrap(), 0);
        }
        for n in 2..8 {
            assert_eq!(min_rank(&SimpleGraph::complete(n), &c2, opts).unwrap(), 1);
            assert_eq!(min_rank(&SimpleGraph::complete(n), &c5, opts).unwrap(), 1);
        }
        assert_eq!(min_rank(&SimpleGraph::path(3), &c2, opts).unwrap(), 2);
        assert_eq!(min_rank(&SimpleGraph::path(6), &c5, opts).unwrap(), 5);
        assert_eq!(
            min_rank(
                &SimpleGraph::complete_multipartite(&[2, 2, 2, 2]),
                &c2,
                opts
            )
            .unwrap(),
            4
        );
    }

    #[test]
    fn order_limit_reports_bound() {
        let c2 = cache_for(2).unwrap();
        let err = min_rank(
            &SimpleGraph::path(6),
            &c2,
            MinRankOptions { max_k: Some(2) },
        )
        .unwrap_err();
        assert!(matches!(err, MinRankError::Exceeded { lower_bound: 2, .. }));
        let tiny = PatternCache::new(c2.field().clone(), 10);
        let err = min_rank(&SimpleGraph::path(8), &tiny, MinRankOptions::default()).unwrap_err();
        assert!(matches!(err, MinRankError::Exceeded { lower_bound: 3, .. }));
    }

    #[test]
    fn multipartite() {
        let c2 = cache_for(2).unwrap();
        let c3 = cache_for(3).unwrap();
        assert!(multipartite_bound_check(&[2, 2, 2], &c2).unwrap());
        assert!(multipartite_bound_check(&[1], &c2).unwrap());
        assert!(!multipartite_bound_check(&[10, 10, 10, 10], &c2).unwrap());
        assert!(multipartite_bound_check(&[10, 10, 10, 10], &c3).unwrap());
    }

    #[test]
    fn random_blowups_are_recognized() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (q, k) in [(2u64, 3usize), (2, 4), (3, 2), (3, 3), (4, 2)] {
            let cache = cache_for(q).unwrap();
            let ps = cache.get(k).unwrap();
            for _ in 0..25 {
                let idx = rng.gen_range(0..ps.patterns.len());
                let h = &ps.patterns[idx].graph;
                let sizes: Vec<usize> = (0..h.n())
                    .map(|_| {
                        if rng.gen_bool(0.4) {
                            rng.gen_range(0..4)
                        } else {
                            0
                        }
                    })
                    .collect();
                let mut g = h.blowup(&sizes).unwrap();
                let iso = rng.gen_range(0..3);
                g = g.disjoint_union(&SimpleGraph::new(iso));
                let w = is_blowup(&g, h).expect("blowup must be recognized");
                assert!(verify_witness(&g, h, &w));
            }
        }
    }

    #[test]
    fn isolated_vertices_do_not_matter() {
        let c2 = cache_for(2).unwrap();
        for g in all_graphs_up_to(5) {
            let base = min_rank(&g, &c2, MinRankOptions::default()).unwrap();
            for t in 1..=3 {
                let h = g.disjoint_union(&SimpleGraph::new(t));
                assert_eq!(min_rank(&h, &c2, MinRankOptions::default()).unwrap(), base);
            }
        }
    }

    #[test]
    fn induced_subgraphs_never_increase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c3 = cache_for(3).unwrap();
        for _ in 0..30 {
            let n = rng.gen_range(2..9);
            let mut g = SimpleGraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
            let h = g.induced_subgraph(&keep);
            let opts = MinRankOptions::default();
            assert!(min_rank(&h, &c3, opts).unwrap() <= min_rank(&g, &c3, opts).unwrap());
        }
    }

    #[test]
    fn bad_witnesses_are_rejected() {
        let h = LoopedGraph::from_parts(2, &[0], &[(0, 1)]).unwrap();
        let g = SimpleGraph::path(3);
        let good = BlowupWitness {
            assignment: vec![Some(1), Some(0), Some(1)],
        };
        assert!(verify_witness(&g, &h, &good));
        let bad = BlowupWitness {
            assignment: vec![Some(0), Some(0), Some(1)],
        };
        assert!(!verify_witness(&g, &h, &bad));
        let short = BlowupWitness {
            assignment: vec![Some(1)],
        };
        assert!(!verify_witness(&g, &h, &short));
    }
}
