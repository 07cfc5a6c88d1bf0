//! Minimal forbidden induced subgraphs for `mr ≤ k` over GF(q).
//!
//! A graph is reported when it is not a member but every single-vertex
//! deletion is. Work is split into chunks processed in parallel; results
//! are merged in input order, so the output does not depend on the number
//! of workers.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowup::{member, PatternCache};
use crate::graphs::{all_graphs_up_to, canonical_graph6, parse_graph6, GraphError, SimpleGraph};
use crate::patterns::PatternError;

pub const CHECKPOINT_INTERVAL: usize = 10_000;
pub const MAX_INTERNAL_ORDER: usize = 7;

#[derive(Debug, Error)]
pub enum MinerError {
    #[error("internal enumeration stops at {MAX_INTERNAL_ORDER} vertices; supply a graph6 stream for n = {0}")]
    OrderTooLarge(usize),
    #[error(
        "graph budget of {budget} reached after {processed} graphs; resume from the checkpoint"
    )]
    Budget { processed: u64, budget: u64 },
    #[error("checkpoint is for q={q}, k={k}, n={n}, not this run")]
    CheckpointMismatch { q: u32, k: usize, n: usize },
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("checkpoint {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("checkpoint {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

/// Resumable progress: `counter` graphs of the source have been examined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub q: u32,
    pub k: usize,
    pub n: usize,
    pub counter: u64,
    pub found: Vec<String>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self, MinerError> {
        let text = fs::read_to_string(path).map_err(|source| MinerError::Io {
            path: path.into(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| MinerError::Json {
            path: path.into(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), MinerError> {
        let text = serde_json::to_string(self).expect("serializable");
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).map_err(|source| MinerError::Io {
            path: tmp.clone(),
            source,
        })?;
        fs::rename(&tmp, path).map_err(|source| MinerError::Io {
            path: path.into(),
            source,
        })
    }
}

pub enum GraphSource {
    /// Every graph on at most `n_max` vertices, built in memory.
    Internal,
    /// Externally supplied graphs, one graph6 record per entry.
    Graph6(Vec<String>),
}

#[derive(Default)]
pub struct MinerOptions {
    pub checkpoint: Option<PathBuf>,
    pub resume: Option<Checkpoint>,
    /// Stop with [`MinerError::Budget`] after this many graphs in one run.
    pub max_graphs: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MinerStats {
    pub graphs: u64,
    pub members: u64,
    pub non_members: u64,
    pub skipped_large: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinerRun {
    pub q: u32,
    pub k: usize,
    pub n_max: usize,
    /// Canonical graph6 strings, sorted by order then string.
    pub forbidden: Vec<String>,
    pub stats: MinerStats,
}

enum Verdict {
    Member,
    NonMember,
    Minimal(String),
    TooLarge,
}

fn is_member(g: &SimpleGraph, cache: &PatternCache, k: usize) -> Result<bool, PatternError> {
    Ok(member(g, cache, k)?.is_some())
}

fn examine(
    g: &SimpleGraph,
    cache: &PatternCache,
    k: usize,
    n_max: usize,
) -> Result<Verdict, MinerError> {
    if g.n() > n_max {
        return Ok(Verdict::TooLarge);
    }
    if is_member(g, cache, k)? {
        return Ok(Verdict::Member);
    }
    for v in 0..g.n() {
        if !is_member(&g.delete_vertex(v), cache, k)? {
            return Ok(Verdict::NonMember);
        }
    }
    Ok(Verdict::Minimal(canonical_graph6(g)?))
}

fn sort_forbidden(set: BTreeSet<String>) -> Vec<String> {
    let mut v: Vec<(usize, String)> = set
        .into_iter()
        .map(|s| (parse_graph6(&s).map(|g| g.n()).unwrap_or(0), s))
        .collect();
    v.sort();
    v.into_iter().map(|(_, s)| s).collect()
}

/// Mines minimal non-members of `G_k(F_q)` with at most `n_max` vertices.
pub fn mine(
    cache: &PatternCache,
    k: usize,
    n_max: usize,
    source: GraphSource,
    opts: MinerOptions,
) -> Result<MinerRun, MinerError> {
    let q = cache.field().q();
    let graphs: Vec<SimpleGraph> = match source {
        GraphSource::Internal => {
            if n_max > MAX_INTERNAL_ORDER {
                return Err(MinerError::OrderTooLarge(n_max));
            }
            all_graphs_up_to(n_max)
        }
        GraphSource::Graph6(lines) => lines
            .iter()
            .map(|l| parse_graph6(l))
            .collect::<Result<_, _>>()?,
    };

    let mut found: BTreeSet<String> = BTreeSet::new();
    let mut start = 0u64;
    if let Some(cp) = opts.resume {
        if (cp.q, cp.k, cp.n) != (q, k, n_max) {
            return Err(MinerError::CheckpointMismatch {
                q: cp.q,
                k: cp.k,
                n: cp.n,
            });
        }
        start = cp.counter;
        found.extend(cp.found);
    }

    let mut stats = MinerStats::default();
    let mut pos = start as usize;
    let mut processed_this_run = 0u64;
    while pos < graphs.len() {
        let mut end = (pos + CHECKPOINT_INTERVAL).min(graphs.len());
        if let Some(limit) = opts.max_graphs {
            let left = limit.saturating_sub(processed_this_run) as usize;
            if left == 0 {
                return Err(MinerError::Budget {
                    processed: pos as u64,
                    budget: limit,
                });
            }
            end = end.min(pos + left);
        }
        let verdicts: Vec<Verdict> = graphs[pos..end]
            .par_iter()
            .map(|g| examine(g, cache, k, n_max))
            .collect::<Result<_, _>>()?;
        for v in verdicts {
            stats.graphs += 1;
            match v {
                Verdict::Member => stats.members += 1,
                Verdict::NonMember => stats.non_members += 1,
                Verdict::Minimal(s) => {
                    stats.non_members += 1;
                    found.insert(s);
                }
                Verdict::TooLarge => stats.skipped_large += 1,
            }
        }
        processed_this_run += (end - pos) as u64;
        pos = end;
        if let Some(path) = &opts.checkpoint {
            Checkpoint {
                q,
                k,
                n: n_max,
                counter: pos as u64,
                found: found.iter().cloned().collect(),
            }
            .save(path)?;
        }
    }

    Ok(MinerRun {
        q,
        k,
        n_max,
        forbidden: sort_forbidden(found),
        stats,
    })
}

fn components(g: &SimpleGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            for w in g.neighbors(v).ones() {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                }
            }
            i += 1;
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn is_clique(g: &SimpleGraph, vs: &[usize]) -> bool {
    vs.iter()
        .enumerate()
        .all(|(i, &u)| vs[i + 1..].iter().all(|&v| g.has_edge(u, v)))
}

/// Connected complete bipartite graph with both sides nonempty.
fn is_complete_bipartite(g: &SimpleGraph, vs: &[usize]) -> bool {
    if vs.len() < 2 {
        return false;
    }
    let a = vs[0];
    let (left, right): (Vec<usize>, Vec<usize>) =
        vs.iter().partition(|&&v| v == a || !g.has_edge(a, v));
    !right.is_empty()
        && left
            .iter()
            .all(|&u| right.iter().all(|&v| g.has_edge(u, v)))
        && left
            .iter()
            .enumerate()
            .all(|(i, &u)| left[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
        && right
            .iter()
            .enumerate()
            .all(|(i, &u)| right[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
}

/// Whether the complement of `G` is `(K_s ∪ K_{p,q}) ∨ K_r` or
/// `(K_{s1} ∪ K_{s2} ∪ K_{s3}) ∨ K_r`, the closed forms of `mr ≤ 2` over
/// GF(2).
pub fn check_f2r2_form(g: &SimpleGraph) -> bool {
    let c = g.complement();
    let n = c.n();
    let keep: Vec<usize> = (0..n).filter(|&v| c.degree(v) + 1 != n).collect();
    let y = c.induced_subgraph(&keep);
    let comps = components(&y);

    if comps.len() <= 3 && comps.iter().all(|cc| is_clique(&y, cc)) {
        return true;
    }
    let rest_ok = |skip: Option<usize>| {
        let rest: Vec<&Vec<usize>> = comps
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, c)| c)
            .collect();
        rest.iter().all(|c| c.len() == 1) || (rest.len() == 1 && is_complete_bipartite(&y, rest[0]))
    };
    rest_ok(None) || (0..comps.len()).any(|i| is_clique(&y, &comps[i]) && rest_ok(Some(i)))
}
