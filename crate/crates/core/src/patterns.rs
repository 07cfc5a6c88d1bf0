//! Pattern graphs: the graphs of `UᵗBU` where the columns of `U` run over
//! the points of PG(k-1, q) and `B` over the congruence representatives.
//!
//! A simple graph has minimum rank at most `k` over GF(q) iff, after
//! deleting isolated vertices, it is a blowup of one of these patterns.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Elem, FieldCtx};
use crate::graphs::LoopedGraph;
use crate::matfq::{
    canonical_representatives, classify_invertible_symmetric, CongruenceClass, MatrixError,
    MatrixFq,
};
use crate::projgeo::{enumerate_points, point_count, PointList};

pub const DEFAULT_VERTEX_BUDGET: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("q={q}, k={k} needs {points} pattern vertices, above the budget of {budget}")]
    Budget {
        q: u32,
        k: usize,
        points: String,
        budget: u64,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Debug)]
pub struct Pattern {
    pub b: MatrixFq,
    /// `None` only for the order-0 form.
    pub class: Option<CongruenceClass>,
    pub graph: LoopedGraph,
}

#[derive(Clone, Debug)]
pub struct PatternSet {
    pub field: Arc<FieldCtx>,
    pub k: usize,
    pub points: PointList,
    pub patterns: Vec<Pattern>,
}

/// Graph of `UᵗBU`: vertex `i` is point `i`, looped iff `xᵢᵗBxᵢ ≠ 0`, and
/// `i ~ j` iff `xᵢᵗBxⱼ ≠ 0`.
pub fn pattern_graph(points: &PointList, b: &MatrixFq) -> LoopedGraph {
    let f = points.field();
    let k = points.k();
    let n = points.len();
    // row i of (BU)ᵗ, so that entry (i, j) of UᵗBU is rows[i] · x_j
    let rows: Vec<Vec<Elem>> = points
        .points()
        .iter()
        .map(|x| {
            (0..k)
                .map(|c| f.sum((0..k).map(|r| f.mul(x.coords()[r], b.get(r, c)))))
                .collect()
        })
        .collect();
    let dot = |i: usize, j: usize| {
        let y = points.get(j).coords();
        f.sum(rows[i].iter().zip(y).map(|(&a, &c)| f.mul(a, c)))
    };
    let adjacency: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).filter(|&j| !dot(i, j).is_zero()).collect())
        .collect();
    let mut g = LoopedGraph::new(n);
    for (i, row) in adjacency.into_iter().enumerate() {
        g.set_loop(i, !dot(i, i).is_zero());
        for j in row {
            g.add_edge(i, j).expect("in range");
        }
    }
    g
}

/// Builds the patterns for the given forms instead of the canonical ones.
pub fn generate_with_forms(
    field: &Arc<FieldCtx>,
    k: usize,
    forms: Vec<MatrixFq>,
    budget: u64,
) -> Result<PatternSet, PatternError> {
    check_budget(field, k, budget)?;
    let points = enumerate_points(field, k);
    let patterns = forms
        .into_par_iter()
        .map(|b| {
            let class = if k == 0 {
                None
            } else {
                Some(classify_invertible_symmetric(&b)?)
            };
            let graph = pattern_graph(&points, &b);
            Ok(Pattern { b, class, graph })
        })
        .collect::<Result<Vec<_>, MatrixError>>()?;
    Ok(PatternSet {
        field: field.clone(),
        k,
        points,
        patterns,
    })
}

fn check_budget(field: &FieldCtx, k: usize, budget: u64) -> Result<(), PatternError> {
    match point_count(field.q(), k) {
        Some(n) if n <= budget => Ok(()),
        n => Err(PatternError::Budget {
            q: field.q(),
            k,
            points: n.map_or_else(|| "more than 2^64".to_string(), |n| n.to_string()),
            budget,
        }),
    }
}

/// The pattern set for `(q, k)`. One pattern for odd `k`, two for even
/// `k ≥ 2`. Order 0 gives a single empty pattern.
pub fn generate(field: &Arc<FieldCtx>, k: usize, budget: u64) -> Result<PatternSet, PatternError> {
    check_budget(field, k, budget)?;
    generate_with_forms(field, k, canonical_representatives(field, k), budget)
}

impl PatternSet {
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// The matrix `UᵗBU` of pattern `idx`.
    pub fn gram(&self, idx: usize) -> MatrixFq {
        let u = self.points.as_matrix();
        let b = &self.patterns[idx].b;
        u.transpose()
            .mul(b)
            .and_then(|m| m.mul(&u))
            .expect("dimensions agree")
    }
}

/// Structural facts every pattern must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CountCheck {
    VertexCount,
    Regularity,
    NonloopedCount,
    NonloopedClique,
    NonloopedNeighbourhood,
}

impl fmt::Display for CountCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountCheck::VertexCount => "vertex count: a pattern has (q^k-1)/(q-1) vertices",
            CountCheck::Regularity => "regularity: every vertex has degree q^(k-1), a loop counting once",
            CountCheck::NonloopedCount => "nonlooped count: the number of absolute points of the polarity",
            CountCheck::NonloopedClique => "nonlooped clique: for k = 3 the nonlooped vertices are pairwise adjacent",
            CountCheck::NonloopedNeighbourhood => {
                "nonlooped neighbourhood: for k = 3 a nonlooped vertex sees q nonlooped and q^2-q looped vertices"
            }
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("pattern {pattern} of (q={q}, k={k}) violates {check}: {detail}")]
pub struct CountError {
    pub q: u32,
    pub k: usize,
    pub pattern: usize,
    pub check: CountCheck,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternSummary {
    pub class: Option<CongruenceClass>,
    pub vertices: usize,
    pub degree: u64,
    pub nonlooped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub q: u32,
    pub k: usize,
    pub patterns: Vec<PatternSummary>,
}

/// Expected nonlooped counts, one per pattern, in pattern order for even
/// `q` and sorted for odd `q`.
pub fn expected_nonlooped(q: u64, k: usize, even: bool) -> Vec<u64> {
    let pc = |k: usize| (q.pow(k as u32) - 1) / (q - 1);
    if k == 0 {
        return vec![0];
    }
    if even {
        let mut v = vec![pc(k - 1)];
        if k.is_multiple_of(2) {
            v.push(pc(k));
        }
        return v;
    }
    if k % 2 == 1 {
        return vec![pc(k - 1)];
    }
    let m = (k / 2) as u32;
    let mut v = vec![
        (q.pow(m) - 1) * (q.pow(m - 1) + 1) / (q - 1),
        (q.pow(m) + 1) * (q.pow(m - 1) - 1) / (q - 1),
    ];
    v.sort_unstable();
    v
}

pub fn verify_counts(ps: &PatternSet) -> Result<CountReport, CountError> {
    let q = u64::from(ps.q());
    let k = ps.k;
    let fail = |pattern: usize, check: CountCheck, detail: String| CountError {
        q: ps.q(),
        k,
        pattern,
        check,
        detail,
    };
    let expected_n = point_count(ps.q(), k).expect("within budget") as usize;
    let expected_deg = if k == 0 { 0 } else { q.pow(k as u32 - 1) };

    let mut summaries = Vec::new();
    for (idx, p) in ps.patterns.iter().enumerate() {
        let g = &p.graph;
        if g.n() != expected_n {
            return Err(fail(
                idx,
                CountCheck::VertexCount,
                format!("{} vertices, expected {expected_n}", g.n()),
            ));
        }
        for v in 0..g.n() {
            let d = g.degree(v) as u64;
            if d != expected_deg {
                return Err(fail(
                    idx,
                    CountCheck::Regularity,
                    format!("vertex {v} has degree {d}, expected {expected_deg}"),
                ));
            }
        }
        let nonlooped = g.nonlooped_vertices();
        if k == 3 {
            for (i, &u) in nonlooped.iter().enumerate() {
                for &v in &nonlooped[i + 1..] {
                    if !g.has_edge(u, v) {
                        return Err(fail(
                            idx,
                            CountCheck::NonloopedClique,
                            format!("nonlooped {u} and {v} are not adjacent"),
                        ));
                    }
                }
                let nl = g.neighbors(u).ones().filter(|&w| !g.is_looped(w)).count() as u64;
                let l = g.neighbors(u).ones().filter(|&w| g.is_looped(w)).count() as u64;
                if nl != q || l != q * q - q {
                    return Err(fail(
                        idx,
                        CountCheck::NonloopedNeighbourhood,
                        format!("vertex {u} sees {nl} nonlooped and {l} looped vertices"),
                    ));
                }
            }
        }
        summaries.push(PatternSummary {
            class: p.class,
            vertices: g.n(),
            degree: expected_deg,
            nonlooped: nonlooped.len(),
        });
    }

    let expected = expected_nonlooped(q, k, ps.field.is_even());
    let mut got: Vec<u64> = summaries.iter().map(|s| s.nonlooped as u64).collect();
    if !ps.field.is_even() {
        got.sort_unstable();
    }
    if got != expected {
        return Err(fail(
            0,
            CountCheck::NonloopedCount,
            format!("counts {got:?}, expected {expected:?}"),
        ));
    }
    Ok(CountReport {
        q: ps.q(),
        k,
        patterns: summaries,
    })
}
