//! Brute-force minimum rank: the smallest rank over every symmetric matrix
//! with the zero pattern of `G`.
//!
//! Kept deliberately plain and independent of the pattern machinery. The
//! only shared code is field arithmetic.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::gf::{Elem, FieldCtx};
use crate::graphs::SimpleGraph;

pub const DEFAULT_ORACLE_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{matrices} matrices to enumerate, above the budget of {budget}")]
    Budget { matrices: String, budget: u128 },
}

/// `q^n (q-1)^m`, or `None` past `u128`.
pub fn matrix_count(q: u32, n: usize, m: usize) -> Option<u128> {
    let q = u128::from(q);
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.checked_mul(q)?;
    }
    for _ in 0..m {
        total = total.checked_mul(q - 1)?;
    }
    Some(total)
}

fn rank(f: &FieldCtx, a: &mut [Elem], n: usize) -> usize {
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !a[i * n + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..n {
                a.swap(p * n + j, r * n + j);
            }
        }
        let inv = f.inv(a[r * n + c]).expect("nonzero pivot");
        for i in r + 1..n {
            let x = a[i * n + c];
            if x.is_zero() {
                continue;
            }
            let t = f.mul(x, inv);
            for j in c..n {
                a[i * n + j] = f.sub(a[i * n + j], f.mul(t, a[r * n + j]));
            }
        }
        r += 1;
    }
    r
}

/// Exhaustive minimum rank of `G` over `f`.
///
/// Diagonals are enumerated outermost as a little-endian counter over
/// element reps, edge values innermost over the nonzero elements.
pub fn oracle_min_rank(g: &SimpleGraph, f: &FieldCtx, budget: u128) -> Result<usize, OracleError> {
    let n = g.n();
    let edges = g.edges();
    let m = edges.len();
    let q = f.q();
    match matrix_count(q, n, m) {
        Some(c) if c <= budget => {}
        c => {
            return Err(OracleError::Budget {
                matrices: c.map_or_else(|| "more than 2^128".into(), |c| c.to_string()),
                budget,
            })
        }
    }
    if m == 0 {
        return Ok(0);
    }
    let floor = 1;
    let diag_count = (q as usize).pow(n as u32);
    let edge_count = ((q - 1) as usize).pow(m as u32);
    let best = AtomicUsize::new(n);

    (0..diag_count).into_par_iter().for_each(|dc| {
        if best.load(Ordering::Relaxed) <= floor {
            return;
        }
        let mut base = vec![Elem::ZERO; n * n];
        let mut c = dc;
        for i in 0..n {
            base[i * n + i] = Elem((c % q as usize) as u32);
            c /= q as usize;
        }
        let mut work = vec![Elem::ZERO; n * n];
        for ec in 0..edge_count {
            let mut c = ec;
            for &(u, v) in &edges {
                let x = Elem((c % (q as usize - 1)) as u32 + 1);
                c /= q as usize - 1;
                base[u * n + v] = x;
                base[v * n + u] = x;
            }
            work.copy_from_slice(&base);
            let r = rank(f, &mut work, n);
            let prev = best.fetch_min(r, Ordering::Relaxed);
            if r.min(prev) <= floor {
                return;
            }
        }
    });
    Ok(best.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FieldCtx {
        FieldCtx::with_order(q).unwrap()
    }

    #[test]
    fn examples() {
        let fh = SimpleGraph::fullhouse();
        assert_eq!(
            oracle_min_rank(&fh, &f(2), DEFAULT_ORACLE_BUDGET).unwrap(),
            3
        );
        assert_eq!(
            oracle_min_rank(&fh, &f(3), DEFAULT_ORACLE_BUDGET).unwrap(),
            2
        );
        for q in [2, 3, 4, 5] {
            assert_eq!(
                oracle_min_rank(&SimpleGraph::path(3), &f(q), DEFAULT_ORACLE_BUDGET).unwrap(),
                2
            );
        }
        assert_eq!(
            oracle_min_rank(&SimpleGraph::new(4), &f(2), DEFAULT_ORACLE_BUDGET).unwrap(),
            0
        );
        assert_eq!(
            oracle_min_rank(&SimpleGraph::complete(5), &f(3), DEFAULT_ORACLE_BUDGET).unwrap(),
            1
        );
        assert_eq!(
            oracle_min_rank(
                &SimpleGraph::complete_multipartite(&[2, 2, 2, 2]),
                &f(2),
                DEFAULT_ORACLE_BUDGET
            )
            .unwrap(),
            4
        );
    }

    #[test]
    fn budget() {
        assert_eq!(matrix_count(3, 2, 1), Some(18));
        let err = oracle_min_rank(&SimpleGraph::complete(6), &f(3), 1000).unwrap_err();
        assert_eq!(
            err,
            OracleError::Budget {
                matrices: (729u128 * 32768).to_string(),
                budget: 1000
            }
        );
    }

    #[test]
    fn elimination() {
        let f5 = f(5);
        let e = |v: &[u32]| v.iter().map(|&x| Elem(x)).collect::<Vec<_>>();
        assert_eq!(rank(&f5, &mut e(&[1, 2, 2, 4]), 2), 1);
        assert_eq!(rank(&f5, &mut e(&[0, 1, 1, 0]), 2), 2);
        assert_eq!(rank(&f5, &mut e(&[0, 0, 0, 0]), 2), 0);
        assert_eq!(rank(&f5, &mut e(&[0, 0, 1, 0, 0, 0, 1, 0, 1]), 3), 2);
    }
}
