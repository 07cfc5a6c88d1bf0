//! Published worked examples replayed as named checks.

use std::sync::Arc;

use serde::Serialize;

use crate::blowup::{is_blowup, min_rank, multipartite_bound_check, PatternCache};
use crate::gf::{Elem, FieldCtx};
use crate::graphs::{LoopedGraph, SimpleGraph};
use crate::matfq::{
    canonical_representatives, classify_invertible_symmetric, congruence_diagonalize, ClassTag,
    MatrixFq,
};
use crate::miner::{check_f2r2_form, mine, GraphSource, MinerOptions};
use crate::oracle::{oracle_min_rank, DEFAULT_ORACLE_BUDGET};
use crate::patterns::{generate, verify_counts, PatternSet, DEFAULT_VERTEX_BUDGET};
use crate::projgeo::{count_absolute, enumerate_points};

pub const F2R3: [[u32; 7]; 7] = [
    [1, 1, 1, 1, 0, 0, 0],
    [1, 0, 1, 0, 0, 1, 1],
    [1, 1, 0, 0, 1, 1, 0],
    [1, 0, 0, 1, 1, 0, 1],
    [0, 0, 1, 1, 1, 1, 0],
    [0, 1, 1, 0, 1, 0, 1],
    [0, 1, 0, 1, 0, 1, 1],
];

pub const F3R3: [[u32; 13]; 13] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0],
    [1, 2, 0, 1, 2, 0, 1, 2, 0, 0, 1, 2, 1],
    [1, 0, 2, 1, 0, 2, 1, 0, 2, 0, 2, 1, 2],
    [1, 1, 1, 2, 2, 2, 0, 0, 0, 1, 1, 1, 0],
    [1, 2, 0, 2, 0, 1, 0, 1, 2, 1, 2, 0, 1],
    [1, 0, 2, 2, 1, 0, 0, 2, 1, 1, 0, 2, 2],
    [1, 1, 1, 0, 0, 0, 2, 2, 2, 2, 2, 2, 0],
    [1, 2, 0, 0, 1, 2, 2, 0, 1, 2, 0, 1, 1],
    [1, 0, 2, 0, 2, 1, 2, 1, 0, 2, 1, 0, 2],
    [0, 0, 0, 1, 1, 1, 2, 2, 2, 1, 1, 1, 0],
    [0, 1, 2, 1, 2, 0, 2, 0, 1, 1, 2, 0, 1],
    [0, 2, 1, 1, 0, 2, 2, 1, 0, 1, 0, 2, 2],
    [0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 1],
];

pub const F2R4A: [[u32; 15]; 15] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 1],
    [1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0],
    [1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1],
    [1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0],
    [1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1],
    [1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0],
    [1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1],
    [0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0],
    [0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 1],
    [0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0],
    [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1],
    [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0],
    [0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1],
    [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1],
];

pub const F2R4B: [[u32; 15]; 15] = [
    [0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0],
    [0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0],
    [0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 1],
    [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1],
    [1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1, 0],
    [1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1],
    [1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1],
    [1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0],
    [1, 0, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 1],
    [1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1],
    [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1],
    [0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 1],
    [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 1, 1, 0],
];

/// Columns of the simplified rank-2 `U` over GF(2), zero column dropped,
/// and the two resulting matrices.
pub const SIMPLIFIED_U_COLUMNS: [[u32; 2]; 3] = [[1, 0], [0, 1], [1, 1]];
pub const SIMPLIFIED_IDENTITY: [[u32; 3]; 3] = [[1, 0, 1], [0, 1, 1], [1, 1, 0]];
pub const SIMPLIFIED_SYMPLECTIC: [[u32; 3]; 3] = [[0, 1, 1], [1, 0, 1], [1, 1, 0]];

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

type Check = fn() -> Result<(), String>;

fn field(q: u64) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::with_order(q).expect("valid order"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mat(f: &Arc<FieldCtx>, rows: &[&[u32]]) -> MatrixFq {
    let n = rows.len();
    let flat: Vec<u32> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    MatrixFq::from_reps(f.clone(), n, rows.first().map_or(0, |r| r.len()), &flat)
        .expect("valid matrix")
}

/// Compares `gram(idx)` of `ps` against a printed matrix whose row/column
/// `i` belongs to the point `columns[i]`.
pub fn compare_with_printed<const N: usize>(
    ps: &PatternSet,
    idx: usize,
    printed: &[[u32; N]],
    columns: Option<&[Vec<u32>]>,
) -> Result<(), String> {
    let gram = ps.gram(idx);
    let pos: Vec<usize> = match columns {
        None => (0..N).collect(),
        Some(cols) => cols
            .iter()
            .map(|c| {
                let v: Vec<Elem> = c.iter().map(|&x| Elem(x)).collect();
                ps.points.index_of(&v).map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?,
    };
    if columns.is_none() {
        ensure(gram.rows() == N, || {
            format!("pattern has {} vertices, printed matrix {N}", gram.rows())
        })?;
    }
    for (i, row) in printed.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let got = gram.get(pos[i], pos[j]).0;
            ensure(got == x, || {
                format!("entry ({i},{j}) is {got}, printed {x}")
            })?;
        }
    }
    Ok(())
}

fn fullhouse_matrix(f: &Arc<FieldCtx>) -> MatrixFq {
    let g = SimpleGraph::fullhouse();
    MatrixFq::from_fn(f.clone(), 5, 5, |i, j| {
        if i == j || g.has_edge(i, j) {
            Elem::ONE
        } else {
            Elem::ZERO
        }
    })
}

fn check_fullhouse_rank() -> Result<(), String> {
    let r = fullhouse_matrix(&field(2)).rank();
    ensure(r == 3, || format!("rank {r}"))
}

fn check_diagonalize_hyperbolic() -> Result<(), String> {
    let f3 = field(3);
    let cf =
        congruence_diagonalize(&MatrixFq::hyperbolic(f3.clone(), 1)).map_err(|e| e.to_string())?;
    let expect = MatrixFq::diag(f3, &[Elem(2), Elem(1)]);
    ensure(cf.form == expect, || {
        format!("GF(3) form {:?}", cf.form.reps())
    })?;
    let f2 = field(2);
    let h = MatrixFq::hyperbolic(f2, 1);
    let cf = congruence_diagonalize(&h).map_err(|e| e.to_string())?;
    ensure(cf.form == h, || format!("GF(2) form {:?}", cf.form.reps()))
}

fn check_classification() -> Result<(), String> {
    let f2 = field(2);
    let f3 = field(3);
    let tag = |m: &MatrixFq| classify_invertible_symmetric(m).map_err(|e| e.to_string());
    ensure(
        tag(&MatrixFq::hyperbolic(f2.clone(), 1))?.tag == ClassTag::Symplectic,
        || "H over GF(2)".into(),
    )?;
    ensure(
        tag(&mat(&f2, &[&[1, 1], &[1, 0]]))?.tag == ClassTag::Identity,
        || "[[1,1],[1,0]] over GF(2)".into(),
    )?;
    ensure(
        tag(&mat(&f3, &[&[1, 0], &[0, 2]]))?.tag == ClassTag::NonsquareDet,
        || "diag(1,2) over GF(3)".into(),
    )?;
    let c = tag(&mat(&f3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]))?;
    ensure(
        c.tag == ClassTag::NonsquareDet && c.projective_tag == ClassTag::Identity,
        || format!("diag(1,1,2) over GF(3): {c:?}"),
    )
}

fn check_representatives() -> Result<(), String> {
    let f2 = field(2);
    let f3 = field(3);
    ensure(
        canonical_representatives(&f2, 3) == vec![MatrixFq::identity(f2.clone(), 3)],
        || "q=2, k=3".into(),
    )?;
    ensure(
        canonical_representatives(&f2, 4)
            == vec![
                MatrixFq::identity(f2.clone(), 4),
                MatrixFq::hyperbolic(f2.clone(), 2),
            ],
        || "q=2, k=4".into(),
    )?;
    ensure(
        canonical_representatives(&f3, 2)
            == vec![
                MatrixFq::identity(f3.clone(), 2),
                mat(&f3, &[&[1, 0], &[0, 2]]),
            ],
        || "q=3, k=2".into(),
    )
}

fn check_point_order() -> Result<(), String> {
    let expect2 = [
        [0, 0, 1],
        [1, 0, 1],
        [0, 1, 1],
        [1, 1, 1],
        [0, 1, 0],
        [1, 1, 0],
        [1, 0, 0],
    ];
    let pts = enumerate_points(&field(2), 3);
    for (p, e) in pts.points().iter().zip(expect2) {
        let got: Vec<u32> = p.coords().iter().map(|x| x.0).collect();
        ensure(got == e, || format!("q=2 point {got:?}, expected {e:?}"))?;
    }
    let u3 = [
        [0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 1],
        [0, 0, 0, 1, 1, 1, 2, 2, 2, 1, 1, 1, 0],
        [1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0],
    ];
    let pts = enumerate_points(&field(3), 3);
    for (j, p) in pts.points().iter().enumerate() {
        let got: Vec<u32> = p.coords().iter().map(|x| x.0).collect();
        ensure(got == [u3[0][j], u3[1][j], u3[2][j]], || {
            format!("q=3 column {j} is {got:?}")
        })?;
    }
    Ok(())
}

fn check_absolute_points() -> Result<(), String> {
    let abs = |b: &MatrixFq| count_absolute(b).map_err(|e| e.to_string());
    let a = abs(&MatrixFq::identity(field(2), 3))?;
    ensure(a == 3, || format!("q=2, I_3: {a}"))?;
    let a = abs(&MatrixFq::identity(field(3), 3))?;
    ensure(a == 4, || format!("q=3, I_3: {a}"))?;
    let a = abs(&MatrixFq::hyperbolic(field(2), 2))?;
    ensure(a == 15, || format!("q=2, diag(H,H): {a}"))
}

fn check_squares_in_char_two() -> Result<(), String> {
    let f = field(2);
    ensure(f.elements().all(|a| f.is_square(a)), || {
        "nonsquare in GF(2)".into()
    })
}

fn patterns(q: u64, k: usize) -> Result<PatternSet, String> {
    generate(&field(q), k, DEFAULT_VERTEX_BUDGET).map_err(|e| e.to_string())
}

fn check_simplified_rank_two() -> Result<(), String> {
    let ps = patterns(2, 2)?;
    let cols: Vec<Vec<u32>> = SIMPLIFIED_U_COLUMNS.iter().map(|c| c.to_vec()).collect();
    compare_with_printed(&ps, 0, &SIMPLIFIED_IDENTITY, Some(&cols))
        .map_err(|e| format!("UᵗU: {e}"))?;
    compare_with_printed(&ps, 1, &SIMPLIFIED_SYMPLECTIC, Some(&cols))
        .map_err(|e| format!("UᵗB₂U: {e}"))
}

fn check_f2r3() -> Result<(), String> {
    compare_with_printed(&patterns(2, 3)?, 0, &F2R3, None)
}

fn check_f3r3() -> Result<(), String> {
    compare_with_printed(&patterns(3, 3)?, 0, &F3R3, None)
}

fn check_f2r4() -> Result<(), String> {
    let ps = patterns(2, 4)?;
    compare_with_printed(&ps, 0, &F2R4A, None).map_err(|e| format!("F2R4A: {e}"))?;
    compare_with_printed(&ps, 1, &F2R4B, None).map_err(|e| format!("F2R4B: {e}"))
}

fn check_counts() -> Result<(), String> {
    for (q, k, nonlooped) in [
        (2u64, 3usize, vec![3usize]),
        (3, 3, vec![4]),
        (2, 4, vec![7, 15]),
    ] {
        let rep = verify_counts(&patterns(q, k)?).map_err(|e| e.to_string())?;
        let got: Vec<usize> = rep.patterns.iter().map(|p| p.nonlooped).collect();
        ensure(got == nonlooped, || {
            format!("q={q}, k={k}: nonlooped {got:?}")
        })?;
        let deg = q.pow(k as u32 - 1);
        ensure(rep.patterns.iter().all(|p| p.degree == deg), || {
            format!("q={q}, k={k}: degree")
        })?;
    }
    Ok(())
}

fn cache(q: u64) -> PatternCache {
    PatternCache::new(field(q), DEFAULT_VERTEX_BUDGET)
}

fn check_blowup_examples() -> Result<(), String> {
    let c2 = cache(2);
    let fh = SimpleGraph::fullhouse();
    let g2 = c2.get(2).map_err(|e| e.to_string())?;
    ensure(
        g2.patterns
            .iter()
            .all(|p| is_blowup(&fh, &p.graph).is_none()),
        || "fullhouse is a blowup of a rank-2 pattern".into(),
    )?;
    let g3 = c2.get(3).map_err(|e| e.to_string())?;
    ensure(is_blowup(&fh, &g3.patterns[0].graph).is_some(), || {
        "fullhouse is not a blowup of F2R3".into()
    })?;
    let k222 = SimpleGraph::complete_multipartite(&[2, 2, 2]);
    ensure(is_blowup(&k222, &g2.patterns[1].graph).is_some(), || {
        "K_{2,2,2} is not a blowup of the nonlooped triangle".into()
    })?;
    let path = LoopedGraph::from_parts(4, &[1, 2, 3], &[(0, 1), (1, 2), (2, 3)])
        .map_err(|e| e.to_string())?;
    let h = path.blowup(&[3, 1, 2, 0]).map_err(|e| e.to_string())?;
    let w = is_blowup(&h, &path).ok_or("looped path example not recognized")?;
    let mut sizes = w.part_sizes(4);
    sizes.sort_unstable();
    ensure(sizes == [0, 1, 2, 3], || format!("part sizes {sizes:?}"))
}

fn check_min_rank() -> Result<(), String> {
    let opts = Default::default();
    let fh = SimpleGraph::fullhouse();
    let r2 = min_rank(&fh, &cache(2), opts).map_err(|e| e.to_string())?;
    ensure(r2 == 3, || format!("fullhouse over GF(2): {r2}"))?;
    let r3 = min_rank(&fh, &cache(3), opts).map_err(|e| e.to_string())?;
    ensure(r3 == 2, || format!("fullhouse over GF(3): {r3}"))?;
    for q in [2, 3, 4, 5] {
        let c = cache(q);
        for n in 2..7 {
            let r = min_rank(&SimpleGraph::complete(n), &c, opts).map_err(|e| e.to_string())?;
            ensure(r == 1, || format!("K_{n} over GF({q}): {r}"))?;
        }
    }
    Ok(())
}

fn check_oracle() -> Result<(), String> {
    let fh = SimpleGraph::fullhouse();
    let r2 = oracle_min_rank(&fh, &field(2), DEFAULT_ORACLE_BUDGET).map_err(|e| e.to_string())?;
    let r3 = oracle_min_rank(&fh, &field(3), DEFAULT_ORACLE_BUDGET).map_err(|e| e.to_string())?;
    ensure((r2, r3) == (3, 2), || {
        format!("fullhouse: {r2} over GF(2), {r3} over GF(3)")
    })
}

fn check_multipartite() -> Result<(), String> {
    let b =
        |parts: &[usize], q| multipartite_bound_check(parts, &cache(q)).map_err(|e| e.to_string());
    ensure(b(&[2, 2, 2], 2)?, || "K_{2,2,2} over GF(2)".into())?;
    ensure(!b(&[10, 10, 10, 10], 2)?, || {
        "K_{10,10,10,10} over GF(2)".into()
    })?;
    ensure(b(&[10, 10, 10, 10], 3)?, || {
        "K_{10,10,10,10} over GF(3)".into()
    })
}

fn check_miner() -> Result<(), String> {
    let run = mine(
        &cache(2),
        2,
        5,
        GraphSource::Internal,
        MinerOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let fh =
        crate::graphs::canonical_graph6(&SimpleGraph::fullhouse()).map_err(|e| e.to_string())?;
    ensure(run.forbidden.contains(&fh), || {
        "fullhouse missing from the rank-2 obstructions".into()
    })?;
    ensure(
        check_f2r2_form(&SimpleGraph::complete_multipartite(&[2, 2, 2])),
        || "K_{2,2,2} form".into(),
    )?;
    ensure(!check_f2r2_form(&SimpleGraph::fullhouse()), || {
        "fullhouse form".into()
    })
}

pub const CHECKS: &[(&str, Check)] = &[
    (
        "fullhouse matrix with unit diagonal has rank 3 over GF(2)",
        check_fullhouse_rank,
    ),
    (
        "hyperbolic block diagonalizes to diag(2,-2) over GF(3) and stays over GF(2)",
        check_diagonalize_hyperbolic,
    ),
    ("congruence class tags of small forms", check_classification),
    (
        "congruence representatives per parity of k and q",
        check_representatives,
    ),
    (
        "projective point order reproduces the F2R3 and F3R3 U matrices",
        check_point_order,
    ),
    (
        "absolute point counts of I_3 and diag(H,H)",
        check_absolute_points,
    ),
    (
        "every element of GF(2) is a square",
        check_squares_in_char_two,
    ),
    (
        "rank-2 patterns over GF(2) match the simplified U computation",
        check_simplified_rank_two,
    ),
    ("F2R3 pattern matrix", check_f2r3),
    ("F3R3 pattern matrix", check_f3r3),
    ("F2R4A and F2R4B pattern matrices", check_f2r4),
    (
        "vertex, degree and nonlooped counts of F2R3, F3R3, F2R4",
        check_counts,
    ),
    (
        "blowup membership of fullhouse, K_{2,2,2} and the looped path",
        check_blowup_examples,
    ),
    (
        "minimum rank of fullhouse and complete graphs",
        check_min_rank,
    ),
    ("oracle minimum rank of fullhouse", check_oracle),
    (
        "complete multipartite graphs with mr at most 3",
        check_multipartite,
    ),
    (
        "rank-2 obstructions over GF(2) include fullhouse",
        check_miner,
    ),
];

pub fn run_selftest() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let r = check();
            CheckResult {
                name,
                passed: r.is_ok(),
                detail: r.err(),
            }
        })
        .collect()
}
