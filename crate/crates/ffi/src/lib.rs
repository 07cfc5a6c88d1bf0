//! C ABI over `minrank-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_from_*` functions and released with the matching `*_free`. Every
//! fallible call returns an [`MrStatus`]; on failure a message is kept per
//! thread and can be copied out with [`mr_last_error`].
//!
//! Strings are written into caller buffers: the required size including
//! the terminating NUL is always stored in `needed`, and
//! [`MrStatus::BufferTooSmall`] is returned when `len` is short.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use minrank_core::blowup::{member, min_rank, MinRankError, MinRankOptions, PatternCache};
use minrank_core::gf::FieldCtx;
use minrank_core::graphs::{parse_graph6, SimpleGraph};
use minrank_core::oracle::oracle_min_rank;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    BudgetExceeded = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// A finite field together with its cached pattern graphs.
pub struct MrField {
    cache: PatternCache,
}

/// A simple graph.
pub struct MrGraph {
    graph: SimpleGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: MrStatus, msg: impl Into<String>) -> MrStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> MrStatus) -> MrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(MrStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `buf` must be NULL or point to `len` writable bytes; `needed` must be
/// NULL or writable.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> MrStatus {
    let bytes = s.as_bytes();
    if !needed.is_null() {
        *needed = bytes.len() + 1;
    }
    if buf.is_null() || len < bytes.len() + 1 {
        return fail(
            MrStatus::BufferTooSmall,
            format!("{} bytes needed", bytes.len() + 1),
        );
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), bytes.len());
    *buf.add(bytes.len()) = 0;
    MrStatus::Ok
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mr_status_str(status: MrStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MrStatus::Ok => c"ok",
        MrStatus::NullPointer => c"null pointer",
        MrStatus::InvalidArgument => c"invalid argument",
        MrStatus::ParseError => c"parse error",
        MrStatus::BudgetExceeded => c"budget exceeded",
        MrStatus::BufferTooSmall => c"buffer too small",
        MrStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Copies the calling thread's last error message.
///
/// # Safety
/// See the module notes on caller buffers.
#[no_mangle]
pub unsafe extern "C" fn mr_last_error(
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> MrStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, len, needed)
}

/// Creates a field of order `q` (a prime power up to 65536). Pattern
/// graphs larger than `vertex_budget` vertices are never built; pass 0 for
/// the default of 10000.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_field_new(
    q: u64,
    vertex_budget: u64,
    out: *mut *mut MrField,
) -> MrStatus {
    guard(|| {
        if out.is_null() {
            return fail(MrStatus::NullPointer, "out is null");
        }
        match FieldCtx::with_order(q) {
            Ok(f) => {
                let budget = if vertex_budget == 0 {
                    minrank_core::patterns::DEFAULT_VERTEX_BUDGET
                } else {
                    vertex_budget
                };
                let field = MrField {
                    cache: PatternCache::new(Arc::new(f), budget),
                };
                *out = Box::into_raw(Box::new(field));
                MrStatus::Ok
            }
            Err(e) => fail(MrStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `field` must be NULL or a handle from [`mr_field_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mr_field_free(field: *mut MrField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Field order, or 0 for a NULL handle.
///
/// # Safety
/// `field` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_field_order(field: *const MrField) -> u32 {
    field.as_ref().map_or(0, |f| f.cache.field().q())
}

/// Number of pattern graphs of order `k` (1 or 2).
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_pattern_count(
    field: *const MrField,
    k: usize,
    out: *mut usize,
) -> MrStatus {
    guard(|| {
        let (Some(f), false) = (field.as_ref(), out.is_null()) else {
            return fail(MrStatus::NullPointer, "null argument");
        };
        match f.cache.get(k) {
            Ok(ps) => {
                *out = ps.patterns.len();
                MrStatus::Ok
            }
            Err(e) => fail(MrStatus::BudgetExceeded, e.to_string()),
        }
    })
}

/// Pattern `index` of order `k` as JSON `{n, loops, edges}`.
///
/// # Safety
/// `field` must be a live handle; see the module notes on caller buffers.
#[no_mangle]
pub unsafe extern "C" fn mr_pattern_json(
    field: *const MrField,
    k: usize,
    index: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> MrStatus {
    guard(|| {
        let Some(f) = field.as_ref() else {
            return fail(MrStatus::NullPointer, "field is null");
        };
        let ps = match f.cache.get(k) {
            Ok(ps) => ps,
            Err(e) => return fail(MrStatus::BudgetExceeded, e.to_string()),
        };
        let Some(p) = ps.patterns.get(index) else {
            return fail(
                MrStatus::InvalidArgument,
                format!("pattern index {index} out of range"),
            );
        };
        let text = serde_json::to_string(&p.graph.to_json()).expect("serializable");
        write_str(&text, buf, len, needed)
    })
}

/// Edgeless graph on `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_graph_new(n: usize, out: *mut *mut MrGraph) -> MrStatus {
    guard(|| {
        if out.is_null() {
            return fail(MrStatus::NullPointer, "out is null");
        }
        *out = Box::into_raw(Box::new(MrGraph {
            graph: SimpleGraph::new(n),
        }));
        MrStatus::Ok
    })
}

/// Parses one graph6 record.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_graph_from_graph6(
    text: *const c_char,
    out: *mut *mut MrGraph,
) -> MrStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(MrStatus::NullPointer, "null argument");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(MrStatus::ParseError, "graph6 text is not UTF-8");
        };
        match parse_graph6(s) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(MrGraph { graph }));
                MrStatus::Ok
            }
            Err(e) => fail(MrStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_graph_free(graph: *mut MrGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_graph_add_edge(graph: *mut MrGraph, u: usize, v: usize) -> MrStatus {
    guard(|| {
        let Some(g) = graph.as_mut() else {
            return fail(MrStatus::NullPointer, "graph is null");
        };
        match g.graph.add_edge(u, v) {
            Ok(()) => MrStatus::Ok,
            Err(e) => fail(MrStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Vertex count, or 0 for a NULL handle.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_graph_order(graph: *const MrGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.n())
}

/// # Safety
/// `graph` must be a live handle; see the module notes on caller buffers.
#[no_mangle]
pub unsafe extern "C" fn mr_graph_to_graph6(
    graph: *const MrGraph,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> MrStatus {
    guard(|| {
        let Some(g) = graph.as_ref() else {
            return fail(MrStatus::NullPointer, "graph is null");
        };
        write_str(&g.graph.to_graph6(), buf, len, needed)
    })
}

/// Minimum rank of `graph` over the field, trying orders up to `max_k`
/// (negative: no limit beyond the vertex budget). On
/// [`MrStatus::BudgetExceeded`] `*lower_bound` holds a value `b` with
/// `mr > b`.
///
/// # Safety
/// Handles must be live; `rank` and `lower_bound` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn mr_min_rank(
    field: *const MrField,
    graph: *const MrGraph,
    max_k: i64,
    rank: *mut usize,
    lower_bound: *mut usize,
) -> MrStatus {
    guard(|| {
        let (Some(f), Some(g)) = (field.as_ref(), graph.as_ref()) else {
            return fail(MrStatus::NullPointer, "null handle");
        };
        let opts = MinRankOptions {
            max_k: usize::try_from(max_k).ok(),
        };
        match min_rank(&g.graph, &f.cache, opts) {
            Ok(r) => {
                if !rank.is_null() {
                    *rank = r;
                }
                MrStatus::Ok
            }
            Err(MinRankError::Exceeded {
                lower_bound: b,
                reason,
            }) => {
                if !lower_bound.is_null() {
                    *lower_bound = b;
                }
                fail(MrStatus::BudgetExceeded, reason)
            }
        }
    })
}

/// Whether `graph` has minimum rank at most `k`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_is_member(
    field: *const MrField,
    graph: *const MrGraph,
    k: usize,
    out: *mut bool,
) -> MrStatus {
    guard(|| {
        let (Some(f), Some(g), false) = (field.as_ref(), graph.as_ref(), out.is_null()) else {
            return fail(MrStatus::NullPointer, "null argument");
        };
        match member(&g.graph, &f.cache, k) {
            Ok(m) => {
                *out = m.is_some();
                MrStatus::Ok
            }
            Err(e) => fail(MrStatus::BudgetExceeded, e.to_string()),
        }
    })
}

/// Minimum rank by exhaustive enumeration of at most `budget` matrices
/// (0: the default of 10^8).
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_oracle_min_rank(
    field: *const MrField,
    graph: *const MrGraph,
    budget: u64,
    out: *mut usize,
) -> MrStatus {
    guard(|| {
        let (Some(f), Some(g), false) = (field.as_ref(), graph.as_ref(), out.is_null()) else {
            return fail(MrStatus::NullPointer, "null argument");
        };
        let budget = if budget == 0 {
            minrank_core::oracle::DEFAULT_ORACLE_BUDGET
        } else {
            u128::from(budget)
        };
        match oracle_min_rank(&g.graph, f.cache.field(), budget) {
            Ok(r) => {
                *out = r;
                MrStatus::Ok
            }
            Err(e) => fail(MrStatus::BudgetExceeded, e.to_string()),
        }
    })
}
