use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use minrank_ffi::*;

fn field(q: u64) -> *mut MrField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { mr_field_new(q, 0, &mut f) }, MrStatus::Ok);
    f
}

fn graph(g6: &str) -> *mut MrGraph {
    let s = CString::new(g6).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { mr_graph_from_graph6(s.as_ptr(), &mut g) },
        MrStatus::Ok
    );
    g
}

fn last_error() -> String {
    let mut needed = 0usize;
    unsafe {
        mr_last_error(ptr::null_mut(), 0, &mut needed);
        let mut buf = vec![0 as c_char; needed];
        assert_eq!(
            mr_last_error(buf.as_mut_ptr(), buf.len(), &mut needed),
            MrStatus::Ok
        );
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn field_lifecycle() {
    let f = field(4);
    assert_eq!(unsafe { mr_field_order(f) }, 4);
    let mut count = 0usize;
    assert_eq!(unsafe { mr_pattern_count(f, 1, &mut count) }, MrStatus::Ok);
    assert_eq!(count, 1);
    assert_eq!(unsafe { mr_pattern_count(f, 2, &mut count) }, MrStatus::Ok);
    assert_eq!(count, 2);
    unsafe { mr_field_free(f) };
    unsafe { mr_field_free(ptr::null_mut()) };
    assert_eq!(unsafe { mr_field_order(ptr::null()) }, 0);
}

#[test]
fn bad_order_is_rejected() {
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { mr_field_new(6, 0, &mut f) },
        MrStatus::InvalidArgument
    );
    assert!(f.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { mr_field_new(2, 0, ptr::null_mut()) },
        MrStatus::NullPointer
    );
}

#[test]
fn graph6_round_trip() {
    let g = graph("DN{");
    assert_eq!(unsafe { mr_graph_order(g) }, 5);
    let mut needed = 0usize;
    let mut small = [0 as c_char; 2];
    assert_eq!(
        unsafe { mr_graph_to_graph6(g, small.as_mut_ptr(), small.len(), &mut needed) },
        MrStatus::BufferTooSmall
    );
    assert_eq!(needed, 4);
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(
        unsafe { mr_graph_to_graph6(g, buf.as_mut_ptr(), buf.len(), &mut needed) },
        MrStatus::Ok
    );
    assert_eq!(
        unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(),
        "DN{"
    );
    unsafe { mr_graph_free(g) };
}

#[test]
fn malformed_graph6() {
    let s = CString::new("D~~~~~").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { mr_graph_from_graph6(s.as_ptr(), &mut g) },
        MrStatus::ParseError
    );
    assert!(g.is_null());
    assert_eq!(
        unsafe { mr_graph_from_graph6(ptr::null(), &mut g) },
        MrStatus::NullPointer
    );
}

#[test]
fn build_graph_edge_by_edge() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mr_graph_new(4, &mut g) }, MrStatus::Ok);
    for (u, v) in [(0, 1), (1, 2), (2, 3)] {
        assert_eq!(unsafe { mr_graph_add_edge(g, u, v) }, MrStatus::Ok);
    }
    assert_eq!(
        unsafe { mr_graph_add_edge(g, 0, 9) },
        MrStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { mr_graph_add_edge(g, 2, 2) },
        MrStatus::InvalidArgument
    );
    let f = field(2);
    let mut r = usize::MAX;
    assert_eq!(
        unsafe { mr_min_rank(f, g, -1, &mut r, ptr::null_mut()) },
        MrStatus::Ok
    );
    assert_eq!(r, 3);
    unsafe {
        mr_graph_free(g);
        mr_field_free(f);
    }
}

#[test]
fn fullhouse_depends_on_field() {
    let g = graph("DN{");
    for (q, expected) in [(2, 3), (3, 2)] {
        let f = field(q);
        let mut r = 0usize;
        assert_eq!(
            unsafe { mr_min_rank(f, g, -1, &mut r, ptr::null_mut()) },
            MrStatus::Ok
        );
        assert_eq!(r, expected);
        let mut o = 0usize;
        assert_eq!(unsafe { mr_oracle_min_rank(f, g, 0, &mut o) }, MrStatus::Ok);
        assert_eq!(o, expected);
        let mut is = true;
        assert_eq!(unsafe { mr_is_member(f, g, 2, &mut is) }, MrStatus::Ok);
        assert_eq!(is, expected <= 2);
        unsafe { mr_field_free(f) };
    }
    unsafe { mr_graph_free(g) };
}

#[test]
fn min_rank_reports_lower_bound() {
    let g = graph("DN{");
    let f = field(2);
    let mut lb = usize::MAX;
    let status = unsafe { mr_min_rank(f, g, 2, ptr::null_mut(), &mut lb) };
    assert_eq!(status, MrStatus::BudgetExceeded);
    assert_eq!(lb, 2);
    assert!(!last_error().is_empty());
    unsafe {
        mr_graph_free(g);
        mr_field_free(f);
    }
}

#[test]
fn oracle_budget() {
    let g = graph("DN{");
    let f = field(2);
    let mut o = 0usize;
    assert_eq!(
        unsafe { mr_oracle_min_rank(f, g, 1, &mut o) },
        MrStatus::BudgetExceeded
    );
    unsafe {
        mr_graph_free(g);
        mr_field_free(f);
    }
}

#[test]
fn pattern_json() {
    let f = field(2);
    let mut needed = 0usize;
    unsafe { mr_pattern_json(f, 2, 0, ptr::null_mut(), 0, &mut needed) };
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(
        unsafe { mr_pattern_json(f, 2, 0, buf.as_mut_ptr(), buf.len(), &mut needed) },
        MrStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(
        unsafe { mr_pattern_json(f, 2, 7, buf.as_mut_ptr(), buf.len(), &mut needed) },
        MrStatus::InvalidArgument
    );
    unsafe { mr_field_free(f) };
}

#[test]
fn status_strings() {
    let s = unsafe { CStr::from_ptr(mr_status_str(MrStatus::BufferTooSmall)) };
    assert_eq!(s.to_str().unwrap(), "buffer too small");
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/minrank.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "mr_field_new",
        "mr_graph_from_graph6",
        "mr_min_rank",
        "MR_STATUS_OK",
        "typedef struct MrGraph MrGraph",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-xc"])
        .arg(&header)
        .output()
    else {
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
