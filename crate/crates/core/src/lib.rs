//! Minimum rank of simple graphs over finite fields.
//!
//! A simple graph has minimum rank at most `k` over GF(q) exactly when it is
//! a blowup of one of a small set of looped pattern graphs: the complements
//! of the polarity graphs of PG(k-1, q) coming from symmetric forms. This
//! crate builds those patterns, tests blowup membership, and cross-checks the
//! answer against exhaustive enumeration of matrices.

pub mod blowup;
pub mod gf;
pub mod graphs;
pub mod matfq;
pub mod miner;
pub mod oracle;
pub mod patterns;
pub mod projgeo;
pub mod selftest;

pub use gf::{Elem, FieldCtx, FieldError, FieldSpec};
