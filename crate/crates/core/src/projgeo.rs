//! Points of PG(k-1, q) and the bilinear pairing of a symmetric form.

use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf::{Elem, FieldCtx};
use crate::matfq::MatrixFq;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeoError {
    #[error("dimension mismatch: points of length {x} and {y}, form of order {b}")]
    Dimension { x: usize, y: usize, b: usize },
    #[error("the zero vector is not a projective point")]
    ZeroVector,
}

/// Canonical representative of a projective point: the last nonzero
/// coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<Elem>,
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl ProjPoint {
    /// Normalizes a nonzero vector to its class representative.
    pub fn canonical(field: &FieldCtx, v: &[Elem]) -> Result<Self, GeoError> {
        let last = v
            .iter()
            .rposition(|x| !x.is_zero())
            .ok_or(GeoError::ZeroVector)?;
        let inv = field.inv(v[last]).expect("nonzero");
        Ok(ProjPoint {
            coords: v.iter().map(|&x| field.mul(x, inv)).collect(),
        })
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// All `(q^k - 1)/(q - 1)` points of PG(k-1, q) in canonical order.
///
/// Points whose last nonzero coordinate sits at position `k` come first,
/// then position `k-1`, and so on; within a group the free leading
/// coordinates run as a little-endian base-`q` counter.
#[derive(Clone, Debug)]
pub struct PointList {
    field: Arc<FieldCtx>,
    k: usize,
    points: Vec<ProjPoint>,
}

/// `(q^k - 1)/(q - 1)`, or `None` on overflow.
pub fn point_count(q: u32, k: usize) -> Option<u64> {
    let q = u64::from(q);
    let mut total: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..k {
        total = total.checked_add(pow)?;
        pow = pow.checked_mul(q)?;
    }
    Some(total)
}

pub fn enumerate_points(field: &Arc<FieldCtx>, k: usize) -> PointList {
    let q = field.q();
    let mut points = Vec::new();
    for d in (1..=k).rev() {
        let free = d - 1;
        let count = (q as usize).pow(free as u32);
        for mut counter in 0..count {
            let mut coords = vec![Elem::ZERO; k];
            for c in coords.iter_mut().take(free) {
                *c = Elem((counter % q as usize) as u32);
                counter /= q as usize;
            }
            coords[free] = Elem::ONE;
            points.push(ProjPoint { coords });
        }
    }
    PointList {
        field: field.clone(),
        k,
        points,
    }
}

impl PointList {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &ProjPoint {
        &self.points[i]
    }

    /// Position of the class of `v` in the canonical order.
    pub fn index_of(&self, v: &[Elem]) -> Result<usize, GeoError> {
        if v.len() != self.k {
            return Err(GeoError::Dimension {
                x: v.len(),
                y: self.k,
                b: self.k,
            });
        }
        let p = ProjPoint::canonical(&self.field, v)?;
        let q = self.field.q() as usize;
        let d = p
            .coords
            .iter()
            .rposition(|x| !x.is_zero())
            .expect("nonzero")
            + 1;
        let before: usize = (d + 1..=self.k).map(|dd| q.pow(dd as u32 - 1)).sum();
        let counter = p.coords[..d - 1]
            .iter()
            .rev()
            .fold(0usize, |acc, x| acc * q + x.0 as usize);
        Ok(before + counter)
    }

    /// The `k x n` matrix whose columns are the points in order.
    pub fn as_matrix(&self) -> MatrixFq {
        MatrixFq::from_fn(self.field.clone(), self.k, self.points.len(), |i, j| {
            self.points[j].coords[i]
        })
    }
}

/// `xᵗ B y`.
pub fn pairing(field: &FieldCtx, x: &[Elem], y: &[Elem], b: &MatrixFq) -> Result<Elem, GeoError> {
    if x.len() != y.len() || b.rows() != x.len() || b.cols() != x.len() {
        return Err(GeoError::Dimension {
            x: x.len(),
            y: y.len(),
            b: b.rows(),
        });
    }
    let mut acc = Elem::ZERO;
    for (i, &xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let row = field.sum(
            y.iter()
                .enumerate()
                .map(|(j, &yj)| field.mul(b.get(i, j), yj)),
        );
        acc = field.add(acc, field.mul(xi, row));
    }
    Ok(acc)
}

/// Number of absolute points (`xᵗBx = 0`) of the polarity of `B`.
pub fn count_absolute(b: &MatrixFq) -> Result<usize, GeoError> {
    let field = b.field();
    let pts = enumerate_points(field, b.rows());
    let mut n = 0;
    for p in pts.points() {
        if pairing(field, p.coords(), p.coords(), b)?.is_zero() {
            n += 1;
        }
    }
    Ok(n)
}
