//! Dense matrices over GF(q) and congruence of symmetric matrices.
//!
//! Every symmetric matrix is congruent (`B -> CᵗBC`, `C` invertible) to a
//! block diagonal `diag(a_1, ..., a_s, b_1 H, ..., b_t H, 0, ..., 0)` with
//! `H = [[0,1],[1,0]]`. In odd characteristic the `H` blocks can always be
//! split into scalars. Invertible symmetric matrices then fall into at most
//! two classes, told apart by whether the determinant is a square (odd `q`)
//! or whether the form is alternating (even `q`).

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, FieldCtx, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has order 0")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("matrices live over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    field: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "MatrixFq over GF({}) {}x{}",
            self.field.q(),
            self.rows,
            self.cols
        )?;
        write!(f, "{self}")
    }
}

impl fmt::Display for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// JSON form: `{field:{p,e,modulus}, rows, cols, entries:[reps]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u32>,
}

impl MatrixFq {
    pub fn zeros(field: Arc<FieldCtx>, rows: usize, cols: usize) -> Self {
        MatrixFq {
            field,
            rows,
            cols,
            entries: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Arc<FieldCtx>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn from_fn(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatrixFq {
            field,
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from row-major integer reps.
    pub fn from_reps(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        reps: &[u32],
    ) -> Result<Self, MatrixError> {
        if reps.len() != rows * cols {
            return Err(MatrixError::EntryCount {
                expected: rows * cols,
                got: reps.len(),
            });
        }
        let entries = reps
            .iter()
            .map(|&r| field.elem(u64::from(r)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixFq {
            field,
            rows,
            cols,
            entries,
        })
    }

    /// Square diagonal matrix.
    pub fn diag(field: Arc<FieldCtx>, d: &[Elem]) -> Self {
        let mut m = Self::zeros(field, d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// `diag(H, ..., H)` with `blocks` copies of `[[0,1],[1,0]]`.
    pub fn hyperbolic(field: Arc<FieldCtx>, blocks: usize) -> Self {
        let mut m = Self::zeros(field, 2 * blocks, 2 * blocks);
        for b in 0..blocks {
            m.set(2 * b, 2 * b + 1, Elem::ONE);
            m.set(2 * b + 1, 2 * b, Elem::ONE);
        }
        m
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn reps(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field.clone(), self.cols, self.rows, |i, j| {
            self.get(j, i)
        })
    }

    pub fn mul(&self, other: &MatrixFq) -> Result<MatrixFq, MatrixError> {
        if !Arc::ptr_eq(&self.field, &other.field) && self.field != other.field {
            return Err(MatrixError::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        Ok(Self::from_fn(f.clone(), self.rows, other.cols, |i, j| {
            f.sum((0..self.cols).map(|l| f.mul(self.get(i, l), other.get(l, j))))
        }))
    }

    /// `Cᵗ · self · C`.
    pub fn congruent_by(&self, c: &MatrixFq) -> Result<MatrixFq, MatrixError> {
        c.transpose().mul(self)?.mul(c)
    }

    pub fn scale(&self, s: Elem) -> MatrixFq {
        let mut m = self.clone();
        for x in &mut m.entries {
            *x = self.field.mul(*x, s);
        }
        m
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> MatrixFq {
        Self::from_fn(self.field.clone(), idx.len(), idx.len(), |i, j| {
            self.get(idx[i], idx[j])
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> MatrixFq {
        Self::from_fn(self.field.clone(), idx.len(), self.cols, |i, j| {
            self.get(idx[i], j)
        })
    }

    /// Block diagonal of the given square blocks.
    pub fn block_diag(field: Arc<FieldCtx>, blocks: &[MatrixFq]) -> MatrixFq {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(field, n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(off + i, off + j, b.get(i, j));
                }
            }
            off += b.rows;
        }
        m
    }

    /// Row echelon form in place; returns the pivot columns and the
    /// determinant factor accumulated from swaps and pivots.
    fn echelon(&mut self) -> (Vec<usize>, Elem) {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut det = Elem::ONE;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.entries.swap(pr * self.cols + j, r * self.cols + j);
                }
                det = f.neg(det);
            }
            let pv = self.get(r, c);
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("pivot is nonzero");
            for i in r + 1..self.rows {
                let x = self.get(i, c);
                if x.is_zero() {
                    continue;
                }
                let factor = f.mul(x, inv);
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (pivots, det)
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        self.clone().echelon().0.len()
    }

    /// Determinant; row swaps contribute a factor of `-1`.
    pub fn determinant(&self) -> Result<Elem, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::DimensionMismatch(
                "determinant of non-square".into(),
            ));
        }
        let mut work = self.clone();
        let (pivots, det) = work.echelon();
        Ok(if pivots.len() == self.rows {
            det
        } else {
            Elem::ZERO
        })
    }

    /// Solves `self · X = rhs` for square invertible `self`.
    pub fn solve(&self, rhs: &MatrixFq) -> Result<MatrixFq, MatrixError> {
        if !self.is_square() || rhs.rows != self.rows {
            return Err(MatrixError::DimensionMismatch("solve".into()));
        }
        let n = self.rows;
        let f = self.field.clone();
        let width = n + rhs.cols;
        let mut aug = Self::from_fn(f.clone(), n, width, |i, j| {
            if j < n {
                self.get(i, j)
            } else {
                rhs.get(i, j - n)
            }
        });
        for c in 0..n {
            let pr = (c..n)
                .find(|&i| !aug.get(i, c).is_zero())
                .ok_or(MatrixError::Singular)?;
            if pr != c {
                for j in 0..width {
                    aug.entries.swap(pr * width + j, c * width + j);
                }
            }
            let inv = f.inv(aug.get(c, c))?;
            for j in 0..width {
                aug.set(c, j, f.mul(aug.get(c, j), inv));
            }
            for i in 0..n {
                let x = aug.get(i, c);
                if i == c || x.is_zero() {
                    continue;
                }
                for j in 0..width {
                    let v = f.sub(aug.get(i, j), f.mul(x, aug.get(c, j)));
                    aug.set(i, j, v);
                }
            }
        }
        Ok(Self::from_fn(f, n, rhs.cols, |i, j| aug.get(i, n + j)))
    }

    pub fn inverse(&self) -> Result<MatrixFq, MatrixError> {
        self.solve(&Self::identity(self.field.clone(), self.rows))
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            field: self.field.spec(),
            rows: self.rows,
            cols: self.cols,
            entries: self.reps(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self, MatrixError> {
        let field = Arc::new(FieldCtx::from_spec(&json.field)?);
        Self::from_reps(field, json.rows, json.cols, &json.entries)
    }

    /// Uniformly random matrix.
    pub fn random<R: Rng + ?Sized>(
        field: Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let q = field.q();
        Self::from_fn(field, rows, cols, |_, _| Elem(rng.gen_range(0..q)))
    }

    /// Uniformly random symmetric matrix.
    pub fn random_symmetric<R: Rng + ?Sized>(field: Arc<FieldCtx>, n: usize, rng: &mut R) -> Self {
        let mut m = Self::random(field, n, n, rng);
        for i in 0..n {
            for j in 0..i {
                let x = m.get(j, i);
                m.set(i, j, x);
            }
        }
        m
    }

    /// Random invertible matrix by rejection sampling.
    pub fn random_invertible<R: Rng + ?Sized>(field: Arc<FieldCtx>, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field.clone(), n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    fn require_symmetric(&self) -> Result<(), MatrixError> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(MatrixError::NotSymmetric)
        }
    }
}

/// Running congruence `form = transformᵗ · original · transform`, updated by
/// elementary congruences.
struct Reducer {
    form: MatrixFq,
    transform: MatrixFq,
}

impl Reducer {
    fn new(b: &MatrixFq) -> Self {
        Reducer {
            form: b.clone(),
            transform: MatrixFq::identity(b.field.clone(), b.rows),
        }
    }

    fn field(&self) -> Arc<FieldCtx> {
        self.form.field.clone()
    }

    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.form.rows;
        for l in 0..n {
            self.form.entries.swap(l * n + i, l * n + j);
            self.transform.entries.swap(l * n + i, l * n + j);
        }
        for l in 0..n {
            self.form.entries.swap(i * n + l, j * n + l);
        }
    }

    /// Column `dst += factor · column src`, then the same on rows.
    fn add_multiple(&mut self, src: usize, dst: usize, factor: Elem) {
        let f = self.field();
        let n = self.form.rows;
        for l in 0..n {
            let v = f.add(self.form.get(l, dst), f.mul(factor, self.form.get(l, src)));
            self.form.set(l, dst, v);
            let t = f.add(
                self.transform.get(l, dst),
                f.mul(factor, self.transform.get(l, src)),
            );
            self.transform.set(l, dst, t);
        }
        for l in 0..n {
            let v = f.add(self.form.get(dst, l), f.mul(factor, self.form.get(src, l)));
            self.form.set(dst, l, v);
        }
    }

    fn scale(&mut self, i: usize, s: Elem) {
        let f = self.field();
        let n = self.form.rows;
        for l in 0..n {
            let v = f.mul(self.form.get(l, i), s);
            self.form.set(l, i, v);
            let t = f.mul(self.transform.get(l, i), s);
            self.transform.set(l, i, t);
        }
        for l in 0..n {
            let v = f.mul(self.form.get(i, l), s);
            self.form.set(i, l, v);
        }
    }

    /// Congruence by the matrix equal to `block` on rows/cols `idx` and the
    /// identity elsewhere.
    fn apply_block(&mut self, idx: &[usize], block: &MatrixFq) {
        let n = self.form.rows;
        let mut e = MatrixFq::identity(self.field(), n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                e.set(i, j, block.get(a, b));
            }
        }
        self.form = self.form.congruent_by(&e).expect("square blocks");
        self.transform = self.transform.mul(&e).expect("square blocks");
    }

    /// Clears row/column `t` outside the pivot using the scalar pivot at `t`.
    fn eliminate_scalar(&mut self, t: usize) {
        let f = self.field();
        let inv = f.inv(self.form.get(t, t)).expect("nonzero pivot");
        for j in t + 1..self.form.rows {
            let x = self.form.get(t, j);
            if !x.is_zero() {
                self.add_multiple(t, j, f.neg(f.mul(x, inv)));
            }
        }
    }

    /// Clears rows/columns `t, t+1` outside the pivot block `a·H`.
    fn eliminate_pair(&mut self, t: usize) {
        let f = self.field();
        let a_inv = f.inv(self.form.get(t, t + 1)).expect("nonzero pivot");
        for j in t + 2..self.form.rows {
            // R = (aH)^{-1} D = a^{-1} (d_{t+1}, d_t)
            let r0 = f.mul(a_inv, self.form.get(t + 1, j));
            let r1 = f.mul(a_inv, self.form.get(t, j));
            if !r0.is_zero() {
                self.add_multiple(t, j, f.neg(r0));
            }
            if !r1.is_zero() {
                self.add_multiple(t + 1, j, f.neg(r1));
            }
        }
    }
}

/// A block of the congruence normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormBlock {
    /// A `1x1` block `[a]`, `a ≠ 0`.
    Scalar(Elem),
    /// A `2x2` block `b·H`, `b ≠ 0`.
    Hyperbolic(Elem),
}

/// Result of [`congruence_diagonalize`]: `form = transformᵗ · B · transform`.
#[derive(Clone, Debug)]
pub struct CongruenceForm {
    pub transform: MatrixFq,
    pub form: MatrixFq,
    /// Nonzero blocks in order: all scalars first, then hyperbolic blocks.
    /// Trailing zeros are implicit.
    pub blocks: Vec<FormBlock>,
}

impl CongruenceForm {
    pub fn rank(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                FormBlock::Scalar(_) => 1,
                FormBlock::Hyperbolic(_) => 2,
            })
            .sum()
    }

    pub fn scalar_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b, FormBlock::Scalar(_)))
            .count()
    }
}

/// Congruence-reduces a symmetric matrix to
/// `diag(a_1..a_s, b_1 H..b_t H, 0..0)`.
///
/// Pivots are taken at the smallest available diagonal index, else at the
/// smallest off-diagonal pair. In odd characteristic a hyperbolic pivot
/// `aH` is first turned into `diag(2a, -2a)`, so the result is diagonal.
pub fn congruence_diagonalize(b: &MatrixFq) -> Result<CongruenceForm, MatrixError> {
    b.require_symmetric()?;
    let n = b.rows;
    let f = b.field.clone();
    let mut red = Reducer::new(b);
    let mut blocks = Vec::new();
    let mut t = 0;
    while t < n {
        if let Some(i) = (t..n).find(|&i| !red.form.get(i, i).is_zero()) {
            red.swap(t, i);
            red.eliminate_scalar(t);
            blocks.push(FormBlock::Scalar(red.form.get(t, t)));
            t += 1;
            continue;
        }
        let pair = (t..n).find_map(|i| {
            (i + 1..n)
                .find(|&j| !red.form.get(i, j).is_zero())
                .map(|j| (i, j))
        });
        let Some((i, j)) = pair else { break };
        red.swap(t, i);
        red.swap(t + 1, j);
        if f.is_even() {
            red.eliminate_pair(t);
            blocks.push(FormBlock::Hyperbolic(red.form.get(t, t + 1)));
            t += 2;
        } else {
            // [[1,1],[-1,1]] aH [[1,-1],[1,1]] = diag(2a, -2a)
            let one = Elem::ONE;
            let split = MatrixFq::from_fn(f.clone(), 2, 2, |r, c| match (r, c) {
                (0, 1) => f.neg(one),
                _ => one,
            });
            red.apply_block(&[t, t + 1], &split);
        }
    }

    // scalars first, then hyperbolic blocks
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut hyper: Vec<usize> = Vec::new();
    let mut pos = 0;
    for blk in &blocks {
        match blk {
            FormBlock::Scalar(_) => {
                order.push(pos);
                pos += 1;
            }
            FormBlock::Hyperbolic(_) => {
                hyper.extend([pos, pos + 1]);
                pos += 2;
            }
        }
    }
    order.extend(hyper);
    order.extend(pos..n);
    let perm = MatrixFq::from_fn(f.clone(), n, n, |i, j| {
        if order[j] == i {
            Elem::ONE
        } else {
            Elem::ZERO
        }
    });
    let transform = red.transform.mul(&perm)?;
    let form = red.form.congruent_by(&perm)?;
    let (mut scalars, mut hyps): (Vec<FormBlock>, Vec<FormBlock>) = blocks
        .into_iter()
        .partition(|b| matches!(b, FormBlock::Scalar(_)));
    scalars.append(&mut hyps);
    Ok(CongruenceForm {
        transform,
        form,
        blocks: scalars,
    })
}

/// Congruence class tag of an invertible symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassTag {
    /// Even `q`: congruent to the identity.
    Identity,
    /// Even `q`: alternating form, congruent to `diag(H, ..., H)`.
    Symplectic,
    /// Odd `q`: square determinant, congruent to the identity.
    SquareDet,
    /// Odd `q`: nonsquare determinant, congruent to `diag(I, ν)`.
    NonsquareDet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceClass {
    pub order: usize,
    pub tag: ClassTag,
    /// Class up to a nonzero scalar factor. For odd `q` and odd order every
    /// form is projectively congruent to the identity.
    pub projective_tag: ClassTag,
}

impl CongruenceClass {
    /// Index of the matching matrix in [`canonical_representatives`].
    pub fn representative_index(&self) -> usize {
        match self.projective_tag {
            ClassTag::Identity | ClassTag::SquareDet => 0,
            ClassTag::Symplectic | ClassTag::NonsquareDet => 1,
        }
    }
}

/// Classifies an invertible symmetric matrix up to congruence.
pub fn classify_invertible_symmetric(b: &MatrixFq) -> Result<CongruenceClass, MatrixError> {
    b.require_symmetric()?;
    let k = b.rows;
    if k == 0 {
        return Err(MatrixError::Empty);
    }
    let f = b.field.clone();
    let cf = congruence_diagonalize(b)?;
    if cf.rank() != k {
        return Err(MatrixError::Singular);
    }
    if f.is_even() {
        let symplectic = cf.scalar_count() == 0;
        debug_assert_eq!(symplectic, (0..k).all(|i| b.get(i, i).is_zero()));
        let tag = if symplectic {
            ClassTag::Symplectic
        } else {
            ClassTag::Identity
        };
        Ok(CongruenceClass {
            order: k,
            tag,
            projective_tag: tag,
        })
    } else {
        let det = b.determinant()?;
        let square = f.is_square(det);
        // det(CᵗBC) = det(C)² det(B)
        debug_assert_eq!(
            square,
            f.is_square(cf.blocks.iter().fold(Elem::ONE, |acc, blk| match blk {
                FormBlock::Scalar(a) => f.mul(acc, *a),
                FormBlock::Hyperbolic(_) => unreachable!("odd characteristic form is diagonal"),
            }))
        );
        let tag = if square {
            ClassTag::SquareDet
        } else {
            ClassTag::NonsquareDet
        };
        let projective_tag = if k % 2 == 1 { ClassTag::Identity } else { tag };
        Ok(CongruenceClass {
            order: k,
            tag,
            projective_tag,
        })
    }
}

/// One representative per projective congruence class of invertible
/// symmetric `k x k` matrices:
/// `{I}` for odd `k`; `{I, diag(H..H)}` for even `k`, even `q`;
/// `{I, diag(I, ν)}` for even `k`, odd `q`. Order 0 yields the empty matrix.
pub fn canonical_representatives(field: &Arc<FieldCtx>, k: usize) -> Vec<MatrixFq> {
    let id = MatrixFq::identity(field.clone(), k);
    if k % 2 == 1 || k == 0 {
        return vec![id];
    }
    let second = if field.is_even() {
        MatrixFq::hyperbolic(field.clone(), k / 2)
    } else {
        let nu = field.find_nonsquare().expect("odd field has a nonsquare");
        let mut d = vec![Elem::ONE; k];
        d[k - 1] = nu;
        MatrixFq::diag(field.clone(), &d)
    };
    vec![id, second]
}

/// Carries an invertible symmetric matrix all the way to its congruence
/// representative: returns `(C, R)` with `CᵗBC = R` and `R` either `I_k`,
/// `diag(H..H)` (even `q`) or `diag(I_{k-1}, ν)` (odd `q`).
pub fn congruence_normalize(b: &MatrixFq) -> Result<(MatrixFq, MatrixFq), MatrixError> {
    let k = b.rows;
    if k == 0 {
        return Err(MatrixError::Empty);
    }
    let f = b.field.clone();
    let cf = congruence_diagonalize(b)?;
    if cf.rank() != k {
        return Err(MatrixError::Singular);
    }
    let mut red = Reducer {
        form: cf.form,
        transform: cf.transform,
    };
    if f.is_even() {
        let s = cf
            .blocks
            .iter()
            .filter(|b| matches!(b, FormBlock::Scalar(_)))
            .count();
        // every element is a square: scale to diag(I_s, H, ..., H)
        let mut pos = 0;
        for blk in &cf.blocks {
            match *blk {
                FormBlock::Scalar(a) => {
                    red.scale(pos, f.inv(f.sqrt(a)?)?);
                    pos += 1;
                }
                FormBlock::Hyperbolic(b) => {
                    let r = f.inv(f.sqrt(b)?)?;
                    red.scale(pos, r);
                    red.scale(pos + 1, r);
                    pos += 2;
                }
            }
        }
        if s > 0 {
            // diag(1, H) is congruent to I_3 via C = [[1,1,1],[1,0,1],[0,1,1]]
            let c3 = MatrixFq::from_reps(f.clone(), 3, 3, &[1, 1, 1, 1, 0, 1, 0, 1, 1])?;
            let mut last_one = s - 1;
            while last_one + 2 < k {
                red.apply_block(&[last_one, last_one + 1, last_one + 2], &c3);
                last_one += 2;
            }
        }
    } else {
        let nu = f.find_nonsquare()?;
        let mut nonsquare_pos = Vec::new();
        for i in 0..k {
            let a = red.form.get(i, i);
            if f.is_square(a) {
                red.scale(i, f.inv(f.sqrt(a)?)?);
            } else {
                // a = ν b²
                let b = f.sqrt(f.div(a, nu)?)?;
                red.scale(i, f.inv(b)?);
                nonsquare_pos.push(i);
            }
        }
        // move the ν entries to the end, keeping their relative order
        let squares: Vec<usize> = (0..k).filter(|i| !nonsquare_pos.contains(i)).collect();
        let order: Vec<usize> = squares
            .into_iter()
            .chain(nonsquare_pos.iter().copied())
            .collect();
        let perm = MatrixFq::from_fn(f.clone(), k, k, |i, j| {
            if order[j] == i {
                Elem::ONE
            } else {
                Elem::ZERO
            }
        });
        red.form = red.form.congruent_by(&perm)?;
        red.transform = red.transform.mul(&perm)?;
        // pair up ν's: Rᵗ(νI₂)R = I₂ with R = ν⁻¹[[c,d],[-d,c]], c² + d² = ν
        let (c, d) = f.sum_of_two_squares(nu)?;
        let nu_inv = f.inv(nu)?;
        let r = MatrixFq::from_fn(f.clone(), 2, 2, |i, j| {
            let x = match (i, j) {
                (0, 0) | (1, 1) => c,
                (0, 1) => d,
                _ => f.neg(d),
            };
            f.mul(nu_inv, x)
        });
        let t = nonsquare_pos.len();
        let start = k - t;
        for pair in 0..t / 2 {
            let i = start + 2 * pair;
            red.apply_block(&[i, i + 1], &r);
        }
    }
    Ok((red.transform, red.form))
}

/// `A = Uᵗ B U` with `B` an invertible principal submatrix of `A`.
#[derive(Clone, Debug)]
pub struct RankDecomposition {
    /// Indices of the principal submatrix `B`, ascending.
    pub pivots: Vec<usize>,
    pub b: MatrixFq,
    pub u: MatrixFq,
}

/// Factors a symmetric matrix of rank `r` as `UᵗBU`, `B` an invertible
/// principal `r x r` submatrix.
///
/// Pivot indices come from symmetric elimination: the smallest nonzero
/// diagonal entry of the current Schur complement, else the smallest
/// off-diagonal pair (whose diagonal entries are then zero).
pub fn rank_decomposition(a: &MatrixFq) -> Result<RankDecomposition, MatrixError> {
    a.require_symmetric()?;
    let n = a.rows;
    let f = a.field.clone();
    let mut schur = a.clone();
    let mut active: Vec<bool> = vec![true; n];
    let mut pivots = Vec::new();
    loop {
        let live: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        if let Some(&i) = live.iter().find(|&&i| !schur.get(i, i).is_zero()) {
            let inv = f.inv(schur.get(i, i))?;
            active[i] = false;
            pivots.push(i);
            let col: Vec<Elem> = (0..n).map(|r| schur.get(r, i)).collect();
            for &r in &live {
                for &c in &live {
                    if r == i || c == i || col[r].is_zero() || col[c].is_zero() {
                        continue;
                    }
                    let v = f.sub(schur.get(r, c), f.mul(f.mul(col[r], inv), col[c]));
                    schur.set(r, c, v);
                }
            }
            continue;
        }
        let pair = live.iter().enumerate().find_map(|(x, &i)| {
            live[x + 1..]
                .iter()
                .find(|&&j| !schur.get(i, j).is_zero())
                .map(|&j| (i, j))
        });
        let Some((i, j)) = pair else { break };
        let a_inv = f.inv(schur.get(i, j))?;
        active[i] = false;
        active[j] = false;
        pivots.extend([i, j]);
        let ci: Vec<Elem> = (0..n).map(|r| schur.get(r, i)).collect();
        let cj: Vec<Elem> = (0..n).map(|r| schur.get(r, j)).collect();
        for &r in &live {
            for &c in &live {
                if r == i || r == j || c == i || c == j {
                    continue;
                }
                // [ci cj] (a⁻¹H) [ci cj]ᵗ = a⁻¹ (ci_r cj_c + cj_r ci_c)
                let t = f.add(f.mul(ci[r], cj[c]), f.mul(cj[r], ci[c]));
                if t.is_zero() {
                    continue;
                }
                let v = f.sub(schur.get(r, c), f.mul(a_inv, t));
                schur.set(r, c, v);
            }
        }
    }
    pivots.sort_unstable();
    let b = a.principal_submatrix(&pivots);
    let u = if pivots.is_empty() {
        MatrixFq::zeros(f, 0, n)
    } else {
        b.solve(&a.select_rows(&pivots))?
    };
    Ok(RankDecomposition { pivots, b, u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field(q: u64) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::with_order(q).unwrap())
    }

    fn m(f: &Arc<FieldCtx>, n: usize, reps: &[u32]) -> MatrixFq {
        MatrixFq::from_reps(f.clone(), n, reps.len() / n, reps).unwrap()
    }

    fn fullhouse_f2() -> MatrixFq {
        let f = field(2);
        m(
            &f,
            5,
            &[
                1, 1, 1, 0, 0, //
                1, 1, 1, 1, 1, //
                1, 1, 1, 1, 1, //
                0, 1, 1, 1, 1, //
                0, 1, 1, 1, 1,
            ],
        )
    }

    /// Every symmetric `n x n` matrix over GF(q).
    fn all_symmetric(f: &Arc<FieldCtx>, n: usize) -> Vec<MatrixFq> {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let q = f.q();
        let total = (q as usize).pow(slots.len() as u32);
        (0..total)
            .map(|mut code| {
                let mut mat = MatrixFq::zeros(f.clone(), n, n);
                for &(i, j) in &slots {
                    let x = Elem((code % q as usize) as u32);
                    code /= q as usize;
                    mat.set(i, j, x);
                    mat.set(j, i, x);
                }
                mat
            })
            .collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(MatrixFq::identity(field(2), 3).rank(), 3);
        assert_eq!(fullhouse_f2().rank(), 3);
        let f3 = field(3);
        assert_eq!(m(&f3, 5, &[1; 25]).rank(), 1);
        assert_eq!(MatrixFq::zeros(f3.clone(), 0, 0).rank(), 0);
        assert_eq!(MatrixFq::zeros(f3, 4, 4).rank(), 0);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        fn cofactor(mat: &MatrixFq) -> Elem {
            let f = mat.field().clone();
            let n = mat.rows();
            if n == 1 {
                return mat.get(0, 0);
            }
            let mut acc = Elem::ZERO;
            for j in 0..n {
                let minor = MatrixFq::from_fn(f.clone(), n - 1, n - 1, |r, c| {
                    mat.get(r + 1, if c < j { c } else { c + 1 })
                });
                let term = f.mul(mat.get(0, j), cofactor(&minor));
                acc = if j % 2 == 0 {
                    f.add(acc, term)
                } else {
                    f.sub(acc, term)
                };
            }
            acc
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u64, 3, 4, 5, 7, 9] {
            let f = field(q);
            for n in 1..=4 {
                for _ in 0..30 {
                    let a = MatrixFq::random(f.clone(), n, n, &mut rng);
                    assert_eq!(a.determinant().unwrap(), cofactor(&a));
                }
            }
        }
    }

    #[test]
    fn diagonalize_examples() {
        let f3 = field(3);
        let zero = MatrixFq::zeros(f3.clone(), 3, 3);
        let cf = congruence_diagonalize(&zero).unwrap();
        assert_eq!(cf.transform, MatrixFq::identity(f3.clone(), 3));
        assert_eq!(cf.form, zero);
        assert!(cf.blocks.is_empty());

        let h3 = MatrixFq::hyperbolic(f3.clone(), 1);
        let cf = congruence_diagonalize(&h3).unwrap();
        assert_eq!(cf.form, MatrixFq::diag(f3.clone(), &[Elem(2), Elem(1)]));
        assert_eq!(h3.congruent_by(&cf.transform).unwrap(), cf.form);

        let f2 = field(2);
        let h2 = MatrixFq::hyperbolic(f2.clone(), 1);
        let cf = congruence_diagonalize(&h2).unwrap();
        assert_eq!(cf.form, h2);
        assert_eq!(cf.blocks, vec![FormBlock::Hyperbolic(Elem::ONE)]);
    }

    #[test]
    fn diagonalize_exhaustive_small() {
        for q in [2u64, 3, 4] {
            let f = field(q);
            for n in 1..=3 {
                for a in all_symmetric(&f, n) {
                    let cf = congruence_diagonalize(&a).unwrap();
                    assert_eq!(cf.transform.rank(), n);
                    assert_eq!(a.congruent_by(&cf.transform).unwrap(), cf.form);
                    assert_eq!(cf.rank(), a.rank());
                    let mut blocks: Vec<MatrixFq> = cf
                        .blocks
                        .iter()
                        .map(|blk| match *blk {
                            FormBlock::Scalar(x) => MatrixFq::diag(f.clone(), &[x]),
                            FormBlock::Hyperbolic(x) => {
                                assert!(f.is_even());
                                MatrixFq::hyperbolic(f.clone(), 1).scale(x)
                            }
                        })
                        .collect();
                    blocks.push(MatrixFq::zeros(f.clone(), n - cf.rank(), n - cf.rank()));
                    assert_eq!(cf.form, MatrixFq::block_diag(f.clone(), &blocks));
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let f2 = field(2);
        let c = classify_invertible_symmetric(&MatrixFq::hyperbolic(f2.clone(), 1)).unwrap();
        assert_eq!(c.tag, ClassTag::Symplectic);
        let c = classify_invertible_symmetric(&m(&f2, 2, &[1, 1, 1, 0])).unwrap();
        assert_eq!(c.tag, ClassTag::Identity);

        let f3 = field(3);
        let c = classify_invertible_symmetric(&MatrixFq::diag(f3.clone(), &[Elem(1), Elem(2)]))
            .unwrap();
        assert_eq!(c.tag, ClassTag::NonsquareDet);
        assert_eq!(c.projective_tag, ClassTag::NonsquareDet);
        let c = classify_invertible_symmetric(&MatrixFq::diag(
            f3.clone(),
            &[Elem(1), Elem(1), Elem(2)],
        ))
        .unwrap();
        assert_eq!(c.tag, ClassTag::NonsquareDet);
        assert_eq!(c.projective_tag, ClassTag::Identity);
        assert_eq!(c.representative_index(), 0);
    }

    #[test]
    fn classify_errors() {
        let f3 = field(3);
        assert_eq!(
            classify_invertible_symmetric(&MatrixFq::zeros(f3.clone(), 0, 0)),
            Err(MatrixError::Empty)
        );
        assert_eq!(
            classify_invertible_symmetric(&MatrixFq::diag(f3.clone(), &[Elem(1), Elem(0)])),
            Err(MatrixError::Singular)
        );
        assert_eq!(
            classify_invertible_symmetric(&m(&f3, 2, &[1, 1, 0, 1])),
            Err(MatrixError::NotSymmetric)
        );
    }

    #[test]
    fn representatives() {
        let f2 = field(2);
        assert_eq!(
            canonical_representatives(&f2, 3),
            vec![MatrixFq::identity(f2.clone(), 3)]
        );
        assert_eq!(
            canonical_representatives(&f2, 4),
            vec![
                MatrixFq::identity(f2.clone(), 4),
                MatrixFq::hyperbolic(f2.clone(), 2)
            ]
        );
        let f3 = field(3);
        assert_eq!(
            canonical_representatives(&f3, 2),
            vec![
                MatrixFq::identity(f3.clone(), 2),
                MatrixFq::diag(f3.clone(), &[Elem(1), Elem(2)])
            ]
        );
        assert_eq!(canonical_representatives(&f3, 0).len(), 1);
    }

    #[test]
    fn normalize_reaches_representative() {
        // the published witness for diag(1, H) ≅ I_3 in characteristic 2
        let f2 = field(2);
        let a = MatrixFq::block_diag(
            f2.clone(),
            &[
                MatrixFq::identity(f2.clone(), 1),
                MatrixFq::hyperbolic(f2.clone(), 1),
            ],
        );
        let c = m(&f2, 3, &[1, 1, 1, 1, 0, 1, 0, 1, 1]);
        assert_eq!(
            a.congruent_by(&c).unwrap(),
            MatrixFq::identity(f2.clone(), 3)
        );

        for q in [2u64, 3, 4, 5, 9] {
            let f = field(q);
            for n in 1..=3 {
                for a in all_symmetric(&f, n)
                    .into_iter()
                    .filter(|a| a.rank() == n)
                    .take(400)
                {
                    let class = classify_invertible_symmetric(&a).unwrap();
                    let (c, r) = congruence_normalize(&a).unwrap();
                    assert_eq!(a.congruent_by(&c).unwrap(), r);
                    let expected = match class.tag {
                        ClassTag::Identity | ClassTag::SquareDet => {
                            MatrixFq::identity(f.clone(), n)
                        }
                        ClassTag::Symplectic => MatrixFq::hyperbolic(f.clone(), n / 2),
                        ClassTag::NonsquareDet => {
                            let mut d = vec![Elem::ONE; n];
                            d[n - 1] = f.find_nonsquare().unwrap();
                            MatrixFq::diag(f.clone(), &d)
                        }
                    };
                    assert_eq!(r, expected);
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let f3 = field(3);
        let id = MatrixFq::identity(f3.clone(), 4);
        let d = rank_decomposition(&id).unwrap();
        assert_eq!(d.b, id);
        assert_eq!(d.u, id);

        let ones = m(&f3, 4, &[1; 16]);
        let d = rank_decomposition(&ones).unwrap();
        assert_eq!(d.b, m(&f3, 1, &[1]));
        assert_eq!(d.u, m(&f3, 1, &[1, 1, 1, 1]));

        let fh = fullhouse_f2();
        let d = rank_decomposition(&fh).unwrap();
        assert_eq!(d.b.rows(), 3);
        assert_eq!(
            fh.congruent_by(&MatrixFq::identity(field(2), 5)).unwrap(),
            fh
        );
        assert_eq!(d.b.congruent_by(&d.u).unwrap(), fh);
    }

    #[test]
    fn decomposition_exhaustive_f2() {
        let f2 = field(2);
        for n in 0..=4 {
            for a in all_symmetric(&f2, n) {
                let d = rank_decomposition(&a).unwrap();
                assert_eq!(d.b.rows(), a.rank());
                assert_eq!(d.b.rank(), d.b.rows());
                if n > 0 {
                    assert_eq!(d.b.congruent_by(&d.u).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn zero_diagonal_is_congruence_invariant_in_char_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2u64, 4, 8] {
            let f = field(q);
            for n in 1..=5 {
                for _ in 0..40 {
                    let mut b = MatrixFq::random_symmetric(f.clone(), n, &mut rng);
                    for i in 0..n {
                        b.set(i, i, Elem::ZERO);
                    }
                    let c = MatrixFq::random(f.clone(), n, n, &mut rng);
                    let cbc = b.congruent_by(&c).unwrap();
                    assert!((0..n).all(|i| cbc.get(i, i).is_zero()));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f9 = field(9);
        let a = m(&f9, 2, &[1, 5, 5, 8]);
        let json = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(
            json,
            r#"{"field":{"p":3,"e":2,"modulus":[1,0,1]},"rows":2,"cols":2,"entries":[1,5,5,8]}"#
        );
        let back: MatrixJson = serde_json::from_str(&json).unwrap();
        assert_eq!(MatrixFq::from_json(&back).unwrap(), a);
        let bad = MatrixJson {
            entries: vec![9],
            ..a.to_json()
        };
        assert!(MatrixFq::from_json(&bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn rank_is_congruence_invariant(q_idx in 0usize..4, n in 1usize..=6, seed in any::<u64>()) {
                let f = field([2u64, 3, 4, 5][q_idx]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = MatrixFq::random_symmetric(f.clone(), n, &mut rng);
                let c = MatrixFq::random_invertible(f, n, &mut rng);
                prop_assert_eq!(a.congruent_by(&c).unwrap().rank(), a.rank());
            }

            #[test]
            fn class_is_congruence_invariant(q_idx in 0usize..5, n in 1usize..=5, seed in any::<u64>()) {
                let f = field([2u64, 3, 4, 5, 9][q_idx]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let b = loop {
                    let b = MatrixFq::random_symmetric(f.clone(), n, &mut rng);
                    if b.rank() == n { break b; }
                };
                let c = MatrixFq::random_invertible(f, n, &mut rng);
                prop_assert_eq!(
                    classify_invertible_symmetric(&b).unwrap(),
                    classify_invertible_symmetric(&b.congruent_by(&c).unwrap()).unwrap()
                );
            }

            #[test]
            fn decomposition_reproduces(q_idx in 0usize..3, n in 1usize..=6, seed in any::<u64>()) {
                let f = field([3u64, 4, 5][q_idx]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // low-rank inputs hit the interesting branches
                let r = rng.gen_range(0..=n);
                let w = MatrixFq::random(f.clone(), r, n, &mut rng);
                let core = MatrixFq::random_symmetric(f, r, &mut rng);
                let a = core.congruent_by(&w).unwrap();
                let d = rank_decomposition(&a).unwrap();
                prop_assert_eq!(d.b.rows(), a.rank());
                prop_assert_eq!(d.b.rank(), d.b.rows());
                prop_assert_eq!(d.b.congruent_by(&d.u).unwrap(), a);
            }
        }
    }
}
