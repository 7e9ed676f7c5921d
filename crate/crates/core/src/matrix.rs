//! Dense matrices over a finite field, Vandermonde construction and
//! super-regularity testing.
//!
//! Row and column indices in [`SubmatrixSelector`] are 1-indexed; the
//! element accessors on [`MatrixF`] are 0-indexed.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, first_combination, next_combination};
use crate::galois::{FieldCtx, FieldElem, FieldError, FieldSpec};

/// Shared handle to a field.
pub type Field = Arc<FieldCtx>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("cannot combine a {0}x{1} matrix with a {2}x{3} matrix")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("scalar {index} is zero")]
    ZeroScalar { index: usize },
    #[error("scalars {first} and {second} are equal")]
    RepeatedScalar { first: usize, second: usize },
    #[error("invalid selector: {0}")]
    BadSelector(String),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Scalars (xi_1, ..., xi_r) defining the columns of a Vandermonde matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarVector(pub Vec<FieldElem>);

impl ScalarVector {
    pub fn new(xi: Vec<FieldElem>) -> Self {
        ScalarVector(xi)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[FieldElem] {
        &self.0
    }

    pub fn ensure_nonzero(&self) -> Result<(), MatrixError> {
        match self.0.iter().position(|x| x.is_zero()) {
            Some(i) => Err(MatrixError::ZeroScalar { index: i + 1 }),
            None => Ok(()),
        }
    }

    pub fn ensure_distinct(&self) -> Result<(), MatrixError> {
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                if self.0[i] == self.0[j] {
                    return Err(MatrixError::RepeatedScalar { first: i + 1, second: j + 1 });
                }
            }
        }
        Ok(())
    }

    /// Nonzero and pairwise distinct.
    pub fn validate(&self) -> Result<(), MatrixError> {
        self.ensure_nonzero()?;
        self.ensure_distinct()
    }

    pub fn prefix(&self, r: usize) -> ScalarVector {
        ScalarVector(self.0[..r.min(self.0.len())].to_vec())
    }
}

/// Row set `rows` and column set `cols`, both sorted and 1-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubmatrixSelector {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl SubmatrixSelector {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        SubmatrixSelector { rows, cols }
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }
}

/// Dense row-major matrix over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixF {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElem>,
}

impl MatrixF {
    pub fn new(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElem>,
    ) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch { expected: rows * cols, got: entries.len() });
        }
        if let Some(bad) = entries.iter().find(|&&e| !field.contains(e)) {
            return Err(FieldError::OutOfRange { value: bad.0 as u64, q: field.q() }.into());
        }
        Ok(MatrixF { field, rows, cols, entries })
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldElem>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(MatrixError::ShapeMismatch { expected: c, got: bad.len() });
        }
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        MatrixF { field, rows, cols, entries: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = FieldElem::ONE;
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// The submatrix at 1-indexed `sel.rows` x `sel.cols`.
    pub fn submatrix(&self, sel: &SubmatrixSelector) -> Result<MatrixF, MatrixError> {
        let in_range = |ix: &[usize], bound: usize| ix.iter().all(|&i| i >= 1 && i <= bound);
        if !in_range(&sel.rows, self.rows) || !in_range(&sel.cols, self.cols) {
            return Err(MatrixError::BadSelector(format!(
                "{:?} x {:?} outside a {}x{} matrix",
                sel.rows, sel.cols, self.rows, self.cols
            )));
        }
        let mut entries = Vec::with_capacity(sel.rows.len() * sel.cols.len());
        for &i in &sel.rows {
            for &j in &sel.cols {
                entries.push(self.get(i - 1, j - 1));
            }
        }
        Ok(MatrixF { field: self.field.clone(), rows: sel.rows.len(), cols: sel.cols.len(), entries })
    }

    /// Matrix with only the given 0-indexed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> MatrixF {
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                entries.push(self.get(i, j));
            }
        }
        MatrixF { field: self.field.clone(), rows: self.rows, cols: cols.len(), entries }
    }

    pub fn mul(&self, other: &MatrixF) -> Result<MatrixF, MatrixError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields.into());
        }
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(self.rows, self.cols, other.rows, other.cols));
        }
        let f = &self.field;
        let mut out = MatrixF::zeros(self.field.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = FieldElem::ZERO;
                for t in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, t), other.get(t, j)));
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>, MatrixError> {
        if v.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(1, v.len(), self.rows, self.cols));
        }
        let f = &self.field;
        Ok((0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .fold(FieldElem::ZERO, |acc, (i, &x)| f.add(acc, f.mul(x, self.get(i, j))))
            })
            .collect())
    }

    pub fn determinant(&self) -> Result<FieldElem, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut scratch = self.entries.clone();
        Ok(det_in_place(&self.field, &mut scratch, self.rows))
    }

    /// Solves `self * x = rhs` for square non-singular `self`.
    pub fn solve(&self, rhs: &[FieldElem]) -> Result<Vec<FieldElem>, MatrixError> {
        let n = self.rows;
        if n != self.cols {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        if rhs.len() != n {
            return Err(MatrixError::DimensionMismatch(n, n, rhs.len(), 1));
        }
        let f = &self.field;
        let w = n + 1;
        let mut a: Vec<FieldElem> = Vec::with_capacity(n * w);
        for (i, &b) in rhs.iter().enumerate() {
            a.extend_from_slice(self.row(i));
            a.push(b);
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * w + col].is_zero()).ok_or(MatrixError::Singular)?;
            if pivot != col {
                for j in 0..w {
                    a.swap(pivot * w + j, col * w + j);
                }
            }
            let inv = f.inv(a[col * w + col])?;
            for j in col..w {
                a[col * w + j] = f.mul(a[col * w + j], inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * w + col];
                if factor.is_zero() {
                    continue;
                }
                for j in col..w {
                    let v = f.sub(a[r * w + j], f.mul(factor, a[col * w + j]));
                    a[r * w + j] = v;
                }
            }
        }
        Ok((0..n).map(|i| a[i * w + n]).collect())
    }

    /// True when row 1 is all ones, row 2 is nonzero and every later row is
    /// the previous row times row 2 entrywise.
    pub fn is_vandermonde_nonzero(&self) -> bool {
        if self.rows == 0 || self.row(0).iter().any(|&e| e != FieldElem::ONE) {
            return false;
        }
        if self.rows == 1 {
            return true;
        }
        let f = &self.field;
        let base = self.row(1);
        if base.iter().any(|e| e.is_zero()) {
            return false;
        }
        (2..self.rows).all(|i| {
            (0..self.cols).all(|j| self.get(i, j) == f.mul(self.get(i - 1, j), base[j]))
        })
    }

    pub fn to_json(&self, with_field: bool) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows().into_iter().map(|r| r.into_iter().map(|e| e.0).collect()).collect(),
            field: with_field.then(|| self.field.spec().clone()),
        }
    }

    pub fn from_json(field: Field, json: &MatrixJson) -> Result<Self, MatrixError> {
        if json.entries.len() != json.rows {
            return Err(MatrixError::ShapeMismatch { expected: json.rows, got: json.entries.len() });
        }
        let rows = json
            .entries
            .iter()
            .map(|r| {
                if r.len() != json.cols {
                    return Err(MatrixError::ShapeMismatch { expected: json.cols, got: r.len() });
                }
                r.iter().map(|&v| Ok(field.elem(v as u64)?)).collect::<Result<Vec<_>, MatrixError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, json.rows, json.cols, rows.into_iter().flatten().collect())
    }
}

/// Wire form of a matrix: `{"rows": k, "cols": r, "entries": [[...], ...]}`,
/// optionally tagged with the field it lives in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
}

/// Determinant by Gaussian elimination; `a` is overwritten.
pub(crate) fn det_in_place(f: &FieldCtx, a: &mut [FieldElem], n: usize) -> FieldElem {
    match n {
        0 => return FieldElem::ONE,
        1 => return a[0],
        2 => return f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2])),
        3 => {
            let m = |x, y| f.mul(x, y);
            let t0 = m(a[0], f.sub(m(a[4], a[8]), m(a[5], a[7])));
            let t1 = m(a[1], f.sub(m(a[3], a[8]), m(a[5], a[6])));
            let t2 = m(a[2], f.sub(m(a[3], a[7]), m(a[4], a[6])));
            return f.add(f.sub(t0, t1), t2);
        }
        _ => {}
    }
    let mut det = FieldElem::ONE;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
            return FieldElem::ZERO;
        };
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            det = f.neg(det);
        }
        let pv = a[col * n + col];
        det = f.mul(det, pv);
        let inv = f.inv(pv).expect("pivot is nonzero");
        for r in col + 1..n {
            let factor = f.mul(a[r * n + col], inv);
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                let v = f.sub(a[r * n + j], f.mul(factor, a[col * n + j]));
                a[r * n + j] = v;
            }
        }
    }
    det
}

/// The k x r matrix with entry (i, j) = xi_j^(i-1).
pub fn vandermonde(field: &Field, k: usize, xi: &ScalarVector) -> Result<MatrixF, MatrixError> {
    xi.ensure_nonzero()?;
    if let Some(bad) = xi.0.iter().find(|&&x| !field.contains(x)) {
        return Err(FieldError::OutOfRange { value: bad.0 as u64, q: field.q() }.into());
    }
    let r = xi.len();
    let mut entries = Vec::with_capacity(k * r);
    let mut row = vec![FieldElem::ONE; r];
    for _ in 0..k {
        entries.extend_from_slice(&row);
        for (x, &s) in row.iter_mut().zip(&xi.0) {
            *x = field.mul(*x, s);
        }
    }
    Ok(MatrixF { field: field.clone(), rows: k, cols: r, entries })
}

/// Re-anchors a sorted row set so that it starts at row 1:
/// `{a1, a2, ..., al} -> {1, a2 - (a1 - 1), ..., al - (a1 - 1)}`.
pub fn shift_selector(rows: &[usize]) -> Vec<usize> {
    match rows.first() {
        Some(&a1) => rows.iter().map(|&a| a - (a1 - 1)).collect(),
        None => Vec::new(),
    }
}

/// Outcome of a super-regularity scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperRegularity {
    pub super_regular: bool,
    /// First singular selector in (size, rows, cols) order.
    pub witness: Option<SubmatrixSelector>,
    /// Determinants evaluated, counted in the fixed enumeration order up to
    /// and including the witness.
    pub determinants: u64,
    /// Whether only row sets containing row 1 were enumerated.
    pub reduced: bool,
}

/// Checks that every square submatrix of `m` is non-singular.
///
/// With `use_vandermonde_reduction` set and `m` a Vandermonde matrix with
/// nonzero scalars, only row sets containing row 1 are examined: shifting a
/// row set down to start at row 1 scales each column by a nonzero power of
/// its scalar, which preserves singularity. Other matrices always get the
/// full enumeration.
pub fn is_super_regular(m: &MatrixF, use_vandermonde_reduction: bool) -> SuperRegularity {
    let reduced = use_vandermonde_reduction && m.is_vandermonde_nonzero();
    let (k, r) = (m.rows, m.cols);
    let mut determinants = 0u64;
    for size in 1..=k.min(r) {
        let col_sets = all_combinations(size, r);
        let (prefix, free, lo) = if reduced { (vec![1], size - 1, 2) } else { (Vec::new(), size, 1) };
        let (count, witness) = scan_size(m, &prefix, free, lo, &col_sets);
        determinants += count;
        if witness.is_some() {
            return SuperRegularity { super_regular: false, witness, determinants, reduced };
        }
    }
    SuperRegularity { super_regular: true, witness: None, determinants, reduced }
}

fn all_combinations(t: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if let Some(mut c) = first_combination(t, 1, n) {
        loop {
            out.push(c.clone());
            if !next_combination(&mut c, n) {
                break;
            }
        }
    }
    out
}

/// Scans all selectors whose rows are `prefix` followed by a `free`-subset of
/// `lo..=rows`. Returns the logical determinant count and the first witness.
fn scan_size(
    m: &MatrixF,
    prefix: &[usize],
    free: usize,
    lo: usize,
    col_sets: &[Vec<usize>],
) -> (u64, Option<SubmatrixSelector>) {
    let k = m.rows;
    let ncols = col_sets.len() as u64;
    if free == 0 {
        let mut scratch = Vec::new();
        return scan_rows(m, prefix, col_sets, &mut scratch, 0)
            .map_or((ncols, None), |(c, w)| (c, Some(w)));
    }
    if k < lo || k - lo + 1 < free {
        return (0, None);
    }
    let last_head = k + 1 - free;
    // tails per head: C(k - h, free - 1)
    let tails = |h: usize| arith::binomial((k - h) as u64, (free - 1) as u64);
    let hit = (lo..=last_head).into_par_iter().find_map_first(|head| {
        let mut rows: Vec<usize> = prefix.to_vec();
        rows.push(head);
        let base = rows.len();
        let mut tail = first_combination(free - 1, head + 1, k)?;
        rows.extend_from_slice(&tail);
        let mut scratch = Vec::new();
        let mut count = 0u64;
        loop {
            if let Some((c, w)) = scan_rows(m, &rows, col_sets, &mut scratch, count) {
                return Some((head, c, w));
            }
            count += ncols;
            if !next_combination(&mut tail, k) {
                return None;
            }
            rows.truncate(base);
            rows.extend_from_slice(&tail);
        }
    });
    match hit {
        Some((head, within, w)) => {
            let before: u64 = (lo..head).map(|h| tails(h) * ncols).sum();
            (before + within, Some(w))
        }
        None => (arith::binomial((k - lo + 1) as u64, free as u64) * ncols, None),
    }
}

fn scan_rows(
    m: &MatrixF,
    rows: &[usize],
    col_sets: &[Vec<usize>],
    scratch: &mut Vec<FieldElem>,
    mut count: u64,
) -> Option<(u64, SubmatrixSelector)> {
    let n = rows.len();
    for cols in col_sets {
        count += 1;
        scratch.clear();
        for &i in rows {
            for &j in cols {
                scratch.push(m.get(i - 1, j - 1));
            }
        }
        if det_in_place(&m.field, scratch, n).is_zero() {
            return Some((count, SubmatrixSelector::new(rows.to_vec(), cols.clone())));
        }
    }
    None
}
