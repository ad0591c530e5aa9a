//! Sparse (CSR) and dense row-major matrices, and the handful of kernels the
//! pipeline needs: sparse × sparse, sparse × dense, scaled addition and row
//! normalization.
//!
//! All kernels are pure and parallelize over output rows; results are
//! identical whatever the thread count.

use crate::error::{Error, Result};
use crate::par;

/// Stored entries with magnitude below this are dropped.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Compressed sparse row matrix.
///
/// Invariants: `row_offsets.len() == n_rows + 1`, offsets non-decreasing and
/// ending at `values.len()`; column indices strictly increasing within a row
/// and `< n_cols`; no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, checking every invariant.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::config(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if col_indices.len() != values.len() {
            return Err(Error::config("col_indices and values differ in length"));
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != values.len() {
            return Err(Error::config("row_offsets must start at 0 and end at nnz"));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::config(format!("row_offsets decrease at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(format!(
                    "column indices of row {i} are not strictly increasing"
                )));
            }
            if cols.last().is_some_and(|&c| c >= n_cols) {
                return Err(Error::config(format!("column index out of range in row {i}")));
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v == 0.0) {
            return Err(Error::config(format!("invalid stored value {v}")));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Assembles a matrix from per-row entry lists. Entries within a row may
    /// be unsorted and repeated; repeats are summed and near-zeros dropped.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n_rows = rows.len();
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        row_offsets.push(0);
        let nnz_hint = rows.iter().map(Vec::len).sum();
        let mut col_indices = Vec::with_capacity(nnz_hint);
        let mut values = Vec::with_capacity(nnz_hint);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                if c >= n_cols {
                    return Err(Error::config(format!(
                        "column {c} out of range in row {i} (n_cols = {n_cols})"
                    )));
                }
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if !v.is_finite() {
                    return Err(Error::config(format!("non-finite value at ({i}, {c})")));
                }
                if v.abs() >= ZERO_TOLERANCE {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); n_rows];
        for (r, c, v) in triplets {
            if r >= n_rows {
                return Err(Error::config(format!(
                    "row {r} out of range (n_rows = {n_rows})"
                )));
            }
            rows[r].push((c, v));
        }
        Self::from_rows(n_cols, rows)
    }

    pub fn from_dense(d: &DenseMatrix) -> Self {
        let rows = (0..d.n_rows())
            .map(|i| {
                d.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() >= ZERO_TOLERANCE)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        Self::from_rows(d.n_cols(), rows).expect("dense matrix entries are finite")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).1.iter().sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let row = out.row_mut(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let dst = next[c];
                col_indices[dst] = i;
                values[dst] = v;
                next[c] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Multiplies every stored value by `alpha` (a zero `alpha` empties the matrix).
    pub fn scale(&self, alpha: f64) -> SparseMatrix {
        if alpha == 0.0 {
            return SparseMatrix::zeros(self.n_rows, self.n_cols);
        }
        let rows = (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&c, &v)| (c, alpha * v)).collect()
            })
            .collect();
        SparseMatrix::from_rows(self.n_cols, rows).expect("scaling keeps structure valid")
    }

    /// Replaces row `i` of `self` with row `i` of `other` for every index in `rows`.
    pub(crate) fn with_rows_from(&self, other: &SparseMatrix, rows: &[usize]) -> SparseMatrix {
        debug_assert_eq!(self.shape(), other.shape());
        let mut replaced = vec![false; self.n_rows];
        for &r in rows {
            replaced[r] = true;
        }
        let out = (0..self.n_rows)
            .map(|i| {
                let src = if replaced[i] { other } else { self };
                let (cols, vals) = src.row(i);
                cols.iter().copied().zip(vals.iter().copied()).collect()
            })
            .collect();
        SparseMatrix::from_rows(self.n_cols, out).expect("rows copied from valid matrices")
    }
}

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::config(format!(
                "{} values for a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("dense matrix contains a non-finite value"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::config("ragged rows"));
        }
        Self::new(rows.len(), n_cols, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero width
        (0..self.n_rows).map(move |i| self.row(i))
    }

    /// Selects rows by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut values = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        DenseMatrix {
            n_rows: idx.len(),
            n_cols: self.n_cols,
            values,
        }
    }

    /// Stacks the columns of `other` to the right of `self`.
    pub fn hstack(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != other.n_rows {
            return Err(Error::config(format!(
                "cannot stack {} rows beside {} rows",
                self.n_rows, other.n_rows
            )));
        }
        let n_cols = self.n_cols + other.n_cols;
        let mut values = Vec::with_capacity(self.n_rows * n_cols);
        for i in 0..self.n_rows {
            values.extend_from_slice(self.row(i));
            values.extend_from_slice(other.row(i));
        }
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols,
            values,
        })
    }
}

fn check_inner(op: &str, a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a.1 != b.0 {
        return Err(Error::config(format!(
            "{op}: cannot multiply {}x{} by {}x{}",
            a.0, a.1, b.0, b.1
        )));
    }
    Ok(())
}

/// Sparse accumulator for one output row of a sparse product.
struct RowAccumulator {
    dense: Vec<f64>,
    touched: Vec<usize>,
    seen: Vec<bool>,
}

impl RowAccumulator {
    fn new(width: usize) -> Self {
        Self {
            dense: vec![0.0; width],
            touched: Vec::new(),
            seen: vec![false; width],
        }
    }

    fn add(&mut self, col: usize, v: f64) {
        if !self.seen[col] {
            self.seen[col] = true;
            self.touched.push(col);
        }
        self.dense[col] += v;
    }

    fn drain(&mut self) -> (Vec<usize>, Vec<f64>) {
        self.touched.sort_unstable();
        let mut cols = Vec::with_capacity(self.touched.len());
        let mut vals = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = self.dense[c];
            if v.abs() >= ZERO_TOLERANCE {
                cols.push(c);
                vals.push(v);
            }
            self.dense[c] = 0.0;
            self.seen[c] = false;
        }
        self.touched.clear();
        (cols, vals)
    }
}

fn assemble(n_rows: usize, n_cols: usize, rows: Vec<(Vec<usize>, Vec<f64>)>) -> SparseMatrix {
    let nnz = rows.iter().map(|r| r.0.len()).sum();
    let mut row_offsets = Vec::with_capacity(n_rows + 1);
    row_offsets.push(0);
    let mut col_indices = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    for (cols, vals) in rows {
        col_indices.extend(cols);
        values.extend(vals);
        row_offsets.push(values.len());
    }
    SparseMatrix {
        n_rows,
        n_cols,
        row_offsets,
        col_indices,
        values,
    }
}

/// Sparse × sparse product (row-wise Gustavson).
pub fn spmm(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    check_inner("spmm", a.shape(), b.shape())?;
    let rows = par::map_range_init(
        a.n_rows(),
        || RowAccumulator::new(b.n_cols()),
        |acc, i| {
            let (a_cols, a_vals) = a.row(i);
            for (&k, &a_ik) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = b.row(k);
                for (&j, &b_kj) in b_cols.iter().zip(b_vals) {
                    acc.add(j, a_ik * b_kj);
                }
            }
            acc.drain()
        },
    );
    Ok(assemble(a.n_rows(), b.n_cols(), rows))
}

/// Upper bound on nnz(a × b): for each stored a_ik, the length of row k of b.
pub fn spmm_nnz_upper_bound(a: &SparseMatrix, b: &SparseMatrix) -> Result<u64> {
    check_inner("spmm", a.shape(), b.shape())?;
    Ok(a.col_indices().iter().map(|&k| b.row_nnz(k) as u64).sum())
}

/// Exact structural nnz of a × b, ignoring numerical cancellation.
pub fn spmm_symbolic_nnz(a: &SparseMatrix, b: &SparseMatrix) -> Result<u64> {
    check_inner("spmm", a.shape(), b.shape())?;
    let counts = par::map_range_init(
        a.n_rows(),
        || (vec![usize::MAX; b.n_cols()], 0usize),
        |(mark, _), i| {
            let mut count = 0u64;
            for &k in a.row(i).0 {
                for &j in b.row(k).0 {
                    if mark[j] != i {
                        mark[j] = i;
                        count += 1;
                    }
                }
            }
            count
        },
    );
    Ok(counts.into_iter().sum())
}

/// Sparse × dense product; row i of the output is Σ_j a_ij · b_j.
pub fn sp_dense_mm(a: &SparseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_inner("sp_dense_mm", a.shape(), b.shape())?;
    let width = b.n_cols();
    let mut out = DenseMatrix::zeros(a.n_rows(), width);
    par::for_each_row_mut(&mut out.values, width, |i, dst| {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            for (d, &x) in dst.iter_mut().zip(b.row(j)) {
                *d += v * x;
            }
        }
    });
    Ok(out)
}

/// Entrywise `alpha·a + beta·b`, dropping entries that cancel below
/// [`ZERO_TOLERANCE`].
pub fn add_scaled(a: &SparseMatrix, alpha: f64, b: &SparseMatrix, beta: f64) -> Result<SparseMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::config(format!(
            "add_scaled: shapes {:?} and {:?} differ",
            a.shape(),
            b.shape()
        )));
    }
    let rows = par::map_range(a.n_rows(), |i| {
        let (ac, av) = a.row(i);
        let (bc, bv) = b.row(i);
        let mut cols = Vec::with_capacity(ac.len() + bc.len());
        let mut vals = Vec::with_capacity(ac.len() + bc.len());
        let (mut p, mut q) = (0, 0);
        let mut push = |c: usize, v: f64| {
            if v.abs() >= ZERO_TOLERANCE {
                cols.push(c);
                vals.push(v);
            }
        };
        while p < ac.len() || q < bc.len() {
            let ca = ac.get(p).copied().unwrap_or(usize::MAX);
            let cb = bc.get(q).copied().unwrap_or(usize::MAX);
            if ca < cb {
                push(ca, alpha * av[p]);
                p += 1;
            } else if cb < ca {
                push(cb, beta * bv[q]);
                q += 1;
            } else {
                push(ca, alpha * av[p] + beta * bv[q]);
                p += 1;
                q += 1;
            }
        }
        (cols, vals)
    });
    Ok(assemble(a.n_rows(), a.n_cols(), rows))
}

/// Divides each row by its sum. Rows summing to zero stay empty and their
/// indices are returned.
pub fn row_normalize(a: &SparseMatrix) -> Result<(SparseMatrix, Vec<usize>)> {
    if let Some(v) = a.values().iter().find(|v| **v < 0.0) {
        return Err(Error::data(format!(
            "row_normalize requires non-negative entries, found {v}"
        )));
    }
    let mut dangling = Vec::new();
    let mut values = a.values.clone();
    for i in 0..a.n_rows() {
        let (lo, hi) = (a.row_offsets[i], a.row_offsets[i + 1]);
        let sum: f64 = values[lo..hi].iter().sum();
        if sum > 0.0 {
            values[lo..hi].iter_mut().for_each(|v| *v /= sum);
        } else {
            dangling.push(i);
        }
    }
    // Division by a row sum never drives a positive entry to zero, but tiny
    // entries can fall under the tolerance; rebuild only if that happened.
    let out = if values.iter().all(|v| v.abs() >= ZERO_TOLERANCE) {
        SparseMatrix {
            values,
            ..a.clone()
        }
    } else {
        let rows = (0..a.n_rows())
            .map(|i| {
                let (lo, hi) = (a.row_offsets[i], a.row_offsets[i + 1]);
                (lo..hi).map(|k| (a.col_indices[k], values[k])).collect()
            })
            .collect();
        SparseMatrix::from_rows(a.n_cols(), rows)?
    };
    Ok((out, dangling))
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Cosine similarity, defined as 0 when either vector has zero norm.
pub fn cosine(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "cosine of vectors with different lengths");
    let (nx, ny) = (norm(x), norm(y));
    if nx == 0.0 || ny == 0.0 {
        return 0.0;
    }
    (dot(x, y) / (nx * ny)).clamp(-1.0, 1.0)
}
