//! Sparse matrix storage with dual row/column access and an incrementally
//! maintained cache of per-row dot products under sparse point updates.
//!
//! The matrix is stored twice, in compressed row form and compressed column
//! form. Oracles scan columns when a coordinate changes; trackers read row
//! dots. Memory cost is 2·nnz.

use crate::error::{Error, Result};

/// Default number of sparse updates between full cache recomputations.
pub const DEFAULT_REFRESH_PERIOD: u32 = 10_000;

/// An m×n sparse matrix held in both row-major and column-major compressed
/// form. Immutable after construction; safe to share across trajectories.
#[derive(Debug, Clone)]
pub struct SparseMatrixDual {
    m: usize,
    n: usize,
    row_ptr: Vec<usize>,
    row_cols: Vec<usize>,
    row_vals: Vec<f64>,
    col_ptr: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    s_n: usize,
    s_m: usize,
}

impl SparseMatrixDual {
    /// Builds both views from coordinate triplets. Duplicate coordinates are
    /// rejected rather than summed; zero values are dropped.
    pub fn from_triplets(triplets: &[(usize, usize, f64)], m: usize, n: usize) -> Result<Self> {
        for &(row, col, _) in triplets {
            if row >= m || col >= n {
                return Err(Error::EntryOutOfBounds { row, col, m, n });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::DuplicateEntry {
                    row: pair[0].0,
                    col: pair[0].1,
                });
            }
        }
        sorted.retain(|&(_, _, v)| v != 0.0);

        let nnz = sorted.len();
        let mut row_ptr = vec![0usize; m + 1];
        let mut row_cols = Vec::with_capacity(nnz);
        let mut row_vals = Vec::with_capacity(nnz);
        for &(r, c, v) in &sorted {
            row_ptr[r + 1] += 1;
            row_cols.push(c);
            row_vals.push(v);
        }
        for i in 0..m {
            row_ptr[i + 1] += row_ptr[i];
        }

        let mut col_counts = vec![0usize; n + 1];
        for &(_, c, _) in &sorted {
            col_counts[c + 1] += 1;
        }
        let mut col_ptr = col_counts;
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut col_rows = vec![0usize; nnz];
        let mut col_vals = vec![0.0f64; nnz];
        let mut cursor = col_ptr.clone();
        // Triplets are sorted by (row, col), so filling column-by-column in
        // this order keeps row indices strictly increasing inside each column.
        for &(r, c, v) in &sorted {
            let slot = cursor[c];
            col_rows[slot] = r;
            col_vals[slot] = v;
            cursor[c] += 1;
        }

        let s_n = (0..m).map(|i| row_ptr[i + 1] - row_ptr[i]).max().unwrap_or(0);
        let s_m = (0..n).map(|j| col_ptr[j + 1] - col_ptr[j]).max().unwrap_or(0);

        Ok(Self {
            m,
            n,
            row_ptr,
            row_cols,
            row_vals,
            col_ptr,
            col_rows,
            col_vals,
            s_n,
            s_m,
        })
    }

    /// Builds a matrix from dense rows, keeping nonzero entries.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(&triplets, m, n)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.row_cols.len()
    }

    /// Maximum nonzeros in any row.
    pub fn max_row_nnz(&self) -> usize {
        self.s_n
    }

    /// Maximum nonzeros in any column.
    pub fn max_col_nnz(&self) -> usize {
        self.s_m
    }

    /// Iterates the (column, value) entries of row `k`.
    pub fn row_entries(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[k];
        let hi = self.row_ptr[k + 1];
        self.row_cols[lo..hi]
            .iter()
            .copied()
            .zip(self.row_vals[lo..hi].iter().copied())
    }

    /// Iterates the (row, value) entries of column `j`.
    pub fn col_entries(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        self.col_rows[lo..hi]
            .iter()
            .copied()
            .zip(self.col_vals[lo..hi].iter().copied())
    }

    pub fn row_nnz(&self, k: usize) -> usize {
        self.row_ptr[k + 1] - self.row_ptr[k]
    }

    pub fn col_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// Exact sparse dot product ⟨row k, x⟩ in O(nnz(row k)).
    pub fn row_dot(&self, k: usize, x: &[f64]) -> Result<f64> {
        if k >= self.m {
            return Err(Error::RowOutOfRange { index: k, m: self.m });
        }
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.row_entries(k).map(|(j, v)| v * x[j]).sum())
    }

    /// y = A·x in O(nnz + m).
    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.m];
        for k in 0..self.m {
            y[k] = self.row_entries(k).map(|(j, v)| v * x[j]).sum();
        }
        Ok(y)
    }

    /// All stored triplets in row-major order (mainly for tests and I/O).
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for k in 0..self.m {
            for (j, v) in self.row_entries(k) {
                out.push((k, j, v));
            }
        }
        out
    }

    /// ℓ1 norm of row `k`.
    pub fn row_l1(&self, k: usize) -> f64 {
        self.row_entries(k).map(|(_, v)| v.abs()).sum()
    }

    /// ℓ2 norm of row `k`.
    pub fn row_l2(&self, k: usize) -> f64 {
        self.row_entries(k)
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// ℓ∞ norm of row `k`.
    pub fn row_linf(&self, k: usize) -> f64 {
        self.row_entries(k)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Outcome of one sparse delta applied to a [`RowDotCache`].
#[derive(Debug, Clone)]
pub struct SparseDeltaResult {
    /// Rows whose cached dot changed, with their new values.
    pub affected: Vec<(usize, f64)>,
    /// True when the periodic full recomputation ran after this update.
    pub refreshed: bool,
}

/// Per-row cache of ⟨A_k, x⟩ maintained under sparse coordinate changes to x.
///
/// One instance per solver trajectory; never shared. The cache keeps its own
/// copy of x so it can recompute every dot from scratch on the refresh
/// schedule, bounding floating-point drift.
#[derive(Debug, Clone)]
pub struct RowDotCache {
    values: Vec<f64>,
    x: Vec<f64>,
    refresh_period: u32,
    updates_since_refresh: u32,
    touched_rows: u64,
}

impl RowDotCache {
    pub fn new(matrix: &SparseMatrixDual, x: &[f64], refresh_period: u32) -> Result<Self> {
        let values = matrix.mat_vec(x)?;
        Ok(Self {
            values,
            x: x.to_vec(),
            refresh_period,
            updates_since_refresh: 0,
            touched_rows: 0,
        })
    }

    /// Wraps externally computed dots (used when the matrix is implicit).
    pub fn from_parts(values: Vec<f64>, x: Vec<f64>, refresh_period: u32) -> Self {
        Self {
            values,
            x,
            refresh_period,
            updates_since_refresh: 0,
            touched_rows: 0,
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Cumulative count of row-cache updates (complexity accounting).
    pub fn touched_rows(&self) -> u64 {
        self.touched_rows
    }

    /// Applies x[j] += delta, updating every row that has a nonzero in
    /// column j. Cost O(nnz(column j)). Triggers a full recomputation once
    /// `refresh_period` updates have accumulated.
    pub fn apply_sparse_delta(
        &mut self,
        matrix: &SparseMatrixDual,
        j: usize,
        delta: f64,
    ) -> Result<SparseDeltaResult> {
        if j >= matrix.cols() {
            return Err(Error::ColOutOfRange {
                index: j,
                n: matrix.cols(),
            });
        }
        self.x[j] += delta;
        let mut affected = Vec::with_capacity(matrix.col_nnz(j));
        for (k, a_kj) in matrix.col_entries(j) {
            self.values[k] += a_kj * delta;
            affected.push((k, self.values[k]));
        }
        self.touched_rows += affected.len() as u64;
        self.updates_since_refresh += 1;
        let refreshed = self.updates_since_refresh >= self.refresh_period;
        if refreshed {
            self.refresh(matrix)?;
        }
        Ok(SparseDeltaResult { affected, refreshed })
    }

    /// Recomputes every cached dot from the stored x.
    pub fn refresh(&mut self, matrix: &SparseMatrixDual) -> Result<()> {
        self.values = matrix.mat_vec(&self.x)?;
        self.updates_since_refresh = 0;
        Ok(())
    }

    /// Replaces x and recomputes every dot from scratch, preserving the
    /// touched-row counter.
    pub fn reset(&mut self, matrix: &SparseMatrixDual, x: &[f64]) -> Result<()> {
        self.x.clear();
        self.x.extend_from_slice(x);
        self.refresh(matrix)
    }
}
