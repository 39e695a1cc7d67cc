//! Compressed sparse row storage and exact matrix-vector kernels.

mod io;

pub use io::{read_sparse, write_sparse, SprBlockReader, SPR_MAGIC};
pub(crate) use io::{read_sparse_from, write_sparse_to, ByteReader};

use crate::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};
use crate::operator::LinearOperator;
use crate::par::{self, Execution};

/// Row-major sparse matrix. Column indices are zero-based `u32`, strictly
/// increasing within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from per-row nonzero counts, validating every invariant.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_nnz: &[usize],
        col_indices: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::invalid(format!(
                "sparse matrix must be non-empty, got {nrows}x{ncols}"
            )));
        }
        if ncols > u32::MAX as usize + 1 {
            return Err(Error::invalid("column count exceeds the u32 index range"));
        }
        check_len("row count list", nrows, row_nnz.len())?;
        check_len("column index list", values.len(), col_indices.len())?;
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        for &c in row_nnz {
            row_ptr.push(row_ptr.last().unwrap() + c);
        }
        check_len("sum of row counts", values.len(), *row_ptr.last().unwrap())?;
        let m = Self {
            nrows,
            ncols,
            row_ptr,
            col_indices,
            values,
        };
        m.validate_structure()?;
        Ok(m)
    }

    /// Builds a matrix from rows of `(column, value)` pairs already sorted by column.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        let row_nnz: Vec<usize> = rows.iter().map(Vec::len).collect();
        let (cols, vals) = rows.into_iter().flatten().unzip();
        Self::new(row_nnz.len(), ncols, &row_nnz, cols, vals)
    }

    /// Keeps every entry of `d` that is not exactly zero.
    pub fn from_dense(d: &DenseMatrix) -> Result<Self> {
        let rows = (0..d.nrows())
            .map(|i| {
                (0..d.ncols())
                    .filter_map(|j| {
                        let v = d[(i, j)];
                        (v != 0.0).then_some((j as u32, v))
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(d.ncols(), rows)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_rows(n, (0..n).map(|i| vec![(i as u32, 1.0)]).collect())
    }

    fn validate_structure(&self) -> Result<()> {
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut prev: Option<u32> = None;
            for (&c, &v) in cols.iter().zip(vals) {
                if c as usize >= self.ncols {
                    return Err(Error::invalid(format!(
                        "row {i}: column index {c} out of range for {} columns",
                        self.ncols
                    )));
                }
                if prev.is_some_and(|p| c <= p) {
                    return Err(Error::invalid(format!(
                        "row {i}: column indices must be strictly increasing (saw {c} after {})",
                        prev.unwrap()
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::invalid(format!("row {i}: non-finite value {v}")));
                }
                prev = Some(c);
            }
        }
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_nnz(&self) -> Vec<usize> {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_indices[a..b], &self.values[a..b])
    }

    /// Row `i` scattered into a dense vector of length `ncols`.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut r = vec![0.0; self.ncols];
        let (cols, vals) = self.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            r[c as usize] = v;
        }
        r
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                d[(i, c as usize)] = v;
            }
        }
        d
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_slice(&self, start: usize, end: usize) -> Result<SparseMatrix> {
        if start >= end || end > self.nrows {
            return Err(Error::invalid(format!(
                "row range {start}..{end} invalid for {} rows",
                self.nrows
            )));
        }
        let (a, b) = (self.row_ptr[start], self.row_ptr[end]);
        Ok(SparseMatrix {
            nrows: end - start,
            ncols: self.ncols,
            row_ptr: self.row_ptr[start..=end].iter().map(|p| p - a).collect(),
            col_indices: self.col_indices[a..b].to_vec(),
            values: self.values[a..b].to_vec(),
        })
    }

    /// Size of the `.spr` encoding in bytes.
    pub fn serialized_len(&self) -> u64 {
        4 + 3 * 8 + 8 * self.nrows as u64 + 12 * self.nnz() as u64
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.spmv_with(x, Execution::default())
    }

    pub fn spmv_with(&self, x: &[f64], exec: Execution) -> Result<Vec<f64>> {
        check_len("spmv input", self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        par::fill_indexed(exec, &mut y, |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(|(&c, &v)| v * x[c as usize]).sum()
        });
        Ok(y)
    }

    pub fn spmv_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.spmv_transpose_with(y, Execution::default())
    }

    /// `mᵀ y` without forming the transpose. Rows are accumulated in fixed
    /// chunks whose size depends only on the matrix shape, and the partial
    /// sums are combined in chunk order, so the result is independent of the
    /// execution policy.
    pub fn spmv_transpose_with(&self, y: &[f64], exec: Execution) -> Result<Vec<f64>> {
        check_len("transpose spmv input", self.nrows, y.len())?;
        let chunk = transpose_chunk_rows(self.nrows);
        let nchunks = self.nrows.div_ceil(chunk);
        let accumulate = |c: usize| {
            let mut part = vec![0.0; self.ncols];
            for i in c * chunk..((c + 1) * chunk).min(self.nrows) {
                let yi = y[i];
                if yi == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(i);
                for (&col, &v) in cols.iter().zip(vals) {
                    part[col as usize] += v * yi;
                }
            }
            part
        };
        if nchunks == 1 {
            return Ok(accumulate(0));
        }
        let parts = par::map_range(exec, nchunks, accumulate);
        let mut out = vec![0.0; self.ncols];
        for p in &parts {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        Ok(out)
    }
}

fn transpose_chunk_rows(nrows: usize) -> usize {
    // At most 64 partial vectors regardless of matrix height.
    (nrows.div_ceil(64)).max(1024)
}

impl LinearOperator for SparseMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.spmv(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.spmv_transpose(y)
    }
}

/// Concatenates blocks row-wise. All blocks must share a column count.
pub fn vstack(blocks: &[SparseMatrix]) -> Result<SparseMatrix> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::invalid("vstack needs at least one block"))?;
    let ncols = first.ncols;
    let mut row_nnz = Vec::new();
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for b in blocks {
        check_len("vstack block columns", ncols, b.ncols)?;
        row_nnz.extend(b.row_nnz());
        cols.extend_from_slice(&b.col_indices);
        vals.extend_from_slice(&b.values);
    }
    SparseMatrix::new(row_nnz.len(), ncols, &row_nnz, cols, vals)
}
