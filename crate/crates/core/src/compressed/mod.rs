//! Row-wise wavelet compression `M = Thr(A Wᵀ)` and the approximate products
//! `A x ≈ M W⁻ᵀ x`, `Aᵀ y ≈ W⁻¹ Mᵀ y`.
//!
//! Row `i` of `M` is the thresholded transform of row `i` of `A`. Rows are
//! independent, so compression can run over a stream of row blocks.

mod blocked;
mod io;

pub use blocked::{Block, BlockedOperator};
pub use io::{read_compressed, write_compressed, SPC_MAGIC};

use crate::dense::{norm2, sub};
use crate::error::{check_len, Result};
use crate::operator::LinearOperator;
use crate::par::{self, Execution};
use crate::sparse::{SparseMatrix, SprBlockReader};
use crate::wavelet::{hard_threshold, ThresholdPolicy, WaveletSpec};

/// Mean per-row reconstruction error above which a matrix is reported as
/// not wavelet compressible.
pub const INCOMPRESSIBLE_ERROR: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedMatrix {
    m: SparseMatrix,
    spec: WaveletSpec,
    policy: ThresholdPolicy,
    ncols: usize,
}

/// Thresholded transform of one sparse row, as sorted `(column, value)` pairs
/// over the padded width.
fn compress_row(
    spec: &WaveletSpec,
    policy: ThresholdPolicy,
    ncols: usize,
    cols: &[u32],
    vals: &[f64],
) -> Result<Vec<(u32, f64)>> {
    let mut dense = vec![0.0; ncols];
    for (&c, &v) in cols.iter().zip(vals) {
        dense[c as usize] = v;
    }
    let coeffs = hard_threshold(policy, &spec.forward(&dense)?)?;
    Ok(coeffs
        .into_iter()
        .enumerate()
        .filter(|&(_, v)| v != 0.0)
        .map(|(j, v)| (j as u32, v))
        .collect())
}

fn compress_block(
    a: &SparseMatrix,
    spec: &WaveletSpec,
    policy: ThresholdPolicy,
    exec: Execution,
) -> Result<Vec<Vec<(u32, f64)>>> {
    par::map_range(exec, a.nrows(), |i| {
        let (cols, vals) = a.row(i);
        compress_row(spec, policy, a.ncols(), cols, vals)
    })
    .into_iter()
    .collect()
}

pub fn compress_rows(
    a: &SparseMatrix,
    spec: WaveletSpec,
    policy: ThresholdPolicy,
) -> Result<CompressedMatrix> {
    compress_rows_with(a, spec, policy, Execution::default())
}

pub fn compress_rows_with(
    a: &SparseMatrix,
    spec: WaveletSpec,
    policy: ThresholdPolicy,
    exec: Execution,
) -> Result<CompressedMatrix> {
    policy.validate()?;
    let rows = compress_block(a, &spec, policy, exec)?;
    CompressedMatrix::from_parts(
        SparseMatrix::from_rows(spec.padded_len(a.ncols()), rows)?,
        spec,
        policy,
        a.ncols(),
    )
}

/// Compresses a `.spr` file `block_rows` rows at a time; the source matrix is
/// never fully resident.
pub fn compress_stream(
    reader: &mut SprBlockReader,
    spec: WaveletSpec,
    policy: ThresholdPolicy,
    block_rows: usize,
    exec: Execution,
) -> Result<CompressedMatrix> {
    policy.validate()?;
    let ncols = reader.ncols();
    let mut rows = Vec::with_capacity(reader.nrows());
    while let Some(block) = reader.next_block(block_rows)? {
        rows.extend(compress_block(&block, &spec, policy, exec)?);
    }
    CompressedMatrix::from_parts(
        SparseMatrix::from_rows(spec.padded_len(ncols), rows)?,
        spec,
        policy,
        ncols,
    )
}

impl CompressedMatrix {
    /// Pairs an already transformed matrix with the transform that produced it.
    pub fn from_parts(
        m: SparseMatrix,
        spec: WaveletSpec,
        policy: ThresholdPolicy,
        ncols: usize,
    ) -> Result<Self> {
        policy.validate()?;
        check_len("compressed matrix width", spec.padded_len(ncols), m.ncols())?;
        Ok(Self {
            m,
            spec,
            policy,
            ncols,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.m
    }

    pub fn spec(&self) -> WaveletSpec {
        self.spec
    }

    pub fn policy(&self) -> ThresholdPolicy {
        self.policy
    }

    pub fn nrows(&self) -> usize {
        self.m.nrows()
    }

    /// Column count of the original operator.
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn padded_ncols(&self) -> usize {
        self.m.ncols()
    }

    pub fn nnz(&self) -> usize {
        self.m.nnz()
    }

    /// Size of the `.spc` encoding in bytes.
    pub fn serialized_len(&self) -> u64 {
        io::HEADER_LEN + self.m.serialized_len()
    }

    /// `M W⁻ᵀ x`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_with(x, Execution::default())
    }

    pub fn apply_with(&self, x: &[f64], exec: Execution) -> Result<Vec<f64>> {
        check_len("compressed apply input", self.ncols, x.len())?;
        self.m.spmv_with(&self.spec.inverse_transpose(x)?, exec)
    }

    /// `W⁻¹ Mᵀ y`, truncated to the original width.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.apply_transpose_with(y, Execution::default())
    }

    pub fn apply_transpose_with(&self, y: &[f64], exec: Execution) -> Result<Vec<f64>> {
        check_len("compressed transpose apply input", self.nrows(), y.len())?;
        self.spec
            .inverse(&self.m.spmv_transpose_with(y, exec)?, self.ncols)
    }

    /// `W⁻¹ Mᵀ M W⁻ᵀ x`
    pub fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_transpose(&self.apply(x)?)
    }

    /// Row `i` of the approximation `M W⁻ᵀ`, i.e. the reconstructed row of `A`.
    pub fn reconstruct_row(&self, i: usize) -> Result<Vec<f64>> {
        let mut c = vec![0.0; self.padded_ncols()];
        let (cols, vals) = self.m.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            c[j as usize] = v;
        }
        self.spec.inverse(&c, self.ncols)
    }
}

impl LinearOperator for CompressedMatrix {
    fn nrows(&self) -> usize {
        CompressedMatrix::nrows(self)
    }
    fn ncols(&self) -> usize {
        CompressedMatrix::ncols(self)
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        CompressedMatrix::apply(self, x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        CompressedMatrix::apply_transpose(self, y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub source_nnz: usize,
    pub compressed_nnz: usize,
    pub nnz_ratio: f64,
    pub source_bytes: u64,
    pub compressed_bytes: u64,
    /// `source_bytes / compressed_bytes`
    pub byte_ratio: f64,
    /// `‖a_i − â_i‖ / ‖a_i‖` per row; absolute error for zero rows.
    pub row_errors: Vec<f64>,
    pub max_error: f64,
    pub mean_error: f64,
    pub incompressible: bool,
}

pub fn compression_report(a: &SparseMatrix, c: &CompressedMatrix) -> Result<CompressionReport> {
    check_len("compression report rows", a.nrows(), c.nrows())?;
    check_len("compression report columns", a.ncols(), c.ncols())?;
    let row_errors: Vec<f64> = par::map_range(Execution::default(), a.nrows(), |i| {
        let exact = a.dense_row(i);
        let approx = c.reconstruct_row(i)?;
        let d = norm2(&sub(&approx, &exact));
        let n = norm2(&exact);
        Ok(if n > 0.0 { d / n } else { d })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let max_error = row_errors.iter().cloned().fold(0.0, f64::max);
    let mean_error = row_errors.iter().sum::<f64>() / row_errors.len() as f64;
    let source_bytes = a.serialized_len();
    let compressed_bytes = c.serialized_len();
    Ok(CompressionReport {
        source_nnz: a.nnz(),
        compressed_nnz: c.nnz(),
        nnz_ratio: if c.nnz() == 0 {
            f64::INFINITY
        } else {
            a.nnz() as f64 / c.nnz() as f64
        },
        source_bytes,
        compressed_bytes,
        byte_ratio: source_bytes as f64 / compressed_bytes as f64,
        row_errors,
        max_error,
        mean_error,
        incompressible: mean_error > INCOMPRESSIBLE_ERROR,
    })
}
