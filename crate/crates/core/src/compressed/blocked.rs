//! Row-blocked operators whose blocks may each be stored differently.
//!
//! `A x` stacks the per-block products; `Aᵀ y` sums `A_jᵀ y_j` over blocks
//! in block order.

use super::CompressedMatrix;
use crate::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};
use crate::lowrank::LowRankSVD;
use crate::operator::LinearOperator;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Raw(SparseMatrix),
    Wavelet(CompressedMatrix),
    LowRank(LowRankSVD),
    Dense(DenseMatrix),
}

impl Block {
    fn op(&self) -> &dyn LinearOperator {
        match self {
            Block::Raw(m) => m,
            Block::Wavelet(c) => c,
            Block::LowRank(f) => f,
            Block::Dense(d) => d,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Block::Raw(_) => "raw",
            Block::Wavelet(_) => "wavelet",
            Block::LowRank(_) => "lowrank",
            Block::Dense(_) => "dense",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockedOperator {
    blocks: Vec<Block>,
    row_offsets: Vec<usize>,
    ncols: usize,
}

impl BlockedOperator {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::invalid("blocked operator needs at least one block"))?;
        let ncols = first.op().ncols();
        let mut row_offsets = Vec::with_capacity(blocks.len() + 1);
        row_offsets.push(0);
        for b in &blocks {
            check_len("block column count", ncols, b.op().ncols())?;
            row_offsets.push(row_offsets.last().unwrap() + b.op().nrows());
        }
        Ok(Self {
            blocks,
            row_offsets,
            ncols,
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Start row of each block, followed by the total row count.
    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    /// The rows of `v` that belong to block `j`.
    pub fn block_rows<'a>(&self, v: &'a [f64], j: usize) -> &'a [f64] {
        &v[self.row_offsets[j]..self.row_offsets[j + 1]]
    }

    pub fn blocked_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("blocked apply input", self.ncols, x.len())?;
        let mut y = Vec::with_capacity(self.nrows());
        for b in &self.blocks {
            y.extend(b.op().apply(x)?);
        }
        Ok(y)
    }

    pub fn blocked_apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("blocked transpose apply input", self.nrows(), y.len())?;
        let mut out = vec![0.0; self.ncols];
        for (j, b) in self.blocks.iter().enumerate() {
            let part = b.op().apply_transpose(self.block_rows(y, j))?;
            for (o, p) in out.iter_mut().zip(&part) {
                *o += p;
            }
        }
        Ok(out)
    }
}

impl LinearOperator for BlockedOperator {
    fn nrows(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.blocked_apply(x)
    }
    fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.blocked_apply_transpose(y)
    }
}
