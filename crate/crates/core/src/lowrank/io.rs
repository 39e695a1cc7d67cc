//! `.lrk` layout, little-endian:
//!
//! ```text
//! "LRK1" | m u64 | n u64 | k u64 | seed u64
//! k × f64 singular values
//! m·k f64 U, column-major
//! n·k f64 V, column-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::LowRankSVD;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::sparse::ByteReader;

pub const LRK_MAGIC: &[u8; 4] = b"LRK1";

pub(crate) fn write_lowrank_to<W: Write>(f: &LowRankSVD, w: &mut W) -> Result<()> {
    w.write_all(LRK_MAGIC)?;
    for v in [f.nrows() as u64, f.ncols() as u64, f.k() as u64, f.seed] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in f
        .sigma
        .iter()
        .chain(f.u.as_slice())
        .chain(f.v.as_slice())
    {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_lowrank_from<R: Read>(r: &mut ByteReader<R>) -> Result<LowRankSVD> {
    r.magic(LRK_MAGIC)?;
    let dims_at = r.offset();
    let m = r.usize()?;
    let n = r.usize()?;
    let k = r.usize()?;
    if m == 0 || n == 0 || k == 0 || k > m.min(n) {
        return Err(Error::format(dims_at, format!("invalid factor shape {m}x{n} rank {k}")));
    }
    let seed = r.u64()?;
    let body_at = r.offset();
    let mut read = |len: usize| -> Result<Vec<f64>> {
        let at = r.offset();
        let v = r.f64_vec(len)?;
        if !crate::dense::all_finite(&v) {
            return Err(Error::format(at, "non-finite factor entry"));
        }
        Ok(v)
    };
    let sigma = read(k)?;
    let u = DenseMatrix::from_column_major(m, k, read(m * k)?)?;
    let v = DenseMatrix::from_column_major(n, k, read(n * k)?)?;
    LowRankSVD::new(u, sigma, v, seed).map_err(|e| Error::format(body_at, e.to_string()))
}

pub fn write_lowrank(f: &LowRankSVD, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_lowrank_to(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_lowrank(path: impl AsRef<Path>) -> Result<LowRankSVD> {
    let mut r = ByteReader::new(BufReader::new(File::open(path)?));
    let f = read_lowrank_from(&mut r)?;
    r.expect_eof()?;
    Ok(f)
}
