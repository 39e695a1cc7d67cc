//! The `.spr` binary layout, all little-endian:
//!
//! ```text
//! "SPR1" | nrows u64 | ncols u64 | nnz u64
//! nrows × u64   nonzeros per row
//! nnz   × u32   column indices, row-major
//! nnz   × f64   values
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use super::SparseMatrix;
use crate::error::{Error, Result};

pub const SPR_MAGIC: &[u8; 4] = b"SPR1";
const HEADER_LEN: u64 = 4 + 3 * 8;

/// Reader that tracks its byte offset so format errors can point at the
/// offending field.
pub(crate) struct ByteReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> ByteReader<R> {
    pub(crate) fn new(inner: R) -> Self {
        Self::at(inner, 0)
    }

    pub(crate) fn at(inner: R, offset: u64) -> Self {
        Self { inner, offset }
    }

    pub(crate) fn offset(&self) -> u64 {
        self.offset
    }

    pub(crate) fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        match self.inner.read_exact(&mut buf) {
            Ok(()) => {
                self.offset += N as u64;
                Ok(buf)
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Err(Error::format(
                self.offset,
                format!("file truncated, expected {N} more bytes"),
            )),
            Err(e) => Err(e.into()),
        }
    }

    pub(crate) fn magic(&mut self, want: &[u8; 4]) -> Result<()> {
        let got = self.bytes::<4>()?;
        if &got != want {
            return Err(Error::format(
                self.offset - 4,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(&got),
                    String::from_utf8_lossy(want)
                ),
            ));
        }
        Ok(())
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    pub(crate) fn usize(&mut self) -> Result<usize> {
        let at = self.offset;
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| Error::format(at, format!("count {v} does not fit in memory")))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    pub(crate) fn f64_vec(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }

    pub(crate) fn expect_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.inner.read(&mut probe)? {
            0 => Ok(()),
            _ => Err(Error::format(self.offset, "trailing bytes after payload")),
        }
    }
}

struct Header {
    nrows: usize,
    ncols: usize,
    nnz: usize,
    row_nnz: Vec<usize>,
}

fn read_header<R: Read>(r: &mut ByteReader<R>) -> Result<Header> {
    r.magic(SPR_MAGIC)?;
    let dims_at = r.offset();
    let nrows = r.usize()?;
    let ncols = r.usize()?;
    if nrows == 0 || ncols == 0 {
        return Err(Error::format(dims_at, format!("empty matrix {nrows}x{ncols}")));
    }
    if ncols > u32::MAX as usize + 1 {
        return Err(Error::format(dims_at + 8, "column count exceeds u32 index range"));
    }
    let nnz_at = r.offset();
    let nnz = r.usize()?;
    let mut row_nnz = Vec::with_capacity(nrows.min(1 << 24));
    let mut total = 0usize;
    for _ in 0..nrows {
        let c = r.usize()?;
        total = total.saturating_add(c);
        row_nnz.push(c);
    }
    if total != nnz {
        return Err(Error::format(
            nnz_at,
            format!("header declares {nnz} nonzeros but row counts sum to {total}"),
        ));
    }
    Ok(Header {
        nrows,
        ncols,
        nnz,
        row_nnz,
    })
}

fn read_indices<R: Read>(
    r: &mut ByteReader<R>,
    ncols: usize,
    row_nnz: &[usize],
) -> Result<Vec<u32>> {
    let mut cols = Vec::with_capacity(row_nnz.iter().sum());
    for &c in row_nnz {
        let mut prev: Option<u32> = None;
        for _ in 0..c {
            let at = r.offset();
            let idx = r.u32()?;
            if idx as usize >= ncols {
                return Err(Error::format(
                    at,
                    format!("column index {idx} out of range for {ncols} columns"),
                ));
            }
            if prev.is_some_and(|p| idx <= p) {
                return Err(Error::format(
                    at,
                    format!("column indices not strictly increasing within row ({idx})"),
                ));
            }
            prev = Some(idx);
            cols.push(idx);
        }
    }
    Ok(cols)
}

fn read_values<R: Read>(r: &mut ByteReader<R>, n: usize) -> Result<Vec<f64>> {
    let mut vals = Vec::with_capacity(n);
    for _ in 0..n {
        let at = r.offset();
        let v = r.f64()?;
        if !v.is_finite() {
            return Err(Error::format(at, format!("non-finite value {v}")));
        }
        vals.push(v);
    }
    Ok(vals)
}

pub(crate) fn read_sparse_from<R: Read>(r: &mut ByteReader<R>) -> Result<SparseMatrix> {
    let h = read_header(r)?;
    let cols = read_indices(r, h.ncols, &h.row_nnz)?;
    let vals = read_values(r, h.nnz)?;
    SparseMatrix::new(h.nrows, h.ncols, &h.row_nnz, cols, vals)
}

pub(crate) fn write_sparse_to<W: Write>(m: &SparseMatrix, w: &mut W) -> Result<()> {
    w.write_all(SPR_MAGIC)?;
    for v in [m.nrows as u64, m.ncols as u64, m.nnz() as u64] {
        w.write_all(&v.to_le_bytes())?;
    }
    for c in m.row_nnz() {
        w.write_all(&(c as u64).to_le_bytes())?;
    }
    for &c in &m.col_indices {
        w.write_all(&c.to_le_bytes())?;
    }
    for &v in &m.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_sparse(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let mut r = ByteReader::new(BufReader::new(File::open(path)?));
    let m = read_sparse_from(&mut r)?;
    r.expect_eof()?;
    Ok(m)
}

pub fn write_sparse(m: &SparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_sparse_to(m, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Streams a `.spr` file in blocks of rows, so only one block of the matrix
/// is resident at a time.
pub struct SprBlockReader {
    nrows: usize,
    ncols: usize,
    row_nnz: Vec<usize>,
    next_row: usize,
    cols: ByteReader<BufReader<File>>,
    vals: ByteReader<BufReader<File>>,
}

impl SprBlockReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut head = ByteReader::new(BufReader::new(File::open(path)?));
        let h = read_header(&mut head)?;
        let cols_start = HEADER_LEN + 8 * h.nrows as u64;
        let vals_start = cols_start + 4 * h.nnz as u64;
        let expected_len = vals_start + 8 * h.nnz as u64;
        let actual_len = std::fs::metadata(path)?.len();
        if actual_len < expected_len {
            return Err(Error::format(
                actual_len,
                format!("file truncated, expected {expected_len} bytes"),
            ));
        }
        let seek_to = |pos: u64| -> Result<ByteReader<BufReader<File>>> {
            let mut f = File::open(path)?;
            f.seek(SeekFrom::Start(pos))?;
            Ok(ByteReader::at(BufReader::new(f), pos))
        };
        Ok(Self {
            nrows: h.nrows,
            ncols: h.ncols,
            row_nnz: h.row_nnz,
            next_row: 0,
            cols: seek_to(cols_start)?,
            vals: seek_to(vals_start)?,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Next block of at most `max_rows` rows, or `None` at the end.
    pub fn next_block(&mut self, max_rows: usize) -> Result<Option<SparseMatrix>> {
        if self.next_row >= self.nrows {
            return Ok(None);
        }
        let end = (self.next_row + max_rows.max(1)).min(self.nrows);
        let counts = &self.row_nnz[self.next_row..end];
        let cols = read_indices(&mut self.cols, self.ncols, counts)?;
        let vals = read_values(&mut self.vals, cols.len())?;
        let block = SparseMatrix::new(end - self.next_row, self.ncols, counts, cols, vals)?;
        self.next_row = end;
        Ok(Some(block))
    }
}
