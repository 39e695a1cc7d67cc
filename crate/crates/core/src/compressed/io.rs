//! `.spc` layout, little-endian: a fixed header describing the transform,
//! followed by the thresholded matrix as an embedded `.spr` stream.
//!
//! ```text
//! "SPC1" | family u32 | levels u32 | policy u32 | reserved u32
//! policy parameter f64 | original ncols u64 | padded ncols u64
//! SPR1 stream
//! ```
//!
//! Family 0 is Haar and 1 is CDF 9/7. Policy 0 is keep-fraction, 1 absolute.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::CompressedMatrix;
use crate::error::{Error, Result};
use crate::sparse::{read_sparse_from, write_sparse_to, ByteReader};
use crate::wavelet::{ThresholdPolicy, WaveletFamily, WaveletSpec};

pub const SPC_MAGIC: &[u8; 4] = b"SPC1";
pub(crate) const HEADER_LEN: u64 = 4 + 4 * 4 + 3 * 8;

pub(crate) fn write_compressed_to<W: Write>(c: &CompressedMatrix, w: &mut W) -> Result<()> {
    let family: u32 = match c.spec.family() {
        WaveletFamily::HaarOrthogonal => 0,
        WaveletFamily::Cdf97 => 1,
    };
    let (kind, param): (u32, f64) = match c.policy {
        ThresholdPolicy::KeepFraction(f) => (0, f),
        ThresholdPolicy::Absolute(a) => (1, a),
    };
    w.write_all(SPC_MAGIC)?;
    for v in [family, c.spec.levels(), kind, 0] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&param.to_le_bytes())?;
    w.write_all(&(c.ncols as u64).to_le_bytes())?;
    w.write_all(&(c.padded_ncols() as u64).to_le_bytes())?;
    write_sparse_to(&c.m, w)
}

pub(crate) fn read_compressed_from<R: Read>(r: &mut ByteReader<R>) -> Result<CompressedMatrix> {
    r.magic(SPC_MAGIC)?;
    let at = r.offset();
    let family = match r.u32()? {
        0 => WaveletFamily::HaarOrthogonal,
        1 => WaveletFamily::Cdf97,
        f => return Err(Error::format(at, format!("unknown wavelet family {f}"))),
    };
    let levels_at = r.offset();
    let levels = r.u32()?;
    let spec = WaveletSpec::new(family, levels).map_err(|e| Error::format(levels_at, e.to_string()))?;
    let kind_at = r.offset();
    let kind = r.u32()?;
    let _reserved = r.u32()?;
    let param_at = r.offset();
    let param = r.f64()?;
    let policy = match kind {
        0 => ThresholdPolicy::KeepFraction(param),
        1 => ThresholdPolicy::Absolute(param),
        k => return Err(Error::format(kind_at, format!("unknown threshold policy {k}"))),
    };
    policy
        .validate()
        .map_err(|e| Error::format(param_at, e.to_string()))?;
    let ncols_at = r.offset();
    let ncols = r.usize()?;
    let padded = r.usize()?;
    if ncols == 0 || spec.padded_len(ncols) != padded {
        return Err(Error::format(
            ncols_at,
            format!("width {ncols} does not pad to the recorded {padded} at {levels} levels"),
        ));
    }
    let body_at = r.offset();
    let m = read_sparse_from(r)?;
    if m.ncols() != padded {
        return Err(Error::format(
            body_at,
            format!("embedded matrix has {} columns, header says {padded}", m.ncols()),
        ));
    }
    CompressedMatrix::from_parts(m, spec, policy, ncols)
}

pub fn write_compressed(c: &CompressedMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_compressed_to(c, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_compressed(path: impl AsRef<Path>) -> Result<CompressedMatrix> {
    let mut r = ByteReader::new(BufReader::new(File::open(path)?));
    let c = read_compressed_from(&mut r)?;
    r.expect_eof()?;
    Ok(c)
}
