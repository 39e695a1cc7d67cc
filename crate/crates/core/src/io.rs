//! Dense vectors (`"VEC1" | len u64 | len × f64`, little-endian) and
//! run manifests.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sparse::ByteReader;

pub const VEC_MAGIC: &[u8; 4] = b"VEC1";

pub fn write_vector_to<W: Write>(v: &[f64], w: &mut W) -> Result<()> {
    w.write_all(VEC_MAGIC)?;
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_vector_from<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut r = ByteReader::new(r);
    r.magic(VEC_MAGIC)?;
    let len = r.usize()?;
    let at = r.offset();
    let v = r.f64_vec(len)?;
    if !crate::dense::all_finite(&v) {
        return Err(Error::format(at, "non-finite vector entry"));
    }
    r.expect_eof()?;
    Ok(v)
}

pub fn write_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vector_to(v, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_vector_from(BufReader::new(File::open(path)?))
}

/// Flat `key=value` record of one run, written next to its primary output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    /// Replaces an existing key in place, otherwise appends.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest");
        PathBuf::from(s)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "{k}={v}")?;
        }
        Ok(())
    }

    pub fn write_beside(&self, output: &Path) -> Result<PathBuf> {
        let path = Self::path_for(output);
        let mut w = BufWriter::new(File::create(&path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(path)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::default();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("manifest line {} has no '='", i + 1)))?;
            m.set(k, v);
        }
        Ok(m)
    }
}
