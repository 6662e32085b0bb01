//! Binary cache for vector indexes.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "OKGIDX01"
//! version  u32      1
//! dim      u32
//! count    u64
//! tag      u32 length + UTF-8 bytes   (which provider built the vectors)
//! count × { id: u32 length + bytes, text: u32 length + bytes, dim × f64 }
//! ```

use std::fs;
use std::io;
use std::path::Path;

use ontokg_core::embed::{EmbedError, VectorIndex};

pub const MAGIC: &[u8; 8] = b"OKGIDX01";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("not an index cache file")]
    BadMagic,
    #[error("unsupported cache version {0}")]
    Version(u32),
    #[error("cache file is truncated or corrupt")]
    Truncated,
    #[error(transparent)]
    Index(#[from] EmbedError),
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

pub fn encode_index(index: &VectorIndex, tag: &str) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(index.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(index.len() as u64).to_le_bytes());
    put_str(&mut out, tag);
    for (id, text, vector) in index.entries() {
        put_str(&mut out, id);
        put_str(&mut out, text);
        for v in vector {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CacheError> {
        if self.bytes.len() < n {
            return Err(CacheError::Truncated);
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CacheError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn u64(&mut self) -> Result<u64, CacheError> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64, CacheError> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn string(&mut self) -> Result<String, CacheError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| CacheError::Truncated)
    }
}

/// Returns the index and the provider tag it was saved with.
pub fn decode_index(bytes: &[u8]) -> Result<(VectorIndex, String), CacheError> {
    let mut r = Reader { bytes };
    if r.take(8).map_err(|_| CacheError::BadMagic)? != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CacheError::Version(version));
    }
    let dim = r.u32()? as usize;
    let count = r.u64()?;
    let tag = r.string()?;
    let mut entries = Vec::new();
    for _ in 0..count {
        let id = r.string()?;
        let text = r.string()?;
        let vector = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
        entries.push((id, text, vector));
    }
    if !r.bytes.is_empty() {
        return Err(CacheError::Truncated);
    }
    Ok((VectorIndex::from_entries(dim, entries)?, tag))
}

pub fn save_index(index: &VectorIndex, tag: &str, path: &Path) -> Result<(), CacheError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, encode_index(index, tag))?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<(VectorIndex, String), CacheError> {
    decode_index(&fs::read(path)?)
}
