//! Optional on-disk memo of spectrum prefixes, enabled by `ECHLAB_CACHE_DIR`.
//!
//! File `spectrum-v1-<a bits>-<b bits>-<formal>-<count>.bin`, little endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 8     | magic `ECHLSPEC` |
//! | 4     | layout version, currently 1 |
//! | 8     | a as IEEE-754 bits |
//! | 8     | b as IEEE-754 bits |
//! | 1     | formal flag |
//! | 8     | entry count N |
//! | 24·N  | per entry: c_k bits, m, n (u64 each) |
//!
//! Unreadable or mismatched files are ignored and rewritten.

use std::path::{Path, PathBuf};

use echlab_core::ellipsoid::{spectrum_prefix, Ellipsoid, EllipsoidError, SpectrumEntry, SpectrumOptions};

pub const LAYOUT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"ECHLSPEC";

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("ECHLAB_CACHE_DIR").filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn file_name(e: &Ellipsoid, formal: bool, count: usize) -> String {
    format!("spectrum-v{LAYOUT_VERSION}-{:016x}-{:016x}-{}-{count}.bin", e.a.to_bits(), e.b.to_bits(), formal as u8)
}

pub fn encode(e: &Ellipsoid, formal: bool, entries: &[SpectrumEntry]) -> Vec<u8> {
    let mut out = Vec::with_capacity(37 + 24 * entries.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&LAYOUT_VERSION.to_le_bytes());
    out.extend_from_slice(&e.a.to_bits().to_le_bytes());
    out.extend_from_slice(&e.b.to_bits().to_le_bytes());
    out.push(formal as u8);
    out.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for s in entries {
        out.extend_from_slice(&s.c.to_bits().to_le_bytes());
        out.extend_from_slice(&s.m.to_le_bytes());
        out.extend_from_slice(&s.n.to_le_bytes());
    }
    out
}

fn u64_at(b: &[u8], at: usize) -> Option<u64> {
    Some(u64::from_le_bytes(b.get(at..at + 8)?.try_into().ok()?))
}

pub fn decode(e: &Ellipsoid, formal: bool, bytes: &[u8]) -> Option<Vec<SpectrumEntry>> {
    if bytes.get(0..8)? != MAGIC {
        return None;
    }
    let version = u32::from_le_bytes(bytes.get(8..12)?.try_into().ok()?);
    if version != LAYOUT_VERSION
        || u64_at(bytes, 12)? != e.a.to_bits()
        || u64_at(bytes, 20)? != e.b.to_bits()
        || *bytes.get(28)? != formal as u8
    {
        return None;
    }
    let n = u64_at(bytes, 29)? as usize;
    if bytes.len() != 37 + 24 * n {
        return None;
    }
    (0..n)
        .map(|k| {
            let at = 37 + 24 * k;
            Some(SpectrumEntry {
                k: k as u64,
                c: f64::from_bits(u64_at(bytes, at)?),
                grading: 2 * k as u64,
                m: u64_at(bytes, at + 8)?,
                n: u64_at(bytes, at + 16)?,
            })
        })
        .collect()
}

/// The first `count` entries, through the cache directory when one is given.
pub fn cached_prefix(
    e: &Ellipsoid,
    count: usize,
    opts: &SpectrumOptions,
    dir: Option<&Path>,
) -> Result<Vec<SpectrumEntry>, EllipsoidError> {
    let Some(dir) = dir else { return spectrum_prefix(e, count, opts) };
    let path = dir.join(file_name(e, opts.formal, count));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Some(v) = decode(e, opts.formal, &bytes) {
            return Ok(v);
        }
    }
    let v = spectrum_prefix(e, count, opts)?;
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(&path, encode(e, opts.formal, &v));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let e = Ellipsoid::new(1.0, 2f64.sqrt()).unwrap();
        let v = spectrum_prefix(&e, 50, &SpectrumOptions::default()).unwrap();
        let bytes = encode(&e, false, &v);
        assert_eq!(decode(&e, false, &bytes).unwrap(), v);
        assert!(decode(&e, true, &bytes).is_none());
        assert!(decode(&e, false, &bytes[..bytes.len() - 1]).is_none());
    }
}
