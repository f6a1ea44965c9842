//! Binary field snapshots.
//!
//! Layout (little endian): magic `b"FNLS"`, version `u32`, `K` as `u32`,
//! period `f64`, time `f64`, then `K` pairs `(re, im)` of `f64` in FFT order.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, SpectralField};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"FNLS";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 8;

pub fn encode(field: &SpectralField) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * field.coeffs.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(field.grid.modes as u32).to_le_bytes());
    out.extend_from_slice(&field.grid.period.to_le_bytes());
    out.extend_from_slice(&field.time.to_le_bytes());
    for c in &field.coeffs {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

/// Decodes a snapshot. The binary header carries no dealiasing fraction, so
/// the caller supplies it (normally from the manifest).
pub fn decode(bytes: &[u8], dealias_fraction: f64) -> std::result::Result<SpectralField, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!("truncated header ({} bytes)", bytes.len()));
    }
    if &bytes[0..4] != MAGIC {
        return Err("bad magic".into());
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let modes = u32_at(8) as usize;
    let period = f64_at(12);
    let time = f64_at(20);
    let expected = HEADER_LEN + 16 * modes;
    if bytes.len() != expected {
        return Err(format!("expected {expected} bytes, found {}", bytes.len()));
    }
    let grid = GridSpec::new(modes, period, dealias_fraction).map_err(|e| e.to_string())?;
    let coeffs = (0..modes)
        .map(|i| {
            let o = HEADER_LEN + 16 * i;
            Complex64::new(f64_at(o), f64_at(o + 8))
        })
        .collect();
    Ok(SpectralField { grid, coeffs, time })
}

pub fn write(path: &Path, field: &SpectralField) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode(field))?;
    Ok(())
}

pub fn read(path: &Path, dealias_fraction: f64) -> Result<SpectralField> {
    let bytes = fs::read(path)?;
    decode(&bytes, dealias_fraction).map_err(|reason| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    })
}

/// JSON sidecar describing a snapshot and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub grid: GridSpec,
    pub time: f64,
    pub provenance: String,
    pub code_version: String,
}

impl SnapshotManifest {
    pub fn for_field(field: &SpectralField, provenance: impl Into<String>) -> Self {
        Self {
            grid: field.grid,
            time: field.time,
            provenance: provenance.into(),
            code_version: crate::CODE_VERSION.to_string(),
        }
    }
}

/// Writes `<stem>.fnls` and `<stem>.json` into `dir`.
pub fn write_with_manifest(
    dir: &Path,
    stem: &str,
    field: &SpectralField,
    provenance: &str,
) -> Result<()> {
    write(&dir.join(format!("{stem}.fnls")), field)?;
    let manifest = SnapshotManifest::for_field(field, provenance);
    fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

pub fn read_with_manifest(dir: &Path, stem: &str) -> Result<(SpectralField, SnapshotManifest)> {
    let manifest: SnapshotManifest =
        serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    let field = read(&dir.join(format!("{stem}.fnls")), manifest.grid.dealias_fraction)?;
    Ok((field, manifest))
}
