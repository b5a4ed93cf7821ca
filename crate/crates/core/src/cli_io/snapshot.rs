use std::path::Path;

use num_complex::Complex64;

use super::output::write_atomic;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};

pub const MAGIC: &[u8; 4] = b"PHFL";
pub const VERSION: u32 = 1;
/// Magic, version, nx, ny, dx, dy, time.
pub const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 8 + 8;

/// Serializes a field: little-endian header then row-major `(re, im)` pairs.
pub fn encode_snapshot(field: &ComplexField, time: f64) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    out.extend_from_slice(&g.dx().to_le_bytes());
    out.extend_from_slice(&g.dy().to_le_bytes());
    out.extend_from_slice(&time.to_le_bytes());
    for z in field.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<(ComplexField, f64)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format(format!("bad magic bytes {:02x?}, expected \"PHFL\"", &bytes[0..4])));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version} (bytes {:02x?})", &bytes[4..8])));
    }
    let (nx, ny) = (u32_at(8) as usize, u32_at(12) as usize);
    let (dx, dy, time) = (f64_at(16), f64_at(24), f64_at(32));
    let expected = nx
        .checked_mul(ny)
        .and_then(|n| n.checked_mul(16))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format(format!("grid {nx}×{ny} overflows")))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "{nx}×{ny} snapshot needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let grid = GridSpec::new(nx, ny, nx as f64 * dx, ny as f64 * dy)
        .map_err(|e| Error::Format(format!("invalid grid in header: {e}")))?;
    let data = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok((ComplexField::from_vec(grid, data)?, time))
}

pub fn write_snapshot(path: &Path, field: &ComplexField, time: f64) -> Result<()> {
    write_atomic(path, &encode_snapshot(field, time))
}

pub fn read_snapshot(path: &Path) -> Result<(ComplexField, f64)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}
