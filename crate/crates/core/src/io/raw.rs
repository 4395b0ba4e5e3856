use std::io::{Read, Write};

use super::IoError;
use crate::grid::ScalarGrid;

pub const RAW_MAGIC: &[u8; 8] = b"BMGRID1\n";

/// Layout: magic, dims (3 × u64), spacing (3 × f64), origin (3 × f64), then
/// the values as f64 with `x` fastest. All little-endian.
pub fn write_raw<W: Write>(mut w: W, grid: &ScalarGrid) -> Result<(), IoError> {
    w.write_all(RAW_MAGIC)?;
    for d in grid.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for x in grid.spacing().into_iter().chain(grid.origin()) {
        w.write_all(&x.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(grid.len() * 8);
    for v in grid.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_raw<R: Read>(mut r: R) -> Result<ScalarGrid, IoError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| IoError::BadRaw("truncated header".into()))?;
    if &magic != RAW_MAGIC {
        return Err(IoError::BadRaw("bad magic".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8], IoError> {
        r.read_exact(&mut word)
            .map_err(|_| IoError::BadRaw("truncated header".into()))?;
        Ok(word)
    };
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = usize::try_from(u64::from_le_bytes(next(&mut r)?))
            .map_err(|_| IoError::BadRaw("dimension overflows usize".into()))?;
    }
    let mut spacing = [0.0; 3];
    let mut origin = [0.0; 3];
    for x in spacing.iter_mut().chain(origin.iter_mut()) {
        *x = f64::from_le_bytes(next(&mut r)?);
    }
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| IoError::BadRaw("dimension product overflows".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != n.saturating_mul(8) {
        return Err(IoError::BadRaw(format!(
            "expected {n} values, payload holds {} bytes",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ScalarGrid::new(dims, spacing, origin, values)?)
}
