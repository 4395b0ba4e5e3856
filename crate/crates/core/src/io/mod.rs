//! Grid file formats: Gaussian cube and a little-endian raw container.

mod cube;
mod raw;

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, ScalarGrid};

pub use cube::{read_cube, write_cube, CubeFile, BOHR_IN_ANGSTROM};
pub use raw::{read_raw, write_raw, RAW_MAGIC};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: grid axes must be aligned with x, y and z")]
    NonOrthogonalAxes { line: usize },
    #[error("line {line}: expected {expected} values, found {found}")]
    ValueCountMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: cannot parse value {token:?}")]
    BadValue { line: usize, token: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("raw grid: {0}")]
    BadRaw(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// An atom listed in a cube header. Positions in Å.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub atomic_number: u32,
    pub charge: f64,
    pub position: [f64; 3],
}

/// A grid read from disk, plus the atoms when the format carries them.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGrid {
    pub grid: ScalarGrid,
    pub atoms: Vec<Atom>,
}

/// Reads a raw grid if the file starts with the raw magic, a cube file
/// otherwise.
pub fn read_grid(path: &Path) -> Result<LoadedGrid, IoError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut head = Vec::with_capacity(RAW_MAGIC.len());
    (&mut reader).take(RAW_MAGIC.len() as u64).read_to_end(&mut head)?;
    let chained = std::io::Cursor::new(head.clone()).chain(reader);
    if head == RAW_MAGIC {
        Ok(LoadedGrid {
            grid: read_raw(chained)?,
            atoms: Vec::new(),
        })
    } else {
        let cube = read_cube(BufReader::new(chained))?;
        Ok(LoadedGrid {
            grid: cube.grid,
            atoms: cube.atoms,
        })
    }
}
