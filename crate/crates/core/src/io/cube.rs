use std::io::{BufRead, Write};

use super::{Atom, IoError};
use crate::grid::ScalarGrid;

pub const BOHR_IN_ANGSTROM: f64 = 0.529177210903;

#[derive(Debug, Clone, PartialEq)]
pub struct CubeFile {
    pub comments: [String; 2],
    pub grid: ScalarGrid,
    pub atoms: Vec<Atom>,
}

struct Lines<R> {
    inner: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<Option<&str>, IoError> {
        self.buf.clear();
        if self.inner.read_line(&mut self.buf)? == 0 {
            return Ok(None);
        }
        self.line += 1;
        Ok(Some(self.buf.trim_end_matches(['\n', '\r'])))
    }

    fn header(&mut self, what: &str) -> Result<(usize, Vec<String>), IoError> {
        let line = self.line + 1;
        match self.next()? {
            Some(s) => Ok((line, s.split_whitespace().map(str::to_owned).collect())),
            None => Err(IoError::MalformedHeader {
                line,
                reason: format!("missing {what} line"),
            }),
        }
    }
}

fn num<T: std::str::FromStr>(tokens: &[String], i: usize, line: usize, what: &str) -> Result<T, IoError> {
    tokens
        .get(i)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| IoError::MalformedHeader {
            line,
            reason: format!("expected {what}"),
        })
}

/// Parses a cube file with axis-aligned voxels and a single dataset.
///
/// A positive voxel count means Bohr units, a negative one Å. Lengths are
/// converted to Å and values re-ordered so that `x` varies fastest.
pub fn read_cube<R: BufRead>(reader: R) -> Result<CubeFile, IoError> {
    let mut lines = Lines {
        inner: reader,
        line: 0,
        buf: String::new(),
    };
    let mut comments = [String::new(), String::new()];
    for c in &mut comments {
        let line = lines.line + 1;
        *c = lines
            .next()?
            .ok_or(IoError::MalformedHeader {
                line,
                reason: "missing comment line".into(),
            })?
            .to_owned();
    }

    let (line, t) = lines.header("atom count and origin")?;
    let natoms: i64 = num(&t, 0, line, "atom count")?;
    let mut origin = [0.0; 3];
    for (k, o) in origin.iter_mut().enumerate() {
        *o = num(&t, k + 1, line, "origin coordinate")?;
    }
    if t.len() > 4 {
        let nval: i64 = num(&t, 4, line, "value count")?;
        if nval != 1 {
            return Err(IoError::Unsupported(format!(
                "line {line}: {nval} values per voxel, only 1 is supported"
            )));
        }
    }

    let mut dims = [0usize; 3];
    let mut spacing = [0.0; 3];
    let mut angstrom = false;
    for axis in 0..3 {
        let (line, t) = lines.header("voxel axis")?;
        let n: i64 = num(&t, 0, line, "voxel count")?;
        let mut v = [0.0f64; 3];
        for (k, x) in v.iter_mut().enumerate() {
            *x = num(&t, k + 1, line, "axis vector component")?;
        }
        if n == 0 {
            return Err(IoError::MalformedHeader {
                line,
                reason: "zero voxel count".into(),
            });
        }
        if axis == 0 {
            angstrom = n < 0;
        } else if (n < 0) != angstrom {
            return Err(IoError::MalformedHeader {
                line,
                reason: "voxel counts mix Bohr and Å signs".into(),
            });
        }
        if (0..3).any(|k| k != axis && v[k] != 0.0) || !(v[axis] > 0.0) {
            return Err(IoError::NonOrthogonalAxes { line });
        }
        dims[axis] = n.unsigned_abs() as usize;
        spacing[axis] = v[axis];
    }
    let scale = if angstrom { 1.0 } else { BOHR_IN_ANGSTROM };

    let mut atoms = Vec::with_capacity(natoms.unsigned_abs() as usize);
    for _ in 0..natoms.unsigned_abs() {
        let (line, t) = lines.header("atom")?;
        let z: u32 = num(&t, 0, line, "atomic number")?;
        let charge: f64 = num(&t, 1, line, "nuclear charge")?;
        let mut p = [0.0; 3];
        for (k, x) in p.iter_mut().enumerate() {
            *x = num::<f64>(&t, k + 2, line, "atom coordinate")? * scale;
        }
        atoms.push(Atom {
            atomic_number: z,
            charge,
            position: p,
        });
    }
    if natoms < 0 {
        let (line, t) = lines.header("orbital list")?;
        let count: i64 = num(&t, 0, line, "orbital count")?;
        if count != 1 {
            return Err(IoError::Unsupported(format!(
                "line {line}: {count} datasets, only 1 is supported"
            )));
        }
    }

    let expected = dims[0] * dims[1] * dims[2];
    let mut file_order = Vec::with_capacity(expected);
    loop {
        let line = lines.line + 1;
        let Some(s) = lines.next()? else { break };
        for tok in s.split_whitespace() {
            if file_order.len() == expected {
                return Err(IoError::ValueCountMismatch {
                    line,
                    expected,
                    found: expected + s.split_whitespace().count(),
                });
            }
            let v = tok.parse::<f64>().map_err(|_| IoError::BadValue {
                line,
                token: tok.to_owned(),
            })?;
            file_order.push(v);
        }
    }
    if file_order.len() != expected {
        return Err(IoError::ValueCountMismatch {
            line: lines.line,
            expected,
            found: file_order.len(),
        });
    }

    // file order has z fastest
    let [nx, ny, nz] = dims;
    let mut values = vec![0.0; expected];
    for ix in 0..nx {
        for iy in 0..ny {
            for iz in 0..nz {
                values[ix + nx * (iy + ny * iz)] = file_order[iz + nz * (iy + ny * ix)];
            }
        }
    }
    let grid = ScalarGrid::new(
        dims,
        spacing.map(|s| s * scale),
        origin.map(|o| o * scale),
        values,
    )?;
    Ok(CubeFile { comments, grid, atoms })
}

/// Writes a cube file in Bohr with 6 values per line.
pub fn write_cube<W: Write>(mut w: W, grid: &ScalarGrid, atoms: &[Atom], comment: &str) -> Result<(), IoError> {
    let b = |x: f64| x / BOHR_IN_ANGSTROM;
    let comment = comment.replace(['\n', '\r'], " ");
    writeln!(w, "{comment}")?;
    writeln!(w, "values in file order z, y, x; lengths in Bohr")?;
    let o = grid.origin();
    writeln!(w, "{:5} {:.16e} {:.16e} {:.16e}", atoms.len(), b(o[0]), b(o[1]), b(o[2]))?;
    let dims = grid.dims();
    let sp = grid.spacing();
    for axis in 0..3 {
        let mut v = [0.0; 3];
        v[axis] = b(sp[axis]);
        writeln!(w, "{:5} {:.16e} {:.16e} {:.16e}", dims[axis], v[0], v[1], v[2])?;
    }
    for a in atoms {
        let p = a.position;
        writeln!(
            w,
            "{:5} {:.16e} {:.16e} {:.16e} {:.16e}",
            a.atomic_number,
            a.charge,
            b(p[0]),
            b(p[1]),
            b(p[2])
        )?;
    }
    let [nx, ny, nz] = dims;
    for ix in 0..nx {
        for iy in 0..ny {
            for chunk in (0..nz).collect::<Vec<_>>().chunks(6) {
                let row: Vec<String> = chunk
                    .iter()
                    .map(|&iz| format!("{:.16e}", grid.value(grid.index(ix, iy, iz))))
                    .collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
