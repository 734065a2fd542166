//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `TFLD` |
//! | 2     | version `u16 = 1` |
//! | 4 × 3 | `n`, `N`, `m` as `u32` |
//! | 8 × 2 | `ℓ`, `t` as `f64` |
//! | 16 × m·Nⁿ | coefficients as `(re, im)` `f64` pairs, component-major, lattice in row-major FFT order |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::grid::TorusGrid;

pub const MAGIC: &[u8; 4] = b"TFLD";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: FourierField,
}

pub fn write_snapshot<W: Write>(mut w: W, t: f64, field: &FourierField) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for v in [g.dim(), g.points(), field.components()] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    w.write_all(&g.period().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    for c in field.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated snapshot: {e}")))?;
    Ok(buf)
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let points = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let components = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let period = f64::from_le_bytes(read_array(&mut r)?);
    let t = f64::from_le_bytes(read_array(&mut r)?);
    let grid = TorusGrid::new(dim, period, points).map_err(|e| Error::Format(e.to_string()))?;
    if components == 0 || components > 64 {
        return Err(Error::Format(format!("implausible component count {components}")));
    }
    let count = components * grid.len();
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_le_bytes(read_array(&mut r)?);
        let im = f64::from_le_bytes(read_array(&mut r)?);
        coeffs.push(Complex64::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after coefficient block".into()));
    }
    Ok(Snapshot { t, field: FourierField::from_coeffs(grid, components, coeffs)? })
}

pub fn save(path: &Path, t: f64, field: &FourierField) -> Result<()> {
    write_snapshot(BufWriter::new(File::create(path)?), t, field)
}

pub fn load(path: &Path) -> Result<Snapshot> {
    read_snapshot(BufReader::new(File::open(path)?))
}
