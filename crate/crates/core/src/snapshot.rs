//! `TBSF` binary field snapshots.
//!
//! Layout (little endian):
//!
//! ```text
//! "TBSF" | u32 version = 1 | u32 n_dims | u32 components
//! n_dims x (u32 size | f64 lambda | u8 axis_role)
//! components x prod(size) x (f64 re | f64 im)
//! ```
//!
//! Coefficients of each component follow the grid storage order: axes in
//! declaration order, last axis fastest, slot `i` of an axis of size `n`
//! holding wavenumber `i` for `i < n/2` and `i - n` otherwise.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{PeError, Result};
use crate::field::SpectralField;
use crate::grid::{AxisRole, TorusGrid};

pub const MAGIC: &[u8; 4] = b"TBSF";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(mut w: W, u: &SpectralField) -> Result<()> {
    let g = u.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.n_dims() as u32).to_le_bytes())?;
    w.write_all(&(u.components() as u32).to_le_bytes())?;
    for a in 0..g.n_dims() {
        w.write_all(&(g.sizes()[a] as u32).to_le_bytes())?;
        w.write_all(&g.lambda()[a].to_le_bytes())?;
        w.write_all(&[g.roles()[a].to_byte()])?;
    }
    for comp in u.coeffs() {
        for c in comp {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<SpectralField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(PeError::Format("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(PeError::Format(format!("unsupported version {version}")));
    }
    let n_dims = read_u32(&mut r)? as usize;
    let components = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&n_dims) || components == 0 || components > 64 {
        return Err(PeError::Format(format!(
            "implausible header: {n_dims} axes, {components} components"
        )));
    }
    let mut sizes = Vec::with_capacity(n_dims);
    let mut lambda = Vec::with_capacity(n_dims);
    let mut roles = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        sizes.push(read_u32(&mut r)? as usize);
        lambda.push(read_f64(&mut r)?);
        let mut b = [0u8; 1];
        r.read_exact(&mut b)?;
        roles.push(
            AxisRole::from_byte(b[0])
                .ok_or_else(|| PeError::Format(format!("unknown axis role {}", b[0])))?,
        );
    }
    let grid = TorusGrid::new(sizes, lambda, roles)?;
    let mut coeffs = Vec::with_capacity(components);
    for _ in 0..components {
        let mut comp = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            comp.push(Complex64::new(re, im));
        }
        coeffs.push(comp);
    }
    SpectralField::from_coeffs(grid, coeffs)
}

/// Writes a snapshot atomically (temporary file + rename).
pub fn save(path: &Path, u: &SpectralField) -> Result<()> {
    crate::io::write_atomic(path, |w| write_snapshot(w, u))
}

pub fn load(path: &Path) -> Result<SpectralField> {
    let f = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(f))
}
