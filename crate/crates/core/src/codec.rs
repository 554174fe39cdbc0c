//! Little-endian binary snapshot format.
//!
//! Layout: 8-byte magic, `u32` dimension, `u32` points per axis, `f64` box
//! length, then `n^d` interleaved `(re, im)` `f64` pairs.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{ComplexField, TorusGrid};

pub const FIELD_MAGIC: &[u8; 8] = b"SNLSFLD1";
pub const PHASE_MAGIC: &[u8; 8] = b"SNLSPHS1";

pub fn write_field<R: Real, W: Write>(
    w: &mut W,
    f: &ComplexField<R>,
    magic: &[u8; 8],
) -> Result<()> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(24 + 16 * g.len());
    buf.extend_from_slice(magic);
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.points() as u32).to_le_bytes());
    buf.extend_from_slice(&g.length().as_f64().to_le_bytes());
    for z in f.values() {
        buf.extend_from_slice(&z.re.as_f64().to_le_bytes());
        buf.extend_from_slice(&z.im.as_f64().to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Real, Rd: Read>(r: &mut Rd, magic: &[u8; 8]) -> Result<ComplexField<R>> {
    let mut head = [0u8; 24];
    r.read_exact(&mut head)?;
    if &head[..8] != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&head[..8]),
            String::from_utf8_lossy(magic)
        )));
    }
    let dim = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let points = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(head[16..24].try_into().unwrap());
    let grid = TorusGrid::new(dim, points, R::lit(length))?;
    let mut body = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut body)?;
    let values = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex::new(R::lit(re), R::lit(im))
        })
        .collect();
    ComplexField::from_values(grid, values)
}
