//! Flat binary layout: a fixed grid header followed by row-major
//! little-endian `(re, im)` pairs.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::Field;
use super::grid::{PhaseGrid, Radix};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"VAVGFLD1";

pub fn write_field(field: &Field, out: &mut impl Write) -> Result<()> {
    let g = field.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(g.n as u64).to_le_bytes())?;
    out.write_all(&(g.points_x as u64).to_le_bytes())?;
    out.write_all(&(g.points_v as u64).to_le_bytes())?;
    out.write_all(&g.half_width_x.to_le_bytes())?;
    out.write_all(&g.half_width_v.to_le_bytes())?;
    out.write_all(&[matches!(g.radix, Radix::Mixed) as u8])?;
    out.write_all(&(field.samples().len() as u64).to_le_bytes())?;
    for z in field.samples() {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_field(r: &mut impl Read) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let n = read_u64(r)? as usize;
    let px = read_u64(r)? as usize;
    let pv = read_u64(r)? as usize;
    let lx = read_f64(r)?;
    let lv = read_f64(r)?;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let radix = if flag[0] == 1 { Radix::Mixed } else { Radix::PowerOfTwo };
    let grid = PhaseGrid::new(n, px, pv, lx, lv, radix)?;
    let count = read_u64(r)? as usize;
    if count != grid.len() {
        return Err(Error::Format(format!("sample count {count} does not match grid size {}", grid.len())));
    }
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        samples.push(Complex64::new(re, im));
    }
    Field::new(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::make_grid;

    #[test]
    fn binary_round_trip() {
        let g = make_grid(1, 8, 16, 2.0, 3.0).unwrap();
        let f = Field::from_fn(g, |x, v| Complex64::new(x[0] * v[0], x[0] - v[0])).unwrap();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 * 3 + 16 + 1 + 8 + 16 * g.len());
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_input_is_rejected() {
        let g = make_grid(1, 8, 8, 2.0, 3.0).unwrap();
        let mut buf = Vec::new();
        write_field(&Field::zeros(g), &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_field(&mut buf.as_slice()).is_err());
    }
}
