//! `CNSF` binary field files.
//!
//! Layout (all little-endian): magic `CNSF`, `u32` version, `u32` n, `f64` box
//! length, then `3·n³` complex doubles `(re, im)`, component-major, DFT order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"CNSF";
pub const VERSION: u32 = 1;
const HEADER_LEN: u64 = 4 + 4 + 4 + 8;

pub fn write_to<W: Write>(w: &mut W, f: &SpectralField) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(g.n_per_axis as u32)?;
    w.write_f64::<LittleEndian>(g.box_length)?;
    for c in f.coeffs() {
        w.write_f64::<LittleEndian>(c.re)?;
        w.write_f64::<LittleEndian>(c.im)?;
    }
    Ok(())
}

pub fn read_from<R: Read>(r: &mut R) -> Result<SpectralField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| truncated(0))?;
    if &magic != MAGIC {
        return Err(Error::Format {
            offset: 0,
            msg: format!("bad magic bytes {magic:?}, expected \"CNSF\""),
        });
    }
    let version = r.read_u32::<LittleEndian>().map_err(|_| truncated(4))?;
    if version != VERSION {
        return Err(Error::Format {
            offset: 4,
            msg: format!("unsupported version {version}"),
        });
    }
    let n = r.read_u32::<LittleEndian>().map_err(|_| truncated(8))? as usize;
    let box_length = r.read_f64::<LittleEndian>().map_err(|_| truncated(12))?;
    let grid = GridSpec::new(n, box_length).map_err(|e| Error::Format {
        offset: 8,
        msg: e.to_string(),
    })?;
    let count = 3 * grid.points();
    let mut coeffs = Vec::with_capacity(count);
    for i in 0..count {
        let offset = HEADER_LEN + 16 * i as u64;
        let re = r.read_f64::<LittleEndian>().map_err(|_| truncated(offset))?;
        let im = r
            .read_f64::<LittleEndian>()
            .map_err(|_| truncated(offset + 8))?;
        coeffs.push(Complex64::new(re, im));
    }
    let mut f = SpectralField::from_coeffs(grid, coeffs)?;
    f.set_solenoidal(f.divergence_residual() <= 1e-12);
    Ok(f)
}

fn truncated(offset: u64) -> Error {
    Error::Format {
        offset,
        msg: "unexpected end of file".into(),
    }
}

pub fn write(path: impl AsRef<Path>, f: &SpectralField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn read(path: impl AsRef<Path>) -> Result<SpectralField> {
    let mut r = BufReader::new(File::open(path)?);
    read_from(&mut r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_and_round_trip() {
        let g = GridSpec::new(8, 1.5).unwrap();
        let coeffs: Vec<Complex64> = (0..3 * 512)
            .map(|i| Complex64::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let f = SpectralField::from_coeffs(g, coeffs).unwrap();
        let mut buf = Vec::new();
        write_to(&mut buf, &f).unwrap();
        assert_eq!(&buf[..4], b"CNSF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(buf[12..20].try_into().unwrap()), 1.5);
        assert_eq!(buf.len(), 20 + 16 * 3 * 512);
        // second coefficient: re = 1, im = -0.5
        assert_eq!(f64::from_le_bytes(buf[36..44].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(buf[44..52].try_into().unwrap()), -0.5);
        let back = read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back.coeffs(), f.coeffs());
    }

    #[test]
    fn corrupt_magic_names_offset() {
        let mut buf = b"XNSF".to_vec();
        buf.extend_from_slice(&[0; 16]);
        match read_from(&mut buf.as_slice()) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let mut buf = Vec::new();
        write_to(&mut buf, &SpectralField::zeros(g)).unwrap();
        buf.truncate(100);
        match read_from(&mut buf.as_slice()) {
            Err(Error::Format { offset, .. }) => assert!((84..=100).contains(&offset)),
            other => panic!("{other:?}"),
        }
    }
}
