use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use super::SpectralError;

const MAGIC: &[u8; 4] = b"LLBS";
const VERSION: u32 = 1;

/// Writes `u` and time `t` in the binary checkpoint format.
///
/// The file is written to a sibling temporary path and renamed into place.
pub fn write_checkpoint(path: &Path, u: &SpectralField, t: f64) -> Result<(), SpectralError> {
    let tmp = path.with_extension("llbs.tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        encode(&mut w, u, t)?;
        w.flush()?;
        w.get_ref().sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(SpectralField, f64), SpectralError> {
    let mut r = BufReader::new(File::open(path)?);
    decode(&mut r)
}

pub fn encode(w: &mut impl Write, u: &SpectralField, t: f64) -> Result<(), SpectralError> {
    let g = u.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.box_length().to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    for z in u.coeffs() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn decode(r: &mut impl Read) -> Result<(SpectralField, f64), SpectralError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SpectralError::BadCheckpoint("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(SpectralError::BadCheckpoint(format!(
            "unsupported version {version}"
        )));
    }
    let n = read_u32(r)? as usize;
    let box_length = read_f64(r)?;
    let t = read_f64(r)?;
    let grid = Grid::new(n, box_length)?;
    let count = 3 * grid.points();
    let mut bytes = vec![0u8; count * 16];
    r.read_exact(&mut bytes)?;
    let mut coeffs = Vec::with_capacity(count);
    for chunk in bytes.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(chunk[8..].try_into().expect("8 bytes"));
        coeffs.push(Complex64::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(SpectralError::BadCheckpoint("trailing bytes".into()));
    }
    Ok((SpectralField::from_coeffs_detect(grid, coeffs)?, t))
}

fn read_u32(r: &mut impl Read) -> Result<u32, SpectralError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64, SpectralError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(8, 3.5).unwrap();
        let u = &SpectralField::with_mode(g, 1, [1, 2, -3], 0.7, 0.1).unwrap()
            + &SpectralField::constant(g, [0.1, -0.2, 1e-300]);
        let mut buf = Vec::new();
        encode(&mut buf, &u, 1.25).unwrap();
        assert_eq!(buf.len(), 28 + 3 * 512 * 16);
        let (v, t) = decode(&mut buf.as_slice()).unwrap();
        assert_eq!(t, 1.25);
        assert!(v.is_real());
        for (a, b) in u.coeffs().iter().zip(v.coeffs()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let g = Grid::periodic(8).unwrap();
        let u = SpectralField::zeros(g);
        let mut buf = Vec::new();
        encode(&mut buf, &u, 0.0).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&mut bad.as_slice()), Err(SpectralError::BadCheckpoint(_))));
        let short = &buf[..buf.len() - 1];
        assert!(decode(&mut &short[..]).is_err());
    }
}
