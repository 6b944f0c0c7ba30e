//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 0..8  | magic `FBSNAP\0\0` |
//! | 8..12 | format version (u32, currently 1) |
//! | 12..16| reserved, zero |
//! | 16..20| `n` (u32) |
//! | 20..28| torus period `length` (f64) |
//! | 28..  | `n*n` physical values (f64), row-major, index `j * n + i` with `i` along x1 |

use std::io::{Read, Write};
use std::path::Path;

use super::field::ScalarField;
use super::grid::SpectralGrid;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"FBSNAP\0\0";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(mut w: W, f: &ScalarField) -> Result<()> {
    let grid = f.grid();
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[0u8; 4])?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * grid.len());
    for v in f.physical() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<ScalarField> {
    let mut header = [0u8; 28];
    r.read_exact(&mut header)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    if header[..8] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(header[16..20].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(header[20..28].try_into().unwrap());
    let grid = SpectralGrid::with_length(n, length)?;
    let mut raw = vec![0u8; 8 * grid.len()];
    r.read_exact(&mut raw)
        .map_err(|e| Error::Snapshot(format!("truncated payload: {e}")))?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField::from_physical(&grid, values)
}

pub fn save_snapshot(path: impl AsRef<Path>, f: &ScalarField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_snapshot(std::io::BufWriter::new(file), f)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<ScalarField> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = SpectralGrid::with_length(8, 3.0).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| (x * 1.3).sin() + y * y);
        let mut buf = vec![];
        write_snapshot(&mut buf, &f).unwrap();
        assert_eq!(buf.len(), 28 + 8 * 64);
        assert_eq!(&buf[..8], b"FBSNAP\0\0");
        assert_eq!(u32::from_le_bytes(buf[16..20].try_into().unwrap()), 8);
        let back = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back.grid(), &g);
        assert_eq!(back.physical(), f.physical());
    }

    #[test]
    fn rejects_corruption() {
        let g = SpectralGrid::new(8).unwrap();
        let mut buf = vec![];
        write_snapshot(&mut buf, &ScalarField::zeros(&g)).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_snapshot(&bad[..]).is_err());
        let mut bad = buf.clone();
        bad[8] = 9;
        assert!(read_snapshot(&bad[..]).is_err());
        assert!(read_snapshot(&buf[..buf.len() - 1]).is_err());
    }
}
