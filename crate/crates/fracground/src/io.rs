//! Field serialization: 32-byte header followed by flat 8-byte
//! little-endian reals, plus a plain-text `.meta` sidecar.
//!
//! Header layout (little endian):
//!   bytes  0..4   magic "FGRD"
//!   bytes  4..8   format version, u32 (currently 1)
//!   bytes  8..12  dim, u32
//!   bytes 12..16  points per axis M, u32
//!   bytes 16..24  box half-width L, f64
//!   bytes 24..32  fractional order s, f64
//! Values follow row-major, M^dim of them.

use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"FGRD";
const VERSION: u32 = 1;

pub fn write_field(path: &Path, field: &Field, s: f64) -> Result<()> {
    let mut f = fs::File::create(path)?;
    let g = field.grid;
    f.write_all(MAGIC)?;
    f.write_all(&VERSION.to_le_bytes())?;
    f.write_all(&g.dim.to_le_bytes())?;
    f.write_all(&(g.points_per_dim as u32).to_le_bytes())?;
    f.write_all(&g.half_width.to_le_bytes())?;
    f.write_all(&s.to_le_bytes())?;
    let mut buf = Vec::with_capacity(field.values.len() * 8);
    for v in &field.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    f.write_all(&buf)?;

    let meta = format!(
        "format=fracground-field-v{VERSION}\ndim={}\npoints={}\nhalf_width={:.17e}\ns={:.17e}\n\
         min={:.17e}\nmax={:.17e}\n",
        g.dim,
        g.points_per_dim,
        g.half_width,
        s,
        field.values.iter().cloned().fold(f64::INFINITY, f64::min),
        field.max(),
    );
    fs::write(path.with_extension("meta"), meta)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<(Field, f64)> {
    let mut f = fs::File::open(path)?;
    let mut head = [0u8; 32];
    f.read_exact(&mut head)?;
    if &head[0..4] != MAGIC {
        return Err(Error::Config(format!("{}: bad magic", path.display())));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Config(format!("unsupported field format version {version}")));
    }
    let dim = u32::from_le_bytes(head[8..12].try_into().unwrap());
    let m = u32::from_le_bytes(head[12..16].try_into().unwrap()) as usize;
    let l = f64::from_le_bytes(head[16..24].try_into().unwrap());
    let s = f64::from_le_bytes(head[24..32].try_into().unwrap());
    let grid = Grid::new(dim, l, m)?;
    let mut raw = Vec::new();
    f.read_to_end(&mut raw)?;
    if raw.len() != grid.len() * 8 {
        return Err(Error::Config(format!(
            "{}: expected {} values, found {} bytes",
            path.display(),
            grid.len(),
            raw.len()
        )));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((Field { grid, values }, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_exact() {
        let g = Grid::new(2, 1.5, 16).unwrap();
        let u = Field::from_fn(g, |x| (x[0] + 2.0 * x[1]).sin() + 0.125);
        let dir = std::env::temp_dir().join("fracground_io_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.bin");
        write_field(&path, &u, 0.3).unwrap();
        let (v, s) = read_field(&path).unwrap();
        assert_eq!(s, 0.3);
        assert_eq!(u.grid, v.grid);
        assert_eq!(u.values, v.values, "bit-exact roundtrip");
        assert!(path.with_extension("meta").exists());
    }
}
