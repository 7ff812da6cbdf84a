//! Field serialization and full-precision CSV helpers.
//!
//! Binary field dump layout (all little-endian):
//! magic `"BRTH"`, format version `u32`, axis count `u8`, then per axis
//! (label byte, `u64` count, `f64` origin, `f64` spacing), then the samples
//! as row-major `f64` pairs `(re, im)`.
//!
//! The fixed coordinates of unsampled axes are not part of the format; a
//! round trip restores them as zero.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{Axis, ComplexField, Grid, SampledAxis, SpacetimePoint};
use crate::scalar::{Cx, Real};

pub const FIELD_MAGIC: [u8; 4] = *b"BRTH";
pub const FIELD_VERSION: u32 = 1;

pub fn write_field<T: Real, W: Write>(field: &ComplexField<T>, w: &mut W) -> Result<()> {
    let grid = field.grid();
    w.write_all(&FIELD_MAGIC)?;
    w.write_all(&FIELD_VERSION.to_le_bytes())?;
    let naxes = grid.ndim();
    if naxes > u8::MAX as usize {
        return Err(Error::Format("too many axes".into()));
    }
    w.write_all(&[naxes as u8])?;
    for a in grid.axes() {
        w.write_all(&[a.axis.label()])?;
        w.write_all(&(a.count as u64).to_le_bytes())?;
        w.write_all(&grid.base().get(a.axis).as_f64().to_le_bytes())?;
        w.write_all(&a.spacing.as_f64().to_le_bytes())?;
    }
    for v in field.values() {
        w.write_all(&v.re.as_f64().to_le_bytes())?;
        w.write_all(&v.im.as_f64().to_le_bytes())?;
    }
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_field<R: Read>(r: &mut R) -> Result<ComplexField<f64>> {
    let magic: [u8; 4] = read_exact(r)?;
    if magic != FIELD_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_exact(r)?);
    if version != FIELD_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let naxes = read_exact::<R, 1>(r)?[0] as usize;
    let mut base = SpacetimePoint::origin();
    let mut axes = Vec::with_capacity(naxes);
    for _ in 0..naxes {
        let label = read_exact::<R, 1>(r)?[0];
        let axis = Axis::from_label(label)
            .ok_or_else(|| Error::Format(format!("unknown axis label {label:#x}")))?;
        let count = u64::from_le_bytes(read_exact(r)?) as usize;
        let origin = f64::from_le_bytes(read_exact(r)?);
        let spacing = f64::from_le_bytes(read_exact(r)?);
        base.set(axis, origin);
        axes.push(SampledAxis {
            axis,
            count,
            spacing,
        });
    }
    let grid = Grid::new(base, axes)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(read_exact(r)?);
        let im = f64::from_le_bytes(read_exact(r)?);
        values.push(Cx::new(re, im));
    }
    ComplexField::new(grid, values)
}

/// Format a float with 17 significant digits (lossless for f64).
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write one CSV line from preformatted fields.
pub fn csv_line<W: Write>(w: &mut W, fields: &[String]) -> Result<()> {
    writeln!(w, "{}", fields.join(","))?;
    Ok(())
}

/// Write a CSV header line.
pub fn csv_header<W: Write>(w: &mut W, names: &[&str]) -> Result<()> {
    writeln!(w, "{}", names.join(","))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::eval_on_grid;

    #[test]
    fn field_round_trips_bit_exactly() {
        let grid = Grid::<f64>::from_ranges(
            &[(Axis::T, 0.0, 1.0, 3), (Axis::X, -1.0, 1.0, 5)],
            SpacetimePoint::origin(),
        )
        .unwrap();
        let field = eval_on_grid(|p| Cx::new(p.t + 2.0 * p.x, p.t * p.x - 0.25), &grid).unwrap();
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back.grid().shape(), field.grid().shape());
        assert_eq!(back.values(), field.values());
        assert_eq!(back.grid().base(), field.grid().base());
    }

    #[test]
    fn header_layout_is_fixed() {
        let grid = Grid::<f64>::line(Axis::X, 0.5, 0.25, 2).unwrap();
        let field = ComplexField::new(grid, vec![Cx::new(1.0, 0.0), Cx::new(0.0, -1.0)]).unwrap();
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        assert_eq!(&buf[0..4], b"BRTH");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(buf[8], 1); // one axis
        assert_eq!(buf[9], b'x');
        assert_eq!(u64::from_le_bytes(buf[10..18].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(buf[18..26].try_into().unwrap()), 0.5);
        assert_eq!(f64::from_le_bytes(buf[26..34].try_into().unwrap()), 0.25);
        // 2 samples * 2 f64
        assert_eq!(buf.len(), 34 + 32);
    }

    #[test]
    fn rejects_corrupt_headers() {
        let mut buf = b"XXXX".to_vec();
        buf.extend_from_slice(&1u32.to_le_bytes());
        assert!(read_field(&mut buf.as_slice()).is_err());

        let mut buf = b"BRTH".to_vec();
        buf.extend_from_slice(&99u32.to_le_bytes());
        buf.push(0);
        assert!(read_field(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn full_precision_format_round_trips() {
        for x in [
            0.1,
            -3.5e-7,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02214076e23,
        ] {
            let s = fmt_full(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
