//! CVF1 field dumps.
//!
//! A single JSON header line
//! `{"magic":"CVF1","nx":…,"ny":…,"lx":…,"ly":…,"kind":"real"|"complex"}`
//! followed by `\n` and raw little-endian `f64` samples, row-major. Complex
//! fields interleave re/im.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexField, RealField, TorusError, TorusGrid};

pub const MAGIC: &str = "CVF1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    magic: String,
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    kind: FieldKind,
}

/// A field read back from a CVF1 stream.
#[derive(Debug, Clone, PartialEq)]
pub enum Cvf1Field {
    Real(RealField),
    Complex(ComplexField),
}

fn write_header<W: Write>(w: &mut W, grid: &TorusGrid, kind: FieldKind) -> Result<(), TorusError> {
    let header = Header {
        magic: MAGIC.to_string(),
        nx: grid.nx(),
        ny: grid.ny(),
        lx: grid.lx(),
        ly: grid.ly(),
        kind,
    };
    serde_json::to_writer(&mut *w, &header).map_err(|e| TorusError::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_real<W: Write>(w: &mut W, field: &RealField) -> Result<(), TorusError> {
    write_header(w, field.grid(), FieldKind::Real)?;
    let mut buf = Vec::with_capacity(8 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_complex<W: Write>(w: &mut W, field: &ComplexField) -> Result<(), TorusError> {
    write_header(w, field.grid(), FieldKind::Complex)?;
    let mut buf = Vec::with_capacity(16 * field.values().len());
    for z in field.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read<R: BufRead>(r: &mut R) -> Result<Cvf1Field, TorusError> {
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(TorusError::Format("missing header terminator".into()));
    }
    line.pop();
    let header: Header =
        serde_json::from_slice(&line).map_err(|e| TorusError::Format(format!("bad header: {e}")))?;
    if header.magic != MAGIC {
        return Err(TorusError::Format(format!("bad magic `{}`", header.magic)));
    }
    let grid = TorusGrid::new(header.nx, header.ny, header.lx, header.ly)?;
    let per = match header.kind {
        FieldKind::Real => 1,
        FieldKind::Complex => 2,
    };
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * per * grid.len() {
        return Err(TorusError::Format(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            8 * per * grid.len()
        )));
    }
    let floats: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    match header.kind {
        FieldKind::Real => Ok(Cvf1Field::Real(RealField::new(grid, floats)?)),
        FieldKind::Complex => {
            let values = floats.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
            Ok(Cvf1Field::Complex(ComplexField::new(grid, values)?))
        }
    }
}

pub fn save_real(path: &std::path::Path, field: &RealField) -> Result<(), TorusError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_real(&mut f, field)?;
    f.flush()?;
    Ok(())
}

pub fn save_complex(path: &std::path::Path, field: &ComplexField) -> Result<(), TorusError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_complex(&mut f, field)?;
    f.flush()?;
    Ok(())
}

pub fn load(path: &std::path::Path) -> Result<Cvf1Field, TorusError> {
    read(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn load_real(path: &std::path::Path) -> Result<RealField, TorusError> {
    match load(path)? {
        Cvf1Field::Real(f) => Ok(f),
        Cvf1Field::Complex(_) => Err(TorusError::Format(format!("{}: expected a real field", path.display()))),
    }
}

pub fn load_complex(path: &std::path::Path) -> Result<ComplexField, TorusError> {
    match load(path)? {
        Cvf1Field::Complex(f) => Ok(f),
        Cvf1Field::Real(_) => Err(TorusError::Format(format!("{}: expected a complex field", path.display()))),
    }
}
