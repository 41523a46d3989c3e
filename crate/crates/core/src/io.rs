//! Sample matrix file formats.
//!
//! CSV: one header line of component names, then one row per draw, values in
//! shortest round-trip decimal form.
//!
//! Binary: a 32-byte little-endian header followed by `n * dim` `f64` values
//! in row-major order.
//!
//! | offset | size | field                 |
//! |--------|------|-----------------------|
//! | 0      | 8    | magic `b"ROSENBRK"`   |
//! | 8      | 4    | format version (`1`)  |
//! | 12     | 4    | reserved, zero        |
//! | 16     | 8    | `n` (rows)            |
//! | 24     | 8    | `dim` (columns)       |

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const BINARY_MAGIC: [u8; 8] = *b"ROSENBRK";
pub const BINARY_VERSION: u32 = 1;
pub const BINARY_HEADER_LEN: usize = 32;

/// Write a row-major matrix as CSV with the given header.
pub fn write_csv<W: Write>(mut w: W, names: &[String], data: &[f64]) -> std::io::Result<()> {
    let dim = names.len();
    writeln!(w, "{}", names.join(","))?;
    for row in data.chunks_exact(dim) {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{v}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_binary<W: Write>(mut w: W, dim: usize, data: &[f64]) -> std::io::Result<()> {
    let n = (data.len() / dim) as u64;
    w.write_all(&BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&(dim as u64).to_le_bytes())?;
    for v in data {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn write_csv_file(path: &Path, names: &[String], data: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(BufWriter::new(file), names, data).map_err(|e| Error::io(path, e))
}

pub fn write_binary_file(path: &Path, dim: usize, data: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_binary(BufWriter::new(file), dim, data).map_err(|e| Error::io(path, e))
}

/// Read a binary sample file; returns `(dim, row-major data)`.
pub fn read_binary_file(path: &Path) -> Result<(usize, Vec<f64>)> {
    let mut bytes = Vec::new();
    File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| Error::io(path, e))?;
    let bad = |reason: &str| Error::Format { path: path.to_path_buf(), reason: reason.to_string() };
    if bytes.len() < BINARY_HEADER_LEN || bytes[..8] != BINARY_MAGIC {
        return Err(bad("missing header"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    if u32_at(8) != BINARY_VERSION {
        return Err(bad("unsupported version"));
    }
    let (n, dim) = (u64_at(16) as usize, u64_at(24) as usize);
    let body = &bytes[BINARY_HEADER_LEN..];
    if dim == 0 || body.len() != n * dim * 8 {
        return Err(bad("body length does not match header"));
    }
    let data = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((dim, data))
}

/// Read a CSV sample file; returns `(header, row-major data)`.
pub fn read_csv_file(path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header: Vec<String> = match lines.next() {
        Some(line) => line.map_err(|e| Error::io(path, e))?.split(',').map(str::to_string).collect(),
        None => return Err(Error::Format { path: path.to_path_buf(), reason: "empty file".into() }),
    };
    let mut data = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let before = data.len();
        for field in line.split(',') {
            let v = field.parse::<f64>().map_err(|_| Error::Format {
                path: path.to_path_buf(),
                reason: format!("row {}: bad value {field:?}", k + 1),
            })?;
            data.push(v);
        }
        if data.len() - before != header.len() {
            return Err(Error::Format {
                path: path.to_path_buf(),
                reason: format!("row {} has the wrong number of fields", k + 1),
            });
        }
    }
    Ok((header, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_csv(&mut out, &["x_1".into(), "x_1_2".into()], &[0.1, 2.0, -3.5e-20, 1.0 / 3.0]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x_1,x_1_2\n0.1,2\n-0.000000000000000000035,0.3333333333333333\n");
    }

    #[test]
    fn binary_header() {
        let mut out = Vec::new();
        write_binary(&mut out, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(out.len(), 32 + 4 * 8);
        assert_eq!(&out[..8], b"ROSENBRK");
        assert_eq!(u64::from_le_bytes(out[16..24].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(out[24..32].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(out[32..40].try_into().unwrap()), 1.0);
    }
}
