//! Binary `QMAT` format.
//!
//! Layout (little endian): magic `QMAT`, `u32` version, `u32` rows, `u32`
//! cols, then the w, x, y, z planes as row-major `f64`.

use std::io::{Read, Write};
use std::path::Path;

use super::matrix::QMatrix;
use crate::error::{QslrError, Result};

pub const MAGIC: &[u8; 4] = b"QMAT";
pub const VERSION: u32 = 1;

pub fn to_bytes(a: &QMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 32 * a.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(a.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(a.cols() as u32).to_le_bytes());
    for p in a.planes() {
        for v in p.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<QMatrix> {
    let bad = |m: &str| QslrError::Numerical(format!("malformed QMAT data: {m}"));
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(bad("missing header"));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap());
    if word(4) != VERSION {
        return Err(bad(&format!("unsupported version {}", word(4))));
    }
    let (rows, cols) = (word(8) as usize, word(12) as usize);
    let n = rows * cols;
    if bytes.len() != 16 + 32 * n {
        return Err(bad("payload length does not match dimensions"));
    }
    let plane = |p: usize| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let o = 16 + 8 * (p * n + k);
                f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap())
            })
            .collect()
    };
    QMatrix::from_planes(rows, cols, plane(0), plane(1), plane(2), plane(3))
}

pub fn write(path: &Path, a: &QMatrix) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| QslrError::io(path, e))?;
    f.write_all(&to_bytes(a)).map_err(|e| QslrError::io(path, e))
}

pub fn read(path: &Path) -> Result<QMatrix> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| QslrError::io(path, e))?;
    from_bytes(&buf).map_err(|e| QslrError::io(path, e))
}
