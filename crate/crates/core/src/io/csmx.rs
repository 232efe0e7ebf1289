//! CSMX: 22-byte little-endian header
//! `"CSMX" | version u8 | ensemble u8 | seed u64 | m u32 | n u32`
//! optionally followed by `m·n` row-major `f64` entries. A header-only file
//! is expanded by regenerating the matrix from its seed.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::sensing::{Ensemble, MatrixId, SensingMatrix};

pub const CSMX_MAGIC: &[u8; 4] = b"CSMX";
pub const CSMX_VERSION: u8 = 1;
pub const CSMX_HEADER_LEN: usize = 22;

pub fn write_csmx<W: Write>(matrix: &SensingMatrix, mut w: W, with_entries: bool) -> Result<()> {
    let id = matrix.id();
    let (m, n) = (u32::try_from(id.rows), u32::try_from(id.cols));
    let (m, n) = match (m, n) {
        (Ok(m), Ok(n)) => (m, n),
        _ => return Err(Error::InvalidDimensions("matrix too large for CSMX".into())),
    };
    let mut header = Vec::with_capacity(CSMX_HEADER_LEN);
    header.extend_from_slice(CSMX_MAGIC);
    header.push(CSMX_VERSION);
    header.push(id.ensemble.code());
    header.extend_from_slice(&id.seed.to_le_bytes());
    header.extend_from_slice(&m.to_le_bytes());
    header.extend_from_slice(&n.to_le_bytes());
    w.write_all(&header)?;
    if with_entries {
        let mut buf = Vec::with_capacity(8 * matrix.entries().len());
        for v in matrix.entries() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csmx<R: Read>(mut r: R) -> Result<SensingMatrix> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < CSMX_HEADER_LEN || &bytes[..4] != CSMX_MAGIC {
        return Err(Error::Format("not a CSMX file".into()));
    }
    if bytes[4] != CSMX_VERSION {
        return Err(Error::Format(format!(
            "unsupported CSMX version {}",
            bytes[4]
        )));
    }
    let ensemble = Ensemble::from_code(bytes[5])
        .ok_or_else(|| Error::Format(format!("unknown ensemble code {}", bytes[5])))?;
    let seed = u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes"));
    let m = u32::from_le_bytes(bytes[14..18].try_into().expect("4 bytes")) as usize;
    let n = u32::from_le_bytes(bytes[18..22].try_into().expect("4 bytes")) as usize;
    let payload = &bytes[CSMX_HEADER_LEN..];
    if payload.is_empty() {
        return SensingMatrix::generate(seed, m, n, ensemble);
    }
    if payload.len() != 8 * m * n {
        return Err(Error::Format(format!(
            "CSMX payload has {} bytes, expected {}",
            payload.len(),
            8 * m * n
        )));
    }
    let entries = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    SensingMatrix::from_parts(
        MatrixId {
            seed,
            rows: m,
            cols: n,
            ensemble,
        },
        entries,
    )
}
