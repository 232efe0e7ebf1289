//! Binary PGM (`P5`, maxval 255). Pixels map to `[0, 1]` by `/255`; saving
//! rounds half up.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hashing::GrayImage;

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // Skip whitespace and comments.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes
            .get(pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(
            std::str::from_utf8(&bytes[start..pos])
                .map_err(|_| Error::Format("bad PGM header".into()))?,
        );
    }
    if fields[0] != "P5" {
        return Err(Error::Format(format!(
            "expected binary PGM magic P5, got {:?}",
            fields[0]
        )));
    }
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Format(format!("bad PGM {what}: {s:?}")))
    };
    let (w, h, maxval) = (
        num(fields[1], "width")?,
        num(fields[2], "height")?,
        num(fields[3], "maxval")?,
    );
    if maxval != 255 {
        return Err(Error::Format(format!(
            "PGM maxval must be 255, got {maxval}"
        )));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("missing whitespace after PGM header".into()));
    }
    pos += 1;
    let data = &bytes[pos..];
    if data.len() < w * h {
        return Err(Error::Format(format!(
            "PGM payload has {} bytes, expected {}",
            data.len(),
            w * h
        )));
    }
    GrayImage::new(
        h,
        w,
        data[..w * h].iter().map(|&b| b as f64 / 255.0).collect(),
    )
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(
        image
            .pixels()
            .iter()
            .map(|p| (p * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_pgm(&fs::read(path)?)
}

pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(image))?;
    Ok(())
}
