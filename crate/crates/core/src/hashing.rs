//! Perceptual hashes (aHash, dHash, DCT pHash) over grayscale images and
//! Hamming-distance duplicate tests.
//!
//! Conventions, frozen so hashes are stable across platforms:
//!
//! * Resampling is bilinear with pixel-center alignment:
//!   `src = (dst + 0.5)·(in/out) − 0.5`, clamped to the image, and each
//!   interpolation step is `a + f·(b − a)`.
//! * Bit `i` of a 64-bit hash is packed at position `63 − i` (bit 0 is the
//!   most significant); cells are visited row-major.
//! * All comparisons are strict `>`; ties give 0 bits.
//! * pHash uses the orthonormal DCT-II, `α(0) = √(1/N)`, `α(k) = √(2/N)`,
//!   on a 32×32 resample, keeps the 8×8 low-frequency block, and compares
//!   the 63 AC coefficients against their median. The DC bit is always 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Row-major grayscale image with pixels in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    /// Pixels outside `[0, 1]` are clamped; non-finite pixels are rejected.
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidDimensions(format!("{height}x{width} image")));
        }
        check_len(height * width, pixels.len())?;
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("non-finite pixel".into()));
        }
        let pixels = pixels.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn from_fn(height: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let pixels = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self::new(height, width, pixels)
    }

    pub fn height(&self) -> usize {
        self.height
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.width + c]
    }
}

fn source_coord(dst: usize, in_len: usize, out_len: usize) -> (usize, usize, f64) {
    let s = (dst as f64 + 0.5) * (in_len as f64 / out_len as f64) - 0.5;
    let s = s.clamp(0.0, (in_len - 1) as f64);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(in_len - 1);
    (i0, i1, s - i0 as f64)
}

pub fn resize_bilinear(image: &GrayImage, out_h: usize, out_w: usize) -> Result<GrayImage> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidDimensions(format!(
            "resize target {out_h}x{out_w}"
        )));
    }
    let cols: Vec<_> = (0..out_w)
        .map(|c| source_coord(c, image.width, out_w))
        .collect();
    let mut pixels = Vec::with_capacity(out_h * out_w);
    for r in 0..out_h {
        let (r0, r1, fy) = source_coord(r, image.height, out_h);
        for &(c0, c1, fx) in &cols {
            let (p00, p01) = (image.get(r0, c0), image.get(r0, c1));
            let (p10, p11) = (image.get(r1, c0), image.get(r1, c1));
            let top = p00 + fx * (p01 - p00);
            let bottom = p10 + fx * (p11 - p10);
            pixels.push(top + fy * (bottom - top));
        }
    }
    Ok(GrayImage {
        height: out_h,
        width: out_w,
        pixels,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HashKind {
    AHash,
    DHash,
    PHash,
}

impl HashKind {
    pub fn name(self) -> &'static str {
        match self {
            HashKind::AHash => "ahash",
            HashKind::DHash => "dhash",
            HashKind::PHash => "phash",
        }
    }
}

impl fmt::Display for HashKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ahash" => Ok(HashKind::AHash),
            "dhash" => Ok(HashKind::DHash),
            "phash" => Ok(HashKind::PHash),
            _ => Err(Error::InvalidParameter(format!("unknown hash kind {s:?}"))),
        }
    }
}

/// 64-bit perceptual digest, printed as `kind:` + 16 lowercase hex digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerceptualHash {
    pub bits: u64,
    pub kind: HashKind,
}

impl fmt::Display for PerceptualHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:016x}", self.kind, self.bits)
    }
}

impl FromStr for PerceptualHash {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, hex) = s
            .split_once(':')
            .ok_or_else(|| Error::Format(format!("hash {s:?} lacks a kind prefix")))?;
        if hex.len() != 16 {
            return Err(Error::Format(format!("hash {s:?} must have 16 hex digits")));
        }
        let bits =
            u64::from_str_radix(hex, 16).map_err(|e| Error::Format(format!("hash {s:?}: {e}")))?;
        Ok(Self {
            bits,
            kind: kind.parse()?,
        })
    }
}

fn pack(bits: impl IntoIterator<Item = bool>) -> u64 {
    bits.into_iter().take(64).enumerate().fold(
        0u64,
        |acc, (i, b)| if b { acc | 1 << (63 - i) } else { acc },
    )
}

pub fn ahash(image: &GrayImage) -> PerceptualHash {
    let small = resize_bilinear(image, 8, 8).expect("fixed dims");
    let px = small.pixels();
    // Offsetting by the minimum keeps a flat image's mean exactly equal to
    // its pixels.
    let lo = px.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = lo + px.iter().map(|p| p - lo).sum::<f64>() / 64.0;
    PerceptualHash {
        bits: pack(px.iter().map(|&p| p > mean)),
        kind: HashKind::AHash,
    }
}

pub fn dhash(image: &GrayImage) -> PerceptualHash {
    let small = resize_bilinear(image, 8, 9).expect("fixed dims");
    let bits = (0..8)
        .flat_map(|r| (0..8).map(move |c| (r, c)))
        .map(|(r, c)| small.get(r, c + 1) > small.get(r, c));
    PerceptualHash {
        bits: pack(bits),
        kind: HashKind::DHash,
    }
}

/// Orthonormal DCT-II basis rows `0..keep` for length `n`: row `u` holds
/// `α(u)·cos(π(2x+1)u / 2n)`.
fn dct_basis(n: usize, keep: usize) -> Vec<Vec<f64>> {
    (0..keep)
        .map(|u| {
            let alpha = if u == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            (0..n)
                .map(|x| {
                    alpha
                        * (std::f64::consts::PI * (2 * x + 1) as f64 * u as f64 / (2 * n) as f64)
                            .cos()
                })
                .collect()
        })
        .collect()
}

/// Low-frequency `keep × keep` block of the orthonormal 2-D DCT-II of a
/// row-major `n × n` block; entry `(u, v)` pairs vertical frequency `u`
/// with horizontal frequency `v`.
pub fn dct2_low(block: &[f64], n: usize, keep: usize) -> Vec<f64> {
    assert_eq!(block.len(), n * n);
    let basis = dct_basis(n, keep);
    // Horizontal pass: tmp[r][v] = Σ_c block[r][c]·basis[v][c]
    let mut tmp = vec![0.0; n * keep];
    for r in 0..n {
        let row = &block[r * n..(r + 1) * n];
        for v in 0..keep {
            tmp[r * keep + v] = row.iter().zip(&basis[v]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; keep * keep];
    for u in 0..keep {
        for v in 0..keep {
            out[u * keep + v] = (0..n).map(|r| basis[u][r] * tmp[r * keep + v]).sum();
        }
    }
    out
}

pub fn phash(image: &GrayImage) -> PerceptualHash {
    let small = resize_bilinear(image, 32, 32).expect("fixed dims");
    let lo = small.pixels().iter().copied().fold(f64::INFINITY, f64::min);
    // DC-only shift: a flat image becomes exactly zero.
    let centred: Vec<f64> = small.pixels().iter().map(|p| p - lo).collect();
    let coef = dct2_low(&centred, 32, 8);
    let mut ac: Vec<f64> = coef[1..].to_vec();
    ac.sort_by(|a, b| a.total_cmp(b));
    let median = ac[31];
    let bits = coef.iter().enumerate().map(|(i, &c)| i != 0 && c > median);
    PerceptualHash {
        bits: pack(bits),
        kind: HashKind::PHash,
    }
}

pub fn hash(image: &GrayImage, kind: HashKind) -> PerceptualHash {
    match kind {
        HashKind::AHash => ahash(image),
        HashKind::DHash => dhash(image),
        HashKind::PHash => phash(image),
    }
}

pub fn hamming(a: &PerceptualHash, b: &PerceptualHash) -> Result<u32> {
    if a.kind != b.kind {
        return Err(Error::IncomparableHash(
            a.kind.to_string(),
            b.kind.to_string(),
        ));
    }
    Ok((a.bits ^ b.bits).count_ones())
}

pub fn is_duplicate(a: &PerceptualHash, b: &PerceptualHash, threshold: u32) -> Result<bool> {
    if threshold > 64 {
        return Err(Error::InvalidParameter(format!(
            "threshold {threshold} > 64"
        )));
    }
    Ok(hamming(a, b)? <= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::texture;
    use proptest::prelude::*;

    fn constant(h: usize, w: usize, v: f64) -> GrayImage {
        GrayImage::new(h, w, vec![v; h * w]).unwrap()
    }

    #[test]
    fn resize_constant_and_identity() {
        for v in [0.5, 0.1, 0.7331] {
            let img = constant(13, 29, v);
            let out = resize_bilinear(&img, 7, 40).unwrap();
            assert!(out.pixels().iter().all(|&p| p == v));
        }
        let img = GrayImage::new(17, 11, texture(17, 11, 3, 0.1, 0.9)).unwrap();
        let same = resize_bilinear(&img, 17, 11).unwrap();
        for (a, b) in same.pixels().iter().zip(img.pixels()) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert!(resize_bilinear(&img, 0, 3).is_err());
    }

    #[test]
    fn resize_two_by_two_to_one() {
        let img = GrayImage::new(2, 2, vec![0., 1., 0., 1.]).unwrap();
        assert_eq!(resize_bilinear(&img, 1, 1).unwrap().pixels(), &[0.5]);
    }

    #[test]
    fn image_clamps_and_rejects_nan() {
        let img = GrayImage::new(1, 3, vec![-0.5, 0.5, 2.0]).unwrap();
        assert_eq!(img.pixels(), &[0.0, 0.5, 1.0]);
        assert!(GrayImage::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn flat_images_hash_to_zero() {
        for v in [0.0, 0.1, 0.5, 0.987] {
            let img = constant(40, 33, v);
            assert_eq!(ahash(&img).bits, 0);
            assert_eq!(dhash(&img).bits, 0);
            assert_eq!(phash(&img).bits, 0);
        }
    }

    #[test]
    fn ahash_half_split() {
        let img = GrayImage::from_fn(8, 8, |_, c| if c < 4 { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(ahash(&img).bits, 0x0F0F_0F0F_0F0F_0F0F);
    }

    #[test]
    fn dhash_increasing_ramp() {
        let img = GrayImage::from_fn(20, 50, |_, c| c as f64 / 49.0).unwrap();
        assert_eq!(dhash(&img).bits, u64::MAX);
    }

    #[test]
    fn phash_single_cosine_matches_direct_dct() {
        // Vertical frequency 1, horizontal 0, on a native 32×32 grid.
        let img = GrayImage::from_fn(32, 32, |r, _| {
            0.5 + 0.25 * (std::f64::consts::PI * (2 * r + 1) as f64 / 64.0).cos()
        })
        .unwrap();
        let fast = dct2_low(img.pixels(), 32, 8);
        let direct = direct_dct_oracle(img.pixels(), 32, 8);
        for (a, b) in fast.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        // Only (1,0) carries AC energy.
        assert!(direct[8] > 1.0);
        for (i, c) in direct.iter().enumerate() {
            if i != 0 && i != 8 {
                assert!(c.abs() < 1e-12, "coef {i} = {c}");
            }
        }
        let h = phash(&img);
        assert_eq!(h.bits >> 63, 0, "DC bit fixed to zero");
        assert_eq!((h.bits >> (63 - 8)) & 1, 1, "bit for (1,0) set");
    }

    // O(N^4)-style direct summation of the orthonormal DCT-II definition.
    fn direct_dct_oracle(f: &[f64], n: usize, keep: usize) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        let a = |k: usize| {
            if k == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            }
        };
        let mut out = vec![0.0; keep * keep];
        for u in 0..keep {
            for v in 0..keep {
                let mut s = 0.0;
                for x in 0..n {
                    for y in 0..n {
                        s += f[x * n + y]
                            * (pi * (2 * x + 1) as f64 * u as f64 / (2 * n) as f64).cos()
                            * (pi * (2 * y + 1) as f64 * v as f64 / (2 * n) as f64).cos();
                    }
                }
                out[u * keep + v] = a(u) * a(v) * s;
            }
        }
        out
    }

    #[test]
    fn hamming_examples() {
        let a = PerceptualHash {
            bits: 0xF0,
            kind: HashKind::DHash,
        };
        let b = PerceptualHash {
            bits: 0x0F,
            kind: HashKind::DHash,
        };
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&a, &b).unwrap(), 8);
        let p = PerceptualHash {
            bits: 0xF0,
            kind: HashKind::PHash,
        };
        assert!(matches!(hamming(&a, &p), Err(Error::IncomparableHash(..))));
        assert!(is_duplicate(&a, &a, 0).unwrap());
        let c = PerceptualHash {
            bits: 0x7FF,
            kind: HashKind::DHash,
        };
        let z = PerceptualHash {
            bits: 0,
            kind: HashKind::DHash,
        };
        assert_eq!(hamming(&c, &z).unwrap(), 11);
        assert!(!is_duplicate(&c, &z, 10).unwrap());
        assert!(is_duplicate(&c, &z, 11).unwrap());
    }

    #[test]
    fn hex_round_trip() {
        let h = PerceptualHash {
            bits: 0x00ab_cdef_0123_4567,
            kind: HashKind::PHash,
        };
        assert_eq!(h.to_string(), "phash:00abcdef01234567");
        assert_eq!(
            "phash:00abcdef01234567".parse::<PerceptualHash>().unwrap(),
            h
        );
        assert!("xhash:0000000000000000".parse::<PerceptualHash>().is_err());
        assert!("dhash:00".parse::<PerceptualHash>().is_err());
    }

    #[test]
    fn brightness_shift_invariance() {
        for seed in 0..20 {
            let px = texture(48, 48, seed, 0.2, 0.8);
            let img = GrayImage::new(48, 48, px.clone()).unwrap();
            for c in [-0.15, 0.03, 0.19] {
                let shifted = GrayImage::new(48, 48, px.iter().map(|p| p + c).collect()).unwrap();
                for kind in [HashKind::AHash, HashKind::DHash, HashKind::PHash] {
                    assert_eq!(
                        hash(&img, kind),
                        hash(&shifted, kind),
                        "seed {seed} c {c} {kind}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let h = |bits| PerceptualHash { bits, kind: HashKind::AHash };
            let (a, b, c) = (h(a), h(b), h(c));
            prop_assert_eq!(hamming(&a, &a).unwrap(), 0);
            prop_assert_eq!(hamming(&a, &b).unwrap(), hamming(&b, &a).unwrap());
            prop_assert!(hamming(&a, &c).unwrap() <= hamming(&a, &b).unwrap() + hamming(&b, &c).unwrap());
            if a != b {
                prop_assert!(hamming(&a, &b).unwrap() > 0);
            }
        }
    }
}
