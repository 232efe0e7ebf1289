//! Seeded sensing matrices and compressive acquisition `y = Φx (+ e)`.
//!
//! Entry conventions:
//!
//! * `gaussian`: `N(0, 1/m)` drawn row-major from the matrix stream, so that
//!   `E‖Φx‖² = ‖x‖²`.
//! * `bernoulli`: `±1/√m`; an entry is negative when the top bit of its
//!   64-bit word is set.
//! * `identity`: `m = n`, no randomness.
//! * `orthonormal`: orthonormal rows, obtained from the Householder QR of the
//!   transpose of a row-major `N(0, 1)` draw with the signs of `diag(R)`
//!   folded into `Q`. Used as a regression mask.
//!
//! The matrix stream is `rng::Stream::new(seed)`; measurement noise uses an
//! independent `rng::Stream::new(noise_seed)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, norm2};
use crate::rng::Stream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Gaussian,
    Bernoulli,
    Identity,
    Orthonormal,
}

impl Ensemble {
    /// Byte code used in the CSMX header.
    pub fn code(self) -> u8 {
        match self {
            Ensemble::Gaussian => 0,
            Ensemble::Bernoulli => 1,
            Ensemble::Identity => 2,
            Ensemble::Orthonormal => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Ensemble::Gaussian,
            1 => Ensemble::Bernoulli,
            2 => Ensemble::Identity,
            3 => Ensemble::Orthonormal,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::Bernoulli => "bernoulli",
            Ensemble::Identity => "identity",
            Ensemble::Orthonormal => "orthonormal",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Ensemble::Gaussian),
            "bernoulli" => Ok(Ensemble::Bernoulli),
            "identity" => Ok(Ensemble::Identity),
            "orthonormal" => Ok(Ensemble::Orthonormal),
            other => Err(Error::InvalidParameter(format!(
                "unknown ensemble {other:?}"
            ))),
        }
    }
}

/// Everything needed to regenerate a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixId {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub ensemble: Ensemble,
}

/// Dense row-major `m × n` sensing matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingMatrix {
    id: MatrixId,
    entries: Vec<f64>,
}

impl SensingMatrix {
    pub fn generate(seed: u64, m: usize, n: usize, ensemble: Ensemble) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDimensions(format!(
                "m={m}, n={n}: both must be >= 1"
            )));
        }
        match ensemble {
            Ensemble::Identity if m != n => {
                return Err(Error::InvalidDimensions(format!(
                    "identity ensemble needs m = n, got m={m}, n={n}"
                )))
            }
            Ensemble::Gaussian | Ensemble::Bernoulli | Ensemble::Orthonormal if m > n => {
                return Err(Error::InvalidDimensions(format!(
                    "{ensemble} ensemble needs m <= n, got m={m}, n={n}"
                )))
            }
            _ => {}
        }
        let id = MatrixId {
            seed,
            rows: m,
            cols: n,
            ensemble,
        };
        let entries = match ensemble {
            Ensemble::Gaussian => {
                let scale = 1.0 / (m as f64).sqrt();
                let mut s = Stream::new(seed);
                (0..m * n).map(|_| s.gaussian() * scale).collect()
            }
            Ensemble::Bernoulli => {
                let v = 1.0 / (m as f64).sqrt();
                let mut s = Stream::new(seed);
                (0..m * n).map(|_| if s.coin() { -v } else { v }).collect()
            }
            Ensemble::Identity => {
                let mut e = vec![0.0; n * n];
                for i in 0..n {
                    e[i * n + i] = 1.0;
                }
                e
            }
            Ensemble::Orthonormal => orthonormal_rows(seed, m, n),
        };
        Ok(Self { id, entries })
    }

    /// Rebuild from stored entries; the caller vouches that they match `id`.
    pub fn from_parts(id: MatrixId, entries: Vec<f64>) -> Result<Self> {
        check_len(id.rows * id.cols, entries.len())?;
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite matrix entry".into()));
        }
        Ok(Self { id, entries })
    }

    pub fn id(&self) -> MatrixId {
        self.id
    }
    pub fn seed(&self) -> u64 {
        self.id.seed
    }
    pub fn rows(&self) -> usize {
        self.id.rows
    }
    pub fn cols(&self) -> usize {
        self.id.cols
    }
    pub fn ensemble(&self) -> Ensemble {
        self.id.ensemble
    }
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.id.cols;
        &self.entries[i * n..(i + 1) * n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.id.cols + j]
    }

    /// `Φx`. Panics on length mismatch; use [`acquire`] for checked input.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols());
        (0..self.rows()).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Φᵀr`.
    pub fn apply_transpose(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.rows());
        let mut out = vec![0.0; self.cols()];
        for (i, &ri) in r.iter().enumerate() {
            axpy(&mut out, ri, self.row(i));
        }
        out
    }

    /// `Φx_j` for several vectors in one pass over `Φ`. Each output is
    /// bit-identical to `apply(x_j)`: every row keeps the accumulator layout
    /// of [`dot`] across column blocks.
    pub fn apply_many(&self, xs: &[&[f64]]) -> Vec<Vec<f64>> {
        let (m, n) = (self.rows(), self.cols());
        for x in xs {
            assert_eq!(x.len(), n);
        }
        let body = n - n % 4;
        let mut acc = vec![[0.0f64; 4]; m * xs.len()];
        let mut start = 0;
        while start < body {
            let end = (start + BLOCK).min(body);
            let mut i = 0;
            while i < m {
                let g = (m - i).min(4);
                for (j, x) in xs.iter().enumerate() {
                    let xb = &x[start..end];
                    let a = &mut acc[j * m + i..j * m + i + g];
                    if g == 4 {
                        let rows = [0, 1, 2, 3].map(|d| &self.row(i + d)[start..end]);
                        dot_acc4(rows, xb, a);
                    } else {
                        for (d, ad) in a.iter_mut().enumerate() {
                            dot_acc1(&self.row(i + d)[start..end], xb, ad);
                        }
                    }
                }
                i += g;
            }
            start = end;
        }
        finish_products(self, &acc, xs.iter().copied(), body)
    }

    /// `Φᵀr_j` for several vectors; bit-identical to `apply_transpose(r_j)`.
    /// Four rows are fused per sweep with the additions in row order.
    pub fn apply_transpose_many(&self, rs: &[&[f64]]) -> Vec<Vec<f64>> {
        let (m, n) = (self.rows(), self.cols());
        for r in rs {
            assert_eq!(r.len(), m);
        }
        let mut out = vec![vec![0.0; n]; rs.len()];
        let mut start = 0;
        while start < n {
            let end = (start + BLOCK).min(n);
            let mut i = 0;
            while i < m {
                let g = (m - i).min(4);
                for (o, r) in out.iter_mut().zip(rs) {
                    let ob = &mut o[start..end];
                    if g == 4 {
                        let rows = [0, 1, 2, 3].map(|d| &self.row(i + d)[start..end]);
                        axpy4(ob, [r[i], r[i + 1], r[i + 2], r[i + 3]], rows);
                    } else {
                        for d in 0..g {
                            axpy(ob, r[i + d], &self.row(i + d)[start..end]);
                        }
                    }
                }
                i += g;
            }
            start = end;
        }
        out
    }

    /// One sweep over `Φ` for a proximal-gradient step on several vectors.
    ///
    /// For each column block, the block of `g_j = Φᵀr_j` is completed first
    /// and handed to `update(j, g_block, x_block)`, which rewrites that block
    /// of `xs[j]` in place; the updated block is then folded into `Φx_j`.
    /// The returned products equal `apply(xs[j])` on the updated vectors and
    /// every `g_block` equals the matching slice of `apply_transpose(r_j)`,
    /// bit for bit.
    pub(crate) fn transpose_update_apply(
        &self,
        rs: &[&[f64]],
        xs: &mut [&mut [f64]],
        mut update: impl FnMut(usize, &[f64], &mut [f64]),
    ) -> Vec<Vec<f64>> {
        let (m, n) = (self.rows(), self.cols());
        assert_eq!(rs.len(), xs.len());
        for (r, x) in rs.iter().zip(xs.iter()) {
            assert_eq!(r.len(), m);
            assert_eq!(x.len(), n);
        }
        let body = n - n % 4;
        let nv = xs.len();
        let mut acc = vec![[0.0f64; 4]; m * nv];
        let mut grads = vec![0.0f64; BLOCK * nv];
        let mut start = 0;
        while start < n {
            let end = (start + BLOCK).min(n);
            let width = end - start;
            let dot_end = end.min(body);
            grads.fill(0.0);
            let mut i = 0;
            while i < m {
                let k = (m - i).min(4);
                for (g, r) in grads.chunks_exact_mut(BLOCK).zip(rs) {
                    let g = &mut g[..width];
                    if k == 4 {
                        let rows = [0, 1, 2, 3].map(|d| &self.row(i + d)[start..end]);
                        axpy4(g, [r[i], r[i + 1], r[i + 2], r[i + 3]], rows);
                    } else {
                        for d in 0..k {
                            axpy(g, r[i + d], &self.row(i + d)[start..end]);
                        }
                    }
                }
                i += k;
            }
            for (j, (g, x)) in grads.chunks_exact(BLOCK).zip(xs.iter_mut()).enumerate() {
                update(j, &g[..width], &mut x[start..end]);
            }
            if start < dot_end {
                let mut i = 0;
                while i < m {
                    let k = (m - i).min(4);
                    for (j, x) in xs.iter().enumerate() {
                        let xb = &x[start..dot_end];
                        let a = &mut acc[j * m + i..j * m + i + k];
                        if k == 4 {
                            let rows = [0, 1, 2, 3].map(|d| &self.row(i + d)[start..dot_end]);
                            dot_acc4(rows, xb, a);
                        } else {
                            for (d, ad) in a.iter_mut().enumerate() {
                                dot_acc1(&self.row(i + d)[start..dot_end], xb, ad);
                            }
                        }
                    }
                    i += k;
                }
            }
            start = end;
        }
        finish_products(self, &acc, xs.iter().map(|x| &**x), body)
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols()];
        for i in 0..self.rows() {
            for (s, v) in sq.iter_mut().zip(self.row(i)) {
                *s += v * v;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Column `j` as a new vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows(), self.cols(), &self.entries)
    }
}

fn orthonormal_rows(seed: u64, m: usize, n: usize) -> Vec<f64> {
    let mut s = Stream::new(seed);
    let draw: Vec<f64> = (0..m * n).map(|_| s.gaussian()).collect();
    // Row-major m×n draw, viewed as its n×m transpose for the QR.
    let at = DMatrix::from_column_slice(n, m, &draw);
    let qr = at.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        out.extend(q.column(i).iter().copied());
    }
    out
}

/// A raw sample: a real vector, optionally labelled and optionally a
/// row-major grayscale image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub values: Vec<f64>,
    pub label: Option<String>,
    pub shape: Option<(usize, usize)>,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimensions(
                "signal must have length >= 1".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "signal values must be finite".into(),
            ));
        }
        Ok(Self {
            values,
            label: None,
            shape: None,
        })
    }

    pub fn image(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        check_len(height * width, values.len())?;
        let mut s = Self::new(values)?;
        s.shape = Some((height, width));
        Ok(s)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }
}

/// A compressed sample `y` with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub values: Vec<f64>,
    pub matrix_id: MatrixId,
    pub noise_sigma: f64,
}

impl Measurement {
    /// Wrap externally supplied values; checks them against `matrix`.
    pub fn from_values(matrix: &SensingMatrix, values: Vec<f64>, noise_sigma: f64) -> Result<Self> {
        check_len(matrix.rows(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "measurement values must be finite".into(),
            ));
        }
        Ok(Self {
            values,
            matrix_id: matrix.id(),
            noise_sigma,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Combines per-row accumulators as [`dot`] does and adds the scalar tail
/// from column `body` on.
fn finish_products<'a>(
    matrix: &SensingMatrix,
    acc: &[[f64; 4]],
    xs: impl Iterator<Item = &'a [f64]>,
    body: usize,
) -> Vec<Vec<f64>> {
    let m = matrix.rows();
    xs.enumerate()
        .map(|(j, x)| {
            (0..m)
                .map(|i| {
                    let a = acc[j * m + i];
                    let mut s = (a[0] + a[1]) + (a[2] + a[3]);
                    for (p, q) in matrix.row(i)[body..].iter().zip(&x[body..]) {
                        s += p * q;
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Column block for the batched products; a multiple of 4 so blocks split
/// on accumulator boundaries.
const BLOCK: usize = 512;

#[inline]
fn dot_acc4(rows: [&[f64]; 4], x: &[f64], acc: &mut [[f64; 4]]) {
    let len = x.len();
    let [r0, r1, r2, r3] = rows.map(|r| &r[..len]);
    let mut a = [acc[0], acc[1], acc[2], acc[3]];
    for c in (0..len).step_by(4) {
        let xv = &x[c..c + 4];
        for (ar, rv) in
            a.iter_mut()
                .zip([&r0[c..c + 4], &r1[c..c + 4], &r2[c..c + 4], &r3[c..c + 4]])
        {
            for l in 0..4 {
                ar[l] += rv[l] * xv[l];
            }
        }
    }
    acc.copy_from_slice(&a);
}

#[inline]
fn dot_acc1(row: &[f64], x: &[f64], acc: &mut [f64; 4]) {
    for (rv, xv) in row.chunks_exact(4).zip(x.chunks_exact(4)) {
        for l in 0..4 {
            acc[l] += rv[l] * xv[l];
        }
    }
}

#[inline]
fn axpy4(y: &mut [f64], alpha: [f64; 4], rows: [&[f64]; 4]) {
    let len = y.len();
    let [r0, r1, r2, r3] = rows.map(|r| &r[..len]);
    for t in 0..len {
        y[t] =
            (((y[t] + alpha[0] * r0[t]) + alpha[1] * r1[t]) + alpha[2] * r2[t]) + alpha[3] * r3[t];
    }
}

pub fn acquire(matrix: &SensingMatrix, signal: &Signal) -> Result<Measurement> {
    check_len(matrix.cols(), signal.len())?;
    Ok(Measurement {
        values: matrix.apply(&signal.values),
        matrix_id: matrix.id(),
        noise_sigma: 0.0,
    })
}

/// `Φx + e`, `e ~ N(0, sigma² I)` drawn from `Stream::new(noise_seed)`.
pub fn acquire_noisy(
    matrix: &SensingMatrix,
    signal: &Signal,
    sigma: f64,
    noise_seed: u64,
) -> Result<Measurement> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be >= 0, got {sigma}"
        )));
    }
    let mut y = acquire(matrix, signal)?;
    if sigma > 0.0 {
        add_gaussian_noise(&mut y.values, sigma, noise_seed);
    }
    y.noise_sigma = sigma;
    Ok(y)
}

pub(crate) fn add_gaussian_noise(values: &mut [f64], sigma: f64, noise_seed: u64) {
    let mut s = Stream::new(noise_seed);
    for v in values {
        *v += sigma * s.gaussian();
    }
}

/// `m / n`.
pub fn compression_ratio(matrix: &SensingMatrix) -> f64 {
    matrix.rows() as f64 / matrix.cols() as f64
}
