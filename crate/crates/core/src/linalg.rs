//! Small dense kernels shared by the solvers.

use nalgebra::{DMatrix, DVector};

/// Dot product with four interleaved accumulators, combined as
/// `(a0 + a1) + (a2 + a3)` followed by the scalar tail.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ta, tb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ta.iter().zip(tb) {
        s += x * y;
    }
    s
}

/// `y += alpha * x`
#[inline]
pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Median of a non-empty slice (mean of the two central values for even
/// lengths). NaNs sort last.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Relative threshold on `|R_ii| / |R_00|` below which a column counts as
/// dependent.
pub const RANK_TOL: f64 = 1e-10;

/// Numerical rank from a column-pivoted QR.
pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let r = a.clone().col_piv_qr().r();
    let d0 = r[(0, 0)].abs();
    if d0 == 0.0 {
        return 0;
    }
    (0..r.nrows().min(r.ncols()))
        .take_while(|&i| r[(i, i)].abs() > RANK_TOL * d0)
        .count()
}

/// Least squares `argmin ‖b − A c‖` through Householder QR. Requires
/// `A` to have full column rank; otherwise returns the numerical rank.
pub fn lstsq(a: &DMatrix<f64>, b: &[f64]) -> std::result::Result<Vec<f64>, usize> {
    let cols = a.ncols();
    let rank = numerical_rank(a);
    if rank < cols || a.nrows() < cols {
        return Err(rank);
    }
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * DVector::from_column_slice(b);
    let r = qr.r();
    r.solve_upper_triangular(&qtb)
        .map(|c| c.iter().copied().collect())
        .ok_or(rank)
}
