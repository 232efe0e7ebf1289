//! Reference computations used to check the library from the outside.
//! Written against plain row-major arrays with no shared code paths.
#![allow(dead_code)]

use compana_core::sensing::SensingMatrix;

pub fn rows_of(matrix: &SensingMatrix) -> Vec<Vec<f64>> {
    (0..matrix.rows()).map(|i| matrix.row(i).to_vec()).collect()
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel_err(estimate: &[f64], truth: &[f64]) -> f64 {
    let d: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| a - b).collect();
    norm(&d) / norm(truth)
}

/// Gaussian elimination with partial pivoting on a square system.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// `(XᵀX)⁻¹Xᵀy` by forming the normal equations explicitly.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = x[0].len();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            xty[i] += row[i] * yi;
            for j in 0..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    solve(xtx, xty)
}

/// Best `k`-column least-squares fit over every support of size `k`.
/// Returns the support, the dense coefficient vector and the residual norm.
pub fn best_subset(a: &[Vec<f64>], y: &[f64], k: usize) -> (Vec<usize>, Vec<f64>, f64) {
    let n = a[0].len();
    let mut best: Option<(Vec<usize>, Vec<f64>, f64)> = None;
    for support in combinations(n, k) {
        let sub: Vec<Vec<f64>> = a
            .iter()
            .map(|r| support.iter().map(|&j| r[j]).collect())
            .collect();
        let Some(coef) = normal_equations(&sub, y) else {
            continue;
        };
        let mut x = vec![0.0; n];
        for (&j, &c) in support.iter().zip(&coef) {
            x[j] = c;
        }
        let fit = matvec(a, &x);
        let res = norm(&fit.iter().zip(y).map(|(f, v)| f - v).collect::<Vec<_>>());
        if best.as_ref().map_or(true, |b| res < b.2) {
            best = Some((support, x, res));
        }
    }
    best.expect("at least one nonsingular support")
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `½‖y − Ax‖² + λ‖x‖₁`
pub fn lasso_objective(a: &[Vec<f64>], y: &[f64], x: &[f64], lambda: f64) -> f64 {
    let r: Vec<f64> = matvec(a, x).iter().zip(y).map(|(p, q)| p - q).collect();
    0.5 * r.iter().map(|v| v * v).sum::<f64>() + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Cyclic coordinate descent for the lasso, run until a full sweep moves no
/// coordinate by more than 1e-15.
pub fn lasso_coordinate_descent(a: &[Vec<f64>], y: &[f64], lambda: f64) -> Vec<f64> {
    let n = a[0].len();
    let col_sq: Vec<f64> = (0..n)
        .map(|j| a.iter().map(|r| r[j] * r[j]).sum())
        .collect();
    let mut x = vec![0.0; n];
    let mut r = y.to_vec();
    for _ in 0..1_000_000 {
        let mut moved: f64 = 0.0;
        for j in 0..n {
            if col_sq[j] == 0.0 {
                continue;
            }
            let rho: f64 =
                a.iter().zip(&r).map(|(row, ri)| row[j] * ri).sum::<f64>() + col_sq[j] * x[j];
            let new = rho.signum() * (rho.abs() - lambda).max(0.0) / col_sq[j];
            let delta = new - x[j];
            if delta != 0.0 {
                for (ri, row) in r.iter_mut().zip(a) {
                    *ri -= row[j] * delta;
                }
                x[j] = new;
            }
            moved = moved.max(delta.abs());
        }
        if moved <= 1e-15 {
            break;
        }
    }
    x
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

pub fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Textbook orthogonal matching pursuit: pick the unused column with the
/// largest `|⟨a_j, r⟩| / ‖a_j‖` (first index on ties), refit on the normal
/// equations, repeat `k` times.
pub fn greedy_pursuit(a: &[Vec<f64>], y: &[f64], k: usize) -> Vec<f64> {
    let n = a[0].len();
    let col_norm: Vec<f64> = (0..n)
        .map(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    let mut support: Vec<usize> = Vec::new();
    let mut x = vec![0.0; n];
    let mut r = y.to_vec();
    for _ in 0..k {
        let mut best = (usize::MAX, -1.0);
        for j in (0..n).filter(|j| !support.contains(j)) {
            let c: f64 = a.iter().zip(&r).map(|(row, ri)| row[j] * ri).sum();
            let score = c.abs() / col_norm[j];
            if score > best.1 {
                best = (j, score);
            }
        }
        support.push(best.0);
        let sub: Vec<Vec<f64>> = a
            .iter()
            .map(|row| support.iter().map(|&j| row[j]).collect())
            .collect();
        let coef = normal_equations(&sub, y).expect("independent columns");
        x = vec![0.0; n];
        for (&j, &c) in support.iter().zip(&coef) {
            x[j] = c;
        }
        r = y.iter().zip(matvec(a, &x)).map(|(p, q)| p - q).collect();
    }
    x
}
