//! Ordinary least squares on raw data and on matrix-masked data `(MX, My)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{lstsq, numerical_rank};
use crate::rng::Stream;
use crate::sensing::SensingMatrix;

/// Design matrix `X` (N × p, full column rank, N > p) and response `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionProblem {
    x: DMatrix<f64>,
    y: Vec<f64>,
}

impl RegressionProblem {
    /// `rows` are the N observations, each of length p.
    pub fn new(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let n_obs = rows.len();
        check_len(n_obs, y.len())?;
        let p = rows.first().map_or(0, Vec::len);
        if p == 0 {
            return Err(Error::InvalidDimensions(
                "design matrix has no predictors".into(),
            ));
        }
        for r in rows {
            check_len(p, r.len())?;
        }
        if n_obs <= p {
            return Err(Error::InvalidDimensions(format!(
                "need N > p, got N={n_obs}, p={p}"
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        if flat.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite regression data".into()));
        }
        let x = DMatrix::from_row_slice(n_obs, p, &flat);
        let rank = numerical_rank(&x);
        if rank < p {
            return Err(Error::SingularDesign { rank, cols: p });
        }
        Ok(Self { x, y })
    }

    pub fn observations(&self) -> usize {
        self.x.nrows()
    }

    pub fn predictors(&self) -> usize {
        self.x.ncols()
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn response(&self) -> &[f64] {
        &self.y
    }
}

/// Fitted coefficients. Masked fits carry no observation-level data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub beta: Vec<f64>,
    pub rss: f64,
    pub masked: bool,
    /// Rows of the mask; `None` for a raw fit.
    pub mask_rows: Option<usize>,
}

fn fit(x: &DMatrix<f64>, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let beta = lstsq(x, y).map_err(|rank| Error::SingularDesign {
        rank,
        cols: x.ncols(),
    })?;
    let fitted = x * nalgebra::DVector::from_column_slice(&beta);
    let rss = fitted.iter().zip(y).map(|(f, v)| (v - f) * (v - f)).sum();
    Ok((beta, rss))
}

/// `argmin ‖y − Xβ‖₂` by Householder QR.
pub fn ols(problem: &RegressionProblem) -> Result<RegressionFit> {
    let (beta, rss) = fit(&problem.x, &problem.y)?;
    Ok(RegressionFit {
        beta,
        rss,
        masked: false,
        mask_rows: None,
    })
}

/// OLS on `(MX, My)`; `mask` must be `m × N` with `p < m ≤ N`.
pub fn masked_ols(problem: &RegressionProblem, mask: &SensingMatrix) -> Result<RegressionFit> {
    check_len(problem.observations(), mask.cols())?;
    let (m, p) = (mask.rows(), problem.predictors());
    if m <= p {
        return Err(Error::UnderdeterminedMask {
            rows: m,
            predictors: p,
        });
    }
    let mm = mask.to_dmatrix();
    let mx = &mm * &problem.x;
    let my = mask.apply(&problem.y);
    let (beta, rss) = fit(&mx, &my)?;
    Ok(RegressionFit {
        beta,
        rss,
        masked: true,
        mask_rows: Some(m),
    })
}

/// Gaussian design with coefficients `β_j = (−1)^j (j + 1)` and
/// `N(0, noise²)` errors.
pub fn synthetic_problem(
    n_obs: usize,
    p: usize,
    noise: f64,
    seed: u64,
) -> Result<RegressionProblem> {
    let mut s = Stream::new(seed);
    let beta: Vec<f64> = (0..p)
        .map(|j| {
            if j % 2 == 0 {
                (j + 1) as f64
            } else {
                -((j + 1) as f64)
            }
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n_obs)
        .map(|_| (0..p).map(|_| s.gaussian()).collect())
        .collect();
    let y = rows
        .iter()
        .map(|r| r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + noise * s.gaussian())
        .collect();
    RegressionProblem::new(&rows, y)
}

/// `‖a − b‖₂ / ‖b‖₂`
pub fn relative_coefficient_error(estimate: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = estimate
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den: f64 = reference.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}
