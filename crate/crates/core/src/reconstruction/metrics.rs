use serde::{Deserialize, Serialize};

use super::{support_of, SparseEstimate};
use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, sub};
use crate::sensing::Signal;

/// How close a reconstruction got to the truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconMetrics {
    /// `‖x̂ − x‖₂ / ‖x‖₂`
    pub relative_l2: f64,
    /// `10·log10(peak²·n / ‖x̂ − x‖²)`; `+∞` for an exact reconstruction.
    pub psnr_db: Option<f64>,
    /// Exact support match. Only reported when the truth has at least one
    /// zero entry.
    pub support_recovered: Option<bool>,
}

pub fn evaluate_reconstruction(
    x_true: &Signal,
    estimate: &SparseEstimate,
    peak: Option<f64>,
) -> Result<ReconMetrics> {
    check_len(x_true.len(), estimate.values.len())?;
    let truth_norm = x_true.norm();
    if truth_norm == 0.0 {
        return Err(Error::UndefinedMetric(
            "relative error of a zero-norm signal".into(),
        ));
    }
    if let Some(p) = peak {
        if !(p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "peak must be > 0, got {p}"
            )));
        }
    }
    let err = norm2(&sub(&estimate.values, &x_true.values));
    let n = x_true.len() as f64;
    let psnr_db = peak.map(|p| 10.0 * (p * p * n / (err * err)).log10());
    let support_recovered = x_true
        .values
        .iter()
        .any(|&v| v == 0.0)
        .then(|| support_of(&x_true.values) == estimate.support);
    Ok(ReconMetrics {
        relative_l2: err / truth_norm,
        psnr_db,
        support_recovered,
    })
}
