//! Sparse-recovery attacks against compressed measurements and the metrics
//! that score them.

mod ista;
mod metrics;
mod omp;

use serde::{Deserialize, Serialize};

pub use ista::{ista, ista_path, ista_traced, lasso_objective, lipschitz_constant};
pub use metrics::{evaluate_reconstruction, ReconMetrics};
pub use omp::{omp, OMP_RESIDUAL_STOP};

/// A reconstruction `x̂` together with solver diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseEstimate {
    pub values: Vec<f64>,
    /// Indices of the nonzero entries of `values`, ascending.
    pub support: Vec<usize>,
    pub iterations: usize,
    /// `‖y − Φx̂‖₂`
    pub residual_norm: f64,
}

impl SparseEstimate {
    pub(crate) fn new(values: Vec<f64>, iterations: usize, residual_norm: f64) -> Self {
        let support = support_of(&values);
        Self {
            values,
            support,
            iterations,
            residual_norm,
        }
    }
}

pub(crate) fn support_of(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, _)| i)
        .collect()
}
