//! Laplace mechanism for ε-differential privacy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Privacy budget `ε` and ℓ1 sensitivity `Δ₁` of the released vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpParams {
    epsilon: f64,
    sensitivity: f64,
}

impl DpParams {
    pub fn new(epsilon: f64, sensitivity: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        if !(sensitivity > 0.0) || !sensitivity.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sensitivity must be > 0, got {sensitivity}"
            )));
        }
        Ok(Self {
            epsilon,
            sensitivity,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    /// `b = Δ₁ / ε`
    pub fn scale(&self) -> f64 {
        self.sensitivity / self.epsilon
    }
}

pub fn laplace_scale(params: &DpParams) -> f64 {
    params.scale()
}

/// One Laplace(0, b) variate by inverse CDF: `b·sign(u)·ln(1 − 2|u|)` with
/// `u = U[0,1) − ½`. The single point `u = −½` is redrawn.
pub fn laplace_sample(stream: &mut Stream, b: f64) -> f64 {
    loop {
        let u = stream.uniform() - 0.5;
        if u == -0.5 {
            continue;
        }
        return b * u.signum() * (1.0 - 2.0 * u.abs()).ln();
    }
}

/// Adds i.i.d. Laplace(0, Δ₁/ε) noise to every coordinate, drawn from
/// `Stream::new(seed)`.
pub fn laplace_perturb(values: &[f64], params: &DpParams, seed: u64) -> Vec<f64> {
    let b = params.scale();
    let mut s = Stream::new(seed);
    values
        .iter()
        .map(|v| v + laplace_sample(&mut s, b))
        .collect()
}

/// CDF of Laplace(0, b).
pub fn laplace_cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}
