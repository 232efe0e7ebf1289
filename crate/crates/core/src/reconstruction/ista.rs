use super::SparseEstimate;
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm1, norm2};
use crate::rng::Stream;
use crate::sensing::{Measurement, SensingMatrix};

const POWER_ITERS: usize = 100;
const POWER_TOL: f64 = 1e-10;
const POWER_START_SEED: u64 = 0x5EED_0F_1157A;

/// Largest eigenvalue of `ΦᵀΦ` by power iteration: at most 100 steps,
/// stopping once successive estimates agree to a relative 1e-10. The start
/// vector is a fixed-seed gaussian draw.
pub fn lipschitz_constant(matrix: &SensingMatrix) -> f64 {
    let mut s = Stream::new(POWER_START_SEED);
    let mut v: Vec<f64> = (0..matrix.cols()).map(|_| s.gaussian()).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut est = 0.0;
    for _ in 0..POWER_ITERS {
        let w = matrix.apply_transpose(&matrix.apply(&v));
        let next = norm2(&w);
        if next == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / next).collect();
        let done = (next - est).abs() <= POWER_TOL * next;
        est = next;
        if done {
            break;
        }
    }
    est
}

/// `½‖y − Φx‖² + λ‖x‖₁`
pub fn lasso_objective(matrix: &SensingMatrix, y: &[f64], x: &[f64], lambda: f64) -> f64 {
    let r: Vec<f64> = matrix.apply(x).iter().zip(y).map(|(a, b)| a - b).collect();
    0.5 * dot(&r, &r) + lambda * norm1(x)
}

/// Iterative soft-thresholding for the lasso, from `x = 0` with step `1/L`.
/// Stops when the iterate moves less than `tol` in the max-norm or after
/// `max_iters` updates.
pub fn ista(
    matrix: &SensingMatrix,
    y: &Measurement,
    lambda: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SparseEstimate> {
    let (mut est, _) = solve(matrix, y, &[lambda], max_iters, tol, false)?;
    Ok(est.remove(0))
}

/// [`ista`] plus the objective value at every iterate, starting with `x = 0`
/// and ending with the returned estimate.
pub fn ista_traced(
    matrix: &SensingMatrix,
    y: &Measurement,
    lambda: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(SparseEstimate, Vec<f64>)> {
    let (mut est, mut traces) = solve(matrix, y, &[lambda], max_iters, tol, true)?;
    Ok((est.remove(0), traces.remove(0)))
}

/// Independent ISTA runs for every `lambda`, sharing one Lipschitz estimate
/// and one pass over `Φ` per iteration. Result `j` is bit-identical to
/// `ista(.., lambdas[j], ..)`.
pub fn ista_path(
    matrix: &SensingMatrix,
    y: &Measurement,
    lambdas: &[f64],
    max_iters: usize,
    tol: f64,
) -> Result<Vec<SparseEstimate>> {
    solve(matrix, y, lambdas, max_iters, tol, false).map(|(e, _)| e)
}

struct Run {
    lambda: f64,
    x: Vec<f64>,
    /// `Φx − y` for the current `x`.
    residual: Vec<f64>,
    iterations: usize,
    done: bool,
    trace: Vec<f64>,
}

fn solve(
    matrix: &SensingMatrix,
    y: &Measurement,
    lambdas: &[f64],
    max_iters: usize,
    tol: f64,
    record: bool,
) -> Result<(Vec<SparseEstimate>, Vec<Vec<f64>>)> {
    check_len(matrix.rows(), y.len())?;
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be > 0, got {l}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
    }
    let lip = lipschitz_constant(matrix);
    if !(lip > 0.0) {
        return Err(Error::SolverDegenerate("sensing matrix is zero".into()));
    }
    let step = 1.0 / lip;
    let n = matrix.cols();
    let yv = &y.values;

    let zero = vec![0.0; n];
    let start: Vec<f64> = matrix
        .apply(&zero)
        .iter()
        .zip(yv)
        .map(|(a, b)| a - b)
        .collect();
    let mut runs: Vec<Run> = lambdas
        .iter()
        .map(|&lambda| Run {
            lambda,
            x: zero.clone(),
            residual: start.clone(),
            iterations: 0,
            done: false,
            trace: Vec::new(),
        })
        .collect();

    for _ in 0..max_iters {
        let mut active: Vec<&mut Run> = runs.iter_mut().filter(|r| !r.done).collect();
        if active.is_empty() {
            break;
        }
        if record {
            for run in active.iter_mut() {
                let r = &run.residual;
                run.trace.push(0.5 * dot(r, r) + run.lambda * norm1(&run.x));
            }
        }
        let thresholds: Vec<f64> = active.iter().map(|r| step * r.lambda).collect();
        let mut changes = vec![0.0f64; active.len()];
        let fitted = {
            let (rs, mut xs): (Vec<&[f64]>, Vec<&mut [f64]>) = active
                .iter_mut()
                .map(|r| (r.residual.as_slice(), r.x.as_mut_slice()))
                .unzip();
            matrix.transpose_update_apply(&rs, &mut xs, |j, grad, x| {
                let thresh = thresholds[j];
                let mut change = changes[j];
                for (xi, gi) in x.iter_mut().zip(grad) {
                    let next = soft_threshold(*xi - step * gi, thresh);
                    change = change.max((next - *xi).abs());
                    *xi = next;
                }
                changes[j] = change;
            })
        };
        for ((run, fit), change) in active.into_iter().zip(fitted).zip(changes) {
            run.residual = fit.iter().zip(yv).map(|(a, b)| a - b).collect();
            run.iterations += 1;
            if change < tol {
                run.done = true;
            }
        }
    }

    let mut estimates = Vec::with_capacity(runs.len());
    let mut traces = Vec::with_capacity(runs.len());
    for mut run in runs {
        let rn = norm2(&run.residual);
        if record {
            run.trace.push(0.5 * rn * rn + run.lambda * norm1(&run.x));
        }
        estimates.push(SparseEstimate::new(run.x, run.iterations, rn));
        traces.push(run.trace);
    }
    Ok((estimates, traces))
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}
