use nalgebra::DMatrix;

use super::SparseEstimate;
use crate::error::{check_len, Error, Result};
use crate::linalg::{lstsq, norm2};
use crate::sensing::{Measurement, SensingMatrix};

/// Absolute residual norm at which pursuit stops adding atoms.
pub const OMP_RESIDUAL_STOP: f64 = 1e-12;

/// Orthogonal matching pursuit with at most `k` atoms.
///
/// Each step picks the unused column maximising `|⟨φ_j, r⟩| / ‖φ_j‖`
/// (ties go to the lowest index), then refits all selected coefficients by
/// QR least squares.
pub fn omp(matrix: &SensingMatrix, y: &Measurement, k: usize) -> Result<SparseEstimate> {
    let (m, n) = (matrix.rows(), matrix.cols());
    check_len(m, y.len())?;
    if k == 0 || k > m {
        return Err(Error::InvalidParameter(format!(
            "omp needs 1 <= k <= m = {m}, got k = {k}"
        )));
    }
    let norms = matrix.column_norms();
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; n];
    let mut coef: Vec<f64> = Vec::new();
    let mut residual = y.values.clone();
    let mut atoms = DMatrix::<f64>::zeros(m, 0);
    let mut iterations = 0;

    while selected.len() < k {
        if norm2(&residual) < OMP_RESIDUAL_STOP {
            break;
        }
        let corr = matrix.apply_transpose(&residual);
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if used[j] || norms[j] == 0.0 {
                continue;
            }
            let score = corr[j].abs() / norms[j];
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        let j = match best {
            Some((j, score)) if score > 0.0 => j,
            // Residual is orthogonal to every remaining column.
            _ => break,
        };
        used[j] = true;
        selected.push(j);
        let s = selected.len();
        atoms = atoms.insert_column(s - 1, 0.0);
        for i in 0..m {
            atoms[(i, s - 1)] = matrix.get(i, j);
        }
        coef = lstsq(&atoms, &y.values).map_err(|rank| {
            Error::SolverDegenerate(format!(
                "least-squares refit on {s} atoms has numerical rank {rank}"
            ))
        })?;
        let fitted = &atoms * nalgebra::DVector::from_column_slice(&coef);
        for (r, (yi, fi)) in residual.iter_mut().zip(y.values.iter().zip(fitted.iter())) {
            *r = yi - fi;
        }
        iterations += 1;
    }

    let mut values = vec![0.0; n];
    for (&j, &c) in selected.iter().zip(&coef) {
        values[j] = c;
    }
    Ok(SparseEstimate::new(values, iterations, norm2(&residual)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{acquire, Ensemble, Signal};

    #[test]
    fn identity_one_sparse() {
        let id = SensingMatrix::generate(0, 4, 4, Ensemble::Identity).unwrap();
        let y = Measurement::from_values(&id, vec![0., 3., 0., 0.], 0.0).unwrap();
        let est = omp(&id, &y, 1).unwrap();
        for (a, b) in est.values.iter().zip([0., 3., 0., 0.]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(est.support, vec![1]);
        assert_eq!(est.iterations, 1);
        assert!(est.residual_norm < 1e-12);
    }

    #[test]
    fn zero_measurement_stops_immediately() {
        let g = SensingMatrix::generate(3, 5, 12, Ensemble::Gaussian).unwrap();
        let y = Measurement::from_values(&g, vec![0.0; 5], 0.0).unwrap();
        let est = omp(&g, &y, 4).unwrap();
        assert!(est.values.iter().all(|&v| v == 0.0));
        assert!(est.support.is_empty());
        assert_eq!(est.iterations, 0);
    }

    #[test]
    fn rejects_bad_k() {
        let g = SensingMatrix::generate(3, 5, 12, Ensemble::Gaussian).unwrap();
        let y = Measurement::from_values(&g, vec![1.0; 5], 0.0).unwrap();
        assert!(matches!(omp(&g, &y, 6), Err(Error::InvalidParameter(_))));
        assert!(matches!(omp(&g, &y, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn ties_break_to_lowest_index() {
        // Columns 1 and 2 are identical; column 1 must win.
        let id = crate::sensing::MatrixId {
            seed: 0,
            rows: 2,
            cols: 3,
            ensemble: Ensemble::Gaussian,
        };
        let mat = SensingMatrix::from_parts(id, vec![1., 0., 0., 0., 1., 1.]).unwrap();
        let y = acquire(&mat, &Signal::new(vec![0., 0., 2.]).unwrap()).unwrap();
        let est = omp(&mat, &y, 1).unwrap();
        assert_eq!(est.support, vec![1]);
        assert!((est.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn support_bounded_by_m() {
        let g = SensingMatrix::generate(9, 6, 20, Ensemble::Gaussian).unwrap();
        let x: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let y = acquire(&g, &Signal::new(x).unwrap()).unwrap();
        let est = omp(&g, &y, 6).unwrap();
        assert!(est.support.len() <= 6);
        // Six generic atoms span R^6: the fit is exact.
        assert!(est.residual_norm < 1e-9);
    }
}
