//! Dense Cholesky for the small covariance matrices used by the Gaussian module.

/// Smallest accepted pivot in the factorization.
pub(crate) const PIVOT_FLOOR: f64 = 1e-10;

/// Row-major lower-triangular Cholesky factor of an `n × n` symmetric
/// matrix. On failure returns `(row, pivot)` of the first pivot below
/// [`PIVOT_FLOOR`].
pub(crate) fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>, (usize, f64)> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            let v = a[i * n + j] - dot;
            if i == j {
                if !(v >= PIVOT_FLOOR) {
                    return Err((i, v));
                }
                l[i * n + i] = v.sqrt();
            } else {
                l[i * n + j] = v / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// `ln |A|` from a Cholesky factor.
pub(crate) fn ln_det_from_factor(l: &[f64], n: usize) -> f64 {
    2.0 * (0..n).map(|i| l[i * n + i].ln()).sum::<f64>()
}

/// Solves `L y = b` in place.
pub(crate) fn forward_substitute(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let dot: f64 = (0..i).map(|k| l[i * n + k] * b[k]).sum();
        b[i] = (b[i] - dot) / l[i * n + i];
    }
}
