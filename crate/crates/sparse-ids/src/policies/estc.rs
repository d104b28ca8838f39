//! L1-penalized least squares by proximal gradient (ISTA), used by the
//! explore-then-commit baseline.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Result of a proximal-gradient fit.
#[derive(Debug, Clone)]
pub struct LassoFit {
    pub coefficients: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes ||y - X theta||^2 / (2n) + penalty * ||theta||_1 by iterated
/// soft-thresholding until the objective changes by less than `tolerance`
/// or the iteration cap is hit (then `converged` is false and the current
/// iterate is returned).
pub fn lasso_proximal_gradient(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    penalty: f64,
    max_iterations: usize,
    tolerance: f64,
) -> Result<LassoFit> {
    let n = x.nrows();
    let d = x.ncols();
    if n != y.len() {
        return Err(Error::InvalidArgument(format!(
            "X has {n} rows but y has {} entries",
            y.len()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("lasso needs at least one observation".into()));
    }
    if penalty < 0.0 {
        return Err(Error::InvalidArgument(format!("penalty must be nonnegative, got {penalty}")));
    }

    let gram = x.transpose() * x / n as f64;
    let xty = x.transpose() * y / n as f64;
    let lipschitz = gram.clone().symmetric_eigen().eigenvalues.max();
    if lipschitz <= 0.0 {
        // design is identically zero; the penalty alone fixes theta = 0
        return Ok(LassoFit { coefficients: DVector::zeros(d), iterations: 0, converged: true });
    }
    let step = 1.0 / lipschitz;

    let objective = |theta: &DVector<f64>| -> f64 {
        let resid = y - x * theta;
        resid.norm_squared() / (2.0 * n as f64) + penalty * theta.iter().map(|v| v.abs()).sum::<f64>()
    };

    let mut theta = DVector::zeros(d);
    let mut prev = objective(&theta);
    for it in 1..=max_iterations {
        let grad = &gram * &theta - &xty;
        let threshold = step * penalty;
        for i in 0..d {
            let z = theta[i] - step * grad[i];
            theta[i] = soft_threshold(z, threshold);
        }
        let current = objective(&theta);
        if (prev - current).abs() < tolerance {
            return Ok(LassoFit { coefficients: theta, iterations: it, converged: true });
        }
        prev = current;
    }
    Ok(LassoFit { coefficients: theta, iterations: max_iterations, converged: false })
}

fn soft_threshold(z: f64, threshold: f64) -> f64 {
    if z > threshold {
        z - threshold
    } else if z < -threshold {
        z + threshold
    } else {
        0.0
    }
}
