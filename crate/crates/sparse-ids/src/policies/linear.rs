//! Conjugate-Gaussian baselines on a regularized least-squares state.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::env::ActionSet;
use crate::error::{Error, Result};
use crate::policies::summary::{estimate_delta_v, ids_select};

/// Default ridge regularizer for [`RidgeState`].
pub const DEFAULT_RIDGE: f64 = 1.0;

/// Regularized Gram matrix V = ridge * I + sum A_s A_s^T and response
/// vector b = sum A_s Y_s.
#[derive(Debug, Clone)]
pub struct RidgeState {
    v: DMatrix<f64>,
    b: DVector<f64>,
    ridge: f64,
}

impl RidgeState {
    pub fn new(d: usize, ridge: f64) -> Result<Self> {
        if !(ridge > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ridge parameter must be positive, got {ridge}"
            )));
        }
        Ok(Self { v: DMatrix::identity(d, d) * ridge, b: DVector::zeros(d), ridge })
    }

    pub fn update(&mut self, action: &DVector<f64>, reward: f64) {
        self.v += action * action.transpose();
        self.b += action * reward;
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        Cholesky::new(self.v.clone())
            .ok_or_else(|| Error::Numeric("Cholesky factorization of V failed".into()))
    }

    /// Ridge estimate V^-1 b.
    pub fn theta_hat(&self) -> Result<DVector<f64>> {
        Ok(self.cholesky()?.solve(&self.b))
    }
}

/// One draw from N(mean, scale^2 V^-1) given the Cholesky factor of V.
fn sample_from_precision(
    chol: &Cholesky<f64, Dyn>,
    mean: &DVector<f64>,
    scale: f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<DVector<f64>> {
    let d = mean.len();
    let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    // solve L^T w = z so that Cov(w) = V^-1
    let w = chol
        .l()
        .tr_solve_lower_triangular(&z)
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    Ok(mean + scale * w)
}

/// Thompson sampling with the conjugate Gaussian posterior
/// N(V^-1 b, noise_variance * V^-1): samples one parameter and plays its
/// greedy action.
pub fn lin_ts_select(
    state: &RidgeState,
    actions: &ActionSet,
    noise_variance: f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<usize> {
    let chol = state.cholesky()?;
    let mean = chol.solve(&state.b);
    let theta = sample_from_precision(&chol, &mean, noise_variance.sqrt(), rng)?;
    let means = actions.reward_means(&theta);
    Ok(crate::env::argmax(means.as_slice()).0)
}

/// Optimism: argmax of <a, theta_hat> + alpha * ||a||_{V^-1}.
pub fn lin_ucb_select(state: &RidgeState, actions: &ActionSet, alpha: f64) -> Result<usize> {
    if alpha < 0.0 {
        return Err(Error::InvalidArgument(format!("alpha must be nonnegative, got {alpha}")));
    }
    let chol = state.cholesky()?;
    let theta_hat = chol.solve(&state.b);
    let k = actions.num_actions();
    let mut scores = vec![0.0f64; k];
    for a in 0..k {
        let feat = actions.action(a);
        let bonus = feat.dot(&chol.solve(&feat)).max(0.0).sqrt();
        scores[a] = feat.dot(&theta_hat) + alpha * bonus;
    }
    Ok(crate::env::argmax(&scores).0)
}

/// IDS on the conjugate Gaussian posterior: draws M samples from
/// N(V^-1 b, noise_variance * V^-1), then reuses the sample-based
/// delta/v estimator and ratio minimizer.
pub fn vanilla_ids_select(
    state: &RidgeState,
    actions: &ActionSet,
    num_samples: usize,
    noise_variance: f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<usize> {
    if num_samples == 0 {
        return Err(Error::InvalidArgument("need at least one posterior sample".into()));
    }
    let chol = state.cholesky()?;
    let mean = chol.solve(&state.b);
    let d = mean.len();
    let mut samples = DMatrix::zeros(num_samples, d);
    for m in 0..num_samples {
        let theta = sample_from_precision(&chol, &mean, noise_variance.sqrt(), rng)?;
        samples.set_row(m, &theta.transpose());
    }
    let summary = estimate_delta_v(&samples, actions)?;
    Ok(ids_select(&summary, rng))
}
