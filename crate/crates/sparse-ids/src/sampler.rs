//! Empirical Bayesian sparse posterior sampling.
//!
//! The prior on each coordinate mixes a Laplace spike (scale sigma*lambda0)
//! against a Gaussian slab (variance sigma^2*lambda1) with a-priori inclusion
//! fraction beta. The binary inclusion indicators are never sampled: they are
//! replaced by a continuous vector nu of inclusion probabilities. A chain
//! alternates an unadjusted Langevin step on theta (gradient of the negative
//! log-posterior with the adaptive prior, plus matched Gaussian noise) with a
//! stochastic-approximation step pulling nu toward the inclusion
//! probabilities implied by the current theta.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default spike scale.
pub const DEFAULT_LAMBDA0: f64 = 0.05;
/// Default slab variance multiplier.
pub const DEFAULT_LAMBDA1: f64 = 1.0;
/// Chain aborts when the iterate norm passes this value.
pub const DIVERGENCE_NORM: f64 = 1e3;

/// Hyperparameters of the spike-and-slab Gaussian-Laplace prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeSlabPrior {
    /// Spike Laplace scale multiplier (lambda0 > 0).
    pub lambda0: f64,
    /// Slab Gaussian variance multiplier (lambda1 > 0).
    pub lambda1: f64,
    /// A-priori inclusion fraction in [0, 1].
    pub beta: f64,
    /// Noise / prior scale variance sigma^2.
    pub sigma2: f64,
}

impl SpikeSlabPrior {
    pub fn new(lambda0: f64, lambda1: f64, beta: f64, sigma2: f64) -> Result<Self> {
        if !(lambda0 > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda0 must be positive, got {lambda0}")));
        }
        if !(lambda1 > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda1 must be positive, got {lambda1}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidArgument(format!("beta must lie in [0, 1], got {beta}")));
        }
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(Self { lambda0, lambda1, beta, sigma2 })
    }

    /// Defaults for an s-sparse problem in dimension d: lambda0 = 0.05,
    /// lambda1 = 1, beta = min(0.5, 2s/d).
    pub fn default_for(s: usize, d: usize, sigma2: f64) -> Result<Self> {
        let beta = (2.0 * s as f64 / d as f64).min(0.5);
        Self::new(DEFAULT_LAMBDA0, DEFAULT_LAMBDA1, beta, sigma2)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Chain state: current iterate, inclusion probabilities, iteration count.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState {
    pub theta: DVector<f64>,
    pub nu: DVector<f64>,
    pub iteration: usize,
}

impl SamplerState {
    /// Fresh chain start: theta ~ N(0, 0.1 I_d), nu = (0.5, ..., 0.5).
    pub fn init(d: usize, rng: &mut impl Rng) -> Self {
        let std = 0.1f64.sqrt();
        Self {
            theta: DVector::from_fn(d, |_, _| std * rng.sample::<f64, _>(StandardNormal)),
            nu: DVector::from_element(d, 0.5),
            iteration: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }
}

/// Regression history: played actions (rows of X) and observed rewards y.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "X has {} rows but y has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        Ok(Self { x, y })
    }

    /// Zero observations in dimension d; sampling then targets the prior.
    pub fn empty(d: usize) -> Self {
        Self { x: DMatrix::zeros(0, d), y: DVector::zeros(0) }
    }

    pub fn from_rows(rows: &[DVector<f64>], y: &[f64], d: usize) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} responses",
                rows.len(),
                y.len()
            )));
        }
        let mut x = DMatrix::zeros(rows.len(), d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has length {}, expected {d}",
                    row.len()
                )));
            }
            x.set_row(i, &row.transpose());
        }
        Ok(Self { x, y: DVector::from_column_slice(y) })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }
}

/// Sufficient statistics so each gradient costs O(d^2) instead of O(nd).
struct SuffStats {
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    yty: f64,
}

impl SuffStats {
    fn new(data: &Dataset) -> Self {
        Self {
            gram: data.x.transpose() * &data.x,
            xty: data.x.transpose() * &data.y,
            yty: data.y.dot(&data.y),
        }
    }
}

/// Spike component density: Laplace with scale sigma*lambda0.
pub fn spike_density(theta_i: f64, prior: &SpikeSlabPrior) -> f64 {
    let scale = prior.sigma() * prior.lambda0;
    (-theta_i.abs() / scale).exp() / (2.0 * scale)
}

/// Slab component density: N(0, sigma^2 * lambda1) at theta_i.
pub fn slab_density(theta_i: f64, prior: &SpikeSlabPrior) -> f64 {
    let var = prior.sigma2 * prior.lambda1;
    (-theta_i * theta_i / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Posterior probability that coordinate i sits in the slab given theta_i.
/// Computed in log space so simultaneous density underflow resolves to the
/// dominant tail instead of NaN.
pub fn inclusion_probability(theta_i: f64, prior: &SpikeSlabPrior) -> f64 {
    if prior.beta >= 1.0 {
        return 1.0;
    }
    if prior.beta <= 0.0 {
        return 0.0;
    }
    let sigma = prior.sigma();
    let slab_var = prior.sigma2 * prior.lambda1;
    let log_slab =
        -0.5 * (2.0 * std::f64::consts::PI * slab_var).ln() - theta_i * theta_i / (2.0 * slab_var);
    let spike_scale = sigma * prior.lambda0;
    let log_spike = -(2.0 * spike_scale).ln() - theta_i.abs() / spike_scale;
    let z = log_slab - log_spike + (prior.beta / (1.0 - prior.beta)).ln();
    logistic(z)
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Negative log-posterior with the adaptive prior:
/// ||y - X theta||^2 / (2 sigma^2)
///   + sum_i [ (1-nu_i) |theta_i| / (lambda0 sigma) + nu_i theta_i^2 / (2 lambda1 sigma^2) ].
pub fn neg_log_posterior(
    theta: &DVector<f64>,
    nu: &DVector<f64>,
    data: &Dataset,
    prior: &SpikeSlabPrior,
) -> f64 {
    let stats = SuffStats::new(data);
    objective_with(theta, nu, &stats, prior)
}

/// Gradient of [`neg_log_posterior`] in theta; the |theta_i| term uses the
/// subgradient sign(theta_i) with sign(0) = 0.
pub fn neg_log_posterior_grad(
    theta: &DVector<f64>,
    nu: &DVector<f64>,
    data: &Dataset,
    prior: &SpikeSlabPrior,
) -> DVector<f64> {
    let stats = SuffStats::new(data);
    grad_with(theta, nu, &stats, prior)
}

fn objective_with(
    theta: &DVector<f64>,
    nu: &DVector<f64>,
    stats: &SuffStats,
    prior: &SpikeSlabPrior,
) -> f64 {
    let sigma = prior.sigma();
    let quad = (&stats.gram * theta).dot(theta);
    let mut q = (stats.yty - 2.0 * stats.xty.dot(theta) + quad) / (2.0 * prior.sigma2);
    for i in 0..theta.len() {
        q += (1.0 - nu[i]) * theta[i].abs() / (prior.lambda0 * sigma)
            + nu[i] * theta[i] * theta[i] / (2.0 * prior.lambda1 * prior.sigma2);
    }
    q
}

fn grad_with(
    theta: &DVector<f64>,
    nu: &DVector<f64>,
    stats: &SuffStats,
    prior: &SpikeSlabPrior,
) -> DVector<f64> {
    let sigma = prior.sigma();
    let mut g = (&stats.gram * theta - &stats.xty) / prior.sigma2;
    for i in 0..theta.len() {
        let sign = if theta[i] > 0.0 {
            1.0
        } else if theta[i] < 0.0 {
            -1.0
        } else {
            0.0
        };
        g[i] += sign * (1.0 - nu[i]) / (prior.lambda0 * sigma)
            + nu[i] * theta[i] / (prior.lambda1 * prior.sigma2);
    }
    g
}

fn langevin_update(
    theta: &mut DVector<f64>,
    nu: &DVector<f64>,
    stats: &SuffStats,
    prior: &SpikeSlabPrior,
    eta_k: f64,
    rng: &mut impl Rng,
) -> Result<()> {
    let g = grad_with(theta, nu, stats, prior);
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite gradient in coordinate {i}: {}",
            g[i]
        )));
    }
    let noise_scale = (2.0 * eta_k).sqrt();
    for i in 0..theta.len() {
        let xi: f64 = rng.sample(StandardNormal);
        theta[i] = theta[i] - eta_k * g[i] + noise_scale * xi;
    }
    Ok(())
}

/// One Langevin step: theta' = theta - eta_k * grad Q + sqrt(2 eta_k) * xi
/// with xi standard Gaussian. Leaves nu unchanged, increments the iteration.
pub fn langevin_step(
    state: &SamplerState,
    data: &Dataset,
    prior: &SpikeSlabPrior,
    eta_k: f64,
    rng: &mut impl Rng,
) -> Result<SamplerState> {
    if !(eta_k > 0.0) {
        return Err(Error::InvalidArgument(format!("eta_k must be positive, got {eta_k}")));
    }
    let stats = SuffStats::new(data);
    let mut next = state.clone();
    langevin_update(&mut next.theta, &next.nu, &stats, prior, eta_k, rng)?;
    next.iteration += 1;
    Ok(next)
}

fn sa_update(nu: &mut DVector<f64>, theta: &DVector<f64>, prior: &SpikeSlabPrior, omega_k: f64) {
    for i in 0..nu.len() {
        let target = inclusion_probability(theta[i], prior);
        nu[i] = (1.0 - omega_k) * nu[i] + omega_k * target;
    }
}

/// Stochastic-approximation step: nu' = (1 - omega_k) nu + omega_k nu_hat,
/// where nu_hat is the inclusion probability at the current theta. Theta is
/// unchanged.
pub fn sa_step(state: &SamplerState, prior: &SpikeSlabPrior, omega_k: f64) -> Result<SamplerState> {
    if !(omega_k > 0.0 && omega_k <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "omega_k must lie in (0, 1], got {omega_k}"
        )));
    }
    let mut next = state.clone();
    sa_update(&mut next.nu, &next.theta, prior, omega_k);
    Ok(next)
}

type ScheduleFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Learning-rate / step-size schedules plus chain-length bookkeeping.
#[derive(Clone)]
pub struct SamplerSchedule {
    eta: ScheduleFn,
    omega: ScheduleFn,
    pub thinning: usize,
    pub num_samples: usize,
    pub burn_in: usize,
}

impl SamplerSchedule {
    pub fn new(
        eta: impl Fn(usize) -> f64 + Send + Sync + 'static,
        omega: impl Fn(usize) -> f64 + Send + Sync + 'static,
        thinning: usize,
        num_samples: usize,
        burn_in: usize,
    ) -> Result<Self> {
        if thinning < 1 {
            return Err(Error::InvalidArgument("thinning factor must be >= 1".into()));
        }
        if num_samples < 1 {
            return Err(Error::InvalidArgument("need at least one posterior sample".into()));
        }
        Ok(Self { eta: Arc::new(eta), omega: Arc::new(omega), thinning, num_samples, burn_in })
    }

    /// Data-adaptive default: the base learning rate is 0.5 / L where L
    /// bounds the gradient Lipschitz constant (largest Gram eigenvalue over
    /// sigma^2, plus the slab curvature, plus the spike drift over its own
    /// scale). The rate stays flat through burn-in, then decays as
    /// (1 + (k - burn_in)/burn_in)^-0.55; omega_k = (1+k)^-0.75.
    pub fn adaptive(data: &Dataset, prior: &SpikeSlabPrior, num_samples: usize) -> Result<Self> {
        let mut lipschitz = 1.0 / (prior.sigma2 * prior.lambda1);
        if data.n() > 0 {
            let gram = data.x.transpose() * &data.x;
            let lmax = gram.symmetric_eigen().eigenvalues.max();
            lipschitz += lmax / prior.sigma2;
        }
        if prior.beta < 1.0 {
            let spike_scale = prior.sigma() * prior.lambda0;
            lipschitz += 1.0 / (spike_scale * spike_scale);
        }
        let eta0 = 0.5 / lipschitz;
        let burn_in = 500usize;
        let pivot = burn_in as f64;
        Self::new(
            move |k| {
                if k < burn_in {
                    eta0
                } else {
                    eta0 * (1.0 + (k - burn_in) as f64 / pivot).powf(-0.55)
                }
            },
            |k| (1.0 + k as f64).powf(-0.75),
            10,
            num_samples,
            burn_in,
        )
    }

    pub fn eta(&self, k: usize) -> f64 {
        (self.eta)(k)
    }

    pub fn omega(&self, k: usize) -> f64 {
        (self.omega)(k)
    }

    pub fn total_iterations(&self) -> usize {
        self.burn_in + self.num_samples * self.thinning
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_thinning(mut self, thinning: usize) -> Self {
        self.thinning = thinning;
        self
    }
}

/// Output of one chain: thinned samples (rows), the average inclusion
/// probabilities over the collected iterates, and the final state for
/// optional warm starts.
#[derive(Debug, Clone)]
pub struct PosteriorRun {
    pub samples: DMatrix<f64>,
    pub nu_mean: DVector<f64>,
    pub final_state: SamplerState,
}

/// Runs the full chain: initialize (or warm start), alternate Langevin and
/// stochastic-approximation steps for burn_in + M * thinning iterations, and
/// keep every thinning-th iterate after burn-in.
///
/// `diagnostics`, when given, receives one CSV row per iteration with
/// columns `k,theta_norm,nu_mean,Q_value`.
pub fn run_chain(
    data: &Dataset,
    prior: &SpikeSlabPrior,
    schedule: &SamplerSchedule,
    init: Option<&SamplerState>,
    mut diagnostics: Option<&mut dyn Write>,
    rng: &mut impl Rng,
) -> Result<PosteriorRun> {
    let d = data.dim();
    let stats = SuffStats::new(data);
    let mut state = match init {
        Some(s) => {
            if s.dim() != d {
                return Err(Error::InvalidArgument(format!(
                    "warm-start state has dimension {}, data has {d}",
                    s.dim()
                )));
            }
            s.clone()
        }
        None => SamplerState::init(d, rng),
    };

    let m = schedule.num_samples;
    let mut samples = DMatrix::zeros(m, d);
    let mut nu_acc = DVector::zeros(d);
    let mut collected = 0;

    if let Some(w) = diagnostics.as_deref_mut() {
        writeln!(w, "k,theta_norm,nu_mean,Q_value")?;
    }

    for k in 0..schedule.total_iterations() {
        langevin_update(&mut state.theta, &state.nu, &stats, prior, schedule.eta(k), rng)?;
        state.iteration += 1;
        let norm = state.theta.norm();
        if norm > DIVERGENCE_NORM {
            return Err(Error::Divergence { iteration: state.iteration, norm });
        }
        sa_update(&mut state.nu, &state.theta, prior, schedule.omega(k));

        if let Some(w) = diagnostics.as_deref_mut() {
            let q = objective_with(&state.theta, &state.nu, &stats, prior);
            let nu_mean = state.nu.sum() / d as f64;
            writeln!(w, "{k},{norm},{nu_mean},{q}")?;
        }

        if k >= schedule.burn_in && (k - schedule.burn_in + 1) % schedule.thinning == 0 {
            samples.set_row(collected, &state.theta.transpose());
            nu_acc += &state.nu;
            collected += 1;
        }
    }
    debug_assert_eq!(collected, m);

    Ok(PosteriorRun { samples, nu_mean: nu_acc / m as f64, final_state: state })
}

/// M thinned posterior samples as rows of an M x d matrix.
pub fn sample_posterior(
    data: &Dataset,
    prior: &SpikeSlabPrior,
    schedule: &SamplerSchedule,
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    run_chain(data, prior, schedule, None, None, rng).map(|run| run.samples)
}
