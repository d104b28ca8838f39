//! Regret accounting, the exploratory-constant estimate, and closed-form
//! regret-bound reference curves.

use nalgebra::{DMatrix, DVector};

use crate::env::{ActionLabel, ActionSet, BanditInstance};
use crate::error::{Error, Result};

/// Per-trial regret record: expected instantaneous regret per round and its
/// running sum.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub policy_name: String,
    pub trial_seed: u64,
    pub instant: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl RegretTrace {
    /// Builds a trace from instantaneous regrets; the cumulative curve is
    /// their prefix sum.
    pub fn from_instant(policy_name: String, trial_seed: u64, instant: Vec<f64>) -> Result<Self> {
        if let Some(bad) = instant.iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "instantaneous regret must be finite and nonnegative, got {bad}"
            )));
        }
        let mut cumulative = Vec::with_capacity(instant.len());
        let mut total = 0.0;
        for v in &instant {
            total += v;
            cumulative.push(total);
        }
        Ok(Self { policy_name, trial_seed, instant, cumulative })
    }

    pub fn len(&self) -> usize {
        self.instant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instant.is_empty()
    }

    pub fn final_cumulative(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }
}

/// Noise-free pseudo-regret of one pull: optimal value minus <a, theta*>.
pub fn instantaneous_regret(instance: &BanditInstance, action_index: usize) -> f64 {
    let mean = instance
        .actions()
        .features()
        .row(action_index)
        .transpose()
        .dot(instance.theta_star().theta());
    (instance.optimal_value() - mean).max(0.0)
}

/// Pointwise mean and standard error of the cumulative regret curves.
pub fn aggregate(traces: &[RegretTrace]) -> Result<(Vec<f64>, Vec<f64>)> {
    if traces.is_empty() {
        return Err(Error::InvalidArgument("need at least one trace to aggregate".into()));
    }
    let n = traces[0].len();
    if traces.iter().any(|t| t.len() != n) {
        return Err(Error::InvalidArgument("traces have mismatched lengths".into()));
    }
    let trials = traces.len() as f64;
    let mut mean = vec![0.0; n];
    let mut stderr = vec![0.0; n];
    for t in 0..n {
        let m = traces.iter().map(|tr| tr.cumulative[t]).sum::<f64>() / trials;
        mean[t] = m;
        if traces.len() > 1 {
            let ss =
                traces.iter().map(|tr| (tr.cumulative[t] - m).powi(2)).sum::<f64>() / (trials - 1.0);
            stderr[t] = (ss / trials).sqrt();
        }
    }
    Ok((mean, stderr))
}

/// Ingredients of the regret-bound formulas.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub k: usize,
    /// Exploratory constant of the action set.
    pub c_min: f64,
    /// Absolute constant inside the metric-entropy log term.
    pub metric_constant: f64,
}

impl BoundInputs {
    pub fn new(n: usize, d: usize, s: usize, k: usize, c_min: f64) -> Result<Self> {
        if n == 0 || d == 0 || s == 0 || k == 0 {
            return Err(Error::InvalidArgument("bound inputs must all be positive".into()));
        }
        if s > d {
            return Err(Error::InvalidArgument(format!("s = {s} cannot exceed d = {d}")));
        }
        Ok(Self { n, d, s, k, c_min, metric_constant: 1.0 })
    }

    pub fn with_metric_constant(mut self, c: f64) -> Self {
        self.metric_constant = c;
        self
    }
}

/// Information cap Delta = min(log K, 2s log(C d sqrt(n) / s)).
pub fn delta_cap(inputs: &BoundInputs) -> f64 {
    let log_k = (inputs.k as f64).ln();
    let entropy = 2.0
        * inputs.s as f64
        * (inputs.metric_constant * inputs.d as f64 * (inputs.n as f64).sqrt() / inputs.s as f64)
            .ln();
    log_k.min(entropy)
}

/// Which bound applies to the action set at hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundRegime {
    /// Any bounded action set: sqrt(n d Delta / 2).
    Arbitrary,
    /// Exploratory sets with sparse optima: additionally the
    /// s^(2/3) n^(2/3) Delta^(1/3) / (2 C_min)^(1/3) branch.
    Exploratory,
}

/// Closed-form regret-bound reference value.
pub fn regret_bound(inputs: &BoundInputs, regime: BoundRegime) -> f64 {
    let delta = delta_cap(inputs);
    let sqrt_branch = (0.5 * inputs.n as f64 * inputs.d as f64 * delta).sqrt();
    match regime {
        BoundRegime::Arbitrary => sqrt_branch,
        BoundRegime::Exploratory => {
            let poor_branch = (inputs.s as f64).powf(2.0 / 3.0)
                * (inputs.n as f64).powf(2.0 / 3.0)
                * delta.powf(1.0 / 3.0)
                / (2.0 * inputs.c_min).powf(1.0 / 3.0);
            sqrt_branch.min(poor_branch)
        }
    }
}

/// Frank-Wolfe lower bound on C_min(A) = max over designs mu of the minimum
/// eigenvalue of E_{A~mu}[A A^T]. Starts from the uniform design; each step
/// moves mass toward the action maximizing (v^T a)^2 for the current minimal
/// eigenvector v with step 2/(k+2). Reports the best value seen, which any
/// feasible design certifies from below.
pub fn c_min_estimate(actions: &ActionSet, iterations: usize) -> Result<f64> {
    if iterations < 1 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    let k = actions.num_actions();
    let d = actions.dim();
    if d > k {
        log::warn!("c_min_estimate: only {k} actions in dimension {d}; rank-deficient, returning 0");
        return Ok(0.0);
    }
    let phi = actions.features();
    let mut weights = DVector::from_element(k, 1.0 / k as f64);
    let mut best = f64::NEG_INFINITY;
    for step in 0..iterations {
        let mut second_moment = DMatrix::zeros(d, d);
        for a in 0..k {
            if weights[a] > 0.0 {
                let row = phi.row(a).transpose();
                second_moment += weights[a] * &row * row.transpose();
            }
        }
        let eigen = second_moment.symmetric_eigen();
        let (mut min_idx, mut min_val) = (0, eigen.eigenvalues[0]);
        for i in 1..d {
            if eigen.eigenvalues[i] < min_val {
                min_val = eigen.eigenvalues[i];
                min_idx = i;
            }
        }
        if min_val > best {
            best = min_val;
        }
        let v = eigen.eigenvectors.column(min_idx);
        // linear maximization oracle over the simplex
        let mut target = 0;
        let mut target_gain = f64::NEG_INFINITY;
        for a in 0..k {
            let gain = phi.row(a).transpose().dot(&v).powi(2);
            if gain > target_gain {
                target_gain = gain;
                target = a;
            }
        }
        let gamma = 2.0 / (step as f64 + 2.0);
        weights *= 1.0 - gamma;
        weights[target] += gamma;
    }
    Ok(best.max(0.0))
}

/// Pull counts per action label over one episode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub informative: usize,
    pub uninformative: usize,
    pub plain: usize,
}

/// Counts how often each label was pulled. Errors when the instance carries
/// no labels.
pub fn informative_pull_histogram(
    action_log: &[usize],
    instance: &BanditInstance,
) -> Result<LabelCounts> {
    let labels = instance.actions().labels().ok_or_else(|| {
        Error::InvalidArgument("instance has no informative/uninformative labels".into())
    })?;
    let mut counts = LabelCounts::default();
    for &a in action_log {
        if a >= labels.len() {
            return Err(Error::InvalidArgument(format!(
                "logged action {a} out of range for K = {}",
                labels.len()
            )));
        }
        match labels[a] {
            ActionLabel::Informative => counts.informative += 1,
            ActionLabel::Uninformative => counts.uninformative += 1,
            ActionLabel::Plain => counts.plain += 1,
        }
    }
    Ok(counts)
}
