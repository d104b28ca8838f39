//! Action sets, bandit instances and the reward channel.
//!
//! Builds three kinds of instances: generic ones from caller-supplied
//! features, the informative/uninformative hard instance, and correlated
//! Gaussian action sets. All constructors take an explicit random stream
//! and are pure functions of (arguments, stream).

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default noise variance of the reward channel.
pub const DEFAULT_NOISE_VARIANCE: f64 = 2.0;

/// Per-action tag distinguishing the two halves of the hard instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionLabel {
    Informative,
    Uninformative,
    Plain,
}

impl ActionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ActionLabel::Informative => "informative",
            ActionLabel::Uninformative => "uninformative",
            ActionLabel::Plain => "plain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "informative" => Ok(ActionLabel::Informative),
            "uninformative" => Ok(ActionLabel::Uninformative),
            "plain" => Ok(ActionLabel::Plain),
            other => Err(Error::InvalidArgument(format!("unknown action label {other:?}"))),
        }
    }
}

/// A finite action set: K feature rows of dimension d, each entry in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSet {
    features: DMatrix<f64>,
    labels: Option<Vec<ActionLabel>>,
}

impl ActionSet {
    pub fn new(features: DMatrix<f64>) -> Result<Self> {
        Self::validate(&features)?;
        Ok(Self { features, labels: None })
    }

    pub fn with_labels(features: DMatrix<f64>, labels: Vec<ActionLabel>) -> Result<Self> {
        Self::validate(&features)?;
        if labels.len() != features.nrows() {
            return Err(Error::InvalidArgument(format!(
                "label count {} does not match action count {}",
                labels.len(),
                features.nrows()
            )));
        }
        Ok(Self { features, labels: Some(labels) })
    }

    fn validate(features: &DMatrix<f64>) -> Result<()> {
        if features.nrows() < 2 {
            return Err(Error::InvalidArgument(format!(
                "action set needs K >= 2 actions, got {}",
                features.nrows()
            )));
        }
        if features.ncols() < 2 {
            return Err(Error::InvalidArgument(format!(
                "action set needs dimension d >= 2, got {}",
                features.ncols()
            )));
        }
        for (i, row) in features.row_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "action entry ({i}, {j}) = {v} violates the |a_j| <= 1 bound"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of actions K.
    pub fn num_actions(&self) -> usize {
        self.features.nrows()
    }

    /// Feature dimension d.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// The K x d feature matrix, rows are actions.
    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> Option<&[ActionLabel]> {
        self.labels.as_deref()
    }

    /// Owned copy of action i as a column vector.
    pub fn action(&self, i: usize) -> DVector<f64> {
        self.features.row(i).transpose()
    }

    /// Mean rewards of all actions under `theta`: the K-vector features * theta.
    pub fn reward_means(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.features * theta
    }
}

/// An s-sparse parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseParameter {
    theta: DVector<f64>,
    sparsity: usize,
}

impl SparseParameter {
    pub fn new(theta: DVector<f64>, sparsity: usize) -> Result<Self> {
        let nonzeros = theta.iter().filter(|v| **v != 0.0).count();
        if nonzeros > sparsity {
            return Err(Error::InvalidArgument(format!(
                "parameter has {nonzeros} nonzeros, more than the sparsity budget {sparsity}"
            )));
        }
        Ok(Self { theta, sparsity })
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    /// Indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.theta
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// An action set paired with a hidden sparse parameter and reward noise level.
#[derive(Debug, Clone)]
pub struct BanditInstance {
    actions: ActionSet,
    theta_star: SparseParameter,
    noise_variance: f64,
    optimal_action_index: usize,
    optimal_value: f64,
}

impl BanditInstance {
    pub fn new(
        actions: ActionSet,
        theta_star: SparseParameter,
        noise_variance: f64,
    ) -> Result<Self> {
        if theta_star.theta().len() != actions.dim() {
            return Err(Error::InvalidArgument(format!(
                "parameter dimension {} does not match action dimension {}",
                theta_star.theta().len(),
                actions.dim()
            )));
        }
        if !(noise_variance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be nonnegative, got {noise_variance}"
            )));
        }
        let means = actions.reward_means(theta_star.theta());
        let (optimal_action_index, optimal_value) = argmax(means.as_slice());
        Ok(Self { actions, theta_star, noise_variance, optimal_action_index, optimal_value })
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    pub fn theta_star(&self) -> &SparseParameter {
        &self.theta_star
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn optimal_action_index(&self) -> usize {
        self.optimal_action_index
    }

    pub fn optimal_value(&self) -> f64 {
        self.optimal_value
    }

    pub fn dim(&self) -> usize {
        self.actions.dim()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.num_actions()
    }

    /// Serializable snapshot of the instance; `seed` records how it was built.
    pub fn to_document(&self, seed: u64) -> InstanceDocument {
        let labels = match self.actions.labels() {
            Some(ls) => ls.iter().map(|l| l.as_str().to_string()).collect(),
            None => vec![ActionLabel::Plain.as_str().to_string(); self.actions.num_actions()],
        };
        InstanceDocument {
            d: self.actions.dim(),
            s: self.theta_star.sparsity(),
            noise_variance: self.noise_variance,
            theta_star: self.theta_star.theta().iter().copied().collect(),
            actions: self
                .actions
                .features()
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            labels,
            seed,
        }
    }

    pub fn from_document(doc: &InstanceDocument) -> Result<Self> {
        let k = doc.actions.len();
        if k == 0 {
            return Err(Error::InvalidArgument("document has no actions".into()));
        }
        let mut flat = Vec::with_capacity(k * doc.d);
        for row in &doc.actions {
            if row.len() != doc.d {
                return Err(Error::InvalidArgument(format!(
                    "action row length {} does not match d = {}",
                    row.len(),
                    doc.d
                )));
            }
            flat.extend_from_slice(row);
        }
        let features = DMatrix::from_row_slice(k, doc.d, &flat);
        let labels = doc
            .labels
            .iter()
            .map(|s| ActionLabel::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let actions = ActionSet::with_labels(features, labels)?;
        let theta = DVector::from_vec(doc.theta_star.clone());
        let theta_star = SparseParameter::new(theta, doc.s)?;
        BanditInstance::new(actions, theta_star, doc.noise_variance)
    }
}

/// JSON-compatible instance snapshot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub d: usize,
    pub s: usize,
    pub noise_variance: f64,
    pub theta_star: Vec<f64>,
    pub actions: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub seed: u64,
}

/// One (action, reward) observation.
#[derive(Debug, Clone)]
pub struct HistoryRecord {
    pub action_index: usize,
    pub action: DVector<f64>,
    pub reward: f64,
}

/// Plays action `action_index` once: returns <a, theta*> + eta with
/// eta ~ N(0, noise_variance). Consumes exactly one Gaussian draw.
pub fn step(instance: &BanditInstance, action_index: usize, rng: &mut impl Rng) -> Result<f64> {
    if action_index >= instance.num_actions() {
        return Err(Error::InvalidArgument(format!(
            "action index {action_index} out of range for K = {}",
            instance.num_actions()
        )));
    }
    let mean = instance
        .actions
        .features()
        .row(action_index)
        .transpose()
        .dot(instance.theta_star.theta());
    let eta: f64 = rng.sample(StandardNormal);
    Ok(mean + instance.noise_variance.sqrt() * eta)
}

/// Draws an s-sparse unit-norm parameter: standard normal coordinates,
/// all but s uniformly chosen ones zeroed, then rescaled to norm 1.
pub fn sample_prior_parameter(d: usize, s: usize, rng: &mut impl Rng) -> Result<SparseParameter> {
    if s < 1 || s > d {
        return Err(Error::InvalidArgument(format!(
            "sparsity must satisfy 1 <= s <= d, got s = {s}, d = {d}"
        )));
    }
    loop {
        let mut theta = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let support = sample_subset(d, s, rng);
        let keep: HashSet<usize> = support.into_iter().collect();
        for i in 0..d {
            if !keep.contains(&i) {
                theta[i] = 0.0;
            }
        }
        let norm = theta.norm();
        if norm > 0.0 {
            theta /= norm;
            return SparseParameter::new(theta, s);
        }
    }
}

/// Uniform s-subset of {0, ..., d-1} via partial Fisher-Yates, sorted.
fn sample_subset(d: usize, s: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..d).collect();
    for i in 0..s {
        let j = rng.gen_range(i..d);
        pool.swap(i, j);
    }
    let mut chosen = pool[..s].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Knobs for the hard-instance builder.
#[derive(Debug, Clone)]
pub struct HardInstanceConfig {
    /// Multiplier in the informative-set size ceil(c1 * s * log(e d / s)).
    pub c1: f64,
    /// Rejection-sampling budget for the eigenvalue check.
    pub max_retries: usize,
    /// Enumerate the uninformative set exactly up to this size, else subsample it.
    pub uninformative_cap: usize,
    pub noise_variance: f64,
    /// Minimum-eigenvalue threshold the informative set must meet.
    pub eigenvalue_threshold: f64,
}

impl Default for HardInstanceConfig {
    fn default() -> Self {
        Self {
            c1: 8.0,
            max_retries: 50,
            uninformative_cap: 10_000,
            noise_variance: DEFAULT_NOISE_VARIANCE,
            eigenvalue_threshold: 0.25,
        }
    }
}

/// Builds the informative/uninformative hard instance with default knobs.
pub fn build_hard_instance(
    d: usize,
    s: usize,
    epsilon: f64,
    rng: &mut impl Rng,
) -> Result<BanditInstance> {
    build_hard_instance_with(d, s, epsilon, &HardInstanceConfig::default(), rng)
}

/// Builds the hard instance: an informative set of random sign vectors whose
/// empirical covariance must pass the minimum-eigenvalue check, an
/// uninformative set of (s-1)-sparse sign vectors, and the hidden parameter
/// (eps, ..., eps, 0, ..., 0, -1) with s-1 leading eps entries.
///
/// Informative actions carry +1 in the last coordinate, so under theta* they
/// earn the -1 penalty that makes them expensive but jointly informative.
pub fn build_hard_instance_with(
    d: usize,
    s: usize,
    epsilon: f64,
    config: &HardInstanceConfig,
    rng: &mut impl Rng,
) -> Result<BanditInstance> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("hard instance needs d >= 3, got {d}")));
    }
    if s < 2 || s > d - 1 {
        return Err(Error::InvalidArgument(format!(
            "hard instance needs 2 <= s <= d-1, got s = {s}, d = {d}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }

    let k_info = (config.c1 * s as f64 * (std::f64::consts::E * d as f64 / s as f64).ln())
        .ceil()
        .max(1.0) as usize;

    let mut informative: Option<Vec<DVector<f64>>> = None;
    let mut best_eigenvalue = f64::NEG_INFINITY;
    for _ in 0..config.max_retries {
        let candidate: Vec<DVector<f64>> = (0..k_info)
            .map(|_| {
                DVector::from_fn(d, |j, _| {
                    if j + 1 == d {
                        1.0
                    } else if rng.gen::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                })
            })
            .collect();
        let mut second_moment = DMatrix::zeros(d, d);
        for x in &candidate {
            second_moment += x * x.transpose();
        }
        second_moment /= k_info as f64;
        let (passed, value) =
            restricted_eigenvalue_check(&second_moment, config.eigenvalue_threshold)?;
        if value > best_eigenvalue {
            best_eigenvalue = value;
        }
        if passed {
            informative = Some(candidate);
            break;
        }
    }
    let informative = informative.ok_or(Error::InformativeSetConstruction {
        retries: config.max_retries,
        best_eigenvalue,
    })?;

    let uninformative = build_uninformative_set(d, s, config.uninformative_cap, rng);

    let k_total = informative.len() + uninformative.len();
    let mut features = DMatrix::zeros(k_total, d);
    let mut labels = Vec::with_capacity(k_total);
    for (i, x) in informative.iter().enumerate() {
        features.set_row(i, &x.transpose());
        labels.push(ActionLabel::Informative);
    }
    for (i, x) in uninformative.iter().enumerate() {
        features.set_row(informative.len() + i, &x.transpose());
        labels.push(ActionLabel::Uninformative);
    }
    let actions = ActionSet::with_labels(features, labels)?;

    let mut theta = DVector::zeros(d);
    for i in 0..s - 1 {
        theta[i] = epsilon;
    }
    theta[d - 1] = -1.0;
    let theta_star = SparseParameter::new(theta, s)?;

    let instance = BanditInstance::new(actions, theta_star, config.noise_variance)?;
    match instance.actions.labels().unwrap()[instance.optimal_action_index] {
        ActionLabel::Uninformative => Ok(instance),
        other => Err(Error::Numeric(format!(
            "hard instance optimum landed in the {} set",
            other.as_str()
        ))),
    }
}

/// All vectors with entries in {-1, 0, 1} on the first d-1 coordinates,
/// exactly s-1 nonzeros, and 0 in the last coordinate. Enumerated exactly
/// when the count fits under `cap`, else uniformly subsampled to `cap`
/// distinct members.
fn build_uninformative_set(d: usize, s: usize, cap: usize, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    let slots = d - 1;
    let nonzeros = s - 1;
    let total = uninformative_count(slots, nonzeros);

    let make_action = |positions: &[usize], signs: &[f64]| {
        let mut x = DVector::zeros(d);
        for (&p, &sgn) in positions.iter().zip(signs) {
            x[p] = sgn;
        }
        x
    };

    if total.map_or(false, |t| t <= cap as u128) {
        let mut out = Vec::new();
        let mut positions = Vec::new();
        enumerate_combinations(slots, nonzeros, 0, &mut positions, &mut |combo| {
            for mask in 0..(1u64 << nonzeros) {
                let signs: Vec<f64> = (0..nonzeros)
                    .map(|b| if mask >> b & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                out.push(make_action(combo, &signs));
            }
        });
        out
    } else {
        let mut seen: HashSet<Vec<(u32, i8)>> = HashSet::new();
        let mut out = Vec::new();
        while out.len() < cap {
            let positions = sample_subset(slots, nonzeros, rng);
            let signs: Vec<f64> =
                (0..nonzeros).map(|_| if rng.gen::<bool>() { -1.0 } else { 1.0 }).collect();
            let key: Vec<(u32, i8)> = positions
                .iter()
                .zip(&signs)
                .map(|(&p, &sgn)| (p as u32, sgn as i8))
                .collect();
            if seen.insert(key) {
                out.push(make_action(&positions, &signs));
            }
        }
        out
    }
}

/// C(slots, nonzeros) * 2^nonzeros, None on overflow (then certainly > cap).
fn uninformative_count(slots: usize, nonzeros: usize) -> Option<u128> {
    let mut binom: u128 = 1;
    for i in 0..nonzeros {
        binom = binom.checked_mul((slots - i) as u128)?;
        binom /= (i + 1) as u128;
    }
    binom.checked_mul(1u128.checked_shl(nonzeros as u32)?)
}

fn enumerate_combinations(
    n: usize,
    r: usize,
    start: usize,
    current: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if current.len() == r {
        emit(current);
        return;
    }
    let remaining = r - current.len();
    for i in start..=n.saturating_sub(remaining) {
        current.push(i);
        enumerate_combinations(n, r, i + 1, current, emit);
        current.pop();
    }
}

/// K i.i.d. rows of N(0, Sigma) with Sigma_ij = corr_base^|i-j|, sampled
/// through the Cholesky factor. No clipping; callers that need the
/// boundedness invariant clip afterwards.
pub fn sample_correlated_rows(
    k: usize,
    d: usize,
    corr_base: f64,
    rng: &mut impl Rng,
) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&corr_base) {
        return Err(Error::InvalidArgument(format!(
            "correlation base must lie in [0, 1), got {corr_base}"
        )));
    }
    let sigma = DMatrix::from_fn(d, d, |i, j| corr_base.powi((i as i32 - j as i32).abs()));
    let chol = nalgebra::Cholesky::new(sigma).ok_or_else(|| {
        Error::Numeric("Cholesky factorization of the correlation matrix failed".into())
    })?;
    let l = chol.l();
    let mut rows = DMatrix::zeros(k, d);
    for i in 0..k {
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        rows.set_row(i, &(&l * z).transpose());
    }
    Ok(rows)
}

/// K actions drawn i.i.d. from N(0, Sigma), Sigma_ij = corr_base^|i-j|,
/// then clipped coordinatewise to [-1, 1].
pub fn build_gaussian_action_set(
    k: usize,
    d: usize,
    corr_base: f64,
    rng: &mut impl Rng,
) -> Result<ActionSet> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need K >= 2 actions, got {k}")));
    }
    let mut rows = sample_correlated_rows(k, d, corr_base, rng)?;
    rows.apply(|v| *v = v.clamp(-1.0, 1.0));
    ActionSet::new(rows)
}

/// Minimum eigenvalue of a symmetric matrix against a threshold. Returns
/// (passed, value). The minimum eigenvalue lower-bounds every cone-restricted
/// Rayleigh quotient, so a pass certifies the restricted eigenvalue too.
pub fn restricted_eigenvalue_check(h: &DMatrix<f64>, threshold: f64) -> Result<(bool, f64)> {
    if h.nrows() != h.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix must be square, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    for i in 0..h.nrows() {
        for j in (i + 1)..h.ncols() {
            if (h[(i, j)] - h[(j, i)]).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    h[(i, j)],
                    h[(j, i)]
                )));
            }
        }
    }
    let eigen = h.clone().symmetric_eigen();
    let value = eigen.eigenvalues.min();
    Ok((value >= threshold, value))
}

pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    (best, values[best])
}
