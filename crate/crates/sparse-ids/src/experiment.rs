//! Config-driven experiment harness: seeded parallel trials, CSV outputs,
//! and a manifest that reproduces every file byte for byte.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    aggregate, informative_pull_histogram, instantaneous_regret, BoundInputs, BoundRegime,
    RegretTrace,
};
use crate::env::{
    build_gaussian_action_set, build_hard_instance_with, sample_correlated_rows,
    sample_prior_parameter, step, BanditInstance, HardInstanceConfig, HistoryRecord,
};
use crate::error::{Error, Result};
use crate::policies::{PolicyConfig, PolicyContext, UCB_ALPHA_GRID};
use crate::sampler::{run_chain, Dataset, SamplerSchedule, SpikeSlabPrior};

/// Correlation base of the Gaussian designs: Sigma_ij = 0.6^|i-j|.
pub const GAUSSIAN_CORR_BASE: f64 = 0.6;
/// Hard-instance gap parameter when the config leaves it unset.
pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    OfflineRegression,
    HardInstance,
    GaussianActions,
}

/// Flat JSON experiment description. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub s: usize,
    /// Number of actions (Gaussian action sets only; the hard instance
    /// derives its own size).
    #[serde(default, alias = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Horizon (rounds per trial), or regression sample count for the
    /// offline check.
    pub n: usize,
    pub n_trials: usize,
    pub policies: Vec<PolicyConfig>,
    pub noise_variance: f64,
    /// Posterior samples per round for sample-based policies.
    #[serde(alias = "M")]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config(format!("d must be at least 2, got {}", self.d)));
        }
        if self.s < 1 || self.s > self.d {
            return Err(Error::Config(format!(
                "s must satisfy 1 <= s <= d, got s = {}, d = {}",
                self.s, self.d
            )));
        }
        if self.n == 0 {
            return Err(Error::Config("horizon n must be positive".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::Config("m (posterior samples) must be at least 1".into()));
        }
        if !(self.noise_variance > 0.0) {
            return Err(Error::Config(format!(
                "noise_variance must be positive, got {}",
                self.noise_variance
            )));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("policies must be nonempty".into()));
        }
        match self.experiment {
            ExperimentKind::GaussianActions => {
                let k = self.k.ok_or_else(|| {
                    Error::Config("gaussian_actions needs the action count k".into())
                })?;
                if k < 2 {
                    return Err(Error::Config(format!("k must be at least 2, got {k}")));
                }
            }
            ExperimentKind::HardInstance => {
                if self.d < 3 || self.s < 2 || self.s > self.d - 1 {
                    return Err(Error::Config(format!(
                        "hard instance needs d >= 3 and 2 <= s <= d-1, got d = {}, s = {}",
                        self.d, self.s
                    )));
                }
                if let Some(eps) = self.epsilon {
                    if !(eps > 0.0) {
                        return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
                    }
                }
            }
            ExperimentKind::OfflineRegression => {}
        }
        Ok(())
    }

    fn epsilon_or_default(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }
}

/// Everything needed to reproduce an experiment's outputs byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub trial_seeds: Vec<u64>,
    /// Marks that horizons and trial counts are desk-scale choices.
    pub scale_profile: String,
    /// Confidence widths chosen per instance for grid-tuned policies.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub chosen_ucb_alphas: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Paths written by a harness run.
#[derive(Debug, Clone)]
pub struct ExperimentOutputs {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Seed for one trial: base_seed XOR splitmix64(trial_index).
pub fn trial_seed(base_seed: u64, trial_index: usize) -> u64 {
    base_seed ^ splitmix64(trial_index as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent sub-streams of one trial seed.
#[derive(Clone, Copy)]
enum StreamId {
    Instance = 0,
    Policy = 1,
    Noise = 2,
}

fn stream(seed: u64, id: StreamId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

fn build_instance(config: &ExperimentConfig, seed: u64) -> Result<BanditInstance> {
    let mut rng = stream(seed, StreamId::Instance);
    match config.experiment {
        ExperimentKind::HardInstance => {
            let hard = HardInstanceConfig {
                noise_variance: config.noise_variance,
                ..HardInstanceConfig::default()
            };
            build_hard_instance_with(config.d, config.s, config.epsilon_or_default(), &hard, &mut rng)
        }
        ExperimentKind::GaussianActions => {
            let actions = build_gaussian_action_set(
                config.k.expect("validated"),
                config.d,
                GAUSSIAN_CORR_BASE,
                &mut rng,
            )?;
            let theta = sample_prior_parameter(config.d, config.s, &mut rng)?;
            BanditInstance::new(actions, theta, config.noise_variance)
        }
        ExperimentKind::OfflineRegression => Err(Error::Config(
            "offline_regression is not a bandit experiment; use run_offline_check".into(),
        )),
    }
}

/// Runs one policy through one seeded trial and returns its regret trace.
/// The instance is derived from base_seed XOR splitmix64(trial_index); the
/// policy and noise use independent sub-streams of the same seed, so paired
/// policies see identical instances and noise sequences.
pub fn run_trial(
    config: &ExperimentConfig,
    trial_index: usize,
    policy: &PolicyConfig,
) -> Result<RegretTrace> {
    run_trial_with_actions(config, trial_index, policy).map(|(trace, _)| trace)
}

/// Like [`run_trial`] but also returns the played action indices, for pull
/// histograms and custom diagnostics.
pub fn run_trial_with_actions(
    config: &ExperimentConfig,
    trial_index: usize,
    policy: &PolicyConfig,
) -> Result<(RegretTrace, Vec<usize>)> {
    config.validate()?;
    run_trial_inner(config, trial_index, policy, policy.kind_name())
}

fn run_trial_inner(
    config: &ExperimentConfig,
    trial_index: usize,
    policy: &PolicyConfig,
    name: &str,
) -> Result<(RegretTrace, Vec<usize>)> {
    let with_context = |source: Error| Error::Trial {
        trial_index,
        policy: name.to_string(),
        source: Box::new(source),
    };

    let seed = trial_seed(config.base_seed, trial_index);
    let instance = build_instance(config, seed).map_err(with_context)?;
    let ctx = PolicyContext {
        actions: instance.actions(),
        noise_variance: config.noise_variance,
        sparsity: config.s,
        horizon: config.n,
        default_samples: config.m,
    };
    let mut policy_rng = stream(seed, StreamId::Policy);
    let mut noise_rng = stream(seed, StreamId::Noise);
    let mut pol = policy.build(&ctx).map_err(with_context)?;

    let mut instant = Vec::with_capacity(config.n);
    let mut action_log = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let a = pol.select(&mut policy_rng).map_err(with_context)?;
        let reward = step(&instance, a, &mut noise_rng).map_err(with_context)?;
        pol.observe(&HistoryRecord {
            action_index: a,
            action: instance.actions().action(a),
            reward,
        });
        instant.push(instantaneous_regret(&instance, a));
        action_log.push(a);
    }
    let trace = RegretTrace::from_instant(name.to_string(), seed, instant).map_err(with_context)?;
    Ok((trace, action_log))
}

struct NamedPolicy {
    name: String,
    config: PolicyConfig,
    /// Index of the original config entry when this is one grid candidate.
    grid_group: Option<usize>,
}

/// One policy entry per runnable variant; a LinUCB without a fixed alpha
/// expands into the whole candidate grid.
fn expand_policies(policies: &[PolicyConfig]) -> Vec<NamedPolicy> {
    let mut kind_counts: HashMap<&'static str, usize> = HashMap::new();
    for p in policies {
        *kind_counts.entry(p.kind_name()).or_insert(0) += 1;
    }
    let mut seen: HashMap<&'static str, usize> = HashMap::new();
    let mut out = Vec::new();
    for (i, p) in policies.iter().enumerate() {
        let kind = p.kind_name();
        let occurrence = seen.entry(kind).and_modify(|c| *c += 1).or_insert(1);
        let base_name = if kind_counts[kind] > 1 {
            format!("{kind}_{occurrence}")
        } else {
            kind.to_string()
        };
        match p {
            PolicyConfig::LinUcb { ucb_alpha: None, ridge } => {
                for alpha in UCB_ALPHA_GRID {
                    out.push(NamedPolicy {
                        name: base_name.clone(),
                        config: PolicyConfig::LinUcb { ucb_alpha: Some(alpha), ridge: *ridge },
                        grid_group: Some(i),
                    });
                }
            }
            other => out.push(NamedPolicy {
                name: base_name,
                config: other.clone(),
                grid_group: None,
            }),
        }
    }
    out
}

/// Aggregated curve of one reported policy, plus its per-trial raw results.
struct PolicyResult {
    name: String,
    mean: Vec<f64>,
    stderr: Vec<f64>,
    traces: Vec<RegretTrace>,
    action_logs: Vec<Vec<usize>>,
    chosen_alpha: Option<f64>,
}

/// Runs n_trials x policies (trials in parallel), aggregates cumulative
/// regret per policy, and writes `regret.csv`, `pulls.csv` (hard instance
/// only) and `manifest.json` under the config's output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutputs> {
    config.validate()?;
    if config.experiment == ExperimentKind::OfflineRegression {
        return run_offline_check(config);
    }

    fs::create_dir_all(&config.output_dir)?;
    let manifest_path = config.output_dir.join("manifest.json");
    let mut manifest = Manifest {
        config: config.clone(),
        trial_seeds: (0..config.n_trials).map(|i| trial_seed(config.base_seed, i)).collect(),
        scale_profile: "desk".to_string(),
        chosen_ucb_alphas: BTreeMap::new(),
    };
    // write it up front so an unwritable directory fails before any compute
    write_json(&manifest_path, &manifest)?;

    let expanded = expand_policies(&config.policies);
    let jobs: Vec<(usize, usize)> = (0..expanded.len())
        .flat_map(|p| (0..config.n_trials).map(move |t| (p, t)))
        .collect();
    let results: Result<Vec<(RegretTrace, Vec<usize>)>> = jobs
        .par_iter()
        .map(|&(p, t)| run_trial_inner(config, t, &expanded[p].config, &expanded[p].name))
        .collect();
    let results = results?;

    // per expanded policy: aggregate
    let mut per_policy: Vec<PolicyResult> = Vec::new();
    for (p, named) in expanded.iter().enumerate() {
        let start = p * config.n_trials;
        let slice = &results[start..start + config.n_trials];
        let traces: Vec<RegretTrace> = slice.iter().map(|(t, _)| t.clone()).collect();
        let logs: Vec<Vec<usize>> = slice.iter().map(|(_, l)| l.clone()).collect();
        let (mean, stderr) = aggregate(&traces)?;
        let chosen_alpha = match &named.config {
            PolicyConfig::LinUcb { ucb_alpha, .. } => *ucb_alpha,
            _ => None,
        };
        per_policy.push(PolicyResult {
            name: named.name.clone(),
            mean,
            stderr,
            traces,
            action_logs: logs,
            chosen_alpha,
        });
    }

    // collapse grid groups to their best candidate by final mean regret
    let mut reported: Vec<PolicyResult> = Vec::new();
    let mut consumed_groups: Vec<usize> = Vec::new();
    for (p, named) in expanded.iter().enumerate() {
        match named.grid_group {
            None => reported.push(per_policy[p].clone_shallow()),
            Some(group) => {
                if consumed_groups.contains(&group) {
                    continue;
                }
                consumed_groups.push(group);
                let candidates: Vec<usize> = expanded
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| n.grid_group == Some(group))
                    .map(|(i, _)| i)
                    .collect();
                let winner = candidates
                    .iter()
                    .copied()
                    .min_by(|&a, &b| {
                        let fa = per_policy[a].mean.last().unwrap();
                        let fb = per_policy[b].mean.last().unwrap();
                        fa.partial_cmp(fb).unwrap()
                    })
                    .unwrap();
                if let Some(alpha) = per_policy[winner].chosen_alpha {
                    manifest.chosen_ucb_alphas.insert(per_policy[winner].name.clone(), alpha);
                }
                reported.push(per_policy[winner].clone_shallow());
            }
        }
    }

    let mut files = vec![manifest_path.clone()];

    let regret_path = config.output_dir.join("regret.csv");
    {
        let mut w = BufWriter::new(File::create(&regret_path)?);
        writeln!(w, "t,policy,mean_cum_regret,stderr,n_trials")?;
        for pol in &reported {
            for t in 0..config.n {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    t + 1,
                    pol.name,
                    pol.mean[t],
                    pol.stderr[t],
                    config.n_trials
                )?;
            }
        }
    }
    files.push(regret_path);

    if config.experiment == ExperimentKind::HardInstance {
        let pulls_path = config.output_dir.join("pulls.csv");
        let mut w = BufWriter::new(File::create(&pulls_path)?);
        writeln!(w, "trial,policy,informative_pulls,uninformative_pulls")?;
        for pol in &reported {
            for (t, log) in pol.action_logs.iter().enumerate() {
                let seed = trial_seed(config.base_seed, t);
                let instance = build_instance(config, seed)?;
                let counts = informative_pull_histogram(log, &instance)?;
                writeln!(w, "{},{},{},{}", t, pol.name, counts.informative, counts.uninformative)?;
            }
        }
        files.push(pulls_path);
    }

    write_json(&manifest_path, &manifest)?;
    Ok(ExperimentOutputs { output_dir: config.output_dir.clone(), files })
}

impl PolicyResult {
    fn clone_shallow(&self) -> PolicyResult {
        PolicyResult {
            name: self.name.clone(),
            mean: self.mean.clone(),
            stderr: self.stderr.clone(),
            traces: self.traces.clone(),
            action_logs: self.action_logs.clone(),
            chosen_alpha: self.chosen_alpha,
        }
    }
}

/// Offline regression check: fixed correlated Gaussian design, the sparse
/// ground truth (3, 2, 0, ..., 0), one spike-and-slab chain. Writes the
/// per-iteration diagnostics, one sample file per coordinate, a summary CSV
/// (posterior mean / std / average inclusion probability per coordinate) and
/// the manifest.
pub fn run_offline_check(config: &ExperimentConfig) -> Result<ExperimentOutputs> {
    config.validate()?;
    if config.experiment != ExperimentKind::OfflineRegression {
        return Err(Error::Config("run_offline_check needs experiment = offline_regression".into()));
    }
    fs::create_dir_all(&config.output_dir)?;
    let manifest_path = config.output_dir.join("manifest.json");
    let manifest = Manifest {
        config: config.clone(),
        trial_seeds: vec![config.base_seed],
        scale_profile: "desk".to_string(),
        chosen_ucb_alphas: BTreeMap::new(),
    };
    write_json(&manifest_path, &manifest)?;

    let seed = config.base_seed;
    let mut design_rng = stream(seed, StreamId::Instance);
    let mut noise_rng = stream(seed, StreamId::Noise);
    let mut chain_rng = stream(seed, StreamId::Policy);

    let x = sample_correlated_rows(config.n, config.d, GAUSSIAN_CORR_BASE, &mut design_rng)?;
    let theta_star = offline_truth(config.d);
    let noise = DVector::from_fn(config.n, |_, _| {
        rand::Rng::sample::<f64, _>(&mut noise_rng, rand_distr::StandardNormal)
    });
    let y = &x * &theta_star + noise * config.noise_variance.sqrt();
    let data = Dataset::new(x, y)?;

    let prior = SpikeSlabPrior::default_for(config.s, config.d, config.noise_variance)?;
    let schedule = SamplerSchedule::adaptive(&data, &prior, config.m)?;

    let diag_path = config.output_dir.join("diagnostics.csv");
    let mut diag = BufWriter::new(File::create(&diag_path)?);
    let run = match run_chain(&data, &prior, &schedule, None, Some(&mut diag), &mut chain_rng) {
        Ok(run) => run,
        Err(e) => {
            let error_path = config.output_dir.join("error.json");
            let detail = serde_json::json!({
                "error": e.to_string(),
                "diagnostics": diag_path.to_string_lossy(),
            });
            fs::write(&error_path, serde_json::to_string_pretty(&detail)?)?;
            return Err(e);
        }
    };
    drop(diag);

    let mut files = vec![manifest_path, diag_path];
    for j in 0..config.d {
        let path = config.output_dir.join(format!("coordinate_{j:02}.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "sample")?;
        for i in 0..run.samples.nrows() {
            writeln!(w, "{}", run.samples[(i, j)])?;
        }
        files.push(path);
    }

    let summary_path = config.output_dir.join("summary.csv");
    {
        let mut w = BufWriter::new(File::create(&summary_path)?);
        writeln!(w, "coordinate,posterior_mean,posterior_std,nu_mean")?;
        let m = run.samples.nrows() as f64;
        for j in 0..config.d {
            let col = run.samples.column(j);
            let mean = col.sum() / m;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
            writeln!(w, "{},{},{},{}", j, mean, var.sqrt(), run.nu_mean[j])?;
        }
    }
    files.push(summary_path);

    Ok(ExperimentOutputs { output_dir: config.output_dir.clone(), files })
}

/// Ground truth of the offline check: (3, 2, 0, ..., 0).
pub fn offline_truth(d: usize) -> DVector<f64> {
    let mut theta = DVector::zeros(d);
    theta[0] = 3.0;
    theta[1] = 2.0;
    theta
}

/// Reference bound curves as CSV: `t,bound_arbitrary,bound_exploratory`.
pub fn write_bound_curves(w: &mut dyn Write, inputs: &BoundInputs) -> Result<()> {
    writeln!(w, "t,bound_arbitrary,bound_exploratory")?;
    for t in 1..=inputs.n {
        let point = BoundInputs { n: t, ..*inputs };
        writeln!(
            w,
            "{},{},{}",
            t,
            crate::analysis::regret_bound(&point, BoundRegime::Arbitrary),
            crate::analysis::regret_bound(&point, BoundRegime::Exploratory),
        )?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}
