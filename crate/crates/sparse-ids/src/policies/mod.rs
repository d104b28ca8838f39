//! Bandit policies behind a single `Policy` interface.
//!
//! Sparse IDS and sparse TS run the spike-and-slab chain each round;
//! vanilla IDS, LinTS and LinUCB work off the conjugate Gaussian ridge
//! posterior; ESTC explores uniformly, fits a Lasso once, and commits.

pub mod estc;
pub mod linear;
pub mod summary;

use std::io::Write;

use nalgebra::DVector;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::env::{ActionSet, HistoryRecord};
use crate::error::Result;
use crate::sampler::{run_chain, Dataset, SamplerSchedule, SamplerState, SpikeSlabPrior};

pub use estc::{lasso_proximal_gradient, LassoFit};
pub use linear::{lin_ts_select, lin_ucb_select, vanilla_ids_select, RidgeState, DEFAULT_RIDGE};
pub use summary::{
    estimate_delta_v, ids_select, information_ratio, sparse_ts_select, PosteriorSummary, V_FLOOR,
};

/// Candidate confidence widths when LinUCB is tuned per instance.
pub const UCB_ALPHA_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Burn-in used when a sparse policy warm-starts its chain between rounds.
const WARM_START_BURN_IN: usize = 100;

/// A sequential decision rule: pick an action index, then observe the played
/// record. Policies own all their state; one instance serves one trial.
pub trait Policy {
    fn name(&self) -> &str;
    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize>;
    fn observe(&mut self, record: &HistoryRecord);
    /// Per-round selection diagnostics, when the policy records them.
    fn trace(&self) -> &[TraceRow] {
        &[]
    }
}

/// One row of the optional selection trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub t: usize,
    pub action_index: usize,
    pub delta_hat: f64,
    pub v_hat: f64,
    pub ratio: f64,
}

/// Writes the selection trace as CSV with columns
/// `t,action_index,delta_hat,v_hat,ratio`.
pub fn write_selection_trace(w: &mut dyn Write, rows: &[TraceRow]) -> std::io::Result<()> {
    writeln!(w, "t,action_index,delta_hat,v_hat,ratio")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.t, r.action_index, r.delta_hat, r.v_hat, r.ratio)?;
    }
    Ok(())
}

/// Declarative policy description used by configs and the experiment runner.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    SparseIds {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        num_posterior_samples: Option<usize>,
        #[serde(default)]
        warm_start: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    SparseTs {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        num_posterior_samples: Option<usize>,
        #[serde(default)]
        warm_start: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    VanillaIds {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        num_posterior_samples: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ridge: Option<f64>,
    },
    LinTs {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ridge: Option<f64>,
    },
    LinUcb {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ucb_alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ridge: Option<f64>,
    },
    Estc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        estc_explore_rounds: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        estc_lasso_penalty: Option<f64>,
    },
    Uniform,
}

impl PolicyConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PolicyConfig::SparseIds { .. } => "sparse_ids",
            PolicyConfig::SparseTs { .. } => "sparse_ts",
            PolicyConfig::VanillaIds { .. } => "vanilla_ids",
            PolicyConfig::LinTs { .. } => "lin_ts",
            PolicyConfig::LinUcb { .. } => "lin_ucb",
            PolicyConfig::Estc { .. } => "estc",
            PolicyConfig::Uniform => "uniform",
        }
    }

    /// Instantiates the policy for one trial.
    pub fn build<'a>(&self, ctx: &PolicyContext<'a>) -> Result<Box<dyn Policy + 'a>> {
        let d = ctx.actions.dim();
        match self {
            PolicyConfig::SparseIds { num_posterior_samples, warm_start, lambda0, lambda1, beta } => {
                let prior = override_prior(ctx, *lambda0, *lambda1, *beta)?;
                Ok(Box::new(SparseIdsPolicy::new(
                    ctx.actions,
                    prior,
                    num_posterior_samples.unwrap_or(ctx.default_samples),
                    *warm_start,
                )))
            }
            PolicyConfig::SparseTs { num_posterior_samples, warm_start, lambda0, lambda1, beta } => {
                let prior = override_prior(ctx, *lambda0, *lambda1, *beta)?;
                Ok(Box::new(SparseTsPolicy::new(
                    ctx.actions,
                    prior,
                    num_posterior_samples.unwrap_or(ctx.default_samples),
                    *warm_start,
                )))
            }
            PolicyConfig::VanillaIds { num_posterior_samples, ridge } => {
                Ok(Box::new(VanillaIdsPolicy {
                    actions: ctx.actions,
                    state: RidgeState::new(d, ridge.unwrap_or(DEFAULT_RIDGE))?,
                    num_samples: num_posterior_samples.unwrap_or(ctx.default_samples),
                    noise_variance: ctx.noise_variance,
                }))
            }
            PolicyConfig::LinTs { ridge } => Ok(Box::new(LinTsPolicy {
                actions: ctx.actions,
                state: RidgeState::new(d, ridge.unwrap_or(DEFAULT_RIDGE))?,
                noise_variance: ctx.noise_variance,
            })),
            PolicyConfig::LinUcb { ucb_alpha, ridge } => Ok(Box::new(LinUcbPolicy {
                actions: ctx.actions,
                state: RidgeState::new(d, ridge.unwrap_or(DEFAULT_RIDGE))?,
                alpha: ucb_alpha.unwrap_or(1.0),
            })),
            PolicyConfig::Estc { estc_explore_rounds, estc_lasso_penalty } => {
                let explore_rounds = estc_explore_rounds
                    .unwrap_or_else(|| (ctx.horizon as f64).powf(2.0 / 3.0).ceil() as usize)
                    .max(1);
                let penalty = estc_lasso_penalty.unwrap_or_else(|| {
                    2.0 * ctx.noise_variance.sqrt() * ((d as f64).ln() / explore_rounds as f64).sqrt()
                });
                Ok(Box::new(EstcPolicy {
                    actions: ctx.actions,
                    explore_rounds,
                    penalty,
                    rows: Vec::new(),
                    ys: Vec::new(),
                    committed: None,
                    rounds_played: 0,
                }))
            }
            PolicyConfig::Uniform => Ok(Box::new(UniformPolicy { k: ctx.actions.num_actions() })),
        }
    }
}

fn override_prior(
    ctx: &PolicyContext<'_>,
    lambda0: Option<f64>,
    lambda1: Option<f64>,
    beta: Option<f64>,
) -> Result<SpikeSlabPrior> {
    let base = SpikeSlabPrior::default_for(ctx.sparsity, ctx.actions.dim(), ctx.noise_variance)?;
    SpikeSlabPrior::new(
        lambda0.unwrap_or(base.lambda0),
        lambda1.unwrap_or(base.lambda1),
        beta.unwrap_or(base.beta),
        base.sigma2,
    )
}

/// Everything a policy needs to know about the trial it runs in.
#[derive(Debug, Clone, Copy)]
pub struct PolicyContext<'a> {
    pub actions: &'a ActionSet,
    pub noise_variance: f64,
    pub sparsity: usize,
    pub horizon: usize,
    /// Posterior samples per round when the policy config does not say.
    pub default_samples: usize,
}

/// Shared chassis for the two spike-and-slab policies: history storage plus
/// the per-round chain invocation (fresh start by default, warm start as a
/// performance option).
struct SparseChain<'a> {
    actions: &'a ActionSet,
    prior: SpikeSlabPrior,
    num_samples: usize,
    warm_start: bool,
    state: Option<SamplerState>,
    rows: Vec<DVector<f64>>,
    ys: Vec<f64>,
}

impl<'a> SparseChain<'a> {
    fn new(actions: &'a ActionSet, prior: SpikeSlabPrior, num_samples: usize, warm_start: bool) -> Self {
        Self { actions, prior, num_samples, warm_start, state: None, rows: Vec::new(), ys: Vec::new() }
    }

    fn posterior(&mut self, rng: &mut dyn RngCore) -> Result<nalgebra::DMatrix<f64>> {
        let data = Dataset::from_rows(&self.rows, &self.ys, self.actions.dim())?;
        let mut schedule = SamplerSchedule::adaptive(&data, &self.prior, self.num_samples)?;
        if self.warm_start && self.state.is_some() {
            schedule = schedule.with_burn_in(WARM_START_BURN_IN);
        }
        let run = run_chain(&data, &self.prior, &schedule, self.state.as_ref(), None, &mut rng_of(rng))?;
        if self.warm_start {
            self.state = Some(run.final_state.clone());
        }
        Ok(run.samples)
    }

    fn observe(&mut self, record: &HistoryRecord) {
        self.rows.push(record.action.clone());
        self.ys.push(record.reward);
    }
}

/// Adapter so `&mut dyn RngCore` satisfies `impl Rng` bounds.
fn rng_of(rng: &mut dyn RngCore) -> impl Rng + '_ {
    rng
}

/// Sparse IDS: spike-and-slab posterior samples, delta/v estimation, ratio
/// minimization. Records one trace row per round.
pub struct SparseIdsPolicy<'a> {
    chain: SparseChain<'a>,
    round: usize,
    trace: Vec<TraceRow>,
}

impl<'a> SparseIdsPolicy<'a> {
    pub fn new(
        actions: &'a ActionSet,
        prior: SpikeSlabPrior,
        num_samples: usize,
        warm_start: bool,
    ) -> Self {
        Self { chain: SparseChain::new(actions, prior, num_samples, warm_start), round: 0, trace: Vec::new() }
    }
}

impl Policy for SparseIdsPolicy<'_> {
    fn name(&self) -> &str {
        "sparse_ids"
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        self.round += 1;
        let samples = self.chain.posterior(rng)?;
        let summary = estimate_delta_v(&samples, self.chain.actions)?;
        let idx = ids_select(&summary, &mut rng_of(rng));
        self.trace.push(TraceRow {
            t: self.round,
            action_index: idx,
            delta_hat: summary.delta_hat[idx],
            v_hat: summary.v_hat[idx],
            ratio: summary::information_ratio(summary.delta_hat[idx], summary.v_hat[idx]),
        });
        Ok(idx)
    }

    fn observe(&mut self, record: &HistoryRecord) {
        self.chain.observe(record);
    }

    fn trace(&self) -> &[TraceRow] {
        &self.trace
    }
}

/// Sparse TS: one spike-and-slab posterior draw decides the action.
pub struct SparseTsPolicy<'a> {
    chain: SparseChain<'a>,
}

impl<'a> SparseTsPolicy<'a> {
    pub fn new(
        actions: &'a ActionSet,
        prior: SpikeSlabPrior,
        num_samples: usize,
        warm_start: bool,
    ) -> Self {
        Self { chain: SparseChain::new(actions, prior, num_samples, warm_start) }
    }
}

impl Policy for SparseTsPolicy<'_> {
    fn name(&self) -> &str {
        "sparse_ts"
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        let samples = self.chain.posterior(rng)?;
        sparse_ts_select(&samples, self.chain.actions, &mut rng_of(rng))
    }

    fn observe(&mut self, record: &HistoryRecord) {
        self.chain.observe(record);
    }
}

/// IDS over the conjugate Gaussian ridge posterior.
pub struct VanillaIdsPolicy<'a> {
    actions: &'a ActionSet,
    state: RidgeState,
    num_samples: usize,
    noise_variance: f64,
}

impl Policy for VanillaIdsPolicy<'_> {
    fn name(&self) -> &str {
        "vanilla_ids"
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        vanilla_ids_select(
            &self.state,
            self.actions,
            self.num_samples,
            self.noise_variance,
            &mut rng_of(rng),
        )
    }

    fn observe(&mut self, record: &HistoryRecord) {
        self.state.update(&record.action, record.reward);
    }
}

/// Thompson sampling with the conjugate Gaussian posterior.
pub struct LinTsPolicy<'a> {
    actions: &'a ActionSet,
    state: RidgeState,
    noise_variance: f64,
}

impl Policy for LinTsPolicy<'_> {
    fn name(&self) -> &str {
        "lin_ts"
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        lin_ts_select(&self.state, self.actions, self.noise_variance, &mut rng_of(rng))
    }

    fn observe(&mut self, record: &HistoryRecord) {
        self.state.update(&record.action, record.reward);
    }
}

/// Ellipsoidal optimism with confidence width alpha.
pub struct LinUcbPolicy<'a> {
    actions: &'a ActionSet,
    state: RidgeState,
    alpha: f64,
}

impl Policy for LinUcbPolicy<'_> {
    fn name(&self) -> &str {
        "lin_ucb"
    }

    fn select(&mut self, _rng: &mut dyn RngCore) -> Result<usize> {
        lin_ucb_select(&self.state, self.actions, self.alpha)
    }

    fn observe(&mut self, record: &HistoryRecord) {
        self.state.update(&record.action, record.reward);
    }
}

/// Explore-then-commit: uniform exploration, one Lasso fit, greedy commit.
pub struct EstcPolicy<'a> {
    actions: &'a ActionSet,
    explore_rounds: usize,
    penalty: f64,
    rows: Vec<DVector<f64>>,
    ys: Vec<f64>,
    committed: Option<DVector<f64>>,
    rounds_played: usize,
}

impl Policy for EstcPolicy<'_> {
    fn name(&self) -> &str {
        "estc"
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        self.rounds_played += 1;
        if self.rounds_played <= self.explore_rounds {
            return Ok(rng_of(rng).gen_range(0..self.actions.num_actions()));
        }
        if self.committed.is_none() {
            let data = Dataset::from_rows(&self.rows, &self.ys, self.actions.dim())?;
            let fit = lasso_proximal_gradient(data.x(), data.y(), self.penalty, 5000, 1e-8)?;
            if !fit.converged {
                log::warn!(
                    "estc lasso did not converge within {} iterations; committing to the current iterate",
                    fit.iterations
                );
            }
            self.committed = Some(fit.coefficients);
        }
        let theta = self.committed.as_ref().unwrap();
        let means = self.actions.reward_means(theta);
        Ok(crate::env::argmax(means.as_slice()).0)
    }

    fn observe(&mut self, record: &HistoryRecord) {
        if self.rounds_played <= self.explore_rounds {
            self.rows.push(record.action.clone());
            self.ys.push(record.reward);
        }
    }
}

/// Plays uniformly at random forever.
pub struct UniformPolicy {
    k: usize,
}

impl Policy for UniformPolicy {
    fn name(&self) -> &str {
        "uniform"
    }

    fn select(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        Ok(rng_of(rng).gen_range(0..self.k))
    }

    fn observe(&mut self, _record: &HistoryRecord) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn actions() -> ActionSet {
        ActionSet::new(DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.5, 0.5])).unwrap()
    }

    #[test]
    fn policy_config_round_trips_through_json() {
        let configs = vec![
            PolicyConfig::SparseIds {
                num_posterior_samples: Some(200),
                warm_start: false,
                lambda0: None,
                lambda1: None,
                beta: None,
            },
            PolicyConfig::LinUcb { ucb_alpha: Some(0.5), ridge: None },
            PolicyConfig::Uniform,
        ];
        let json = serde_json::to_string(&configs).unwrap();
        let back: Vec<PolicyConfig> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, configs);
    }

    #[test]
    fn policy_config_rejects_unknown_keys() {
        let raw = r#"{"kind": "lin_ucb", "ucb_alfa": 0.5}"#;
        assert!(serde_json::from_str::<PolicyConfig>(raw).is_err());
    }

    #[test]
    fn policies_are_deterministic_given_seed() {
        let acts = actions();
        let ctx = PolicyContext {
            actions: &acts,
            noise_variance: 1.0,
            sparsity: 1,
            horizon: 10,
            default_samples: 30,
        };
        for config in [
            PolicyConfig::SparseIds {
                num_posterior_samples: Some(20),
                warm_start: false,
                lambda0: None,
                lambda1: None,
                beta: None,
            },
            PolicyConfig::SparseTs {
                num_posterior_samples: Some(20),
                warm_start: false,
                lambda0: None,
                lambda1: None,
                beta: None,
            },
            PolicyConfig::VanillaIds { num_posterior_samples: Some(20), ridge: None },
            PolicyConfig::LinTs { ridge: None },
            PolicyConfig::LinUcb { ucb_alpha: None, ridge: None },
            PolicyConfig::Estc { estc_explore_rounds: Some(2), estc_lasso_penalty: None },
            PolicyConfig::Uniform,
        ] {
            let run = |seed: u64| -> Vec<usize> {
                let mut policy = config.build(&ctx).unwrap();
                let mut r = rng(seed);
                let mut picks = Vec::new();
                for _ in 0..5 {
                    let idx = policy.select(&mut r).unwrap();
                    picks.push(idx);
                    policy.observe(&HistoryRecord {
                        action_index: idx,
                        action: acts.action(idx),
                        reward: 0.3,
                    });
                }
                picks
            };
            assert_eq!(run(5), run(5), "policy {} not deterministic", config.kind_name());
        }
    }

    #[test]
    fn estc_commits_after_exploration() {
        let acts = actions();
        let ctx = PolicyContext {
            actions: &acts,
            noise_variance: 1.0,
            sparsity: 1,
            horizon: 20,
            default_samples: 10,
        };
        let config = PolicyConfig::Estc { estc_explore_rounds: Some(6), estc_lasso_penalty: Some(0.01) };
        let mut policy = config.build(&ctx).unwrap();
        let mut r = rng(3);
        // exploration: reward only action 0
        for _ in 0..6 {
            let idx = policy.select(&mut r).unwrap();
            let reward = if idx == 0 { 1.0 } else { 0.0 };
            policy.observe(&HistoryRecord { action_index: idx, action: acts.action(idx), reward });
        }
        let mut committed = Vec::new();
        for _ in 0..5 {
            committed.push(policy.select(&mut r).unwrap());
        }
        assert!(committed.windows(2).all(|w| w[0] == w[1]), "commit phase not constant: {committed:?}");
    }

    #[test]
    fn sparse_ids_records_trace() {
        let acts = actions();
        let prior = SpikeSlabPrior::default_for(1, 2, 1.0).unwrap();
        let mut policy = SparseIdsPolicy::new(&acts, prior, 20, false);
        let mut r = rng(11);
        let idx = policy.select(&mut r).unwrap();
        policy.observe(&HistoryRecord { action_index: idx, action: acts.action(idx), reward: 0.1 });
        policy.select(&mut r).unwrap();
        let trace = policy.trace();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].t, 1);
        assert_eq!(trace[1].t, 2);
        let mut buf = Vec::new();
        write_selection_trace(&mut buf, trace).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,action_index,delta_hat,v_hat,ratio\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
