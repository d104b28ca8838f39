//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use sparse_ids::analysis::{
    c_min_estimate, delta_cap, informative_pull_histogram, regret_bound, BoundInputs, BoundRegime,
};
use sparse_ids::env::{
    build_hard_instance_with, restricted_eigenvalue_check, sample_correlated_rows, ActionSet,
    HardInstanceConfig,
};
use sparse_ids::experiment::{
    run_experiment, run_offline_check, run_trial_with_actions, trial_seed, ExperimentConfig,
    ExperimentKind, Manifest,
};
use sparse_ids::policies::{
    estimate_delta_v, lasso_proximal_gradient, PolicyConfig, UCB_ALPHA_GRID,
};
use sparse_ids::sampler::{
    neg_log_posterior, neg_log_posterior_grad, sample_posterior, Dataset, SamplerSchedule,
    SpikeSlabPrior,
};

/// One-sided 5% critical value of Student's t with 49 degrees of freedom.
const T_CRIT_49: f64 = 1.6766;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn paired_t(diffs: &[f64]) -> (f64, f64) {
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, mean / (sd / n.sqrt()))
}

#[test]
fn criterion_01_conjugate_oracle() {
    let started = std::time::Instant::now();
    let d = 5;
    let n = 50;
    let sigma2 = 1.0;
    let prior = SpikeSlabPrior::new(0.05, 1.0, 1.0, sigma2).unwrap();

    let mut r = rng(10);
    let x = DMatrix::from_fn(n, d, |_, _| r.sample::<f64, _>(StandardNormal));
    let truth = DVector::from_vec(vec![0.6, -0.4, 0.0, 0.3, 0.0]);
    let y = &x * &truth
        + DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal)) * sigma2.sqrt();
    let data = Dataset::new(x.clone(), y.clone()).unwrap();

    let precision =
        x.transpose() * &x / sigma2 + DMatrix::identity(d, d) / (sigma2 * prior.lambda1);
    let cov = precision.try_inverse().unwrap();
    let mean = &cov * (x.transpose() * &y) / sigma2;

    let schedule = SamplerSchedule::adaptive(&data, &prior, 5000).unwrap();
    let samples = sample_posterior(&data, &prior, &schedule, &mut r).unwrap();
    let m = samples.nrows() as f64;
    let sample_mean = samples.row_sum().transpose() / m;
    let mut sample_cov = DMatrix::zeros(d, d);
    for i in 0..samples.nrows() {
        let centered = samples.row(i).transpose() - &sample_mean;
        sample_cov += &centered * centered.transpose();
    }
    sample_cov /= m;

    for j in 0..d {
        let err = (sample_mean[j] - mean[j]).abs();
        assert!(err < 0.05, "posterior mean[{j}] off by {err}");
    }
    for i in 0..d {
        for j in 0..d {
            let err = (sample_cov[(i, j)] - cov[(i, j)]).abs();
            assert!(err < 0.05, "posterior cov[({i},{j})] off by {err}");
        }
    }
    assert!(started.elapsed().as_secs() < 60, "took {:?}", started.elapsed());
    println!("ACCEPTANCE 1 (sampler conjugate oracle): PASS");
}

#[test]
fn criterion_02_gradient_check() {
    let prior = SpikeSlabPrior::new(0.1, 2.0, 0.4, 2.0).unwrap();
    let mut r = rng(20);
    let d = 6;
    let n = 30;
    let x = DMatrix::from_fn(n, d, |_, _| r.sample::<f64, _>(StandardNormal));
    let y = DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal));
    let data = Dataset::new(x, y).unwrap();

    let h = 1e-5;
    for _ in 0..100 {
        let theta = DVector::from_fn(d, |_, _| {
            let v: f64 = r.sample(StandardNormal);
            v.signum() * (v.abs() + 1e-3)
        });
        let nu = DVector::from_fn(d, |_, _| r.gen::<f64>());
        let grad = neg_log_posterior_grad(&theta, &nu, &data, &prior);
        for i in 0..d {
            let mut plus = theta.clone();
            let mut minus = theta.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (neg_log_posterior(&plus, &nu, &data, &prior)
                - neg_log_posterior(&minus, &nu, &data, &prior))
                / (2.0 * h);
            let rel = (grad[i] - fd).abs() / grad[i].abs().max(1e-8);
            assert!(rel < 1e-5, "coordinate {i}: analytic {} vs finite difference {fd}", grad[i]);
        }
    }
    println!("ACCEPTANCE 2 (gradient finite-difference check): PASS");
}

#[test]
fn criterion_03_offline_posterior_concentration() {
    let started = std::time::Instant::now();
    let d = 10;
    let n = 100;
    let sigma2 = 2.0;
    let mut r = rng(30);
    let x = sample_correlated_rows(n, d, 0.6, &mut r).unwrap();
    let mut truth = DVector::zeros(d);
    truth[0] = 3.0;
    truth[1] = 2.0;
    let y = &x * &truth
        + DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal)) * sigma2.sqrt();
    let data = Dataset::new(x.clone(), y.clone()).unwrap();

    let prior = SpikeSlabPrior::default_for(3, d, sigma2).unwrap();
    let schedule = SamplerSchedule::adaptive(&data, &prior, 2000).unwrap();
    let samples = sample_posterior(&data, &prior, &schedule, &mut r).unwrap();
    let m = samples.nrows() as f64;
    let means: Vec<f64> = (0..d).map(|j| samples.column(j).sum() / m).collect();

    // independent cross-check: an L1 point estimate from the same data
    let penalty = sigma2.sqrt() * ((d as f64).ln() / n as f64).sqrt();
    let lasso = lasso_proximal_gradient(&x, &y, penalty, 5000, 1e-10).unwrap();
    assert!(lasso.converged);

    assert!((means[0] - 3.0).abs() < 0.5, "mean[0] = {}", means[0]);
    assert!((means[1] - 2.0).abs() < 0.5, "mean[1] = {}", means[1]);
    for j in 2..d {
        assert!(means[j].abs() < 0.25, "null coordinate {j} has mean {}", means[j]);
    }
    assert!((lasso.coefficients[0] - 3.0).abs() < 0.5);
    assert!((lasso.coefficients[1] - 2.0).abs() < 0.5);
    for j in 0..d {
        assert!(
            (means[j] - lasso.coefficients[j]).abs() < 0.5,
            "posterior mean and lasso disagree on coordinate {j}: {} vs {}",
            means[j],
            lasso.coefficients[j]
        );
    }
    assert!(started.elapsed().as_secs() < 120, "took {:?}", started.elapsed());
    println!("ACCEPTANCE 3 (offline posterior concentration): PASS");
}

/// Literal transcription of the sample-based delta/v estimator, kept
/// independent of the library implementation.
fn naive_delta_v(
    samples: &DMatrix<f64>,
    actions: &ActionSet,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = samples.nrows();
    let k = actions.num_actions();
    let d = actions.dim();
    let argmax_of = |mi: usize| -> usize {
        let theta = samples.row(mi).transpose();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for a in 0..k {
            let val = actions.action(a).dot(&theta);
            if val > best_val {
                best_val = val;
                best = a;
            }
        }
        best
    };
    let mut mu_hat = vec![0.0; d];
    for mi in 0..m {
        for j in 0..d {
            mu_hat[j] += samples[(mi, j)] / m as f64;
        }
    }
    let mut p = vec![0.0; k];
    let mut mu_cond = vec![vec![0.0; d]; k];
    for a in 0..k {
        let members: Vec<usize> = (0..m).filter(|&mi| argmax_of(mi) == a).collect();
        p[a] = members.len() as f64 / m as f64;
        if !members.is_empty() {
            for &mi in &members {
                for j in 0..d {
                    mu_cond[a][j] += samples[(mi, j)] / members.len() as f64;
                }
            }
        }
    }
    let mut spread = vec![vec![0.0; d]; d];
    for a in 0..k {
        if p[a] > 0.0 {
            for i in 0..d {
                for j in 0..d {
                    spread[i][j] += p[a] * (mu_cond[a][i] - mu_hat[i]) * (mu_cond[a][j] - mu_hat[j]);
                }
            }
        }
    }
    let mut rho = 0.0;
    for a in 0..k {
        if p[a] > 0.0 {
            let feat = actions.action(a);
            let dot: f64 = (0..d).map(|j| feat[j] * mu_cond[a][j]).sum();
            rho += p[a] * dot;
        }
    }
    let mut delta = vec![0.0; k];
    let mut v = vec![0.0; k];
    for a in 0..k {
        let feat = actions.action(a);
        let mean_dot: f64 = (0..d).map(|j| feat[j] * mu_hat[j]).sum();
        delta[a] = (rho - mean_dot).max(0.0);
        let mut quad = 0.0;
        for i in 0..d {
            for j in 0..d {
                quad += feat[i] * spread[i][j] * feat[j];
            }
        }
        v[a] = quad.max(0.0);
    }
    (delta, v, p)
}

#[test]
fn criterion_04_delta_v_oracle_equivalence() {
    let mut r = rng(40);
    for case in 0..1000 {
        let m = r.gen_range(1..=20);
        let k = r.gen_range(2..=10);
        let d = r.gen_range(2..=6);
        let samples = DMatrix::from_fn(m, d, |_, _| r.gen::<f64>() * 4.0 - 2.0);
        let feats = DMatrix::from_fn(k, d, |_, _| r.gen::<f64>() * 2.0 - 1.0);
        let actions = ActionSet::new(feats).unwrap();
        let summary = estimate_delta_v(&samples, &actions).unwrap();
        let (delta, v, p) = naive_delta_v(&samples, &actions);
        for a in 0..k {
            assert!(
                (summary.delta_hat[a] - delta[a]).abs() < 1e-12,
                "case {case}: delta[{a}] {} vs {}",
                summary.delta_hat[a],
                delta[a]
            );
            assert!(
                (summary.v_hat[a] - v[a]).abs() < 1e-12,
                "case {case}: v[{a}] {} vs {}",
                summary.v_hat[a],
                v[a]
            );
            assert!((summary.p_star[a] - p[a]).abs() < 1e-12);
        }
    }
    println!("ACCEPTANCE 4 (delta/v estimator matches naive oracle): PASS");
}

fn sparse_policy(ids: bool, lambda0: Option<f64>) -> PolicyConfig {
    if ids {
        PolicyConfig::SparseIds {
            num_posterior_samples: None,
            warm_start: false,
            lambda0,
            lambda1: None,
            beta: None,
        }
    } else {
        PolicyConfig::SparseTs {
            num_posterior_samples: None,
            warm_start: false,
            lambda0,
            lambda1: None,
            beta: None,
        }
    }
}

#[test]
fn criterion_05_hard_instance_ordering() {
    let started = std::time::Instant::now();
    let trials = 50;
    let epsilon = 0.5;
    let lambda0 = Some(0.035);
    let config = ExperimentConfig {
        experiment: ExperimentKind::HardInstance,
        d: 10,
        s: 2,
        k: None,
        n: 500,
        n_trials: trials,
        policies: vec![sparse_policy(true, lambda0), sparse_policy(false, lambda0)],
        noise_variance: 2.0,
        m: 1000,
        epsilon: Some(epsilon),
        base_seed: 2024,
        output_dir: PathBuf::from("/tmp/unused"),
    };

    let results: Vec<(f64, f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (ids_trace, ids_log) =
                run_trial_with_actions(&config, t, &config.policies[0]).unwrap();
            let (ts_trace, ts_log) =
                run_trial_with_actions(&config, t, &config.policies[1]).unwrap();
            let hard = HardInstanceConfig { noise_variance: 2.0, ..Default::default() };
            let mut instance_rng = rng(trial_seed(config.base_seed, t));
            instance_rng.set_stream(0);
            let instance =
                build_hard_instance_with(10, 2, epsilon, &hard, &mut instance_rng).unwrap();
            let ids_pulls =
                informative_pull_histogram(&ids_log, &instance).unwrap().informative as f64;
            let ts_pulls =
                informative_pull_histogram(&ts_log, &instance).unwrap().informative as f64;
            (ids_trace.final_cumulative(), ts_trace.final_cumulative(), ids_pulls, ts_pulls)
        })
        .collect();

    let regret_diffs: Vec<f64> = results.iter().map(|r| r.1 - r.0).collect();
    let pull_diffs: Vec<f64> = results.iter().map(|r| r.2 - r.3).collect();
    let (regret_mean, regret_t) = paired_t(&regret_diffs);
    let (pull_mean, pull_t) = paired_t(&pull_diffs);
    println!(
        "criterion 5: regret diff (ts - ids) = {regret_mean:.1} (t = {regret_t:.2}), \
         informative-pull diff (ids - ts) = {pull_mean:.2} (t = {pull_t:.2}), {:?}",
        started.elapsed()
    );
    assert!(
        regret_t > T_CRIT_49,
        "sparse IDS regret not significantly below sparse TS: mean diff {regret_mean:.2}, t = {regret_t:.2}"
    );
    assert!(
        pull_t > T_CRIT_49,
        "sparse IDS informative pulls not significantly above sparse TS: mean diff {pull_mean:.2}, t = {pull_t:.2}"
    );
    assert!(started.elapsed().as_secs() < 1800, "took {:?}", started.elapsed());
    println!("ACCEPTANCE 5 (hard-instance ordering): PASS");
}

#[test]
fn criterion_06_gaussian_action_ordering() {
    let started = std::time::Instant::now();
    let trials = 50;
    let n = 500;
    let early_round = (n as f64).powf(2.0 / 3.0).ceil() as usize; // 63
    let estc_explore = 25;
    let estc_penalty =
        2.0f64.sqrt() * ((20.0f64).ln() / estc_explore as f64).sqrt() * 0.5;
    let config = ExperimentConfig {
        experiment: ExperimentKind::GaussianActions,
        d: 20,
        s: 2,
        k: Some(200),
        n,
        n_trials: trials,
        policies: vec![sparse_policy(true, None)],
        noise_variance: 2.0,
        m: 1000,
        epsilon: None,
        base_seed: 2024,
        output_dir: PathBuf::from("/tmp/unused"),
    };
    let estc = PolicyConfig::Estc {
        estc_explore_rounds: Some(estc_explore),
        estc_lasso_penalty: Some(estc_penalty),
    };
    let lin_ts = PolicyConfig::LinTs { ridge: None };

    struct TrialOutcome {
        ids_final: f64,
        lints_final: f64,
        ucb_final: Vec<f64>,
        ucb_early: Vec<f64>,
        estc_final: f64,
        estc_early: f64,
    }

    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ids = run_trial_with_actions(&config, t, &config.policies[0]).unwrap().0;
            let lints = run_trial_with_actions(&config, t, &lin_ts).unwrap().0;
            let mut ucb_final = Vec::new();
            let mut ucb_early = Vec::new();
            for alpha in UCB_ALPHA_GRID {
                let trace = run_trial_with_actions(
                    &config,
                    t,
                    &PolicyConfig::LinUcb { ucb_alpha: Some(alpha), ridge: None },
                )
                .unwrap()
                .0;
                ucb_final.push(trace.final_cumulative());
                ucb_early.push(trace.cumulative[early_round - 1]);
            }
            let estc_trace = run_trial_with_actions(&config, t, &estc).unwrap().0;
            TrialOutcome {
                ids_final: ids.final_cumulative(),
                lints_final: lints.final_cumulative(),
                ucb_final,
                ucb_early,
                estc_final: estc_trace.final_cumulative(),
                estc_early: estc_trace.cumulative[early_round - 1],
            }
        })
        .collect();

    // best-per-instance LinUCB: the grid member with the lowest mean final regret
    let mut best_alpha = 0;
    let mut best_mean = f64::INFINITY;
    for a in 0..UCB_ALPHA_GRID.len() {
        let mean = outcomes.iter().map(|o| o.ucb_final[a]).sum::<f64>() / trials as f64;
        if mean < best_mean {
            best_mean = mean;
            best_alpha = a;
        }
    }

    let ucb_minus_ids: Vec<f64> =
        outcomes.iter().map(|o| o.ucb_final[best_alpha] - o.ids_final).collect();
    let lints_minus_ids: Vec<f64> =
        outcomes.iter().map(|o| o.lints_final - o.ids_final).collect();
    let early_ucb_minus_estc: Vec<f64> =
        outcomes.iter().map(|o| o.ucb_early[best_alpha] - o.estc_early).collect();
    let final_estc_minus_ucb: Vec<f64> =
        outcomes.iter().map(|o| o.estc_final - o.ucb_final[best_alpha]).collect();

    let (m1, t1) = paired_t(&ucb_minus_ids);
    let (m2, t2) = paired_t(&lints_minus_ids);
    let (m3, t3) = paired_t(&early_ucb_minus_estc);
    let (m4, t4) = paired_t(&final_estc_minus_ucb);
    println!(
        "criterion 6 (alpha = {}): lin_ucb - ids = {m1:.1} (t = {t1:.2}); \
         lin_ts - ids = {m2:.1} (t = {t2:.2}); early lin_ucb - estc = {m3:.1} (t = {t3:.2}); \
         final estc - lin_ucb = {m4:.1} (t = {t4:.2}); {:?}",
        UCB_ALPHA_GRID[best_alpha],
        started.elapsed()
    );
    assert!(
        t1 > T_CRIT_49,
        "sparse IDS final regret not significantly below LinUCB: mean diff {m1:.2}, t = {t1:.2}"
    );
    assert!(
        t2 > T_CRIT_49,
        "sparse IDS final regret not significantly below LinTS: mean diff {m2:.2}, t = {t2:.2}"
    );
    assert!(
        m3 > 0.0,
        "ESTC does not beat LinUCB early (t <= n^(2/3)): mean diff {m3:.2}"
    );
    assert!(m4 > 0.0, "ESTC does not lose to LinUCB by t = n: mean diff {m4:.2}");
    assert!(started.elapsed().as_secs() < 1800, "took {:?}", started.elapsed());
    println!("ACCEPTANCE 6 (gaussian action-set ordering): PASS");
}

#[test]
fn criterion_07_informative_set_construction() {
    for d in [8usize, 16] {
        let mut successes = 0;
        for seed in 0..100 {
            let mut r = rng(700 + d as u64 * 1000 + seed);
            if build_hard_instance_with(d, 2, 0.2, &HardInstanceConfig::default(), &mut r).is_ok()
            {
                successes += 1;
            }
        }
        assert!(successes >= 95, "d = {d}: only {successes}/100 seeds built the informative set");
        println!("criterion 7: d = {d}: {successes}/100 seeds passed");
    }
    // the eigenvalue check itself is the gate the builder uses
    let mut r = rng(701);
    let pts = sample_correlated_rows(300, 6, 0.0, &mut r).unwrap();
    let h = pts.transpose() * &pts / 300.0;
    let (passed, value) = restricted_eigenvalue_check(&h, 0.25).unwrap();
    assert!(passed && value > 0.25);
    println!("ACCEPTANCE 7 (informative-set construction): PASS");
}

#[test]
fn criterion_08_bound_branch_structure() {
    // 20-point grid: verify branch selection against direct inequality
    // evaluation
    let grid: Vec<(usize, usize, usize, usize, f64)> = vec![
        (100, 10, 2, 5, 0.5),
        (100, 10, 2, 1000, 0.5),
        (400, 20, 2, 50, 1.0),
        (400, 20, 2, 50, 1e6),
        (2500, 50, 5, 200, 1.0),
        (2500, 50, 5, 200, 1e-3),
        (10_000, 100, 10, 3, 1.0),
        (10_000, 100, 10, 1_000_000, 1.0),
        (500, 20, 2, 200, 1.0),
        (500, 20, 2, 200, 0.25),
        (50, 5, 2, 10, 2.0),
        (50, 5, 2, 10, 1e5),
        (1_000_000, 30, 3, 100, 1.0),
        (64, 8, 2, 64, 1.0),
        (64, 8, 2, 64, 1e4),
        (900, 12, 3, 7, 0.8),
        (900, 12, 3, 7_000, 0.8),
        (144, 12, 2, 40, 0.6),
        (4096, 16, 4, 500, 1.2),
        (25, 4, 2, 8, 1.0),
    ];
    assert_eq!(grid.len(), 20);
    for &(n, d, s, k, c_min) in &grid {
        let inputs = BoundInputs::new(n, d, s, k, c_min).unwrap();
        let log_k = (k as f64).ln();
        let entropy = 2.0 * s as f64 * ((d as f64) * (n as f64).sqrt() / s as f64).ln();
        let cap = delta_cap(&inputs);
        assert!((cap - log_k.min(entropy)).abs() < 1e-12);

        let sqrt_branch = (0.5 * n as f64 * d as f64 * cap).sqrt();
        let poor_branch = (s as f64).powf(2.0 / 3.0) * (n as f64).powf(2.0 / 3.0)
            * cap.powf(1.0 / 3.0)
            / (2.0 * c_min).powf(1.0 / 3.0);
        let exploratory = regret_bound(&inputs, BoundRegime::Exploratory);
        if poor_branch < sqrt_branch {
            assert!((exploratory - poor_branch).abs() < 1e-9, "poor branch should be active");
        } else {
            assert!((exploratory - sqrt_branch).abs() < 1e-9, "sqrt branch should be active");
        }
        assert!((regret_bound(&inputs, BoundRegime::Arbitrary) - sqrt_branch).abs() < 1e-9);
    }

    // with the metric constant pinned so C d sqrt(n) / s = e, the entropy
    // branch is active exactly when K >= d e^s (and d >= e^s)
    for (d, s, n) in [(8usize, 2usize, 100usize), (21, 3, 400), (56, 4, 900)] {
        let c = std::f64::consts::E * s as f64 / (d as f64 * (n as f64).sqrt());
        let k_large = (d as f64 * (s as f64).exp()).ceil() as usize;
        let inputs = BoundInputs::new(n, d, s, k_large, 1.0)
            .unwrap()
            .with_metric_constant(c);
        let cap = delta_cap(&inputs);
        assert!(
            (cap - 2.0 * s as f64).abs() < 1e-12,
            "entropy branch 2s should be active for K = {k_large} >= d e^s"
        );
    }
    println!("ACCEPTANCE 8 (bound calculators reproduce the branch structure): PASS");
}

#[test]
fn criterion_09_c_min_sanity() {
    let d = 4;
    let k = 1 << d;
    let mut cube = DMatrix::zeros(k, d);
    for i in 0..k {
        for j in 0..d {
            cube[(i, j)] = if i >> j & 1 == 1 { 1.0 } else { -1.0 };
        }
    }
    let cube = ActionSet::new(cube).unwrap();
    let est = c_min_estimate(&cube, 100).unwrap();
    assert!(est >= 1.0 - 1e-6, "hypercube estimate {est}");

    let pair = ActionSet::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
    let est = c_min_estimate(&pair, 300).unwrap();
    let mut grid_best = 0.0f64;
    for i in 0..=100_000 {
        let w = i as f64 / 100_000.0;
        grid_best = grid_best.max(w.min(1.0 - w));
    }
    assert!((est - grid_best).abs() <= 1e-3, "pair estimate {est} vs grid {grid_best}");
    println!("ACCEPTANCE 9 (exploratory-constant sanity): PASS");
}

#[test]
fn criterion_10_manifest_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let sparse = sparse_policy(true, None);
    let mut config = ExperimentConfig {
        experiment: ExperimentKind::HardInstance,
        d: 8,
        s: 2,
        k: None,
        n: 30,
        n_trials: 3,
        policies: vec![sparse, PolicyConfig::LinUcb { ucb_alpha: None, ridge: None }],
        noise_variance: 2.0,
        m: 100,
        epsilon: Some(0.2),
        base_seed: 99,
        output_dir: tmp.path().join("exp"),
    };
    config.validate().unwrap();

    run_experiment(&config).unwrap();
    let manifest = Manifest::load(&tmp.path().join("exp/manifest.json")).unwrap();
    let mut first: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    for name in ["regret.csv", "pulls.csv", "manifest.json"] {
        first.insert(name.into(), std::fs::read(tmp.path().join("exp").join(name)).unwrap());
    }
    std::fs::remove_dir_all(tmp.path().join("exp")).unwrap();

    // rerun purely from the manifest's embedded config
    run_experiment(&manifest.config).unwrap();
    for (name, bytes) in &first {
        let again = std::fs::read(tmp.path().join("exp").join(name)).unwrap();
        assert_eq!(&again, bytes, "{name} differs after manifest rerun");
    }

    // same check for the offline experiment
    let offline = ExperimentConfig {
        experiment: ExperimentKind::OfflineRegression,
        d: 6,
        s: 2,
        k: None,
        n: 40,
        n_trials: 1,
        policies: vec![PolicyConfig::Uniform],
        noise_variance: 2.0,
        m: 100,
        epsilon: None,
        base_seed: 4,
        output_dir: tmp.path().join("offline"),
    };
    run_offline_check(&offline).unwrap();
    let summary_a = std::fs::read(tmp.path().join("offline/summary.csv")).unwrap();
    let diag_a = std::fs::read(tmp.path().join("offline/diagnostics.csv")).unwrap();
    let manifest = Manifest::load(&tmp.path().join("offline/manifest.json")).unwrap();
    std::fs::remove_dir_all(tmp.path().join("offline")).unwrap();
    run_offline_check(&manifest.config).unwrap();
    assert_eq!(summary_a, std::fs::read(tmp.path().join("offline/summary.csv")).unwrap());
    assert_eq!(diag_a, std::fs::read(tmp.path().join("offline/diagnostics.csv")).unwrap());
    println!("ACCEPTANCE 10 (manifest reruns are byte-identical): PASS");
}
