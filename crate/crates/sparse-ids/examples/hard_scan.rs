// temporary calibration probe: single-pass paired stats, parallel over trials
use std::path::PathBuf;

use rayon::prelude::*;
use sparse_ids::analysis::informative_pull_histogram;
use sparse_ids::env::build_hard_instance_with;
use sparse_ids::env::HardInstanceConfig;
use sparse_ids::experiment::{run_trial_with_actions, trial_seed, ExperimentConfig, ExperimentKind};
use sparse_ids::policies::PolicyConfig;

fn paired(diffs: &[f64]) -> (f64, f64) {
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, mean / (sd / n.sqrt()))
}

fn main() {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let eps: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0.4);
    let lambda0: Option<f64> = std::env::args().nth(3).and_then(|s| s.parse().ok());
    let beta: Option<f64> = std::env::args().nth(4).and_then(|s| s.parse().ok());
    let base_seed: u64 = std::env::args().nth(5).and_then(|s| s.parse().ok()).unwrap_or(2024);

    let sparse = |ids: bool| {
        if ids {
            PolicyConfig::SparseIds {
                num_posterior_samples: None,
                warm_start: false,
                lambda0,
                lambda1: None,
                beta,
            }
        } else {
            PolicyConfig::SparseTs {
                num_posterior_samples: None,
                warm_start: false,
                lambda0,
                lambda1: None,
                beta,
            }
        }
    };
    let config = ExperimentConfig {
        experiment: ExperimentKind::HardInstance,
        d: 10,
        s: 2,
        k: None,
        n: 500,
        n_trials: trials,
        policies: vec![sparse(true), sparse(false)],
        noise_variance: 2.0,
        m: 1000,
        epsilon: Some(eps),
        base_seed,
        output_dir: PathBuf::from("/tmp/unused"),
    };

    let results: Vec<(f64, f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (ids_trace, ids_log) = run_trial_with_actions(&config, t, &sparse(true)).unwrap();
            let (ts_trace, ts_log) = run_trial_with_actions(&config, t, &sparse(false)).unwrap();
            let hard = HardInstanceConfig { noise_variance: 2.0, ..Default::default() };
            let rng = rand::SeedableRng::seed_from_u64(trial_seed(config.base_seed, t));
            let mut rng: rand_chacha::ChaCha8Rng = rng;
            rng.set_stream(0);
            let instance = build_hard_instance_with(10, 2, eps, &hard, &mut rng).unwrap();
            let ids_pulls = informative_pull_histogram(&ids_log, &instance).unwrap().informative;
            let ts_pulls = informative_pull_histogram(&ts_log, &instance).unwrap().informative;
            (
                ids_trace.final_cumulative(),
                ts_trace.final_cumulative(),
                ids_pulls as f64,
                ts_pulls as f64,
            )
        })
        .collect();

    let rdiff: Vec<f64> = results.iter().map(|r| r.1 - r.0).collect();
    let pdiff: Vec<f64> = results.iter().map(|r| r.2 - r.3).collect();
    let (rm, rt) = paired(&rdiff);
    let (pm, pt) = paired(&pdiff);
    let mean = |f: fn(&(f64, f64, f64, f64)) -> f64| {
        results.iter().map(f).sum::<f64>() / trials as f64
    };
    println!(
        "eps={eps} lambda0={lambda0:?} beta={beta:?} seed={base_seed}: regret ids={:.1} ts={:.1} | diff {rm:.1} t={rt:.2} ; pulls ids={:.1} ts={:.1} | diff {pm:.2} t={pt:.2}",
        mean(|r| r.0),
        mean(|r| r.1),
        mean(|r| r.2),
        mean(|r| r.3),
    );
}
