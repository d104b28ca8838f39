//! Correlated Gaussian action sets: sparse IDS against the non-sparse
//! baselines (LinUCB over its tuning grid, LinTS, vanilla IDS) and ESTC,
//! at reduced scale.

use std::path::PathBuf;

use sparse_ids::experiment::{run_experiment, ExperimentConfig, ExperimentKind, Manifest};
use sparse_ids::policies::PolicyConfig;

fn main() {
    let out = PathBuf::from("/tmp/sparse-ids-gaussian");
    let config = ExperimentConfig {
        experiment: ExperimentKind::GaussianActions,
        d: 20,
        s: 2,
        k: Some(100),
        n: 300,
        n_trials: 8,
        policies: vec![
            PolicyConfig::SparseIds {
                num_posterior_samples: None,
                warm_start: false,
                lambda0: None,
                lambda1: None,
                beta: None,
            },
            PolicyConfig::LinUcb { ucb_alpha: None, ridge: None },
            PolicyConfig::LinTs { ridge: None },
            PolicyConfig::VanillaIds { num_posterior_samples: None, ridge: None },
            PolicyConfig::Estc { estc_explore_rounds: None, estc_lasso_penalty: None },
            PolicyConfig::Uniform,
        ],
        noise_variance: 2.0,
        m: 500,
        epsilon: None,
        base_seed: 5,
        output_dir: out.clone(),
    };
    let started = std::time::Instant::now();
    run_experiment(&config).unwrap();
    println!("finished in {:.1?}", started.elapsed());

    let manifest = Manifest::load(&out.join("manifest.json")).unwrap();
    if let Some(alpha) = manifest.chosen_ucb_alphas.get("lin_ucb") {
        println!("lin_ucb tuned to alpha = {alpha}");
    }

    let regret = std::fs::read_to_string(out.join("regret.csv")).unwrap();
    println!("\nfinal mean cumulative regret ({} trials):", config.n_trials);
    let mut finals: Vec<(String, f64, f64)> = Vec::new();
    for line in regret.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells[0] == config.n.to_string() {
            finals.push((
                cells[1].to_string(),
                cells[2].parse().unwrap(),
                cells[3].parse().unwrap(),
            ));
        }
    }
    finals.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    for (policy, mean, stderr) in finals {
        println!("  {policy:<12} {mean:>8.1} +- {stderr:.1}");
    }
}
