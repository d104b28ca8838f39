//! The informative/uninformative hard instance: sparse IDS against sparse
//! TS at reduced scale, reporting final regret and how often each policy
//! paid for informative actions.
//!
//! The full-scale run lives in `configs/hard_instance.json`; this example
//! shrinks the trial count so it finishes in about a minute.

use std::path::PathBuf;

use sparse_ids::experiment::{run_experiment, ExperimentConfig, ExperimentKind};
use sparse_ids::policies::PolicyConfig;

fn main() {
    let out = PathBuf::from("/tmp/sparse-ids-hard");
    let sparse_prior = |ids: bool| {
        if ids {
            PolicyConfig::SparseIds {
                num_posterior_samples: None,
                warm_start: false,
                lambda0: Some(0.02),
                lambda1: None,
                beta: None,
            }
        } else {
            PolicyConfig::SparseTs {
                num_posterior_samples: None,
                warm_start: false,
                lambda0: Some(0.02),
                lambda1: None,
                beta: None,
            }
        }
    };
    let config = ExperimentConfig {
        experiment: ExperimentKind::HardInstance,
        d: 10,
        s: 2,
        k: None,
        n: 300,
        n_trials: 8,
        policies: vec![sparse_prior(true), sparse_prior(false)],
        noise_variance: 2.0,
        m: 500,
        epsilon: Some(0.2),
        base_seed: 11,
        output_dir: out.clone(),
    };
    let started = std::time::Instant::now();
    let outputs = run_experiment(&config).unwrap();
    println!("finished {} trials per policy in {:.1?}", config.n_trials, started.elapsed());
    for f in &outputs.files {
        println!("wrote {}", f.display());
    }

    let regret = std::fs::read_to_string(out.join("regret.csv")).unwrap();
    println!("\nfinal mean cumulative regret:");
    for line in regret.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells[0] == config.n.to_string() {
            println!(
                "  {:<12} {:>8.1} +- {:.1}",
                cells[1],
                cells[2].parse::<f64>().unwrap(),
                cells[3].parse::<f64>().unwrap()
            );
        }
    }

    let pulls = std::fs::read_to_string(out.join("pulls.csv")).unwrap();
    let mut sums: std::collections::BTreeMap<&str, (f64, usize)> = Default::default();
    for line in pulls.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let entry = sums.entry(cells[1]).or_default();
        entry.0 += cells[2].parse::<f64>().unwrap();
        entry.1 += 1;
    }
    println!("\nmean informative pulls over the horizon:");
    for (policy, (total, count)) in sums {
        println!("  {:<12} {:>8.1}", policy, total / count as f64);
    }
}
