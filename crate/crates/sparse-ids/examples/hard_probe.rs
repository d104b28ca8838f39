// temporary calibration probe
use std::path::PathBuf;

use sparse_ids::experiment::{run_experiment, ExperimentConfig, ExperimentKind};
use sparse_ids::policies::PolicyConfig;

fn main() {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let n: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let m: usize = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let out = PathBuf::from("/tmp/hard_probe");
    let config = ExperimentConfig {
        experiment: ExperimentKind::HardInstance,
        d: 10,
        s: 2,
        k: None,
        n,
        n_trials: trials,
        policies: vec![
            PolicyConfig::SparseIds {
                num_posterior_samples: None,
                warm_start: false,
                lambda0: std::env::args().nth(5).and_then(|s| s.parse().ok()),
                lambda1: None,
                beta: None,
            },
            PolicyConfig::SparseTs {
                num_posterior_samples: None,
                warm_start: false,
                lambda0: std::env::args().nth(5).and_then(|s| s.parse().ok()),
                lambda1: None,
                beta: None,
            },
        ],
        noise_variance: 2.0,
        m,
        epsilon: Some(std::env::args().nth(4).and_then(|s| s.parse().ok()).unwrap_or(0.2)),
        base_seed: 2024,
        output_dir: out.clone(),
    };
    let start = std::time::Instant::now();
    run_experiment(&config).unwrap();
    println!("ran in {:?}", start.elapsed());

    let regret = std::fs::read_to_string(out.join("regret.csv")).unwrap();
    for line in regret.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells[0] == n.to_string().as_str() {
            println!("final: {} -> {} +- {}", cells[1], cells[2], cells[3]);
        }
    }
    // paired regret stats from raw traces
    use sparse_ids::experiment::run_trial;
    let mut rdiffs = Vec::new();
    for t in 0..trials {
        let a = run_trial(&config, t, &config.policies[0]).unwrap().final_cumulative();
        let b = run_trial(&config, t, &config.policies[1]).unwrap().final_cumulative();
        rdiffs.push(b - a);
    }
    let md = rdiffs.iter().sum::<f64>() / trials as f64;
    let sd = (rdiffs.iter().map(|d| (d - md) * (d - md)).sum::<f64>() / (trials as f64 - 1.0)).sqrt();
    println!("regret diff (ts - ids): mean {md:.2} sd {sd:.2} t {:.2}", md / (sd / (trials as f64).sqrt()));
    let pulls = std::fs::read_to_string(out.join("pulls.csv")).unwrap();
    let mut sums: std::collections::BTreeMap<String, (f64, usize)> = Default::default();
    for line in pulls.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let e = sums.entry(cells[1].to_string()).or_insert((0.0, 0));
        e.0 += cells[2].parse::<f64>().unwrap();
        e.1 += 1;
    }
    for (policy, (total, count)) in &sums {
        println!("mean informative pulls: {policy} -> {:.1}", total / *count as f64);
    }
    // paired stats on pulls
    let mut per: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for line in pulls.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        per.entry(cells[1].to_string()).or_default().push(cells[2].parse().unwrap());
    }
    let ids = &per["sparse_ids"];
    let ts = &per["sparse_ts"];
    let diffs: Vec<f64> = ids.iter().zip(ts).map(|(a, b)| a - b).collect();
    let md = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let sd = (diffs.iter().map(|d| (d - md) * (d - md)).sum::<f64>() / (diffs.len() as f64 - 1.0)).sqrt();
    println!("pulls diff (ids - ts): mean {md:.2} sd {sd:.2} t {:.2}", md / (sd / (diffs.len() as f64).sqrt()));
}
