// temporary calibration probe for the Gaussian action-set experiment
use std::path::PathBuf;

use sparse_ids::analysis::RegretTrace;
use sparse_ids::experiment::{run_trial, ExperimentConfig, ExperimentKind};
use sparse_ids::policies::{PolicyConfig, UCB_ALPHA_GRID};

fn paired_t(diffs: &[f64]) -> (f64, f64) {
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    (mean, mean / (sd / n.sqrt()))
}

fn main() {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let n: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let config = ExperimentConfig {
        experiment: ExperimentKind::GaussianActions,
        d: 20,
        s: 2,
        k: Some(200),
        n,
        n_trials: trials,
        policies: vec![PolicyConfig::Uniform],
        noise_variance: 2.0,
        m: 1000,
        epsilon: None,
        base_seed: 2024,
        output_dir: PathBuf::from("/tmp/gauss_probe"),
    };
    let lin_ts = PolicyConfig::LinTs { ridge: None };
    let ids_lambda0: Option<f64> = std::env::args().nth(4).and_then(|s| s.parse().ok());
    let ids = PolicyConfig::SparseIds {
        num_posterior_samples: None,
        warm_start: false,
        lambda0: ids_lambda0,
        lambda1: None,
        beta: None,
    };
    let penalty_scale: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let early_rounds = (n as f64).powf(2.0 / 3.0).ceil() as usize;
    let estc = PolicyConfig::Estc {
        estc_explore_rounds: None,
        estc_lasso_penalty: Some(penalty_scale * 2.0f64.sqrt() * ((20.0f64).ln() / early_rounds as f64).sqrt()),
    };

    let early_t = (n as f64).powf(2.0 / 3.0).ceil() as usize;

    let mut ids_final = Vec::new();
    let mut lints_final = Vec::new();
    let mut ucb_final = Vec::new();
    let mut ucb_early = Vec::new();
    let mut estc_final = Vec::new();
    let mut estc_early = Vec::new();

    for t in 0..trials {
        let start = std::time::Instant::now();
        let a: RegretTrace = run_trial(&config, t, &ids).unwrap();
        ids_final.push(a.final_cumulative());
        let b = run_trial(&config, t, &lin_ts).unwrap();
        lints_final.push(b.final_cumulative());

        // alpha grid: keep per-alpha curves, select best-final after the loop
        let mut per_alpha = Vec::new();
        for alpha in UCB_ALPHA_GRID {
            let c = run_trial(
                &config,
                t,
                &PolicyConfig::LinUcb { ucb_alpha: Some(alpha), ridge: None },
            )
            .unwrap();
            per_alpha.push((c.final_cumulative(), c.cumulative[early_t - 1]));
        }
        ucb_final.push(per_alpha.clone());

        let e = run_trial(&config, t, &estc).unwrap();
        estc_final.push(e.final_cumulative());
        estc_early.push(e.cumulative[early_t - 1]);
        ucb_early.push(per_alpha);
        println!(
            "trial {t}: ids={:.0} lin_ts={:.0} estc={:.0} ({:.1?})",
            ids_final[t], lints_final[t], estc_final[t], start.elapsed()
        );
    }

    // best alpha by mean final regret
    let mut best_alpha = 0;
    let mut best_mean = f64::INFINITY;
    for a in 0..UCB_ALPHA_GRID.len() {
        let mean = ucb_final.iter().map(|v| v[a].0).sum::<f64>() / trials as f64;
        println!("lin_ucb alpha={} mean final={:.1}", UCB_ALPHA_GRID[a], mean);
        if mean < best_mean {
            best_mean = mean;
            best_alpha = a;
        }
    }
    println!("chosen alpha = {}", UCB_ALPHA_GRID[best_alpha]);

    let ucb_f: Vec<f64> = ucb_final.iter().map(|v| v[best_alpha].0).collect();
    let ucb_e: Vec<f64> = ucb_early.iter().map(|v| v[best_alpha].1).collect();

    let means = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!(
        "final means: ids={:.1} lin_ts={:.1} lin_ucb={:.1} estc={:.1}",
        means(&ids_final),
        means(&lints_final),
        means(&ucb_f),
        means(&estc_final)
    );
    println!(
        "early (t={early_t}) means: estc={:.1} lin_ucb={:.1}",
        means(&estc_early),
        means(&ucb_e)
    );

    let d1: Vec<f64> = ucb_f.iter().zip(&ids_final).map(|(u, i)| u - i).collect();
    let d2: Vec<f64> = lints_final.iter().zip(&ids_final).map(|(l, i)| l - i).collect();
    let d3: Vec<f64> = ucb_e.iter().zip(&estc_early).map(|(u, e)| u - e).collect();
    let d4: Vec<f64> = estc_final.iter().zip(&ucb_f).map(|(e, u)| e - u).collect();
    let (m1, t1) = paired_t(&d1);
    let (m2, t2) = paired_t(&d2);
    let (m3, t3) = paired_t(&d3);
    let (m4, t4) = paired_t(&d4);
    println!("lin_ucb - ids (want > 0):        mean {m1:.1} t {t1:.2}");
    println!("lin_ts - ids (want > 0):         mean {m2:.1} t {t2:.2}");
    println!("early lin_ucb - estc (want > 0): mean {m3:.1} t {t3:.2}");
    println!("final estc - lin_ucb (want > 0): mean {m4:.1} t {t4:.2}");
}
