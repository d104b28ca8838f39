// temporary calibration probe: does chain length change late-round p*(informative)?
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_ids::env::{build_hard_instance_with, step, ActionLabel, HardInstanceConfig};
use sparse_ids::policies::estimate_delta_v;
use sparse_ids::sampler::{sample_posterior, Dataset, SamplerSchedule, SpikeSlabPrior};

fn main() {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.9);
    let hard = HardInstanceConfig { noise_variance: 2.0, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let instance = build_hard_instance_with(10, 2, eps, &hard, &mut rng).unwrap();
    let labels = instance.actions().labels().unwrap().to_vec();
    let k = instance.num_actions();

    // synthetic 400-round history: mostly the optimal arm, some of everything
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    let mut play = |a: usize, times: usize, rng: &mut ChaCha8Rng| {
        for _ in 0..times {
            rows.push(instance.actions().action(a));
            ys.push(step(&instance, a, rng).unwrap());
        }
    };
    let opt = instance.optimal_action_index();
    play(opt, 250, &mut rng);
    for a in 0..k {
        if labels[a] == ActionLabel::Uninformative && a != opt {
            play(a, 6, &mut rng);
        }
    }
    let n_info = 40;
    let mut informative_played = 0;
    for a in 0..k {
        if labels[a] == ActionLabel::Informative && informative_played < n_info {
            play(a, 1, &mut rng);
            informative_played += 1;
        }
    }
    let d = instance.dim();
    let data = Dataset::from_rows(&rows, &ys, d).unwrap();
    let lambda0: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let base = SpikeSlabPrior::default_for(2, d, 2.0).unwrap();
    let prior = SpikeSlabPrior::new(lambda0, base.lambda1, base.beta, base.sigma2).unwrap();

    for (name, burn, thin) in [("default", 500usize, 10usize), ("long", 5000, 50)] {
        let schedule = SamplerSchedule::adaptive(&data, &prior, 1000)
            .unwrap()
            .with_burn_in(burn)
            .with_thinning(thin);
        let samples =
            sample_posterior(&data, &prior, &schedule, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let summary = estimate_delta_v(&samples, instance.actions()).unwrap();
        let p_info: f64 = (0..k)
            .filter(|&a| labels[a] == ActionLabel::Informative)
            .map(|a| summary.p_star[a])
            .sum();
        let p_opt = summary.p_star[opt];
        // posterior spread of the last coordinate and a null coordinate
        let m = samples.nrows() as f64;
        let stats = |j: usize| {
            let mean = samples.column(j).sum() / m;
            let var = samples.column(j).iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
            (mean, var.sqrt())
        };
        println!(
            "{name}: p*(informative) = {p_info:.4}, p*(optimal) = {p_opt:.3}, theta_d = {:.3}+-{:.3}, null = {:.3}+-{:.3}",
            stats(d - 1).0,
            stats(d - 1).1,
            stats(4).0,
            stats(4).1
        );
    }
    let _ = rng.gen::<u64>();
}
