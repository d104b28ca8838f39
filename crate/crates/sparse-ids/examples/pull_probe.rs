// temporary calibration probe: per-phase informative-pull rates
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_ids::env::{build_hard_instance_with, step, ActionLabel, HardInstanceConfig, HistoryRecord};
use sparse_ids::policies::{Policy, SparseIdsPolicy, SparseTsPolicy};
use sparse_ids::sampler::SpikeSlabPrior;

fn main() {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let n: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let eps: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let m: usize = std::env::args().nth(4).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let bins = 10;
    let mut ids_bins = vec![0usize; bins];
    let mut ts_bins = vec![0usize; bins];

    for trial in 0..trials {
        let hard = HardInstanceConfig { noise_variance: 2.0, ..Default::default() };
        let mut inst_rng = ChaCha8Rng::seed_from_u64(900 + trial as u64);
        let instance = build_hard_instance_with(10, 2, eps, &hard, &mut inst_rng).unwrap();
        let labels = instance.actions().labels().unwrap().to_vec();
        let lambda0: f64 = std::env::args().nth(5).and_then(|s| s.parse().ok()).unwrap_or(0.05);
        let base = SpikeSlabPrior::default_for(2, 10, 2.0).unwrap();
        let prior = SpikeSlabPrior::new(lambda0, base.lambda1, base.beta, base.sigma2).unwrap();

        for which in 0..2 {
            let mut policy: Box<dyn Policy> = if which == 0 {
                Box::new(SparseIdsPolicy::new(instance.actions(), prior, m, false))
            } else {
                Box::new(SparseTsPolicy::new(instance.actions(), prior, m, false))
            };
            let mut policy_rng = ChaCha8Rng::seed_from_u64(7000 + trial as u64);
            let mut noise_rng = ChaCha8Rng::seed_from_u64(8000 + trial as u64);
            for t in 0..n {
                let a = policy.select(&mut policy_rng).unwrap();
                let reward = step(&instance, a, &mut noise_rng).unwrap();
                policy.observe(&HistoryRecord {
                    action_index: a,
                    action: instance.actions().action(a),
                    reward,
                });
                if labels[a] == ActionLabel::Informative {
                    let bin = t * bins / n;
                    if which == 0 {
                        ids_bins[bin] += 1;
                    } else {
                        ts_bins[bin] += 1;
                    }
                }
            }
        }
    }
    println!("per-{}-round informative pulls over {trials} trials (eps={eps}):", n / bins);
    println!("ids: {ids_bins:?} total {}", ids_bins.iter().sum::<usize>());
    println!("ts:  {ts_bins:?} total {}", ts_bins.iter().sum::<usize>());
}
