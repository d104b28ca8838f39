//! Anatomy of one sparse IDS round on the hard instance: posterior samples
//! in, per-action regret and variance estimates out, ratio minimization
//! last. Also demonstrates the selection-trace CSV.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_ids::env::{build_hard_instance, step, ActionLabel, HistoryRecord};
use sparse_ids::policies::{
    estimate_delta_v, ids_select, information_ratio, write_selection_trace, Policy,
    SparseIdsPolicy,
};
use sparse_ids::sampler::{sample_posterior, Dataset, SamplerSchedule, SpikeSlabPrior};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let instance = build_hard_instance(8, 2, 0.3, &mut rng).unwrap();
    let actions = instance.actions();
    let labels = actions.labels().unwrap();
    println!(
        "hard instance: {} actions ({} informative), optimum is action {} with value {:.2}",
        actions.num_actions(),
        labels.iter().filter(|l| **l == ActionLabel::Informative).count(),
        instance.optimal_action_index(),
        instance.optimal_value()
    );

    // simulate 40 rounds of history with a uniform policy
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..40 {
        let a = rand::Rng::gen_range(&mut rng, 0..actions.num_actions());
        rows.push(actions.action(a));
        ys.push(step(&instance, a, &mut rng).unwrap());
    }
    let data = Dataset::from_rows(&rows, &ys, actions.dim()).unwrap();

    let prior = SpikeSlabPrior::default_for(2, actions.dim(), instance.noise_variance()).unwrap();
    let schedule = SamplerSchedule::adaptive(&data, &prior, 500).unwrap();
    let samples = sample_posterior(&data, &prior, &schedule, &mut rng).unwrap();
    let summary = estimate_delta_v(&samples, actions).unwrap();

    println!("\nper-action estimates (top five by ratio):");
    let mut order: Vec<usize> = (0..actions.num_actions()).collect();
    order.sort_by(|&a, &b| {
        information_ratio(summary.delta_hat[a], summary.v_hat[a])
            .partial_cmp(&information_ratio(summary.delta_hat[b], summary.v_hat[b]))
            .unwrap()
    });
    println!("{:>6} {:>14} {:>10} {:>10} {:>10}", "action", "label", "delta", "v", "ratio");
    for &a in order.iter().take(5) {
        println!(
            "{:>6} {:>14} {:>10.4} {:>10.4} {:>10.4}",
            a,
            labels[a].as_str(),
            summary.delta_hat[a],
            summary.v_hat[a],
            information_ratio(summary.delta_hat[a], summary.v_hat[a])
        );
    }
    let chosen = ids_select(&summary, &mut rng);
    println!("selected action {chosen} ({})", labels[chosen].as_str());

    // the policy wrapper records one trace row per round
    let mut policy = SparseIdsPolicy::new(actions, prior, 300, false);
    for _ in 0..5 {
        let a = policy.select(&mut rng).unwrap();
        let reward = step(&instance, a, &mut rng).unwrap();
        policy.observe(&HistoryRecord { action_index: a, action: actions.action(a), reward });
    }
    let path = "/tmp/sparse-ids-trace.csv";
    let mut file = std::fs::File::create(path).unwrap();
    write_selection_trace(&mut file, policy.trace()).unwrap();
    println!("\nwrote a five-round selection trace ({path}):");
    print!("{}", std::fs::read_to_string(path).unwrap());
}
