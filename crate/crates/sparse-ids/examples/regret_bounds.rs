//! Closed-form regret-bound reference values across regimes, plus the
//! bound-curve CSV the plotting pipeline consumes.

use sparse_ids::analysis::{delta_cap, regret_bound, BoundInputs, BoundRegime};
use sparse_ids::experiment::write_bound_curves;

fn main() {
    println!(
        "{:>8} {:>6} {:>4} {:>6} {:>8} {:>12} {:>14} {:>14}",
        "n", "d", "s", "K", "c_min", "cap", "arbitrary", "exploratory"
    );
    for (n, d, s, k, c_min) in [
        (500, 20, 2, 200, 1.0),
        (500, 100, 10, 200, 1.0),
        (5_000, 20, 2, 200, 1.0),
        (5_000, 20, 2, 200, 0.25),
        (50_000, 100, 10, 1_000_000, 1.0),
    ] {
        let inputs = BoundInputs::new(n, d, s, k, c_min).unwrap();
        println!(
            "{:>8} {:>6} {:>4} {:>6} {:>8.2} {:>12.3} {:>14.1} {:>14.1}",
            n,
            d,
            s,
            k,
            c_min,
            delta_cap(&inputs),
            regret_bound(&inputs, BoundRegime::Arbitrary),
            regret_bound(&inputs, BoundRegime::Exploratory),
        );
    }

    // the data-poor / data-rich switch: the n^(2/3) branch binds for short
    // horizons, the sqrt branch for long ones
    let inputs = BoundInputs::new(100_000, 50, 3, 500, 1.0).unwrap();
    let mut crossover = None;
    for t in 1..=inputs.n {
        let point = BoundInputs { n: t, ..inputs };
        let sqrt_branch = regret_bound(&point, BoundRegime::Arbitrary);
        let both = regret_bound(&point, BoundRegime::Exploratory);
        if crossover.is_none() && (both - sqrt_branch).abs() < 1e-9 {
            crossover = Some(t);
        }
    }
    println!(
        "\nd = 50, s = 3, K = 500: the sqrt branch takes over at n = {}",
        crossover.unwrap_or(0)
    );

    let path = "/tmp/sparse-ids-bounds.csv";
    let mut file = std::fs::File::create(path).unwrap();
    write_bound_curves(&mut file, &BoundInputs::new(500, 20, 2, 200, 1.0).unwrap()).unwrap();
    println!("wrote per-round curves to {path}");
}
