// temporary calibration probe
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_ids::env::sample_correlated_rows;
use sparse_ids::sampler::{sample_posterior, Dataset, SamplerSchedule, SpikeSlabPrior};

fn main() {
    let d = 10;
    let n = 100;
    let sigma2 = 2.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = sample_correlated_rows(n, d, 0.6, &mut rng).unwrap();
    let mut truth = DVector::zeros(d);
    truth[0] = 3.0;
    truth[1] = 2.0;
    let noise = DVector::from_fn(n, |_, _| {
        rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal)
    });
    let y = &x * &truth + noise * sigma2.sqrt();
    let data = Dataset::new(x, y).unwrap();
    let prior = SpikeSlabPrior::default_for(3, d, sigma2).unwrap();
    let m = 1000;

    // literal power-law schedule
    let eta0 = 1e-3 / (d as f64).sqrt();
    let literal = SamplerSchedule::new(
        move |k| eta0 * (1.0 + k as f64).powf(-0.55),
        |k| (1.0 + k as f64).powf(-0.75),
        10,
        m,
        500,
    )
    .unwrap();
    let adaptive = SamplerSchedule::adaptive(&data, &prior, m).unwrap();

    for (name, schedule) in [("literal", literal), ("adaptive", adaptive)] {
        let start = std::time::Instant::now();
        let samples = sample_posterior(&data, &prior, &schedule, &mut ChaCha8Rng::seed_from_u64(2));
        match samples {
            Ok(s) => {
                let mm = s.nrows() as f64;
                let means: Vec<f64> = (0..d).map(|j| s.column(j).sum() / mm).collect();
                println!(
                    "{name}: eta(0)={:.2e} eta(end)={:.2e} means[0..4]={:.3?} max|null|={:.3} ({:?})",
                    schedule.eta(0),
                    schedule.eta(schedule.total_iterations() - 1),
                    &means[0..4],
                    means[2..].iter().fold(0.0f64, |a, b| a.max(b.abs())),
                    start.elapsed()
                );
            }
            Err(e) => println!("{name}: error {e}"),
        }
    }
}
