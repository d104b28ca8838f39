//! Spike-and-slab posterior sampling on a small sparse regression, with a
//! conjugate sanity check: setting beta = 1 turns the prior into a pure
//! Gaussian slab, so the chain must reproduce the closed-form ridge
//! posterior.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sparse_ids::sampler::{sample_posterior, Dataset, SamplerSchedule, SpikeSlabPrior};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 6;
    let n = 60;
    let sigma2 = 1.0f64;

    let x = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut truth = DVector::zeros(d);
    truth[0] = 1.2;
    truth[2] = -0.7;
    let y = &x * &truth
        + DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)) * sigma2.sqrt();
    let data = Dataset::new(x.clone(), y.clone()).unwrap();

    // sparse prior: spike scale 0.05, slab variance sigma^2, beta = 2s/d
    let prior = SpikeSlabPrior::default_for(2, d, sigma2).unwrap();
    let schedule = SamplerSchedule::adaptive(&data, &prior, 2000).unwrap();
    let samples = sample_posterior(&data, &prior, &schedule, &mut rng).unwrap();

    println!("sparse spike-and-slab posterior (truth = {:?}):", truth.as_slice());
    let m = samples.nrows() as f64;
    for j in 0..d {
        let mean = samples.column(j).sum() / m;
        let sd = (samples.column(j).iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m).sqrt();
        println!("  theta[{j}] = {mean:>7.3} +- {sd:.3}");
    }

    // conjugate check: beta = 1 means a plain Gaussian prior N(0, sigma^2 lambda1)
    let slab_only = SpikeSlabPrior::new(0.05, 1.0, 1.0, sigma2).unwrap();
    let schedule = SamplerSchedule::adaptive(&data, &slab_only, 4000).unwrap();
    let samples = sample_posterior(&data, &slab_only, &schedule, &mut rng).unwrap();

    let precision =
        x.transpose() * &x / sigma2 + DMatrix::identity(d, d) / (sigma2 * slab_only.lambda1);
    let cov = precision.try_inverse().unwrap();
    let ridge_mean = &cov * (x.transpose() * &y) / sigma2;

    println!("\nconjugate check (beta = 1) against the ridge posterior:");
    let m = samples.nrows() as f64;
    let mut worst: f64 = 0.0;
    for j in 0..d {
        let mean = samples.column(j).sum() / m;
        worst = worst.max((mean - ridge_mean[j]).abs());
        println!("  sampled {mean:>7.3}  closed form {:>7.3}", ridge_mean[j]);
    }
    println!("largest mean deviation: {worst:.4}");
}
