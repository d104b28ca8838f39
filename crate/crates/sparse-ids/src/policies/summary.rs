//! Posterior-sample summaries and the variance-based selection rules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::env::ActionSet;
use crate::error::{Error, Result};

/// Variances at or below this floor count as zero when forming ratios.
pub const V_FLOOR: f64 = 1e-12;

/// Per-action statistics estimated from posterior samples.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    /// Estimated instant regret per action, clamped below at 0.
    pub delta_hat: DVector<f64>,
    /// Estimated variance of the conditional mean reward per action.
    pub v_hat: DVector<f64>,
    /// Estimated probability that each action is optimal; sums to 1.
    pub p_star: DVector<f64>,
    /// Posterior mean over all samples.
    pub mu_hat: DVector<f64>,
    /// Conditional posterior means given each action is optimal; rows for
    /// actions with p_star = 0 are unused and left at zero.
    pub mu_conditional: DMatrix<f64>,
}

/// Groups posterior samples by their argmax action and turns the group
/// structure into estimated regrets, conditional-mean variances and
/// optimal-action probabilities.
pub fn estimate_delta_v(samples: &DMatrix<f64>, actions: &ActionSet) -> Result<PosteriorSummary> {
    let m = samples.nrows();
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one posterior sample".into()));
    }
    if samples.ncols() != actions.dim() {
        return Err(Error::InvalidArgument(format!(
            "samples have dimension {}, actions have {}",
            samples.ncols(),
            actions.dim()
        )));
    }
    let k = actions.num_actions();
    let d = actions.dim();

    // scores[m, a] = <a, theta^m>
    let scores = samples * actions.features().transpose();
    let mut counts = vec![0usize; k];
    let mut group_sum = DMatrix::<f64>::zeros(k, d);
    for mi in 0..m {
        let row = scores.row(mi);
        let mut best = 0;
        for a in 1..k {
            if row[a] > row[best] {
                best = a;
            }
        }
        counts[best] += 1;
        for j in 0..d {
            group_sum[(best, j)] += samples[(mi, j)];
        }
    }

    let mu_hat = samples.row_sum().transpose() / m as f64;
    let p_star = DVector::from_fn(k, |a, _| counts[a] as f64 / m as f64);
    let mut mu_conditional = DMatrix::zeros(k, d);
    for a in 0..k {
        if counts[a] > 0 {
            for j in 0..d {
                mu_conditional[(a, j)] = group_sum[(a, j)] / counts[a] as f64;
            }
        }
    }

    // S = sum_a p*_a (mu^a - mu)(mu^a - mu)^T
    let mut spread = DMatrix::zeros(d, d);
    for a in 0..k {
        if counts[a] > 0 {
            let diff = mu_conditional.row(a).transpose() - &mu_hat;
            spread += p_star[a] * &diff * diff.transpose();
        }
    }

    // rho = sum_a p*_a <a, mu^a>, the estimated mean optimal value
    let mut rho = 0.0;
    for a in 0..k {
        if counts[a] > 0 {
            rho += p_star[a] * actions.features().row(a).transpose().dot(&mu_conditional.row(a).transpose());
        }
    }

    let mut delta_hat = DVector::zeros(k);
    let mut v_hat = DVector::zeros(k);
    for a in 0..k {
        let feat = actions.features().row(a).transpose();
        delta_hat[a] = (rho - feat.dot(&mu_hat)).max(0.0);
        v_hat[a] = (feat.transpose() * &spread * &feat)[(0, 0)].max(0.0);
    }

    Ok(PosteriorSummary { delta_hat, v_hat, p_star, mu_hat, mu_conditional })
}

/// The per-action ratio delta^2 / v with the degenerate-case rules:
/// delta = 0 scores 0 outright, and a positive delta over a collapsed
/// variance scores infinitely bad.
pub fn information_ratio(delta: f64, v: f64) -> f64 {
    if delta == 0.0 {
        0.0
    } else if v <= V_FLOOR {
        f64::INFINITY
    } else {
        delta * delta / v
    }
}

/// Argmin of [`information_ratio`] over actions; ties break uniformly at
/// random. When every ratio is infinite the action with the smallest delta
/// wins instead.
pub fn ids_select(summary: &PosteriorSummary, rng: &mut (impl Rng + ?Sized)) -> usize {
    let k = summary.delta_hat.len();
    let mut ratios = vec![0.0f64; k];
    let mut all_infinite = true;
    for a in 0..k {
        let ratio = information_ratio(summary.delta_hat[a], summary.v_hat[a]);
        if ratio.is_finite() {
            all_infinite = false;
        }
        ratios[a] = ratio;
    }
    if all_infinite {
        return argmin_uniform(summary.delta_hat.as_slice(), rng);
    }
    argmin_uniform(&ratios, rng)
}

/// Thompson selection: one sample drawn uniformly from the matrix rows,
/// then the argmax action for it (lowest index on ties).
pub fn sparse_ts_select(
    samples: &DMatrix<f64>,
    actions: &ActionSet,
    rng: &mut (impl Rng + ?Sized),
) -> Result<usize> {
    let m = samples.nrows();
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one posterior sample".into()));
    }
    let pick = rng.gen_range(0..m);
    let theta = samples.row(pick).transpose();
    let means = actions.reward_means(&theta);
    Ok(crate::env::argmax(means.as_slice()).0)
}

fn argmin_uniform(values: &[f64], rng: &mut (impl Rng + ?Sized)) -> usize {
    let mut best = values[0];
    let mut ties = vec![0usize];
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < best {
            best = v;
            ties.clear();
            ties.push(i);
        } else if v == best {
            ties.push(i);
        }
    }
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.gen_range(0..ties.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn two_axis_actions() -> ActionSet {
        ActionSet::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap()
    }

    #[test]
    fn degenerate_posterior_has_zero_variance() {
        let actions = two_axis_actions();
        let samples = DMatrix::from_row_slice(3, 2, &[0.7, 0.2, 0.7, 0.2, 0.7, 0.2]);
        let s = estimate_delta_v(&samples, &actions).unwrap();
        assert_eq!(s.v_hat, DVector::zeros(2));
        // argmax action is a1; Delta(a1) = 0, Delta(a2) = 0.7 - 0.2
        assert_eq!(s.delta_hat[0], 0.0);
        assert_relative_eq!(s.delta_hat[1], 0.5, epsilon = 1e-15);
        assert_eq!(s.p_star[0], 1.0);
    }

    #[test]
    fn hand_computed_two_sample_case() {
        let actions = two_axis_actions();
        let samples = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let s = estimate_delta_v(&samples, &actions).unwrap();
        assert_eq!(s.p_star, DVector::from_vec(vec![0.5, 0.5]));
        assert_eq!(s.mu_hat, DVector::from_vec(vec![0.5, 0.5]));
        assert_eq!(s.mu_conditional.row(0).transpose(), DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(s.mu_conditional.row(1).transpose(), DVector::from_vec(vec![0.0, 1.0]));
        assert_relative_eq!(s.delta_hat[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.delta_hat[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.v_hat[0], 0.25, epsilon = 1e-15);
        assert_relative_eq!(s.v_hat[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn p_star_is_a_distribution() {
        let mut r = rng(42);
        for _ in 0..50 {
            let m = r.gen_range(1..30);
            let k = r.gen_range(2..8);
            let d = r.gen_range(2..6);
            let samples = DMatrix::from_fn(m, d, |_, _| r.gen::<f64>() * 2.0 - 1.0);
            let feats = DMatrix::from_fn(k, d, |_, _| r.gen::<f64>() * 2.0 - 1.0);
            let actions = ActionSet::new(feats).unwrap();
            let s = estimate_delta_v(&samples, &actions).unwrap();
            assert!((s.p_star.sum() - 1.0).abs() < 1e-9);
            assert!(s.p_star.iter().all(|p| *p >= 0.0));
            assert!(s.v_hat.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn certain_optimum_has_zero_delta() {
        let actions = two_axis_actions();
        // every sample prefers action 0
        let samples = DMatrix::from_row_slice(4, 2, &[0.9, 0.1, 0.8, 0.3, 1.0, 0.0, 0.7, 0.2]);
        let s = estimate_delta_v(&samples, &actions).unwrap();
        assert_eq!(s.p_star[0], 1.0);
        assert_eq!(s.delta_hat[0], 0.0);
    }

    #[test]
    fn rejects_empty_sample_matrix() {
        let actions = two_axis_actions();
        let samples = DMatrix::<f64>::zeros(0, 2);
        assert!(estimate_delta_v(&samples, &actions).is_err());
    }

    #[test]
    fn ids_zero_delta_wins() {
        let s = PosteriorSummary {
            delta_hat: DVector::from_vec(vec![0.0, 1.0]),
            v_hat: DVector::from_vec(vec![0.0, 5.0]),
            p_star: DVector::from_vec(vec![1.0, 0.0]),
            mu_hat: DVector::zeros(2),
            mu_conditional: DMatrix::zeros(2, 2),
        };
        assert_eq!(ids_select(&s, &mut rng(0)), 0);
    }

    #[test]
    fn ids_ratio_arithmetic() {
        let s = PosteriorSummary {
            delta_hat: DVector::from_vec(vec![0.2, 0.4]),
            v_hat: DVector::from_vec(vec![0.01, 0.16]),
            p_star: DVector::from_vec(vec![0.5, 0.5]),
            mu_hat: DVector::zeros(2),
            mu_conditional: DMatrix::zeros(2, 2),
        };
        // ratios (4, 1)
        assert_eq!(ids_select(&s, &mut rng(0)), 1);
    }

    #[test]
    fn ids_collapsed_posterior_falls_back_to_min_delta() {
        let s = PosteriorSummary {
            delta_hat: DVector::from_vec(vec![0.3, 0.1]),
            v_hat: DVector::from_vec(vec![0.0, 0.0]),
            p_star: DVector::from_vec(vec![0.5, 0.5]),
            mu_hat: DVector::zeros(2),
            mu_conditional: DMatrix::zeros(2, 2),
        };
        assert_eq!(ids_select(&s, &mut rng(0)), 1);
    }

    #[test]
    fn ids_invariant_under_ratio_preserving_rescaling() {
        let mut r = rng(9);
        for trial in 0..100u64 {
            let k = 5;
            let delta = DVector::from_fn(k, |_, _| r.gen::<f64>());
            let v = DVector::from_fn(k, |_, _| r.gen::<f64>() + 0.01);
            let base = PosteriorSummary {
                delta_hat: delta.clone(),
                v_hat: v.clone(),
                p_star: DVector::from_element(k, 1.0 / k as f64),
                mu_hat: DVector::zeros(2),
                mu_conditional: DMatrix::zeros(k, 2),
            };
            let c = 3.7;
            let scaled = PosteriorSummary {
                delta_hat: delta * c,
                v_hat: v * (c * c),
                ..base.clone()
            };
            let pick_a = ids_select(&base, &mut rng(trial));
            let pick_b = ids_select(&scaled, &mut rng(trial));
            assert_eq!(pick_a, pick_b);
        }
    }

    #[test]
    fn ts_single_sample_is_greedy() {
        let actions = two_axis_actions();
        let samples = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        for seed in 0..10 {
            assert_eq!(sparse_ts_select(&samples, &actions, &mut rng(seed)).unwrap(), 0);
        }
    }

    #[test]
    fn ts_identical_samples_are_rng_independent() {
        let actions = two_axis_actions();
        let samples = DMatrix::from_fn(5, 2, |_, j| if j == 0 { 0.1 } else { 0.9 });
        for seed in 0..10 {
            assert_eq!(sparse_ts_select(&samples, &actions, &mut rng(seed)).unwrap(), 1);
        }
    }
}
