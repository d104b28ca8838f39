//! Frank-Wolfe estimation of the exploratory constant C_min(A) on action
//! sets with known answers.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_ids::analysis::c_min_estimate;
use sparse_ids::env::{build_gaussian_action_set, ActionSet};

fn main() {
    // full hypercube: the uniform design gives the identity second moment
    let d = 4;
    let k = 1 << d;
    let mut cube = DMatrix::zeros(k, d);
    for i in 0..k {
        for j in 0..d {
            cube[(i, j)] = if i >> j & 1 == 1 { 1.0 } else { -1.0 };
        }
    }
    let cube = ActionSet::new(cube).unwrap();
    println!("hypercube d=4:        C_min >= {:.6} (exact 1)", c_min_estimate(&cube, 100).unwrap());

    // two orthonormal actions: the best design splits evenly, C_min = 1/2
    let pair = ActionSet::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
    println!("orthonormal pair:     C_min >= {:.6} (exact 0.5)", c_min_estimate(&pair, 200).unwrap());

    // correlated Gaussian actions: no closed form; watch the estimate grow
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gauss = build_gaussian_action_set(50, 6, 0.6, &mut rng).unwrap();
    for iterations in [1, 5, 20, 100, 500] {
        println!(
            "gaussian K=50, d=6:   C_min >= {:.6} after {iterations} iterations",
            c_min_estimate(&gauss, iterations).unwrap()
        );
    }

    // rank-deficient: fewer actions than dimensions means C_min = 0
    let thin = ActionSet::new(DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
    println!("rank-deficient set:   C_min  = {:.6}", c_min_estimate(&thin, 10).unwrap());
}
