//! Sparse linear bandit simulation and algorithms.
//!
//! The library covers the full loop of a sparse linear bandit study:
//!
//! - [`env`] builds action sets and bandit instances (hard
//!   informative/uninformative instances, correlated Gaussian action sets)
//!   and simulates the Gaussian reward channel.
//! - [`sampler`] draws approximate posterior samples under a spike-and-slab
//!   Gaussian-Laplace prior via adaptive-prior Langevin updates interleaved
//!   with stochastic-approximation updates of the inclusion probabilities.
//! - [`policies`] implements sparse information-directed sampling, sparse
//!   Thompson sampling, and the LinUCB / LinTS / vanilla IDS / ESTC /
//!   uniform baselines behind one `Policy` interface.
//! - [`analysis`] does regret accounting, the exploratory-constant
//!   (Frank-Wolfe) estimate, and closed-form regret-bound reference curves.
//! - [`experiment`] is a config-driven harness running seeded parallel
//!   trials and writing CSV outputs plus a reproducibility manifest.
//!
//! Each major capability has a runnable example under `examples/`:
//!
//! ```text
//! cargo run --release --example posterior_sampling
//! cargo run --release --example offline_regression
//! cargo run --release --example ids_round
//! cargo run --release --example hard_instance
//! cargo run --release --example gaussian_actions
//! cargo run --release --example regret_bounds
//! cargo run --release --example exploratory_constant
//! ```
//!
//! The `sparse-ids` binary wraps the same harness behind `run`,
//! `offline-check` and `bounds` subcommands.

pub mod analysis;
pub mod env;
pub mod error;
pub mod experiment;
pub mod policies;
pub mod sampler;

pub use error::{Error, Result};
