//! Experiment harness: key distributions, algorithm runs, CSV rows.

pub mod experiment;
pub mod keygen;

pub use experiment::{default_iterations, run_experiment, Algo, ExperimentConfig, MetricsRow};
pub use keygen::{Dist, DistParams, KeyGen};
