//! IO, file formats, instance generation, and the benchmark harness around
//! [`linksched_core`].
//!
//! The library half of the `linksched` binary: JSON/CSV schemas, seeded
//! random instance generation, the greedy and weight-class baselines, the
//! conflict-scale binary search, and the Monte Carlo experiment runner.

pub mod baselines;
pub mod experiment;
pub mod formats;
pub mod gamma;
pub mod instances;

pub mod cli;

pub use baselines::{greedy_feasibility_heuristic, weight_class_baseline};
pub use experiment::{rows_to_csv, run_experiment, Algorithm, ExperimentConfig, ResultRow};
pub use gamma::{binary_search_gamma, GammaSearchError, GammaSearchOutcome, SearchAlgorithm};
pub use instances::{gen_random_instance, GenConfig};
