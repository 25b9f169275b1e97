//! Evaluation metrics and the synthetic benchmark.

pub mod bench;
pub mod metrics;

pub use bench::{
    run_experiment, run_experiment1, run_experiment2, BenchmarkResult, CellResult, Experiment, ExperimentGrid,
    Method,
};
pub use metrics::{
    auc_roc, global_efficiency, knockout_delta_ge, normalized_entropy, sed_profile, spearman, SedProfile,
};
