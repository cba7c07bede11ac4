//! Error-curve experiments, bound ledgers and layout statistics.

pub mod config;
pub mod experiment;
pub mod layout;
pub mod ledger;
pub mod output;
pub mod testfn;

pub use config::{log_grid, ExperimentConfig, GraphFamily, MeasurePolicy, TestFunction, WeightKind};
pub use experiment::{
    build_instance, kernel_options, load_labels, mean_std, run_error_experiment, verified_kernel,
    CurveRow, ErrorCurve, ExcludedTrial, Fixed, Instance, TrialSeeds, ESTIMATORS,
};
pub use layout::{first_distinct, layout_statistics, random_subset_statistics, LayoutStats};
pub use ledger::{verify_bounds, BoundLedger, LedgerRow, Quantity};
pub use output::{config_header, curve_csv, curve_json, ledger_csv, ledger_json};
pub use testfn::{fiedler_vector, smooth_test_function};
