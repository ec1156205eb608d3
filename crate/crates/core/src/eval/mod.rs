//! Error metrics, published comparison tables and the inference timing benchmark.

mod baselines;
mod metrics;
mod tables;
mod timing;

pub use baselines::{baseline, baselines, BaselineEntry, ALLEN_CAHN_METHODS, BASELINES_CSV, NWS_METHODS};
pub use metrics::{
    absolute_error_grid, l2_norm, linf_norm, MetricsReport, Predictor, ERRORS_HEADER, NORMS_HEADER,
};
pub use tables::{
    allen_cahn_table_xs, comparison_table, ComparisonRow, ComparisonTable, ALLEN_CAHN_TABLE_TS,
    NWS_TABLE_TS, NWS_TABLE_XS,
};
pub use timing::{default_counts, linear_fit, timing_benchmark, LinearFit, TimingRecord, TIMING_HEADER};
