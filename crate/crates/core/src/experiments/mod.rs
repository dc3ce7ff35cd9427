//! Experiment harness: configuration, sweeps, figure datasets, the `t1`
//! optimizer and cross-method comparisons.

pub mod compare;
pub mod config;
pub mod figures;
pub mod io;
pub mod optimize;
pub mod sweep;

pub use compare::{compare_methods, CompareSpec, Comparison, ComparisonReport};
pub use config::{ConfigOverrides, ExperimentConfig, RectennaConfig, SweepSection, SweptParameter, TargetSpec};
pub use figures::{build_figure, reproduce_figure, FigureDataset, FigureId, FigureOptions};
pub use io::{read_csv, write_csv, write_dataset, write_json};
pub use optimize::{find_optimal_t1, T1Optimum};
pub use sweep::{evaluate, run_sweep, with_workers, Row, RowError, SweepResult, SweepSpec};
