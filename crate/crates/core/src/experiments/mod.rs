//! Experiment harness: posterior RMSE, lag sweeps, mapping functions and
//! loess smoothing of the resulting curves.

mod loess;
mod mapping;
mod rmse;
pub mod stats;
mod sweep;

pub use loess::{loess_fit, write_loess_csv, LoessCurve, LOESS_INTERVAL_METHOD};
pub use mapping::{mapping_sweep, write_mapping_csv, MappingConfig, MappingMode, MappingResult, MappingRow, MappingRun};
pub use rmse::{rmse, RmseBreakdown};
pub use sweep::{lag_sweep, write_rmse_csv, RmseAggregate, RmseRecord, SweepConfig, SweepDesign, SweepResult};
