//! Rejection ABC over a simulated reference table, with local-linear
//! regression adjustment of the accepted parameters.

pub(crate) mod abc;
mod adjust;
mod prior;
mod table;

pub use abc::{distance, reject_sample, write_posterior_csv, Accepted, Posterior};
pub use adjust::{regression_adjust, Weighting};
pub use prior::{sample_prior, InverseRange, PriorSpec};
pub use table::{
    build_reference_table, build_reference_tables, simulate_row, ModelConfig, Norm,
    ReferenceTable, TableMeta, TableRow,
};
