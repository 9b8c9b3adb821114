//! Simulation and approximate Bayesian inference for a discrete-time sexual
//! contact network with steady and casual partnerships.
//!
//! * [`netmodel`]: the network state machine and its event log.
//! * [`summaries`]: per-wave questionnaire summaries and design vectors.
//! * [`inference`]: prior, reference tables, rejection and adjustment.
//! * [`experiments`]: RMSE, lag sweeps, mapping functions, loess.
//! * [`cli`]: the `netabc` command-line front end.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod inference;
pub mod netmodel;
pub mod rng;
pub mod summaries;

pub use error::{Error, Result};
