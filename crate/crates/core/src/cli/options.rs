use std::path::PathBuf;

use clap::{ArgAction, Args};
use serde::{Deserialize, Serialize};

/// Every setting a subcommand can take. Each one is optional at this layer;
/// values come from flags, then the config file, then built-in defaults.
///
/// The config file is TOML: flat `key = value` lines using the long flag
/// names with `-` replaced by `_`, optionally nested under a `[config]`
/// table (which is how run sidecars store them).
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Config file; flags override its values.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output directory (default: $NETABC_OUT or ./netabc-out).
    #[arg(long, global = true)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    #[serde(skip_serializing)]
    pub threads: Option<usize>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Population size.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    /// Recall window of one wave, in iterations.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,

    /// Prior bounds on 1/rho as `lo,hi`.
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_inv_rho: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_inv_sigma: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_inv_omega0: Option<Vec<f64>>,
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior_inv_omega1: Option<Vec<f64>>,

    /// Recorded iterations after burn-in (simulate).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<u64>,
    /// First iteration of the edge export (simulate).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<u64>,
    /// Last iteration of the edge export (simulate).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<u64>,

    /// Stored trajectory to summarize (summarize).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,

    /// `one-wave` or `two-wave`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<String>,
    /// Iterations between the two waves.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lag: Option<u64>,

    /// Reference-table rows.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Reference-table CSV; its metadata is read from the `.meta` file next to it (infer).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accept_fraction: Option<f64>,
    #[arg(long, global = true, action = ArgAction::Set)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjust: Option<bool>,
    /// `epanechnikov` or `uniform`.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighting: Option<String>,
    /// Observed design vector as comma-separated values (infer).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<Vec<f64>>,
    /// Seed of the simulated ground truth when no observation is given (infer).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_seed: Option<u64>,

    /// `desk` or `full` (lag-sweep).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lags: Option<Vec<u64>>,
    #[arg(long, global = true, action = ArgAction::Set)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_wave: Option<bool>,
    /// Number of ground truths (lag-sweep).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truths: Option<usize>,

    /// Swept parameter (mapping).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    /// `fixed-others` or `prior-others` (mapping).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Simulations per grid value (mapping).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,

    /// Points CSV with `x` and `y` columns (loess).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Loess span in (0, 1].
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loess_span: Option<f64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl Options {
    /// Fills every unset field from `lower`.
    pub fn or(mut self, lower: Options) -> Options {
        overlay!(self, lower;
            config, out, threads, seed, rho, sigma, omega0, omega1, mu, n, burn_in, window,
            prior_inv_rho, prior_inv_sigma, prior_inv_omega0, prior_inv_omega1,
            span, from, to, trajectory, design, lag, count, table, accept_fraction, adjust,
            weighting, observed, truth_seed, preset, lags, one_wave, truths, param, grid, mode,
            runs, input, loess_span,
        );
        self
    }

    /// Parses a config file body. Keys may sit at top level or under `[config]`.
    pub fn from_toml(text: &str) -> Result<Options, String> {
        let value: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
        let table = match value.get("config") {
            Some(toml::Value::Table(t)) => t.clone(),
            _ => value,
        };
        table.try_into().map_err(|e: toml::de::Error| e.to_string())
    }
}
