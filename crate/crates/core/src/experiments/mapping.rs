use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::median;
use crate::error::{Error, Result};
use crate::inference::{sample_prior, ModelConfig};
use crate::netmodel::{simulate, ParamSet, FREE_PARAM_NAMES};
use crate::rng::{Domain, StreamKey};
use crate::summaries::{Design, LogIndex, SummaryVector};

/// How the parameters that are not being swept are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingMode {
    FixedOthers,
    PriorOthers,
}

impl fmt::Display for MappingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MappingMode::FixedOthers => "fixed-others",
            MappingMode::PriorOthers => "prior-others",
        })
    }
}

impl FromStr for MappingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-others" | "fixed" => Ok(MappingMode::FixedOthers),
            "prior-others" | "prior" => Ok(MappingMode::PriorOthers),
            _ => Err(Error::Format(format!("unknown mapping mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingConfig {
    pub param: String,
    pub grid: Vec<f64>,
    pub mode: MappingMode,
    pub runs_per_value: usize,
    /// Values of the parameters held fixed in [`MappingMode::FixedOthers`].
    pub base: ParamSet,
    pub model: ModelConfig,
    pub master_seed: u64,
}

impl MappingConfig {
    /// `0.05, 0.10, ..., 1.00`.
    pub fn default_grid() -> Vec<f64> {
        (1..=20).map(|i| i as f64 / 20.0).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !FREE_PARAM_NAMES.contains(&self.param.as_str()) {
            return Err(Error::InvalidParam(format!("cannot sweep '{}'", self.param)));
        }
        if self.grid.is_empty() || self.grid.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
            return Err(Error::InvalidParam("grid values must lie in (0, 1]".into()));
        }
        if self.runs_per_value < 1 {
            return Err(Error::InvalidParam("runs per value must be at least 1".into()));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingRun {
    pub value: f64,
    pub run: usize,
    pub summary: SummaryVector,
}

/// One summary statistic at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingRow {
    pub param: String,
    pub value: f64,
    /// 1 to 4.
    pub summary_index: usize,
    pub runs: Vec<f64>,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingResult {
    pub param: String,
    pub runs: Vec<MappingRun>,
    pub rows: Vec<MappingRow>,
}

impl MappingResult {
    /// `(grid value, median)` for summary `s` (1 to 4).
    pub fn medians(&self, s: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.summary_index == s)
            .map(|r| (r.value, r.median))
            .collect()
    }
}

/// Summaries of one wave after burn-in for every `(grid value, run)`.
pub fn mapping_sweep(cfg: &MappingConfig) -> Result<MappingResult> {
    cfg.validate()?;
    let runs = cfg.runs_per_value;
    let jobs: Vec<(usize, usize)> = (0..cfg.grid.len()).flat_map(|g| (0..runs).map(move |r| (g, r))).collect();
    let results = jobs
        .par_iter()
        .map(|&(g, r)| {
            let key = StreamKey::new(cfg.master_seed, Domain::Mapping, (g * runs + r) as u64);
            let mut rng = key.rng();
            let mut params = match cfg.mode {
                MappingMode::FixedOthers => cfg.base,
                MappingMode::PriorOthers => sample_prior(&cfg.model.prior, cfg.model.mu, cfg.model.n, &mut rng),
            };
            params.mu = cfg.model.mu;
            params.n = cfg.model.n;
            *params.free_mut(&cfg.param).expect("validated parameter name") = cfg.grid[g];
            let traj = simulate(&params, cfg.model.burn_in, cfg.model.window, &mut rng)?;
            let dv = LogIndex::new(&traj.log).design_summaries(Design::OneWave, cfg.model.window)?;
            Ok(MappingRun {
                value: cfg.grid[g],
                run: r,
                summary: dv.waves[0],
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (g, &value) in cfg.grid.iter().enumerate() {
        let block = &results[g * runs..(g + 1) * runs];
        for s in 1..=4 {
            let vals: Vec<f64> = block.iter().map(|m| m.summary.values()[s - 1]).collect();
            rows.push(MappingRow {
                param: cfg.param.clone(),
                value,
                summary_index: s,
                median: median(&vals),
                runs: vals,
            });
        }
    }
    Ok(MappingResult {
        param: cfg.param.clone(),
        runs: results,
        rows,
    })
}

/// Headered `param,value,run,s1,s2,s3,s4` CSV, one line per simulation.
pub fn write_mapping_csv<W: Write>(result: &MappingResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["param", "value", "run", "s1", "s2", "s3", "s4"])?;
    for m in &result.runs {
        let mut rec = vec![result.param.clone(), m.value.to_string(), m.run.to_string()];
        rec.extend(m.summary.values().iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
