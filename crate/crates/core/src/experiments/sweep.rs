use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::mean_se;
use super::{rmse, RmseBreakdown};
use crate::error::{Error, Result};
use crate::inference::{
    build_reference_tables, regression_adjust, reject_sample, simulate_row, ModelConfig, Norm,
    ReferenceTable, Weighting,
};
use crate::netmodel::FREE_PARAM_NAMES;
use crate::rng::{Domain, StreamKey};
use crate::summaries::Design;

/// Parameter labels used in aggregates: the four free parameters and `total`.
pub const RMSE_PARAMS: [&str; 5] = ["rho", "sigma", "omega0", "omega1", "total"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub lags: Vec<u64>,
    pub include_one_wave: bool,
    pub truth_count: usize,
    pub table_count: usize,
    pub accept_fraction: f64,
    pub weighting: Weighting,
    pub model: ModelConfig,
    pub master_seed: u64,
}

impl SweepConfig {
    /// Desk-scale preset: n = 500, 2,000-row tables, 100 accepted rows,
    /// 20 ground truths.
    pub fn desk(master_seed: u64) -> Self {
        Self {
            lags: vec![0, 10, 25, 50, 100, 150],
            include_one_wave: true,
            truth_count: 20,
            table_count: 2_000,
            accept_fraction: 0.05,
            weighting: Weighting::Epanechnikov,
            model: ModelConfig { n: 500, ..Default::default() },
            master_seed,
        }
    }

    /// Full-scale preset: 10,000-row tables, top 1%, 500 ground truths,
    /// every lag from 0 to 150.
    pub fn full(master_seed: u64) -> Self {
        Self {
            lags: (0..=150).collect(),
            include_one_wave: true,
            truth_count: 500,
            table_count: 10_000,
            accept_fraction: 0.01,
            weighting: Weighting::Epanechnikov,
            model: ModelConfig::default(),
            master_seed,
        }
    }

    pub fn designs(&self) -> Vec<Design> {
        let mut d = Vec::new();
        if self.include_one_wave {
            d.push(Design::OneWave);
        }
        d.extend(self.lags.iter().map(|&lag| Design::TwoWave { lag }));
        d
    }

    pub fn validate(&self) -> Result<()> {
        let designs = self.designs();
        if designs.is_empty() {
            return Err(Error::InvalidParam("lag sweep needs at least one design".into()));
        }
        if self.truth_count < 1 {
            return Err(Error::InvalidParam("truth count must be at least 1".into()));
        }
        if !(self.accept_fraction > 0.0 && self.accept_fraction <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "accept fraction {} not in (0, 1]",
                self.accept_fraction
            )));
        }
        let dim = designs.iter().map(Design::dim).max().unwrap_or(4);
        let k = crate::inference::abc::accept_count(self.accept_fraction, self.table_count);
        if k < dim + 2 {
            return Err(Error::TooFewAccepted { needed: dim + 2, got: k });
        }
        self.model.validate()
    }
}

/// Row label of a sweep result: the unconditioned prior or an observation design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SweepDesign {
    Prior,
    Observed(Design),
}

impl SweepDesign {
    pub fn tag(&self) -> &'static str {
        match self {
            SweepDesign::Prior => "prior",
            SweepDesign::Observed(d) => d.tag(),
        }
    }

    pub fn lag(&self) -> Option<u64> {
        match self {
            SweepDesign::Prior => None,
            SweepDesign::Observed(d) => d.lag(),
        }
    }
}

impl fmt::Display for SweepDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepDesign::Prior => f.write_str("prior"),
            SweepDesign::Observed(d) => d.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmseRecord {
    pub design: SweepDesign,
    pub truth_index: usize,
    pub adjusted: bool,
    pub rmse: RmseBreakdown,
}

impl RmseRecord {
    fn value(&self, param: usize) -> f64 {
        if param < 4 {
            self.rmse.per_param[param]
        } else {
            self.rmse.total
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmseAggregate {
    pub design: SweepDesign,
    pub adjusted: bool,
    pub param: &'static str,
    pub mean: f64,
    pub se: f64,
    pub n_truths: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<RmseRecord>,
    pub aggregates: Vec<RmseAggregate>,
    pub param_norms: [Norm; 4],
}

impl SweepResult {
    pub fn aggregate(&self, design: SweepDesign, adjusted: bool, param: &str) -> Option<&RmseAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.design == design && a.adjusted == adjusted && a.param == param)
    }

    pub fn mean(&self, design: SweepDesign, adjusted: bool, param: &str) -> Option<f64> {
        self.aggregate(design, adjusted, param).map(|a| a.mean)
    }

    /// Mean RMSE against lag over the two-wave designs.
    pub fn lag_curve(&self, adjusted: bool, param: &str) -> Vec<(u64, f64)> {
        self.aggregates
            .iter()
            .filter(|a| a.adjusted == adjusted && a.param == param)
            .filter_map(|a| match a.design {
                SweepDesign::Observed(Design::TwoWave { lag }) => Some((lag, a.mean)),
                _ => None,
            })
            .collect()
    }
}

fn aggregate(records: &[RmseRecord]) -> Vec<RmseAggregate> {
    let mut keys: Vec<(SweepDesign, bool)> = records.iter().map(|r| (r.design, r.adjusted)).collect();
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for (design, adjusted) in keys {
        let group: Vec<&RmseRecord> = records
            .iter()
            .filter(|r| r.design == design && r.adjusted == adjusted)
            .collect();
        for (p, name) in RMSE_PARAMS.iter().enumerate() {
            let vals: Vec<f64> = group.iter().map(|r| r.value(p)).collect();
            let (mean, se) = mean_se(&vals);
            out.push(RmseAggregate {
                design,
                adjusted,
                param: name,
                mean,
                se,
                n_truths: vals.len(),
            });
        }
    }
    out
}

/// Posterior RMSE about prior-drawn ground truths for every design.
///
/// All reference tables share one set of simulations, so the standardizing
/// parameter norms are the same for every lag. For each ground truth and
/// design the sweep records the unadjusted and adjusted posterior RMSE; the
/// prior itself (every table row as a sample) is recorded as a baseline.
pub fn lag_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let designs = cfg.designs();
    let tables = build_reference_tables(&designs, cfg.table_count, &cfg.model, cfg.master_seed)?;
    let param_norms = tables[0].param_norms;

    let truths = (0..cfg.truth_count as u64)
        .into_par_iter()
        .map(|t| simulate_row(&designs, &cfg.model, StreamKey::new(cfg.master_seed, Domain::Truth, t)))
        .collect::<Result<Vec<_>>>()?;

    let items: Vec<(usize, usize)> = (0..designs.len())
        .flat_map(|d| (0..cfg.truth_count).map(move |t| (d, t)))
        .collect();
    let per_item = items
        .par_iter()
        .map(|&(d, t)| {
            let (params, observed) = &truths[t];
            posterior_records(&tables[d], &observed[d], params.free(), t, cfg, &param_norms)
        })
        .collect::<Result<Vec<_>>>()?;

    let prior_samples: Vec<[f64; 4]> = tables[0].rows.iter().map(|r| r.params).collect();
    let mut records = truths
        .iter()
        .enumerate()
        .map(|(t, (params, _))| {
            Ok(RmseRecord {
                design: SweepDesign::Prior,
                truth_index: t,
                adjusted: false,
                rmse: rmse(&prior_samples, &params.free(), &param_norms)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.extend(per_item.into_iter().flatten());
    records.sort_by(|a, b| {
        (a.design, a.adjusted, a.truth_index)
            .partial_cmp(&(b.design, b.adjusted, b.truth_index))
            .unwrap_or(Ordering::Equal)
    });
    let aggregates = aggregate(&records);
    Ok(SweepResult {
        records,
        aggregates,
        param_norms,
    })
}

fn posterior_records(
    table: &ReferenceTable,
    observed: &[f64],
    truth: [f64; 4],
    truth_index: usize,
    cfg: &SweepConfig,
    norms: &[Norm; 4],
) -> Result<Vec<RmseRecord>> {
    let design = SweepDesign::Observed(table.design);
    let post = reject_sample(table, observed, cfg.accept_fraction)?;
    let adj = regression_adjust(&post, &table.column_norms, cfg.weighting)?;
    Ok(vec![
        RmseRecord {
            design,
            truth_index,
            adjusted: false,
            rmse: rmse(&post.raw_samples(), &truth, norms)?,
        },
        RmseRecord {
            design,
            truth_index,
            adjusted: true,
            rmse: rmse(&adj.samples(), &truth, norms)?,
        },
    ])
}

/// Headered `design,lag,adjusted,param,rmse_mean,rmse_se,n_truths` CSV.
pub fn write_rmse_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["design", "lag", "adjusted", "param", "rmse_mean", "rmse_se", "n_truths"])?;
    for a in &result.aggregates {
        w.write_record([
            a.design.tag().to_string(),
            a.design.lag().map(|l| l.to_string()).unwrap_or_default(),
            a.adjusted.to_string(),
            a.param.to_string(),
            a.mean.to_string(),
            a.se.to_string(),
            a.n_truths.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const _: () = assert!(FREE_PARAM_NAMES.len() == 4);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::{ModelConfig, TableRow};

    fn tiny(lags: Vec<u64>) -> SweepConfig {
        SweepConfig {
            lags,
            include_one_wave: true,
            truth_count: 2,
            table_count: 40,
            accept_fraction: 0.25,
            weighting: Weighting::Epanechnikov,
            model: ModelConfig { n: 40, burn_in: 40, ..Default::default() },
            master_seed: 17,
        }
    }

    #[test]
    fn aggregate_shape() {
        let r = lag_sweep(&tiny(vec![0, 3])).unwrap();
        // prior + one-wave + two lags; prior only unadjusted
        assert_eq!(r.aggregates.len(), (1 + 2 * 3) * 5);
        assert_eq!(r.records.len(), 2 + 3 * 2 * 2);
        assert!(r.records.iter().all(|x| x.rmse.total >= 0.0));
        assert_eq!(r.lag_curve(true, "total").len(), 2);
        let mut buf = Vec::new();
        write_rmse_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("design,lag,adjusted,param,rmse_mean,rmse_se,n_truths\nprior,,false,rho,"));
    }

    #[test]
    fn full_lag_range_gives_151_curve_points() {
        let mut cfg = tiny((0..=150).collect());
        cfg.truth_count = 1;
        cfg.include_one_wave = false;
        cfg.model.n = 20;
        cfg.model.burn_in = 10;
        let r = lag_sweep(&cfg).unwrap();
        let curve = r.lag_curve(true, "total");
        assert_eq!(curve.len(), 151);
        assert!(curve.iter().enumerate().all(|(i, (lag, _))| *lag == i as u64));
    }

    #[test]
    fn self_match_has_zero_rmse() {
        let rows: Vec<TableRow> = (0..50)
            .map(|i| TableRow {
                index: i,
                params: [0.01 * i as f64 + 0.1, 0.2, 0.3, 0.4 - 0.005 * i as f64],
                summaries: vec![i as f64, (i * i) as f64, 0.5, 1.0 / (1.0 + i as f64)],
            })
            .collect();
        let table = ReferenceTable::from_rows(Design::OneWave, ModelConfig::default(), 0, rows).unwrap();
        let truth = table.rows[21].clone();
        let post = reject_sample(&table, &truth.summaries, 0.02).unwrap();
        assert_eq!(post.accepted.len(), 1);
        let r = rmse(&post.raw_samples(), &truth.params, &table.param_norms.map(|n| Norm { sd: n.sd.max(1e-3), ..n })).unwrap();
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn rejects_too_few_accepted() {
        let mut cfg = tiny(vec![5]);
        cfg.accept_fraction = 0.1;
        assert!(matches!(lag_sweep(&cfg), Err(Error::TooFewAccepted { .. })));
    }
}
