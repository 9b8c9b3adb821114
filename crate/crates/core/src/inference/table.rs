use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_prior, PriorSpec};
use crate::error::{Error, Result};
use crate::netmodel::{simulate, ParamSet, FREE_PARAM_NAMES};
use crate::rng::{Domain, StreamKey};
use crate::summaries::{Design, LogIndex, DEFAULT_WINDOW};

/// Everything besides the free parameters that a simulation needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub mu: f64,
    pub burn_in: u64,
    pub window: u64,
    pub prior: PriorSpec,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            mu: 0.0,
            burn_in: 1000,
            window: DEFAULT_WINDOW,
            prior: PriorSpec::default(),
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::PopulationTooSmall(self.n));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::InvalidParam(format!("mu = {} not in [0, 1]", self.mu)));
        }
        if self.window < 1 {
            return Err(Error::InvalidParam("window must be at least 1".into()));
        }
        self.prior.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norm {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub sd: f64,
}

impl Norm {
    /// Two-pass mean and sample standard deviation.
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Norm {
        let (sum, count) = values.clone().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        let mean = sum / count as f64;
        let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
        let sd = if count > 1 { (ss / (count - 1) as f64).sqrt() } else { 0.0 };
        Norm { mean, sd }
    }

    pub fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.sd
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub index: u64,
    /// `[rho, sigma, omega0, omega1]`.
    pub params: [f64; 4],
    pub summaries: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub design: Design,
    pub model: ModelConfig,
    pub master_seed: u64,
    pub rows: Vec<TableRow>,
    pub column_norms: Vec<Norm>,
    pub param_norms: [Norm; 4],
}

/// Sidecar metadata written next to a reference-table CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub design: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lag: Option<u64>,
    pub window: u64,
    pub n: usize,
    pub mu: f64,
    pub burn_in: u64,
    pub master_seed: u64,
    pub count: usize,
    pub prior_inv_rho: [f64; 2],
    pub prior_inv_sigma: [f64; 2],
    pub prior_inv_omega0: [f64; 2],
    pub prior_inv_omega1: [f64; 2],
    pub column_means: Vec<f64>,
    pub column_sds: Vec<f64>,
    pub param_means: Vec<f64>,
    pub param_sds: Vec<f64>,
}

impl ReferenceTable {
    /// Assembles a table and computes its normalization statistics.
    pub fn from_rows(design: Design, model: ModelConfig, master_seed: u64, rows: Vec<TableRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.index != i as u64 {
                return Err(Error::Format(format!("row {i} has simulation index {}", r.index)));
            }
            if r.summaries.len() != design.dim() {
                return Err(Error::DesignMismatch {
                    expected: design.dim(),
                    got: r.summaries.len(),
                });
            }
        }
        let column_norms: Vec<Norm> = (0..design.dim())
            .map(|j| Norm::of(rows.iter().map(move |r| r.summaries[j])))
            .collect();
        let param_norms = std::array::from_fn(|j| Norm::of(rows.iter().map(move |r| r.params[j])));
        for (name, n) in design.column_names().iter().zip(&column_norms) {
            if n.sd == 0.0 {
                log::warn!("summary column {name} is constant over the reference table and is ignored by the distance");
            }
        }
        Ok(Self {
            design,
            model,
            master_seed,
            rows,
            column_norms,
            param_norms,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn meta(&self) -> TableMeta {
        let p = self.model.prior;
        TableMeta {
            design: self.design.tag().into(),
            lag: self.design.lag(),
            window: self.model.window,
            n: self.model.n,
            mu: self.model.mu,
            burn_in: self.model.burn_in,
            master_seed: self.master_seed,
            count: self.rows.len(),
            prior_inv_rho: [p.rho.lo, p.rho.hi],
            prior_inv_sigma: [p.sigma.lo, p.sigma.hi],
            prior_inv_omega0: [p.omega0.lo, p.omega0.hi],
            prior_inv_omega1: [p.omega1.lo, p.omega1.hi],
            column_means: self.column_norms.iter().map(|n| n.mean).collect(),
            column_sds: self.column_norms.iter().map(|n| n.sd).collect(),
            param_means: self.param_norms.iter().map(|n| n.mean).collect(),
            param_sds: self.param_norms.iter().map(|n| n.sd).collect(),
        }
    }

    /// Headered `sim_index,rho,sigma,omega0,omega1,w1_s1,...` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = vec!["sim_index".to_string()];
        header.extend(FREE_PARAM_NAMES.iter().map(|s| s.to_string()));
        header.extend(self.design.column_names());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.index.to_string()];
            rec.extend(r.params.iter().map(f64::to_string));
            rec.extend(r.summaries.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_meta<W: Write>(&self, mut out: W) -> Result<()> {
        let body = toml::to_string(&self.meta()).map_err(|e| Error::Format(e.to_string()))?;
        out.write_all(b"# reference table metadata\n")?;
        out.write_all(body.as_bytes())?;
        Ok(())
    }

    /// Reads a table back from its CSV and sidecar, checking that the
    /// recomputed normalization matches the stored one.
    pub fn read<R1: Read, R2: Read>(csv_in: R1, mut meta_in: R2) -> Result<Self> {
        let mut text = String::new();
        meta_in.read_to_string(&mut text)?;
        let meta: TableMeta = toml::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
        let design = Design::from_parts(&meta.design, meta.lag)?;
        let model = ModelConfig {
            n: meta.n,
            mu: meta.mu,
            burn_in: meta.burn_in,
            window: meta.window,
            prior: PriorSpec {
                rho: super::InverseRange::new(meta.prior_inv_rho[0], meta.prior_inv_rho[1]),
                sigma: super::InverseRange::new(meta.prior_inv_sigma[0], meta.prior_inv_sigma[1]),
                omega0: super::InverseRange::new(meta.prior_inv_omega0[0], meta.prior_inv_omega0[1]),
                omega1: super::InverseRange::new(meta.prior_inv_omega1[0], meta.prior_inv_omega1[1]),
            },
        };
        let mut reader = csv::Reader::from_reader(csv_in);
        let expected_cols = 5 + design.dim();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            if rec.len() != expected_cols {
                return Err(Error::DesignMismatch {
                    expected: expected_cols,
                    got: rec.len(),
                });
            }
            let num = |i: usize| -> Result<f64> {
                rec[i]
                    .parse()
                    .map_err(|_| Error::Format(format!("bad number '{}'", &rec[i])))
            };
            let index = rec[0]
                .parse()
                .map_err(|_| Error::Format(format!("bad sim_index '{}'", &rec[0])))?;
            let params = [num(1)?, num(2)?, num(3)?, num(4)?];
            let summaries = (5..expected_cols).map(num).collect::<Result<Vec<_>>>()?;
            rows.push(TableRow { index, params, summaries });
        }
        let table = ReferenceTable::from_rows(design, model, meta.master_seed, rows)?;
        if table.meta() != meta {
            return Err(Error::Format("reference table does not match its metadata".into()));
        }
        Ok(table)
    }
}

/// Simulates reference row `index`: a prior draw followed by one trajectory,
/// summarized under every design in `designs`.
pub fn simulate_row(
    designs: &[Design],
    model: &ModelConfig,
    key: StreamKey,
) -> Result<(ParamSet, Vec<Vec<f64>>)> {
    let span = designs
        .iter()
        .map(|d| d.required_span(model.window))
        .max()
        .ok_or_else(|| Error::InvalidParam("no designs".into()))?;
    let mut rng = key.rng();
    let params = sample_prior(&model.prior, model.mu, model.n, &mut rng);
    let traj = simulate(&params, model.burn_in, span, &mut rng)?;
    let index = LogIndex::new(&traj.log);
    let summaries = designs
        .iter()
        .map(|&d| index.design_summaries(d, model.window).map(|v| v.values()))
        .collect::<Result<Vec<_>>>()?;
    Ok((params, summaries))
}

/// Builds one table per design from a shared set of simulations.
///
/// Row `i` of every table comes from the same prior draw and trajectory, so
/// each table is identical to what [`build_reference_table`] produces for
/// that design alone.
pub fn build_reference_tables(
    designs: &[Design],
    count: usize,
    model: &ModelConfig,
    master_seed: u64,
) -> Result<Vec<ReferenceTable>> {
    if count < 2 {
        return Err(Error::InvalidParam(format!("table count must be at least 2, got {count}")));
    }
    model.validate()?;
    let sims = (0..count as u64)
        .into_par_iter()
        .map(|i| simulate_row(designs, model, StreamKey::new(master_seed, Domain::Reference, i)))
        .collect::<Result<Vec<_>>>()?;
    designs
        .iter()
        .enumerate()
        .map(|(d, &design)| {
            let rows = sims
                .iter()
                .enumerate()
                .map(|(i, (params, summaries))| TableRow {
                    index: i as u64,
                    params: params.free(),
                    summaries: summaries[d].clone(),
                })
                .collect();
            ReferenceTable::from_rows(design, *model, master_seed, rows)
        })
        .collect()
}

pub fn build_reference_table(
    design: Design,
    count: usize,
    model: &ModelConfig,
    master_seed: u64,
) -> Result<ReferenceTable> {
    let mut tables = build_reference_tables(&[design], count, model, master_seed)?;
    Ok(tables.remove(0))
}
