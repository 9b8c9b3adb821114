use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Norm, ReferenceTable};
use crate::error::{Error, Result};

/// Euclidean distance between two summary vectors after standardizing each
/// component by `norms`. Components with zero spread carry no information
/// and are skipped.
pub fn distance(a: &[f64], b: &[f64], norms: &[Norm]) -> Result<f64> {
    if a.len() != norms.len() || b.len() != norms.len() {
        return Err(Error::DesignMismatch {
            expected: norms.len(),
            got: if a.len() != norms.len() { a.len() } else { b.len() },
        });
    }
    Ok(sq_distance(a, b, norms).sqrt())
}

fn sq_distance(a: &[f64], b: &[f64], norms: &[Norm]) -> f64 {
    a.iter()
        .zip(b)
        .zip(norms)
        .filter(|(_, n)| n.sd > 0.0)
        .map(|((x, y), n)| {
            let d = (x - y) / n.sd;
            d * d
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accepted {
    pub index: u64,
    pub params: [f64; 4],
    pub summaries: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub observed: Vec<f64>,
    /// Sorted by ascending distance, ties by simulation index.
    pub accepted: Vec<Accepted>,
    /// Regression-adjusted parameters, aligned with `accepted`.
    pub adjusted: Option<Vec<[f64; 4]>>,
    pub accept_fraction: f64,
}

impl Posterior {
    pub fn raw_samples(&self) -> Vec<[f64; 4]> {
        self.accepted.iter().map(|a| a.params).collect()
    }

    /// Adjusted samples when present, raw ones otherwise.
    pub fn samples(&self) -> Vec<[f64; 4]> {
        self.adjusted.clone().unwrap_or_else(|| self.raw_samples())
    }
}

/// Number of rows kept for a fraction of a table. A tiny slack absorbs
/// representation error such as `0.01 * 10000 = 100.00000000000001`.
pub(crate) fn accept_count(fraction: f64, rows: usize) -> usize {
    let k = (fraction * rows as f64 - 1e-9).ceil() as usize;
    k.clamp(1, rows)
}

/// Keeps the `ceil(accept_fraction * rows)` rows closest to `observed`.
pub fn reject_sample(table: &ReferenceTable, observed: &[f64], accept_fraction: f64) -> Result<Posterior> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if !(accept_fraction > 0.0 && accept_fraction <= 1.0) {
        return Err(Error::InvalidParam(format!(
            "accept fraction {accept_fraction} not in (0, 1]"
        )));
    }
    if observed.len() != table.design.dim() {
        return Err(Error::DesignMismatch {
            expected: table.design.dim(),
            got: observed.len(),
        });
    }
    let dropped = table.column_norms.iter().filter(|n| n.sd == 0.0).count();
    if dropped > 0 {
        log::warn!("{dropped} constant summary column(s) excluded from the distance");
    }

    let mut scored: Vec<(f64, usize)> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (sq_distance(&r.summaries, observed, &table.column_norms), i))
        .collect();
    let k = accept_count(accept_fraction, scored.len());
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_distance);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_distance);

    let accepted = scored
        .into_iter()
        .map(|(sq, i)| {
            let r = &table.rows[i];
            Accepted {
                index: r.index,
                params: r.params,
                summaries: r.summaries.clone(),
                distance: sq.sqrt(),
            }
        })
        .collect();
    Ok(Posterior {
        observed: observed.to_vec(),
        accepted,
        adjusted: None,
        accept_fraction,
    })
}

/// Headered `sim_index,distance,rho,...,adj_omega1` CSV; the `adj_*`
/// columns are empty when no adjustment was applied.
pub fn write_posterior_csv<W: Write>(posterior: &Posterior, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "sim_index", "distance", "rho", "sigma", "omega0", "omega1", "adj_rho", "adj_sigma",
        "adj_omega0", "adj_omega1",
    ])?;
    for (i, a) in posterior.accepted.iter().enumerate() {
        let mut rec = vec![a.index.to_string(), a.distance.to_string()];
        rec.extend(a.params.iter().map(f64::to_string));
        match &posterior.adjusted {
            Some(adj) => rec.extend(adj[i].iter().map(f64::to_string)),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
