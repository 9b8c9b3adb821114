use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Norm, Posterior};
use crate::error::{Error, Result};

/// Kernel applied to accepted rows when fitting the local regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// `1 - (d / d_max)^2`.
    #[default]
    Epanechnikov,
    Uniform,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Epanechnikov => "epanechnikov",
            Weighting::Uniform => "uniform",
        })
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epanechnikov" => Ok(Weighting::Epanechnikov),
            "uniform" => Ok(Weighting::Uniform),
            _ => Err(Error::Format(format!("unknown weighting '{s}'"))),
        }
    }
}

fn weights(distances: &[f64], weighting: Weighting) -> Vec<f64> {
    let d_max = distances.iter().copied().fold(0.0, f64::max);
    match weighting {
        Weighting::Uniform => vec![1.0; distances.len()],
        Weighting::Epanechnikov if d_max == 0.0 => vec![1.0; distances.len()],
        Weighting::Epanechnikov => distances
            .iter()
            .map(|d| {
                let u = d / d_max;
                1.0 - u * u
            })
            .collect(),
    }
}

/// Local-linear regression adjustment of the accepted parameters.
///
/// Each parameter is regressed on the standardized summary offsets
/// `z_i = (s_i - s_obs) / sd` by weighted least squares with an intercept,
/// and each sample is moved to `theta_i - beta' z_i`, then clamped to
/// `[0, 1]`. The least-squares solve is rank-revealing, so collinear
/// summaries (for example the duplicated blocks of a lag-0 design) get a
/// minimum-norm slope instead of failing. If every weight is zero the
/// unadjusted samples are returned.
pub fn regression_adjust(posterior: &Posterior, norms: &[Norm], weighting: Weighting) -> Result<Posterior> {
    let active: Vec<usize> = (0..norms.len()).filter(|&j| norms[j].sd > 0.0).collect();
    let k = posterior.accepted.len();
    let p = active.len();
    if k < p + 2 {
        return Err(Error::TooFewAccepted { needed: p + 2, got: k });
    }
    if posterior.observed.len() != norms.len() {
        return Err(Error::DesignMismatch {
            expected: norms.len(),
            got: posterior.observed.len(),
        });
    }

    let distances: Vec<f64> = posterior.accepted.iter().map(|a| a.distance).collect();
    let w = weights(&distances, weighting);

    let offsets = DMatrix::from_fn(k, p, |i, c| {
        let j = active[c];
        (posterior.accepted[i].summaries[j] - posterior.observed[j]) / norms[j].sd
    });
    let design = DMatrix::from_fn(k, p + 1, |i, c| {
        let x = if c == 0 { 1.0 } else { offsets[(i, c - 1)] };
        w[i].sqrt() * x
    });
    let targets = DMatrix::from_fn(k, 4, |i, j| w[i].sqrt() * posterior.accepted[i].params[j]);

    let mut out = posterior.clone();
    let svd = design.svd(true, true);
    let s_max = svd.singular_values.max();
    if !(s_max > 0.0 && s_max.is_finite()) {
        log::warn!("regression adjustment skipped: weighted design matrix is degenerate");
        out.adjusted = Some(posterior.raw_samples());
        return Ok(out);
    }
    let tol = s_max * (k.max(p + 1) as f64) * f64::EPSILON;
    let rank = svd.rank(tol);
    if rank < p + 1 {
        log::debug!("regression adjustment design has rank {rank} < {}", p + 1);
    }
    let coef = svd
        .solve(&targets, tol)
        .map_err(|e| Error::Format(format!("least squares failed: {e}")))?;

    let adjusted = (0..k)
        .map(|i| {
            std::array::from_fn(|j| {
                let shift: f64 = (0..p).map(|c| coef[(c + 1, j)] * offsets[(i, c)]).sum();
                (posterior.accepted[i].params[j] - shift).clamp(0.0, 1.0)
            })
        })
        .collect();
    out.adjusted = Some(adjusted);
    Ok(out)
}
