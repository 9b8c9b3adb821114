use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::Norm;

/// Posterior error about one ground truth, on the standardized parameter
/// scale. `total^2` equals the sum of the squared per-parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmseBreakdown {
    pub per_param: [f64; 4],
    pub total: f64,
}

pub fn rmse(samples: &[[f64; 4]], truth: &[f64; 4], norms: &[Norm; 4]) -> Result<RmseBreakdown> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    if norms.iter().any(|n| !(n.sd > 0.0)) {
        return Err(Error::InvalidParam("parameter standard deviations must be positive".into()));
    }
    let k = samples.len() as f64;
    let mut sq = [0.0; 4];
    for s in samples {
        for j in 0..4 {
            let e = (truth[j] - s[j]) / norms[j].sd;
            sq[j] += e * e;
        }
    }
    let per_param = sq.map(|v| (v / k).sqrt());
    let total = (sq.iter().sum::<f64>() / k).sqrt();
    Ok(RmseBreakdown { per_param, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NORMS: [Norm; 4] = [
        Norm { mean: 0.1, sd: 0.2 },
        Norm { mean: 0.05, sd: 0.1 },
        Norm { mean: 0.2, sd: 0.25 },
        Norm { mean: 0.15, sd: 0.3 },
    ];

    #[test]
    fn exact_samples_have_zero_error() {
        let t = [0.3, 0.1, 0.4, 0.2];
        let r = rmse(&[t; 7], &t, &NORMS).unwrap();
        assert_eq!(r.per_param, [0.0; 4]);
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn constant_offset() {
        let t = [0.3, 0.1, 0.4, 0.2];
        let delta = 0.7;
        let mut s = t;
        s[1] += delta * NORMS[1].sd;
        let r = rmse(&[s; 5], &t, &NORMS).unwrap();
        assert!((r.per_param[1] - delta).abs() < 1e-12);
        assert_eq!([r.per_param[0], r.per_param[2], r.per_param[3]], [0.0; 3]);
        assert!((r.total - delta).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(rmse(&[], &[0.0; 4], &NORMS).is_err());
        let mut bad = NORMS;
        bad[2].sd = 0.0;
        assert!(rmse(&[[0.0; 4]], &[0.0; 4], &bad).is_err());
    }
}
