use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Description of the interval method, recorded alongside loess output.
pub const LOESS_INTERVAL_METHOD: &str = "pointwise normal approximation: fit +/- 1.96 * sigma_hat * ||l(x)||, \
sigma_hat^2 = RSS / (N - trace(L)); approximate, ignores smoother bias";

/// Degree-1 loess fit evaluated at the input abscissae (sorted by x).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoessCurve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub span: f64,
    pub fit: Vec<f64>,
    /// Standard error of each fitted value.
    pub se: Vec<f64>,
    /// 95% interval half-widths.
    pub half_width: Vec<f64>,
    pub residual_sd: f64,
    /// Equivalent number of parameters, `trace(L)`.
    pub enp: f64,
}

impl LoessCurve {
    /// Fitted value at an input abscissa.
    pub fn fit_at(&self, x: f64) -> Option<f64> {
        self.x.iter().position(|&v| v == x).map(|i| self.fit[i])
    }

    pub fn se_at(&self, x: f64) -> Option<f64> {
        self.x.iter().position(|&v| v == x).map(|i| self.se[i])
    }
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

/// Smoother weights `l_i(x0)` such that the local-linear fit at `x0` is
/// `sum_i l_i y_i`. Returns `None` when the weighted design is singular.
fn local_weights(xs: &[f64], x0: f64, h: f64) -> Option<Vec<f64>> {
    let w: Vec<f64> = xs.iter().map(|&x| tricube((x - x0).abs() / h)).collect();
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return None;
    }
    let xbar = w.iter().zip(xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(xs).map(|(w, x)| w * (x - xbar) * (x - xbar)).sum();
    let scale: f64 = xs.iter().map(|x| (x - xbar).abs()).fold(0.0, f64::max);
    if !(sxx > 1e-12 * sw * scale * scale) {
        return None;
    }
    Some(
        w.iter()
            .zip(xs)
            .map(|(w, x)| w * (1.0 / sw + (x0 - xbar) * (x - xbar) / sxx))
            .collect(),
    )
}

/// Locally weighted linear regression with tricube weights over the nearest
/// `ceil(span * N)` points. When a neighbourhood holds fewer than two
/// distinct x with positive weight, the bandwidth grows until it does.
pub fn loess_fit(points: &[(f64, f64)], span: f64) -> Result<LoessCurve> {
    if !(span > 0.0 && span <= 1.0) {
        return Err(Error::InvalidParam(format!("loess span {span} not in (0, 1]")));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let n = xs.len();
    let mut distinct = xs.clone();
    distinct.dedup();
    if n < 3 || distinct.len() < 2 {
        return Err(Error::InvalidParam(
            "loess needs at least 3 points and 2 distinct x values".into(),
        ));
    }
    let q = ((span * n as f64).ceil() as usize).clamp(2, n);

    let mut rows = Vec::with_capacity(n);
    for &x0 in &xs {
        let mut d: Vec<f64> = xs.iter().map(|x| (x - x0).abs()).collect();
        d.sort_by(f64::total_cmp);
        let mut h = d[q - 1];
        if q == n {
            // full span: keep the farthest point in play
            h *= 1.0 + 1e-8;
        }
        let mut next = q;
        let mut attempts = 0;
        let l = loop {
            if h > 0.0 {
                if let Some(l) = local_weights(&xs, x0, h) {
                    break l;
                }
            }
            attempts += 1;
            if attempts > n + 1 {
                return Err(Error::InvalidParam(format!("loess neighbourhood at x = {x0} is degenerate")));
            }
            while next < n && d[next] <= h {
                next += 1;
            }
            h = if next < n { d[next] } else { d[n - 1] * 1.5 + f64::MIN_POSITIVE };
            next += 1;
        };
        rows.push(l);
    }

    let fit: Vec<f64> = rows.iter().map(|l| l.iter().zip(&ys).map(|(a, y)| a * y).sum()).collect();
    let enp: f64 = (0..n).map(|i| rows[i][i]).sum();
    let rss: f64 = ys.iter().zip(&fit).map(|(y, f)| (y - f) * (y - f)).sum();
    let dof = (n as f64 - enp).max(1.0);
    let residual_sd = (rss / dof).sqrt();
    let se: Vec<f64> = rows
        .iter()
        .map(|l| residual_sd * l.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let half_width = se.iter().map(|s| 1.96 * s).collect();
    Ok(LoessCurve {
        x: xs,
        y: ys,
        span,
        fit,
        se,
        half_width,
        residual_sd,
        enp,
    })
}

/// Headered `x,fit,lo95,hi95` CSV.
pub fn write_loess_csv<W: Write>(curve: &LoessCurve, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["x", "fit", "lo95", "hi95"])?;
    for i in 0..curve.x.len() {
        w.write_record([
            curve.x[i].to_string(),
            curve.fit[i].to_string(),
            (curve.fit[i] - curve.half_width[i]).to_string(),
            (curve.fit[i] + curve.half_width[i]).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.5)).collect();
        let c = loess_fit(&pts, 0.5).unwrap();
        assert!(c.fit.iter().all(|f| (f - 2.5).abs() < 1e-12));
        assert!(c.half_width.iter().all(|h| h.abs() < 1e-12));
    }

    #[test]
    fn linear_input_full_span() {
        let pts: Vec<(f64, f64)> = (0..15).map(|i| (i as f64 * 0.7, 3.0 - 2.0 * i as f64 * 0.7)).collect();
        let c = loess_fit(&pts, 1.0).unwrap();
        for (x, f) in c.x.iter().zip(&c.fit) {
            assert!((f - (3.0 - 2.0 * x)).abs() < 1e-8);
        }
    }

    #[test]
    fn small_span_widens_over_ties() {
        let pts = vec![(0.0, 1.0), (0.0, 1.2), (0.0, 0.8), (1.0, 2.0), (2.0, 3.0), (2.0, 3.1)];
        let c = loess_fit(&pts, 0.3).unwrap();
        assert!(c.fit.iter().all(|f| f.is_finite()));
        assert_eq!(c.x.len(), 6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(loess_fit(&[(0.0, 1.0), (1.0, 2.0)], 0.5).is_err());
        assert!(loess_fit(&[(1.0, 1.0), (1.0, 2.0), (1.0, 0.0)], 0.5).is_err());
        assert!(loess_fit(&[(0.0, 1.0), (1.0, 2.0), (2.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn csv_header() {
        let c = loess_fit(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)], 1.0).unwrap();
        let mut buf = Vec::new();
        write_loess_csv(&c, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,fit,lo95,hi95\n0,"));
    }
}
