//! Ordinary least squares for log-linear fits.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; 0 when fewer than three points.
    pub slope_stderr: f64,
    /// `y_i - (intercept + slope·x_i)`.
    pub residuals: Vec<f64>,
}

/// Fits `y = intercept + slope·x`. Needs at least two distinct `x`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    let slope_stderr = if n > 2 {
        let rss: f64 = residuals.iter().map(|r| r * r).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
        residuals,
    })
}

/// Slope of `ln y` against `n` over the points with `y > 0`.
pub fn log_slope(points: &[(usize, f64)]) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(_, y)| *y > 0.0)
        .map(|&(n, y)| (n as f64, y.ln()))
        .unzip();
    least_squares(&xs, &ys)
}

/// Values `e(n) = n·c_n·exp(-delta·n)` and their spread over a window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeStats {
    pub lo: usize,
    pub hi: usize,
    /// `e(n)` for every `n` in the data, with `e(0) = 0`.
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// `max / min`; infinite when `min = 0`.
    pub ratio: f64,
}

/// Envelope statistics of `counts` over `lo..=hi`. `n = 0` is never part of
/// the window.
pub fn envelope_stats(counts: &[f64], delta: f64, lo: usize, hi: usize) -> Result<EnvelopeStats> {
    let lo = lo.max(1);
    if lo > hi {
        return Err(Error::Window(format!("empty window {lo}..={hi}")));
    }
    if hi >= counts.len() {
        return Err(Error::Window(format!(
            "window end {hi} beyond data of length {}",
            counts.len()
        )));
    }
    let values: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(n, c)| n as f64 * c * (-delta * n as f64).exp())
        .collect();
    let mut w = values[lo..=hi].to_vec();
    w.sort_by(f64::total_cmp);
    let (min, max) = (w[0], w[w.len() - 1]);
    let mid = w.len() / 2;
    let median = if w.len() % 2 == 1 {
        w[mid]
    } else {
        (w[mid - 1] + w[mid]) / 2.0
    };
    Ok(EnvelopeStats {
        lo,
        hi,
        values,
        min,
        max,
        median,
        ratio: if min > 0.0 { max / min } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_of_geometric_sequence_is_linear() {
        let c: Vec<f64> = (0..8).map(|n| 3f64.powi(n)).collect();
        let e = envelope_stats(&c, 3f64.ln(), 2, 7).unwrap();
        assert_eq!(e.values[0], 0.0);
        assert!((e.values[5] - 5.0).abs() < 1e-9);
        assert!((e.ratio - 3.5).abs() < 1e-9);
        let one = envelope_stats(&c, 3f64.ln(), 4, 4).unwrap();
        assert_eq!(one.min, one.max);
        assert!(envelope_stats(&c, 1.0, 5, 4).is_err());
        assert!(envelope_stats(&c, 1.0, 0, 0).is_err());
        assert!(envelope_stats(&c, 1.0, 3, 8).is_err());
    }

    #[test]
    fn exact_line_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let f = least_squares(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert!(f.slope_stderr < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(&[1.0], &[1.0]).is_none());
        assert!(least_squares(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }
}
