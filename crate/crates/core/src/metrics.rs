//! Forecast quality metrics: range-normalized relative RMS, Pearson
//! correlation (Γ) and MSE traces.
//!
//! Relative RMS divides by the observed range of the actual series rather
//! than its mean, because night-time irradiance drives the mean toward zero.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: {pred} predictions vs {actual} actuals")]
    LengthMismatch { pred: usize, actual: usize },
    #[error("need at least 2 samples, got {0}")]
    TooFew(usize),
    #[error("actual series is constant")]
    ConstantActual,
    #[error("series is constant; correlation undefined")]
    ConstantSeries,
    #[error("trace is empty")]
    EmptyTrace,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Normalization used by [`relative_rms`]; echoed into every report.
pub const RMS_NORMALIZATION: &str = "range";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub relative_rms_percent: f64,
    pub gamma: f64,
    pub n_samples: usize,
    pub mse: f64,
}

fn check_pair(pred: &[f64], actual: &[f64]) -> Result<()> {
    if pred.len() != actual.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            actual: actual.len(),
        });
    }
    if pred.len() < 2 {
        return Err(MetricsError::TooFew(pred.len()));
    }
    Ok(())
}

pub fn mse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    if pred.len() != actual.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            actual: actual.len(),
        });
    }
    if pred.is_empty() {
        return Err(MetricsError::TooFew(0));
    }
    let sum: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a) * (p - a)).sum();
    Ok(sum / pred.len() as f64)
}

/// `100 * rms(pred - actual) / (max(actual) - min(actual))`.
pub fn relative_rms(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    let (lo, hi) = actual
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let range = hi - lo;
    if range <= 0.0 {
        return Err(MetricsError::ConstantActual);
    }
    Ok(100.0 * mse(pred, actual)?.sqrt() / range)
}

/// Pearson correlation coefficient, clamped to [-1, 1].
pub fn correlation(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair(pred, actual)?;
    let n = pred.len() as f64;
    let mp = pred.iter().sum::<f64>() / n;
    let ma = actual.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, a) in pred.iter().zip(actual) {
        let (dp, da) = (p - mp, a - ma);
        sxy += dp * da;
        sxx += dp * dp;
        syy += da * da;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::ConstantSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn evaluate(pred: &[f64], actual: &[f64]) -> Result<EvalResult> {
    Ok(EvalResult {
        relative_rms_percent: relative_rms(pred, actual)?,
        gamma: correlation(pred, actual)?,
        n_samples: pred.len(),
        mse: mse(pred, actual)?,
    })
}

/// Two-column `epoch,mse` CSV, epochs counted from 1.
pub fn mse_trace_export(trace: &[f64], path: impl AsRef<Path>) -> Result<()> {
    if trace.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    crate::timeseries::write_rows(
        path.as_ref(),
        &["epoch", "mse"],
        trace
            .iter()
            .enumerate()
            .map(|(i, m)| vec![(i + 1).to_string(), format!("{m:?}")]),
    )?;
    Ok(())
}
