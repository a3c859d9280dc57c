//! Descriptive statistics matching the conventions of measurement-survey
//! tables: sample (n-1) standard deviation, non-excess kurtosis, linearly
//! interpolated percentiles, and 1.5 IQR boxplot fences.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    /// Fourth standardized moment without the -3 shift; 3 for a Gaussian.
    pub kurtosis: f64,
    pub p50: f64,
    pub p90: f64,
}

/// Percentile of an ascending-sorted slice with linear interpolation
/// between order statistics, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

pub fn summary_statistics(samples: &[f64]) -> Result<SummaryStats> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: samples.len() });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std_dev = (m2 / (n - 1.0)).sqrt();
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SummaryStats {
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        mean,
        std_dev,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
        p50: percentile(&sorted, 0.5),
        p90: percentile(&sorted, 0.9),
    })
}

/// Splits a sample into (kept, removed) by the boxplot rule: points outside
/// [Q1 - 1.5 IQR, Q3 + 1.5 IQR] are removed. Input order is preserved.
pub fn boxplot_outliers(samples: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if samples.len() < 4 {
        return Err(Error::TooFewSamples { need: 4, got: samples.len() });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = percentile(&sorted, 0.25);
    let q3 = percentile(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo = q1 - 1.5 * iqr;
    let hi = q3 + 1.5 * iqr;
    let (mut kept, mut removed) = (Vec::new(), Vec::new());
    for &x in samples {
        if x < lo || x > hi {
            removed.push(x);
        } else {
            kept.push(x);
        }
    }
    Ok((kept, removed))
}
