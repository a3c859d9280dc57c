//! Two-sample Kolmogorov-Smirnov test.

use super::normality::TestReport;
use crate::{Error, Result};

/// Largest gap between the two empirical CDFs, evaluated at every sample
/// point of either input.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let mut d: f64 = 0.0;
    for &v in sa.iter().chain(sb.iter()) {
        let fa = sa.partition_point(|&x| x <= v) as f64 / na;
        let fb = sb.partition_point(|&x| x <= v) as f64 / nb;
        d = d.max((fa - fb).abs());
    }
    Ok(d)
}

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-12 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 * sum.abs() || term < 1e-300 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Tests whether two samples come from the same distribution. With
/// `standardize` set, each input is shifted and scaled to zero mean and
/// unit variance first, so only the shapes are compared; raw mode also
/// detects location and scale differences.
pub fn ks_two_sample(a: &[f64], b: &[f64], standardize: bool) -> Result<TestReport> {
    let (xa, xb);
    let (a, b) = if standardize {
        xa = standardized(a)?;
        xb = standardized(b)?;
        (&xa[..], &xb[..])
    } else {
        (a, b)
    };
    let d = ks_statistic(a, b)?;
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let p = kolmogorov_sf(lambda);
    Ok(TestReport {
        test_name: "ks-two-sample".to_string(),
        statistic: Some(d),
        p_value: Some(p),
        reject_at_5pct: p < super::normality::SIGNIFICANCE,
    })
}

fn standardized(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mu = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|&v| (v - mu) * (v - mu)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sd = var.sqrt();
    Ok(x.iter().map(|&v| (v - mu) / sd).collect())
}
