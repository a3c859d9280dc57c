//! Robust line fitting: iteratively reweighted least squares with Tukey
//! bisquare weights, plus the plain Pearson correlation.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 95% Gaussian efficiency tuning radius for the bisquare weight.
const BISQUARE_C: f64 = 4.685;
const MAD_TO_SIGMA: f64 = 0.6745;
const MAX_ITER: usize = 100;
const WEIGHT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineForm {
    /// Delay spread directly: sigma_us = slope * gain_db + intercept.
    Linear,
    /// Natural log of the delay spread: ln(sigma_us) = slope * gain_db + intercept.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionLine {
    pub slope: f64,
    pub intercept: f64,
    pub form: LineForm,
    /// Pearson correlation of the raw pairs (x, y) or (x, ln y).
    pub correlation: f64,
}

impl RegressionLine {
    /// Predicted RMS delay spread in microseconds at an average channel
    /// gain in dB (negative for attenuating channels).
    pub fn rmsds_us_at(&self, gain_db: f64) -> f64 {
        let v = self.slope * gain_db + self.intercept;
        match self.form {
            LineForm::Linear => v,
            LineForm::Log => v.exp(),
        }
    }
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

fn weighted_fit(x: &[f64], t: &[f64], w: &[f64]) -> Result<(f64, f64)> {
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let mx = x.iter().zip(w).map(|(a, wi)| a * wi).sum::<f64>() / sw;
    let mt = t.iter().zip(w).map(|(a, wi)| a * wi).sum::<f64>() / sw;
    let (mut sxx, mut sxt) = (0.0, 0.0);
    for i in 0..x.len() {
        let dx = x[i] - mx;
        sxx += w[i] * dx * dx;
        sxt += w[i] * dx * (t[i] - mt);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateDesign);
    }
    let slope = sxt / sxx;
    Ok((slope, mt - slope * mx))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fits y (or ln y in log form) against x, downweighting outliers with the
/// bisquare function on residuals scaled by MAD/0.6745. On clean data the
/// result coincides with ordinary least squares; points whose residual
/// exceeds the tuning radius get weight exactly zero.
pub fn robust_regress(x: &[f64], y: &[f64], form: LineForm) -> Result<RegressionLine> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: x.len() });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let t: Vec<f64> = match form {
        LineForm::Linear => y.to_vec(),
        LineForm::Log => {
            if y.iter().any(|&v| v <= 0.0) {
                return Err(Error::NonPositiveSample);
            }
            y.iter().map(|v| v.ln()).collect()
        }
    };

    let n = x.len();
    let mut w = vec![1.0; n];
    let (mut slope, mut intercept) = weighted_fit(x, &t, &w)?;
    for _ in 0..MAX_ITER {
        let r: Vec<f64> = (0..n).map(|i| t[i] - (slope * x[i] + intercept)).collect();
        let med = median(&mut r.clone());
        let mut abs_dev: Vec<f64> = r.iter().map(|ri| (ri - med).abs()).collect();
        let mad = median(&mut abs_dev);
        // an essentially exact fit leaves only rounding noise in the
        // residuals; treating that as real scatter would zero every weight.
        // median of |t| so a gross outlier cannot inflate the reference
        let t_scale = median(&mut t.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let new_w: Vec<f64> = if mad <= 1e-12 * t_scale {
            vec![1.0; n]
        } else {
            let scale = BISQUARE_C * mad / MAD_TO_SIGMA;
            (0..n)
                .map(|i| {
                    let u = (t[i] - (slope * x[i] + intercept)) / scale;
                    if u.abs() < 1.0 {
                        let v = 1.0 - u * u;
                        v * v
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let delta = w
            .iter()
            .zip(&new_w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        w = new_w;
        let (s, c) = weighted_fit(x, &t, &w)?;
        slope = s;
        intercept = c;
        if delta < WEIGHT_TOL {
            break;
        }
    }

    let correlation = pearson(x, &t).unwrap_or(0.0);
    Ok(RegressionLine { slope, intercept, form, correlation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn exact_line_recovered() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let line = robust_regress(&x, &y, LineForm::Linear).unwrap();
        assert_relative_eq!(line.slope, 2.0, max_relative = 1e-9);
        assert_relative_eq!(line.intercept, 1.0, max_relative = 1e-9);
        assert_relative_eq!(line.correlation, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn collinear_data_with_rounding_noise_recovers_the_line() {
        // y computed from x in floating point leaves residuals at the
        // 1e-19 level; the scale estimate must not mistake them for scatter
        let x: Vec<f64> = (0..500).map(|i| -65.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -0.0028 * v + 0.089).collect();
        let line = robust_regress(&x, &y, LineForm::Linear).unwrap();
        assert_relative_eq!(line.slope, -0.0028, max_relative = 1e-9);
        assert_relative_eq!(line.intercept, 0.089, max_relative = 1e-9);
    }

    #[test]
    fn log_form_fits_exponential_data() {
        let x: Vec<f64> = (1..30).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| (-0.3 * v + 0.7).exp()).collect();
        let line = robust_regress(&x, &y, LineForm::Log).unwrap();
        assert_relative_eq!(line.slope, -0.3, max_relative = 1e-9);
        assert_relative_eq!(line.intercept, 0.7, max_relative = 1e-9);
        assert_relative_eq!(line.rmsds_us_at(2.0), (-0.3f64 * 2.0 + 0.7).exp(), max_relative = 1e-9);
    }

    #[test]
    fn matches_ols_on_clean_noise() {
        let mut rng = crate::rng::stream(17, 0);
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.3 * v - 0.4 + 0.01 * rng.gen_range(-1.0..1.0)).collect();
        let robust = robust_regress(&x, &y, LineForm::Linear).unwrap();
        let ols = weighted_fit(&x, &y, &vec![1.0; x.len()]).unwrap();
        // near-clean data: bisquare stays close to OLS
        assert_relative_eq!(robust.slope, ols.0, max_relative = 1e-3);
        assert_relative_eq!(robust.intercept, ols.1, epsilon = 1e-3);
    }

    #[test]
    fn irls_equals_ols_on_noiseless_data() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -0.7 * v + 3.3).collect();
        let robust = robust_regress(&x, &y, LineForm::Linear).unwrap();
        let ols = weighted_fit(&x, &y, &vec![1.0; x.len()]).unwrap();
        assert!((robust.slope - ols.0).abs() < 1e-9);
        assert!((robust.intercept - ols.1).abs() < 1e-9);
    }

    #[test]
    fn outliers_ignored_where_ols_is_dragged() {
        let mut rng = crate::rng::stream(18, 0);
        let x: Vec<f64> = (0..100).map(|i| i as f64 * 0.2).collect();
        let mut y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0 + 0.05 * rng.gen_range(-1.0..1.0)).collect();
        for i in (0..100).step_by(10) {
            y[i] += 50.0;
        }
        let robust = robust_regress(&x, &y, LineForm::Linear).unwrap();
        let ols = weighted_fit(&x, &y, &vec![1.0; x.len()]).unwrap();
        assert!((robust.slope - 2.0).abs() < 0.05, "robust slope {}", robust.slope);
        assert!((robust.intercept - 1.0).abs() < 0.5, "robust intercept {}", robust.intercept);
        // OLS must be visibly biased by the planted outliers
        assert!((ols.1 - 1.0).abs() > 2.0, "ols intercept {}", ols.1);
    }

    #[test]
    fn bisquare_zeroes_far_points() {
        // residual beyond the tuning radius -> weight 0; verify through the
        // fit by checking a gross outlier has no influence at all
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let mut y: Vec<f64> = x.iter().map(|v| 0.5 * v + 2.0).collect();
        // tiny symmetric noise so MAD > 0
        for (i, v) in y.iter_mut().enumerate() {
            *v += if i % 2 == 0 { 1e-6 } else { -1e-6 };
        }
        y[7] = 1e6;
        let line = robust_regress(&x, &y, LineForm::Linear).unwrap();
        assert!((line.slope - 0.5).abs() < 1e-4);
        assert!((line.intercept - 2.0).abs() < 1e-3);
    }

    #[test]
    fn degenerate_designs_rejected() {
        assert!(matches!(
            robust_regress(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], LineForm::Linear),
            Err(Error::DegenerateDesign)
        ));
        assert!(matches!(
            robust_regress(&[1.0, 2.0], &[1.0, 2.0], LineForm::Linear),
            Err(Error::TooFewSamples { need: 3, got: 2 })
        ));
        assert!(matches!(
            robust_regress(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0], LineForm::Log),
            Err(Error::NonPositiveSample)
        ));
        assert!(matches!(
            robust_regress(&[1.0, 2.0], &[1.0, 2.0, 3.0], LineForm::Linear),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn pearson_anchors() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        assert_relative_eq!(pearson(&x, &y).unwrap(), 1.0, max_relative = 1e-15);
        let yn: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_relative_eq!(pearson(&x, &yn).unwrap(), -1.0, max_relative = 1e-15);
        assert!(pearson(&x, &[1.0, 1.0, 1.0, 1.0]).is_err());
    }
}
