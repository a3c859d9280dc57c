//! Normality tests and the lognormality battery built from them.
//!
//! Every test here takes the sample it is asked to judge for normality;
//! [`lognormality_battery`] feeds them the natural logs of a positive
//! sample. P-value approximations follow the standard published forms:
//! Royston's polynomial fits for Shapiro-Wilk and Shapiro-Francia, the
//! Dallal-Wilkinson fit for Lilliefors, Stephens' case-3 corrections for
//! Anderson-Darling, and asymptotic chi-square tails for Jarque-Bera and
//! the binned chi-square test.

use rand::distributions::Distribution;
use serde::Serialize;
use statrs::distribution::Normal;

use super::dist::{chi2_sf, norm_cdf, norm_quantile};
use crate::rng::stream;
use crate::{Error, Result};

pub const SIGNIFICANCE: f64 = 0.05;

/// Outcome of one hypothesis test. `statistic` and `p_value` are absent
/// when the sample size falls outside the test's validity range; such a
/// report never rejects.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub test_name: String,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub reject_at_5pct: bool,
}

impl TestReport {
    pub fn decided(name: &str, statistic: f64, p_value: f64) -> Self {
        TestReport {
            test_name: name.to_string(),
            statistic: Some(statistic),
            p_value: Some(p_value.clamp(0.0, 1.0)),
            reject_at_5pct: p_value < SIGNIFICANCE,
        }
    }

    pub fn not_applicable(name: &str) -> Self {
        TestReport {
            test_name: name.to_string(),
            statistic: None,
            p_value: None,
            reject_at_5pct: false,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.p_value.is_some()
    }
}

fn check_sample(x: &[f64]) -> Result<()> {
    if x.len() < 8 {
        return Err(Error::TooFewSamples { need: 8, got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        return Err(Error::ZeroVariance);
    }
    Ok(())
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn central_moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let mu = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let n = x.len() as f64;
    (mu, m2 / n, m3 / n, m4 / n)
}

fn sample_std(x: &[f64]) -> f64 {
    let mu = mean(x);
    let ss: f64 = x.iter().map(|&v| (v - mu) * (v - mu)).sum();
    (ss / (x.len() - 1) as f64).sqrt()
}

/// Non-excess sample kurtosis from biased central moments.
pub fn sample_kurtosis(x: &[f64]) -> f64 {
    let (_, m2, _, m4) = central_moments(x);
    m4 / (m2 * m2)
}

/// Jarque-Bera test: n (S^2/6 + (K-3)^2/24) against chi-square(2).
pub fn jarque_bera(x: &[f64]) -> Result<TestReport> {
    check_sample(x)?;
    let n = x.len() as f64;
    let (_, m2, m3, m4) = central_moments(x);
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    let jb = n * (skew * skew / 6.0 + (kurt - 3.0) * (kurt - 3.0) / 24.0);
    Ok(TestReport::decided("jarque-bera", jb, (-jb / 2.0).exp()))
}

/// Blom-scored expected normal order statistics, shared by both Shapiro
/// variants.
fn normal_scores(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| norm_quantile((i as f64 - 0.375) / (n as f64 + 0.25)))
        .collect()
}

/// Shapiro-Wilk W with Royston's coefficient and p-value approximations,
/// valid for 8 <= n <= 5000 here (polynomial fits cover 4..=5000; the
/// battery precondition already demands 8).
pub fn shapiro_wilk(x: &[f64]) -> Result<TestReport> {
    check_sample(x)?;
    let n = x.len();
    if n > 5000 {
        return Ok(TestReport::not_applicable("shapiro-wilk"));
    }
    let xs = sorted(x);
    let m = normal_scores(n);
    let msq: f64 = m.iter().map(|v| v * v).sum();
    let u = 1.0 / (n as f64).sqrt();
    let c_n = m[n - 1] / msq.sqrt();
    let c_n1 = m[n - 2] / msq.sqrt();
    let an = c_n + 0.221157 * u - 0.147981 * u.powi(2) - 2.071190 * u.powi(3)
        + 4.434685 * u.powi(4)
        - 2.706056 * u.powi(5);
    let an1 = c_n1 + 0.042981 * u - 0.293762 * u.powi(2) - 1.752461 * u.powi(3)
        + 5.682633 * u.powi(4)
        - 3.582633 * u.powi(5);
    let phi = (msq - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2])
        / (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
    let mut a: Vec<f64> = m.iter().map(|v| v / phi.sqrt()).collect();
    a[n - 1] = an;
    a[0] = -an;
    a[n - 2] = an1;
    a[1] = -an1;

    let xbar = mean(&xs);
    let num: f64 = a.iter().zip(&xs).map(|(ai, xi)| ai * xi).sum();
    let den: f64 = xs.iter().map(|&v| (v - xbar) * (v - xbar)).sum();
    let w = num * num / den;

    let nf = n as f64;
    let z = if n <= 11 {
        let g = -2.273 + 0.459 * nf;
        let mu = 0.5440 - 0.39978 * nf + 0.025054 * nf * nf - 0.0006714 * nf.powi(3);
        let sig = (1.3822 - 0.77857 * nf + 0.062767 * nf * nf - 0.0020322 * nf.powi(3)).exp();
        (-(g - (1.0 - w).ln()).ln() - mu) / sig
    } else {
        let ln_n = nf.ln();
        let mu = 0.0038915 * ln_n.powi(3) - 0.083751 * ln_n * ln_n - 0.31082 * ln_n - 1.5861;
        let sig = (0.0030302 * ln_n * ln_n - 0.082676 * ln_n - 0.4803).exp();
        ((1.0 - w).ln() - mu) / sig
    };
    Ok(TestReport::decided("shapiro-wilk", w, 1.0 - norm_cdf(z)))
}

/// Shapiro-Francia W' with Royston's 1993 p-value fit, for n up to 5000.
pub fn shapiro_francia(x: &[f64]) -> Result<TestReport> {
    check_sample(x)?;
    let n = x.len();
    if n > 5000 {
        return Ok(TestReport::not_applicable("shapiro-francia"));
    }
    let xs = sorted(x);
    let m = normal_scores(n);
    let msq: f64 = m.iter().map(|v| v * v).sum();
    let xbar = mean(&xs);
    let num: f64 = m.iter().zip(&xs).map(|(mi, xi)| mi * xi).sum();
    let den: f64 = xs.iter().map(|&v| (v - xbar) * (v - xbar)).sum();
    let w = num * num / (msq * den);

    let u = (n as f64).ln();
    let v = u.ln();
    let mu = -1.2725 + 1.0521 * (v - u);
    let sig = 1.0308 - 0.26758 * (v + 2.0 / u);
    let z = ((1.0 - w).ln() - mu) / sig;
    Ok(TestReport::decided("shapiro-francia", w, 1.0 - norm_cdf(z)))
}

/// Lilliefors test (KS against a normal with estimated parameters) with the
/// Dallal-Wilkinson p-value, refined for p > 0.1 by the polynomial fit used
/// in standard implementations.
pub fn lilliefors(x: &[f64]) -> Result<TestReport> {
    check_sample(x)?;
    let n = x.len();
    let nf = n as f64;
    let xs = sorted(x);
    let mu = mean(&xs);
    let sd = sample_std(&xs);
    let mut d: f64 = 0.0;
    for (i, &v) in xs.iter().enumerate() {
        let f = norm_cdf((v - mu) / sd);
        let hi = (i + 1) as f64 / nf - f;
        let lo = f - i as f64 / nf;
        d = d.max(hi).max(lo);
    }
    let (kd, nd) = if n > 100 {
        (d * (nf / 100.0).powf(0.49), 100.0)
    } else {
        (d, nf)
    };
    let mut p = (-7.01256 * kd * kd * (nd + 2.78019)
        + 2.99587 * kd * (nd + 2.78019).sqrt()
        - 0.122119
        + 0.974598 / nd.sqrt()
        + 1.67997 / nd)
        .exp();
    if p > 0.1 {
        let kk = (nf.sqrt() - 0.01 + 0.85 / nf.sqrt()) * d;
        p = if kk <= 0.302 {
            1.0
        } else if kk <= 0.5 {
            2.76773 - 19.828315 * kk + 80.709644 * kk.powi(2) - 138.55152 * kk.powi(3)
                + 81.218052 * kk.powi(4)
        } else if kk <= 0.9 {
            -4.901232 + 40.662806 * kk - 97.490286 * kk.powi(2) + 94.029866 * kk.powi(3)
                - 32.355711 * kk.powi(4)
        } else if kk <= 1.31 {
            6.198765 - 19.558097 * kk + 23.186922 * kk.powi(2) - 12.234627 * kk.powi(3)
                + 2.423045 * kk.powi(4)
        } else {
            0.0
        };
    }
    Ok(TestReport::decided("lilliefors", d, p))
}

/// Anderson-Darling test with estimated parameters; the reported statistic
/// is the small-sample modified A*^2 that Stephens' case-3 tail maps from.
pub fn anderson_darling(x: &[f64]) -> Result<TestReport> {
    check_sample(x)?;
    let n = x.len();
    let nf = n as f64;
    let xs = sorted(x);
    let mu = mean(&xs);
    let sd = sample_std(&xs);
    let f: Vec<f64> = xs
        .iter()
        .map(|&v| norm_cdf((v - mu) / sd).clamp(1e-300, 1.0 - 1e-16))
        .collect();
    let mut acc = 0.0;
    for i in 0..n {
        acc += (2.0 * i as f64 + 1.0) * (f[i].ln() + (1.0 - f[n - 1 - i]).ln());
    }
    let a2 = -nf - acc / nf;
    let a = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if a < 0.2 {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    } else if a < 0.34 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else if a < 0.6 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a < 10.0 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else {
        3.7e-24
    };
    Ok(TestReport::decided("anderson-darling", a, p))
}

/// Chi-square test on ceil(sqrt(n)) equal-probability bins under the fitted
/// normal, with k - 3 degrees of freedom. Needs an expected count of at
/// least 5 per bin (n >= 25), otherwise reported as not applicable.
pub fn chi_square(x: &[f64]) -> Result<TestReport> {
    check_sample(x)?;
    let n = x.len();
    let nf = n as f64;
    let k = nf.sqrt().ceil() as usize;
    if nf / (k as f64) < 5.0 {
        return Ok(TestReport::not_applicable("chi-square"));
    }
    let mu = mean(x);
    let sd = sample_std(x);
    let edges: Vec<f64> = (1..k)
        .map(|j| norm_quantile(j as f64 / k as f64) * sd + mu)
        .collect();
    let mut counts = vec![0usize; k];
    for &v in x {
        let bin = edges.partition_point(|&e| e <= v);
        counts[bin] += 1;
    }
    let expected = nf / k as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = (k - 3) as f64;
    Ok(TestReport::decided("chi-square", stat, chi2_sf(stat, dof)))
}

/// Applies the five-test battery to the natural logs of a positive sample.
/// The Shapiro slot runs Wilk on platykurtic logs (kurtosis <= 3) and
/// Francia on leptokurtic ones. Order: Jarque-Bera, Shapiro, Lilliefors,
/// Anderson-Darling, chi-square.
pub fn lognormality_battery(samples: &[f64]) -> Result<Vec<TestReport>> {
    if samples.len() < 8 {
        return Err(Error::TooFewSamples { need: 8, got: samples.len() });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    if samples.iter().any(|&v| v <= 0.0) {
        return Err(Error::NonPositiveSample);
    }
    let logs: Vec<f64> = samples.iter().map(|v| v.ln()).collect();
    normality_battery(&logs)
}

/// The same battery applied directly to a sample tested for normality.
pub fn normality_battery(x: &[f64]) -> Result<Vec<TestReport>> {
    check_sample(x)?;
    let shapiro = if sample_kurtosis(x) <= 3.0 {
        shapiro_wilk(x)?
    } else {
        shapiro_francia(x)?
    };
    Ok(vec![
        jarque_bera(x)?,
        shapiro,
        lilliefors(x)?,
        anderson_darling(x)?,
        chi_square(x)?,
    ])
}

/// Monte Carlo size estimate of every test procedure under a true lognormal
/// null: each trial draws `n` samples of exp(N(2, 0.7)) from a per-trial
/// seed derived from `master_seed` and applies all six procedures to the
/// logs unconditionally. Returns (test name, rejection rate) pairs; rates
/// count only trials where the procedure was applicable.
pub fn battery_null_rejection_rates(
    n: usize,
    trials: u32,
    master_seed: u64,
) -> Result<Vec<(String, f64)>> {
    if n < 8 {
        return Err(Error::TooFewSamples { need: 8, got: n });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let normal = Normal::new(2.0, 0.7).unwrap();
    type Proc = fn(&[f64]) -> Result<TestReport>;
    let procs: [Proc; 6] = [
        jarque_bera,
        shapiro_wilk,
        shapiro_francia,
        lilliefors,
        anderson_darling,
        chi_square,
    ];
    let mut rejected = [0u32; 6];
    let mut applicable = [0u32; 6];
    let mut names: Vec<String> = Vec::new();
    for trial in 0..trials {
        let mut rng = stream(master_seed, trial as u64);
        let logs: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        for (slot, proc) in procs.iter().enumerate() {
            let report = proc(&logs)?;
            if names.len() <= slot {
                names.push(report.test_name.clone());
            }
            if report.is_applicable() {
                applicable[slot] += 1;
                if report.reject_at_5pct {
                    rejected[slot] += 1;
                }
            }
        }
    }
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(slot, name)| {
            let rate = if applicable[slot] == 0 {
                f64::NAN
            } else {
                rejected[slot] as f64 / applicable[slot] as f64
            };
            (name, rate)
        })
        .collect())
}
