//! Text serialization: CSV for tabular data, JSON for reports. All
//! emitters are pure string builders so outputs stay byte-stable for a
//! given input; callers own file placement.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use serde::Serialize;

use crate::channel::ImpulseResponse;
use crate::gen::Ensemble;
use crate::link::capacity::{CapacityConfig, CpOperatingPoint};
use crate::lptv::LptvChannel;
use crate::stats::TestReport;
use crate::{Error, Result};

pub const IMPULSE_CSV_HEADER: &str = "index,delay_s,re,im";
pub const ENSEMBLE_CSV_HEADER: &str = "index,gain_db,rmsds_us,tap_spacing_s,L";
pub const CDF_CSV_HEADER: &str = "rate_bps,cdf";
pub const SWEEP_CSV_HEADER: &str = "M,nu,rate_bps,optimal";

pub fn impulse_to_csv(h: &ImpulseResponse<f64>) -> String {
    let mut out = String::from(IMPULSE_CSV_HEADER);
    out.push('\n');
    let spacing = h.tap_spacing();
    for (k, tap) in h.taps().iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", k, k as f64 * spacing, tap.re, tap.im);
    }
    out
}

pub fn impulse_from_csv(text: &str) -> Result<ImpulseResponse<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(Error::TooFewSamples { need: 2, got: 0 })?;
    if header.trim() != IMPULSE_CSV_HEADER {
        return Err(Error::InvalidParameter(format!(
            "expected header '{IMPULSE_CSV_HEADER}', got '{header}'"
        )));
    }
    let mut delays = Vec::new();
    let mut taps = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::InvalidParameter(format!(
                "row {}: expected 4 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::InvalidParameter(format!("row {}: bad number '{s}'", lineno + 2))
            })
        };
        let index = parse(fields[0])? as usize;
        if index != taps.len() {
            return Err(Error::InvalidParameter(format!(
                "row {}: index {} out of order",
                lineno + 2,
                index
            )));
        }
        delays.push(parse(fields[1])?);
        taps.push(Complex::new(parse(fields[2])?, parse(fields[3])?));
    }
    if taps.len() < 2 {
        // one data row carries no grid information
        return Err(Error::TooFewSamples { need: 2, got: taps.len() });
    }
    let spacing = delays[1] - delays[0];
    if !(spacing > 0.0) {
        return Err(Error::BadTapSpacing(spacing));
    }
    for (k, d) in delays.iter().enumerate() {
        if (d - k as f64 * spacing).abs() > 1e-9 * spacing.max(*d) {
            return Err(Error::InvalidParameter(format!(
                "delay column is not a uniform grid at row {}",
                k + 2
            )));
        }
    }
    ImpulseResponse::new(taps, spacing)
}

#[derive(Serialize)]
struct ImpulseJson {
    tap_spacing_s: f64,
    taps: Vec<[f64; 2]>,
}

pub fn impulse_to_json(h: &ImpulseResponse<f64>) -> String {
    let doc = ImpulseJson {
        tap_spacing_s: h.tap_spacing(),
        taps: h.taps().iter().map(|t| [t.re, t.im]).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("impulse response serializes")
}

pub fn impulse_from_json(text: &str) -> Result<ImpulseResponse<f64>> {
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("bad JSON: {e}")))?;
    let spacing = v
        .get("tap_spacing_s")
        .and_then(|s| s.as_f64())
        .ok_or_else(|| Error::InvalidParameter("missing tap_spacing_s".into()))?;
    let taps = v
        .get("taps")
        .and_then(|t| t.as_array())
        .ok_or_else(|| Error::InvalidParameter("missing taps array".into()))?
        .iter()
        .map(|pair| {
            let re = pair.get(0).and_then(|x| x.as_f64());
            let im = pair.get(1).and_then(|x| x.as_f64());
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex::new(re, im)),
                _ => Err(Error::InvalidParameter("taps entries must be [re, im]".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ImpulseResponse::new(taps, spacing)
}

pub fn ensemble_to_csv(ensemble: &Ensemble) -> String {
    let mut out = String::from(ENSEMBLE_CSV_HEADER);
    out.push('\n');
    for (i, r) in ensemble.realizations.iter().enumerate() {
        let index = r.seed_path.map(|s| s.index).unwrap_or(i as u64);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            index,
            r.achieved_gain_db,
            r.achieved_rmsds_s * 1e6,
            r.channel.tap_spacing(),
            r.channel.len()
        );
    }
    out
}

pub fn cdf_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from(CDF_CSV_HEADER);
    out.push('\n');
    for (rate, p) in points {
        let _ = writeln!(out, "{rate},{p}");
    }
    out
}

/// Sweep table with the winning row flagged in the last column.
pub fn sweep_to_csv(points: &[CpOperatingPoint], best: &CpOperatingPoint) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        let flag = (p.subcarriers == best.subcarriers
            && p.guard_samples == best.guard_samples) as u8;
        let _ = writeln!(out, "{},{},{},{}", p.subcarriers, p.guard_samples, p.rate_bps, flag);
    }
    out
}

#[derive(Serialize)]
struct CapacityReport {
    #[serde(rename = "W_hz")]
    w_hz: f64,
    gamma_db: f64,
    band_hz: [f64; 2],
    capacity_bps: f64,
}

pub fn capacity_report_json(cap: &CapacityConfig, capacity_bps: f64) -> String {
    let doc = CapacityReport {
        w_hz: cap.bandwidth_hz,
        gamma_db: cap.gamma_db,
        band_hz: [cap.band_start_hz, cap.band_end_hz],
        capacity_bps,
    };
    serde_json::to_string_pretty(&doc).expect("capacity report serializes")
}

pub fn reports_to_json(reports: &[TestReport]) -> String {
    serde_json::to_string_pretty(reports).expect("test reports serialize")
}

pub fn reports_to_csv(reports: &[TestReport]) -> String {
    let mut out = String::from("test_name,statistic,p_value,reject_at_5pct");
    out.push('\n');
    for r in reports {
        let stat = r.statistic.map(|v| v.to_string()).unwrap_or_default();
        let p = r.p_value.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", r.test_name, stat, p, r.reject_at_5pct);
    }
    out
}

#[derive(Serialize)]
struct LptvJson {
    #[serde(rename = "T0_s")]
    t0_s: f64,
    harmonics: BTreeMap<i32, ImpulseJson>,
}

pub fn lptv_to_json(ch: &LptvChannel) -> String {
    let harmonics = ch
        .harmonic_orders()
        .map(|m| {
            let taps = ch.harmonic(m).expect("listed order exists");
            (
                m,
                ImpulseJson {
                    tap_spacing_s: ch.tap_spacing(),
                    taps: taps.iter().map(|t| [t.re, t.im]).collect(),
                },
            )
        })
        .collect();
    let doc = LptvJson { t0_s: ch.period(), harmonics };
    serde_json::to_string_pretty(&doc).expect("lptv channel serializes")
}

pub fn lptv_from_json(text: &str) -> Result<LptvChannel> {
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("bad JSON: {e}")))?;
    let t0 = v
        .get("T0_s")
        .and_then(|s| s.as_f64())
        .ok_or_else(|| Error::InvalidParameter("missing T0_s".into()))?;
    let map = v
        .get("harmonics")
        .and_then(|h| h.as_object())
        .ok_or_else(|| Error::InvalidParameter("missing harmonics object".into()))?;
    let mut spacing = None;
    let mut harmonics = BTreeMap::new();
    for (key, entry) in map {
        let m: i32 = key
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad harmonic order '{key}'")))?;
        let s = entry
            .get("tap_spacing_s")
            .and_then(|x| x.as_f64())
            .ok_or_else(|| Error::InvalidParameter(format!("harmonic {m}: missing tap_spacing_s")))?;
        match spacing {
            None => spacing = Some(s),
            Some(prev) if (prev - s).abs() > 1e-9 * prev.abs() => {
                return Err(Error::MixedTapSpacing)
            }
            _ => {}
        }
        let taps = entry
            .get("taps")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::InvalidParameter(format!("harmonic {m}: missing taps")))?
            .iter()
            .map(|pair| {
                let re = pair.get(0).and_then(|x| x.as_f64());
                let im = pair.get(1).and_then(|x| x.as_f64());
                match (re, im) {
                    (Some(re), Some(im)) => Ok(Complex::new(re, im)),
                    _ => Err(Error::InvalidParameter("taps entries must be [re, im]".into())),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        harmonics.insert(m, taps);
    }
    let spacing = spacing.ok_or_else(|| Error::InvalidParameter("no harmonics given".into()))?;
    LptvChannel::from_parts(harmonics, spacing, t0)
}
