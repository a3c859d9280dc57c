//! Periodically time-varying channels as harmonic banks of LTI responses.
//!
//! A channel with period T0 is carried as its Fourier harmonics h_m(tau):
//! the response at time t is sum_m h_m(tau) exp(j 2 pi m t / T0). Harmonic
//! order m = 0 is the time-average channel; a bank containing only m = 0
//! is plain LTI.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::channel::ImpulseResponse;
use crate::gen::{generate, GeneratorConfig};
use crate::kernel::NyquistKernel;
use crate::rng::stream;
use crate::{Error, Result};

/// Default number of positive harmonics carried by generated banks.
pub const DEFAULT_MAX_HARMONIC: u32 = 3;
/// Default power step between adjacent harmonic orders, dB.
pub const DEFAULT_HARMONIC_STEP_DB: f64 = 10.0;
/// Default modulation period: one half-cycle of a 60 Hz mains supply.
pub const DEFAULT_PERIOD_S: f64 = 1.0 / 120.0;

const GRID_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LptvChannel {
    /// Harmonic order -> tap train; all trains share the tap grid. Zero
    /// trains are legal here (an extracted harmonic may vanish).
    harmonics: BTreeMap<i32, Vec<Complex<f64>>>,
    tap_spacing: f64,
    period: f64,
}

impl LptvChannel {
    /// Builds a channel from raw harmonic tap trains. The fundamental must
    /// be present; zero trains are accepted.
    pub fn from_parts(
        harmonics: BTreeMap<i32, Vec<Complex<f64>>>,
        tap_spacing: f64,
        period: f64,
    ) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParameter("period must be positive and finite".into()));
        }
        if !(tap_spacing > 0.0) || !tap_spacing.is_finite() {
            return Err(Error::BadTapSpacing(tap_spacing));
        }
        if !harmonics.contains_key(&0) {
            return Err(Error::InvalidParameter("bank must contain harmonic 0".into()));
        }
        Ok(LptvChannel { harmonics, tap_spacing, period })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn tap_spacing(&self) -> f64 {
        self.tap_spacing
    }

    pub fn harmonic_orders(&self) -> impl Iterator<Item = i32> + '_ {
        self.harmonics.keys().copied()
    }

    pub fn harmonic(&self, m: i32) -> Option<&[Complex<f64>]> {
        self.harmonics.get(&m).map(|v| v.as_slice())
    }

    /// Harmonic as a standalone impulse response; fails on an all-zero
    /// train, which has no channel interpretation.
    pub fn harmonic_response(&self, m: i32) -> Result<ImpulseResponse<f64>> {
        let taps = self
            .harmonics
            .get(&m)
            .ok_or_else(|| Error::InvalidParameter(format!("no harmonic of order {m}")))?;
        ImpulseResponse::new(taps.clone(), self.tap_spacing)
    }

    pub fn is_lti(&self) -> bool {
        self.harmonics.keys().all(|&m| m == 0)
    }

    /// Longest tap train across harmonics.
    pub fn max_len(&self) -> usize {
        self.harmonics.values().map(|v| v.len()).max().unwrap_or(0)
    }

    /// Time-varying tap coefficient: sum over harmonics of
    /// h_m[k] exp(j 2 pi m t / period). Indexes past a train's end
    /// contribute nothing.
    pub fn response_at(&self, t: f64, k: usize) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (&m, taps) in &self.harmonics {
            if let Some(h) = taps.get(k) {
                let phase = 2.0 * std::f64::consts::PI * m as f64 * t / self.period;
                acc += h * Complex::from_polar(1.0, phase);
            }
        }
        acc
    }

    /// Samples the full response uniformly over one period: frame n holds
    /// the tap train at t = n * period / frames.
    pub fn sample_frames(&self, frames: usize) -> Vec<Vec<Complex<f64>>> {
        let len = self.max_len();
        (0..frames)
            .map(|n| {
                let t = n as f64 * self.period / frames as f64;
                (0..len).map(|k| self.response_at(t, k)).collect()
            })
            .collect()
    }
}

/// Assembles a harmonic bank into a channel. All responses must share the
/// tap grid and the fundamental (m = 0) must be present. With
/// `real_completion`, the bank may only hold m >= 0 and each missing
/// negative order is filled with the conjugate of its mirror, which keeps
/// the time-domain response real for real tap trains.
pub fn zadeh_compose(
    bank: &BTreeMap<i32, ImpulseResponse<f64>>,
    period: f64,
    real_completion: bool,
) -> Result<LptvChannel> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidParameter("period must be positive and finite".into()));
    }
    let fundamental = bank
        .get(&0)
        .ok_or_else(|| Error::InvalidParameter("bank must contain harmonic 0".into()))?;
    let spacing = fundamental.tap_spacing();
    let mut harmonics = BTreeMap::new();
    for (&m, h) in bank {
        if (h.tap_spacing() - spacing).abs() > GRID_REL_TOL * spacing {
            return Err(Error::MixedTapSpacing);
        }
        if real_completion && m < 0 {
            return Err(Error::InvalidParameter(
                "real completion expects only non-negative harmonic orders".into(),
            ));
        }
        harmonics.insert(m, h.taps().to_vec());
    }
    if real_completion {
        let positive: Vec<i32> = harmonics.keys().copied().filter(|&m| m > 0).collect();
        for m in positive {
            let conj: Vec<Complex<f64>> =
                harmonics[&m].iter().map(|c| c.conj()).collect();
            harmonics.insert(-m, conj);
        }
    }
    Ok(LptvChannel { harmonics, tap_spacing: spacing, period })
}

/// Passes a sampled signal through the channel: each harmonic filters the
/// signal, its output is modulated at m times the fundamental frequency,
/// and the branches sum. The period must sit on the sample grid.
pub fn apply_lptv(
    ch: &LptvChannel,
    signal: &[Complex<f64>],
    sample_period: f64,
) -> Result<Vec<Complex<f64>>> {
    if signal.is_empty() {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    if (ch.tap_spacing - sample_period).abs() > GRID_REL_TOL * sample_period {
        return Err(Error::MixedTapSpacing);
    }
    let ratio = ch.period / sample_period;
    let n0 = ratio.round();
    if n0 < 1.0 || (ratio - n0).abs() > GRID_REL_TOL * ratio {
        return Err(Error::IncommensuratePeriod { t0: ch.period, ts: sample_period });
    }
    let n0 = n0 as i64;
    let out_len = signal.len() + ch.max_len().max(1) - 1;
    let mut out = vec![Complex::new(0.0, 0.0); out_len];
    for (&m, taps) in &ch.harmonics {
        if taps.is_empty() {
            continue;
        }
        // linear convolution of this branch
        let mut branch = vec![Complex::new(0.0, 0.0); out_len];
        for (i, h) in taps.iter().enumerate() {
            for (j, x) in signal.iter().enumerate() {
                branch[i + j] += h * x;
            }
        }
        for (n, b) in branch.iter().enumerate() {
            // exact phase on the sample grid: m*n mod N0 avoids drift
            let r = (m as i64 * n as i64).rem_euclid(n0);
            let phase = 2.0 * std::f64::consts::PI * r as f64 / n0 as f64;
            out[n] += b * Complex::from_polar(1.0, phase);
        }
    }
    Ok(out)
}

/// Recovers harmonic responses from one period of the sampled
/// time-varying response: a DFT across the frame axis per tap. `frames[n]`
/// is the tap train at t = n * period / N. Orders up to `max_harmonic`
/// need at least 2 * max_harmonic + 1 frames to avoid aliasing.
pub fn harmonic_extract(
    frames: &[Vec<Complex<f64>>],
    tap_spacing: f64,
    period: f64,
    max_harmonic: u32,
) -> Result<LptvChannel> {
    let n = frames.len();
    let need = 2 * max_harmonic as usize + 1;
    if n < need {
        return Err(Error::TooFewFrames { got: n, resolvable: n.saturating_sub(1) / 2, need });
    }
    let len = frames[0].len();
    for f in frames {
        if f.len() != len {
            return Err(Error::LengthMismatch { left: len, right: f.len() });
        }
    }
    if len == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    if !(tap_spacing > 0.0) || !tap_spacing.is_finite() {
        return Err(Error::BadTapSpacing(tap_spacing));
    }
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidParameter("period must be positive and finite".into()));
    }
    let mut harmonics = BTreeMap::new();
    let mh = max_harmonic as i32;
    for m in -mh..=mh {
        let mut taps = vec![Complex::new(0.0, 0.0); len];
        for (idx, frame) in frames.iter().enumerate() {
            let r = (-(m as i64) * idx as i64).rem_euclid(n as i64);
            let w = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / n as f64);
            for (k, tap) in taps.iter_mut().enumerate() {
                *tap += frame[k] * w;
            }
        }
        for tap in &mut taps {
            *tap /= n as f64;
        }
        harmonics.insert(m, taps);
    }
    Ok(LptvChannel { harmonics, tap_spacing, period })
}

/// Shaping pulse seen by the discrete-time equivalent: either an ideal
/// (sifting) impulse or a truncated raised cosine.
#[derive(Debug, Clone, Copy)]
pub enum Kernel {
    Delta,
    RaisedCosine(NyquistKernel<f64>),
}

impl Kernel {
    fn half_width(&self) -> f64 {
        match self {
            Kernel::Delta => 0.0,
            Kernel::RaisedCosine(k) => k.half_width(),
        }
    }
}

/// Discrete equivalent response through transmit and receive pulses:
/// entry [k][l] is the coefficient that multiplies the input sample l
/// lags back when producing output sample k. Falls back to the LTI
/// equivalent response when the channel has only harmonic 0.
pub struct SampledResponse {
    pub rows: Vec<Vec<Complex<f64>>>,
    pub sample_period: f64,
}

pub fn lptv_equivalent_response(
    ch: &LptvChannel,
    tx: &Kernel,
    rx: &Kernel,
    sample_period: f64,
    rows: usize,
) -> Result<SampledResponse> {
    if !(sample_period > 0.0) || !sample_period.is_finite() {
        return Err(Error::BadTapSpacing(sample_period));
    }
    if rows == 0 {
        return Err(Error::InvalidParameter("need at least one output row".into()));
    }
    let spacing = ch.tap_spacing;
    let last_delay = (ch.max_len().saturating_sub(1)) as f64 * spacing;
    let extent = last_delay + tx.half_width() + rx.half_width();
    let l_max = (extent / sample_period).ceil() as usize;

    // The channel is a tap train in tau, so integrals against an impulse
    // pulse collapse to exact sums; only the pairing of two continuous
    // pulses needs quadrature, and then only over the receive support.
    let snap = |x: f64| -> Option<usize> {
        let pos = x / spacing;
        let i = pos.round();
        if i >= 0.0
            && (pos - i).abs() <= GRID_REL_TOL * pos.abs().max(1.0)
            && (i as usize) < ch.max_len()
        {
            Some(i as usize)
        } else {
            None
        }
    };
    let eval_row = |t_out: f64, l: usize| -> Complex<f64> {
        let u = l as f64 * sample_period;
        match (tx, rx) {
            (Kernel::Delta, Kernel::Delta) => {
                // both pulses sift: tau = u, xi = 0
                snap(u)
                    .map(|i| ch.response_at(t_out, i))
                    .unwrap_or_else(|| Complex::new(0.0, 0.0))
            }
            (Kernel::RaisedCosine(p), Kernel::Delta) => {
                let mut acc = Complex::new(0.0, 0.0);
                for i in 0..ch.max_len() {
                    let g = p.eval(u - i as f64 * spacing);
                    if g != 0.0 {
                        acc += ch.response_at(t_out, i).scale(g);
                    }
                }
                acc
            }
            (Kernel::Delta, Kernel::RaisedCosine(q)) => {
                // the transmit impulse pins xi = u - i*spacing per tap
                let mut acc = Complex::new(0.0, 0.0);
                for i in 0..ch.max_len() {
                    let xi = u - i as f64 * spacing;
                    let g = q.eval(xi);
                    if g != 0.0 {
                        acc += ch.response_at(t_out - xi, i).scale(g);
                    }
                }
                acc
            }
            (Kernel::RaisedCosine(p), Kernel::RaisedCosine(q)) => {
                let hw = q.half_width();
                let steps = ((2.0 * hw / sample_period) * 32.0).ceil() as usize;
                let dx = 2.0 * hw / steps as f64;
                let mut acc = Complex::new(0.0, 0.0);
                for s in 0..=steps {
                    let xi = -hw + s as f64 * dx;
                    let w = if s == 0 || s == steps { 0.5 } else { 1.0 };
                    let gq = q.eval(xi) * w * dx;
                    if gq == 0.0 {
                        continue;
                    }
                    let mut inner = Complex::new(0.0, 0.0);
                    for i in 0..ch.max_len() {
                        let gp = p.eval(u - i as f64 * spacing - xi);
                        if gp != 0.0 {
                            inner += ch.response_at(t_out - xi, i).scale(gp);
                        }
                    }
                    acc += inner.scale(gq);
                }
                acc
            }
        }
    };

    let mut out = Vec::with_capacity(rows);
    for k in 0..rows {
        let t_out = k as f64 * sample_period;
        out.push((0..=l_max).map(|l| eval_row(t_out, l)).collect());
    }
    Ok(SampledResponse { rows: out, sample_period })
}

/// Builds a harmonic bank from independently generated realizations: the
/// fundamental keeps its drawn gain and grid; each higher order reuses
/// that grid and is rescaled `step_db` below its neighbor. Negative
/// orders complete by conjugation.
pub fn lptv_bank(
    config: &GeneratorConfig,
    max_harmonic: u32,
    step_db: f64,
    period: f64,
    master_seed: u64,
) -> Result<LptvChannel> {
    if !(step_db >= 0.0) {
        return Err(Error::InvalidParameter("harmonic step must be non-negative".into()));
    }
    let mut rng = stream(master_seed, 0);
    let r0 = generate(config, &mut rng)?;
    let spacing = r0.channel.tap_spacing();
    let base_power = r0.channel.power_gain();
    let mut bank = BTreeMap::new();
    bank.insert(0, r0.channel);
    for m in 1..=max_harmonic {
        let mut rng = stream(master_seed, m as u64);
        let r = generate(config, &mut rng)?;
        let target = base_power * crate::units::db_to_linear(-step_db * m as f64);
        let scale = (target / r.channel.power_gain()).sqrt();
        let taps: Vec<Complex<f64>> =
            r.channel.taps().iter().map(|h| h.scale(scale)).collect();
        bank.insert(m as i32, ImpulseResponse::new(taps, spacing)?);
    }
    zadeh_compose(&bank, period, true)
}
