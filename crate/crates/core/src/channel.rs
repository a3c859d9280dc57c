//! Impulse responses on a uniform delay grid and the metrics defined on them.
//!
//! Tap index k sits at delay k * tap_spacing; index 0 is delay zero. All
//! operations here are pure and the types are immutable after construction.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::kernel::NyquistKernel;
use crate::units::linear_to_db;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse<T: Real> {
    taps: Vec<Complex<T>>,
    tap_spacing: T,
}

impl<T: Real> ImpulseResponse<T> {
    /// Builds a channel from complex tap amplitudes spaced `tap_spacing`
    /// seconds apart. At least one tap must be nonzero.
    pub fn new(taps: Vec<Complex<T>>, tap_spacing: T) -> Result<Self> {
        if !(tap_spacing > T::zero()) || !tap_spacing.is_finite() {
            return Err(Error::BadTapSpacing(tap_spacing.to_f64_lossy()));
        }
        if taps.is_empty() || taps.iter().all(|h| h.norm_sqr() == T::zero()) {
            return Err(Error::DegenerateChannel);
        }
        Ok(Self { taps, tap_spacing })
    }

    pub fn from_real(amplitudes: &[T], tap_spacing: T) -> Result<Self> {
        Self::new(
            amplitudes.iter().map(|&a| Complex::new(a, T::zero())).collect(),
            tap_spacing,
        )
    }

    pub fn taps(&self) -> &[Complex<T>] {
        &self.taps
    }

    pub fn tap_spacing(&self) -> T {
        self.tap_spacing
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one tap
    }

    /// Total power gain, sum of |h_k|^2. Independent of tap spacing.
    pub fn power_gain(&self) -> T {
        self.taps.iter().fold(T::zero(), |acc, h| acc + h.norm_sqr())
    }

    pub fn power_gain_db(&self) -> T {
        linear_to_db(self.power_gain())
    }

    /// RMS delay spread in seconds: tap_spacing * sqrt(m2 - m1^2) where m1
    /// and m2 are the first and second index moments of the power profile.
    /// Shift, scale, and amplitude invariances follow from that form.
    pub fn rms_delay_spread(&self) -> T {
        let mut power = T::zero();
        let mut m1 = T::zero();
        let mut m2 = T::zero();
        for (k, h) in self.taps.iter().enumerate() {
            let p = h.norm_sqr();
            let i = T::of(k as f64);
            power += p;
            m1 += i * p;
            m2 += i * i * p;
        }
        m1 = m1 / power;
        m2 = m2 / power;
        let var = (m2 - m1 * m1).max(T::zero());
        self.tap_spacing * var.sqrt()
    }

    /// Smallest power of two at or above 4L, the default DFT length.
    pub fn default_dft_size(&self) -> usize {
        (4 * self.len()).next_power_of_two()
    }

    /// N-point DFT of the zero-padded taps.
    pub fn transfer_function(&self, n: usize) -> Result<TransferFunction<T>> {
        if n < self.len() {
            return Err(Error::DftTooShort { n, l: self.len() });
        }
        let mut bins = vec![Complex::new(T::zero(), T::zero()); n];
        bins[..self.len()].copy_from_slice(&self.taps);
        FftPlanner::new().plan_fft_forward(n).process(&mut bins);
        let bin_spacing = (T::of(n as f64) * self.tap_spacing).recip();
        Ok(TransferFunction { bins, bin_spacing })
    }

    /// Continuous-time Fourier transform of the tap train at frequency `f`,
    /// H(f) = sum_k h[k] e^{-j 2 pi f k tap_spacing}.
    pub fn frequency_response(&self, f: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, h) in self.taps.iter().enumerate() {
            let phase = -T::of(2.0) * T::PI() * f * T::of(k as f64) * self.tap_spacing;
            acc = acc + h * Complex::from_polar(T::one(), phase);
        }
        acc
    }

    /// Resamples this channel onto a `output_period` grid through the pulse
    /// `p`: h_eq[k] = sum_j h[j] p(k * output_period - j * tap_spacing).
    ///
    /// The output keeps delay zero at index zero; kernel pre-ring ahead of
    /// the first tap is dropped (those samples are exact Nyquist zeros
    /// whenever the grids align).
    pub fn equivalent_response(
        &self,
        p: &NyquistKernel<T>,
        output_period: T,
    ) -> Result<ImpulseResponse<T>> {
        if !(output_period > T::zero()) || !output_period.is_finite() {
            return Err(Error::BadTapSpacing(output_period.to_f64_lossy()));
        }
        let last_delay = T::of((self.len() - 1) as f64) * self.tap_spacing;
        let extent = (last_delay + p.half_width()) / output_period;
        let k_max = extent.ceil().to_f64_lossy() as usize;
        let mut taps = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let t = T::of(k as f64) * output_period;
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, h) in self.taps.iter().enumerate() {
                let dt = t - T::of(j as f64) * self.tap_spacing;
                acc = acc + h.scale(p.eval(dt));
            }
            taps.push(acc);
        }
        ImpulseResponse::new(taps, output_period)
    }
}

/// Frequency-domain view of an impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction<T: Real> {
    bins: Vec<Complex<T>>,
    bin_spacing: T,
}

impl<T: Real> TransferFunction<T> {
    pub fn bins(&self) -> &[Complex<T>] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Bin spacing in Hz, 1 / (N * tap_spacing).
    pub fn bin_spacing(&self) -> T {
        self.bin_spacing
    }

    /// (1/N) sum |H_i|^2, which Parseval ties to the channel power gain.
    pub fn mean_bin_power(&self) -> T {
        let sum = self.bins.iter().fold(T::zero(), |acc, b| acc + b.norm_sqr());
        sum / T::of(self.bins.len() as f64)
    }
}
