//! Nyquist pulse for resampling tap trains onto a receiver grid.

use crate::{Error, Real, Result};

/// Truncated raised-cosine pulse, unity at t = 0 and zero at every other
/// integer multiple of `sample_period`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NyquistKernel<T: Real> {
    sample_period: T,
    roll_off: T,
    /// Total extent in symbol periods; the pulse is zero outside
    /// [-span/2, span/2] periods.
    span: usize,
}

pub const DEFAULT_ROLL_OFF: f64 = 0.2;
pub const DEFAULT_SPAN: usize = 16;

impl<T: Real> NyquistKernel<T> {
    pub fn raised_cosine(sample_period: T, roll_off: T, span: usize) -> Result<Self> {
        if !(sample_period > T::zero()) || !sample_period.is_finite() {
            return Err(Error::BadTapSpacing(sample_period.to_f64_lossy()));
        }
        if !(roll_off >= T::zero() && roll_off <= T::one()) {
            return Err(Error::BadRollOff(roll_off.to_f64_lossy()));
        }
        if span == 0 {
            return Err(Error::InvalidParameter("kernel span must be positive".into()));
        }
        Ok(Self { sample_period, roll_off, span })
    }

    /// Raised cosine with roll-off 0.2 truncated to 16 symbol periods.
    pub fn default_raised_cosine(sample_period: T) -> Self {
        Self::raised_cosine(sample_period, T::of(DEFAULT_ROLL_OFF), DEFAULT_SPAN)
            .expect("default parameters are valid")
    }

    pub fn sample_period(&self) -> T {
        self.sample_period
    }

    pub fn roll_off(&self) -> T {
        self.roll_off
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn half_width(&self) -> T {
        T::of(self.span as f64 / 2.0) * self.sample_period
    }

    /// Pulse value at time `t` seconds. Zero outside the truncation window.
    pub fn eval(&self, t: T) -> T {
        let z = t / self.sample_period;
        if z.abs() > T::of(self.span as f64 / 2.0) {
            return T::zero();
        }
        let beta = self.roll_off;
        let two_beta_z = T::of(2.0) * beta * z;
        let denom = T::one() - two_beta_z * two_beta_z;
        // 0/0 point of the closed form at |z| = 1/(2 beta)
        if denom.abs() < T::epsilon().sqrt() {
            return T::of(std::f64::consts::FRAC_PI_4)
                * sinc(T::one() / (T::of(2.0) * beta));
        }
        sinc(z) * (T::PI() * beta * z).cos() / denom
    }
}

fn sinc<T: Real>(z: T) -> T {
    if z == T::zero() {
        T::one()
    } else {
        let piz = T::PI() * z;
        piz.sin() / piz
    }
}
