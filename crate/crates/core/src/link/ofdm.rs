//! Guard-interval accounting for multicarrier transmission.
//!
//! When the channel's delay spread runs past the cyclic prefix, each tap
//! splits between useful signal and self-interference. A tap at delay d
//! with excess e = max(0, d - nu) keeps amplitude weight (M - e)/M on the
//! useful path; the rest of its power turns into ICI/ISI. The split
//! conserves power tap by tap, so P_U + P_I equals the channel gain
//! exactly.

use serde::Serialize;

use crate::channel::ImpulseResponse;
use crate::units::dbm_to_linear;
use crate::{Error, Result};

pub const DEFAULT_TX_PSD_DBM_HZ: f64 = -55.0;
pub const DEFAULT_NOISE_PSD_DBM_HZ: f64 = -120.0;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OfdmConfig {
    /// DFT size M.
    pub subcarriers: usize,
    /// Cyclic prefix length nu, in samples.
    pub guard_samples: usize,
    /// Sample period the channel taps are expected to sit on.
    pub sample_period_s: f64,
    /// Transmit power spectral density, dBm/Hz.
    pub tx_psd_dbm_hz: f64,
    /// Noise power spectral density, dBm/Hz.
    pub noise_psd_dbm_hz: f64,
}

impl OfdmConfig {
    pub fn new(subcarriers: usize, guard_samples: usize, sample_period_s: f64) -> Self {
        OfdmConfig {
            subcarriers,
            guard_samples,
            sample_period_s,
            tx_psd_dbm_hz: DEFAULT_TX_PSD_DBM_HZ,
            noise_psd_dbm_hz: DEFAULT_NOISE_PSD_DBM_HZ,
        }
    }

    /// Config whose sample grid is the channel's own tap grid.
    pub fn for_channel(h: &ImpulseResponse<f64>, subcarriers: usize, guard_samples: usize) -> Self {
        OfdmConfig::new(subcarriers, guard_samples, h.tap_spacing())
    }

    pub fn validate(&self) -> Result<()> {
        if self.subcarriers < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 subcarriers, got {}",
                self.subcarriers
            )));
        }
        if self.guard_samples >= self.subcarriers {
            return Err(Error::InvalidParameter(format!(
                "guard length {} must stay below the DFT size {}",
                self.guard_samples, self.subcarriers
            )));
        }
        if !(self.sample_period_s > 0.0) || !self.sample_period_s.is_finite() {
            return Err(Error::InvalidParameter(
                "sample period must be positive and finite".into(),
            ));
        }
        Ok(())
    }

    /// Symbol-rate efficiency M/(M + nu).
    pub fn guard_efficiency(&self) -> f64 {
        let m = self.subcarriers as f64;
        m / (m + self.guard_samples as f64)
    }
}

/// Splits the channel power into useful and interference parts for DFT
/// size `m` and guard length `nu`. Channels longer than m + nu fall
/// outside the model and are rejected.
pub fn power_partition(h: &ImpulseResponse<f64>, m: usize, nu: usize) -> Result<(f64, f64)> {
    let l = h.len();
    if l > m + nu {
        return Err(Error::GuardTooShort { l, m, nu });
    }
    let mf = m as f64;
    let mut useful = 0.0;
    let mut interference = 0.0;
    for (d, tap) in h.taps().iter().enumerate() {
        let p = tap.norm_sqr();
        let e = d.saturating_sub(nu) as f64;
        let w = (mf - e) / mf;
        useful += p * w * w;
        interference += p * (1.0 - w * w);
    }
    Ok((useful, interference))
}

/// Signal-to-noise-plus-interference ratio in dB at the DFT output,
/// averaged over subcarriers.
pub fn snir(h: &ImpulseResponse<f64>, ofdm: &OfdmConfig) -> Result<f64> {
    ofdm.validate()?;
    let spacing = h.tap_spacing();
    if (spacing - ofdm.sample_period_s).abs() > 1e-9 * ofdm.sample_period_s {
        return Err(Error::MixedTapSpacing);
    }
    let (useful, _) = power_partition(h, ofdm.subcarriers, ofdm.guard_samples)?;
    let gain = h.power_gain();
    let eff = ofdm.guard_efficiency();
    let p_t = dbm_to_linear(ofdm.tx_psd_dbm_hz);
    let n_0 = dbm_to_linear(ofdm.noise_psd_dbm_hz);
    let ratio = eff * p_t * useful / (eff * p_t * (gain - useful) + n_0);
    Ok(crate::units::linear_to_db(ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    fn unit_tap_at(d: usize, len: usize) -> ImpulseResponse<f64> {
        let mut amps = vec![0.0; len];
        amps[d] = 1.0;
        ImpulseResponse::from_real(&amps, 1e-7).unwrap()
    }

    #[test]
    fn guard_covering_the_channel_leaves_no_interference() {
        let h = ImpulseResponse::from_real(&[0.6, 0.3, -0.2, 0.1], 1e-7).unwrap();
        let (pu, pi) = power_partition(&h, 256, 3).unwrap();
        assert_eq!(pi, 0.0);
        assert_relative_eq!(pu, h.power_gain(), max_relative = 1e-15);
    }

    #[test]
    fn quarter_symbol_excess_by_hand() {
        let m = 256;
        let nu = 8;
        let h = unit_tap_at(nu + m / 4, nu + m / 4 + 1);
        let (pu, pi) = power_partition(&h, m, nu).unwrap();
        assert_relative_eq!(pu, 9.0 / 16.0, max_relative = 1e-15);
        assert_relative_eq!(pi, 7.0 / 16.0, max_relative = 1e-15);
    }

    #[test]
    fn partition_is_homogeneous_of_degree_two() {
        let h = ImpulseResponse::from_real(&[0.5, 0.0, 0.3, -0.4, 0.2], 1e-7).unwrap();
        let scaled = ImpulseResponse::new(
            h.taps().iter().map(|t| t.scale(3.0)).collect::<Vec<_>>(),
            1e-7,
        )
        .unwrap();
        let (pu, pi) = power_partition(&h, 16, 1).unwrap();
        let (pu9, pi9) = power_partition(&scaled, 16, 1).unwrap();
        assert_relative_eq!(pu9, 9.0 * pu, max_relative = 1e-12);
        assert_relative_eq!(pi9, 9.0 * pi, max_relative = 1e-12);
    }

    #[test]
    fn conservation_holds_across_the_grid() {
        let taps: Vec<Complex<f64>> = (0..40)
            .map(|k| Complex::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos() * 0.4))
            .collect();
        let h = ImpulseResponse::new(taps, 1e-7).unwrap();
        let gain = h.power_gain();
        for m in [64, 256, 1024] {
            for nu in [0, 1, 5, 16, 39] {
                let (pu, pi) = power_partition(&h, m, nu).unwrap();
                assert_relative_eq!(pu + pi, gain, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn longer_guard_never_hurts_the_useful_power() {
        let h = ImpulseResponse::from_real(
            &[0.4, -0.2, 0.3, 0.1, -0.3, 0.2, 0.05, -0.1],
            1e-7,
        )
        .unwrap();
        let mut last_pu = -1.0;
        let mut last_pi = f64::INFINITY;
        for nu in 0..8 {
            let (pu, pi) = power_partition(&h, 64, nu).unwrap();
            assert!(pu >= last_pu);
            assert!(pi <= last_pi);
            last_pu = pu;
            last_pi = pi;
        }
    }

    #[test]
    fn overlong_channel_is_rejected() {
        let h = unit_tap_at(9, 10);
        assert!(matches!(
            power_partition(&h, 8, 1),
            Err(Error::GuardTooShort { l: 10, m: 8, nu: 1 })
        ));
    }

    #[test]
    fn covered_channel_snir_reduces_to_snr() {
        let h = ImpulseResponse::from_real(&[0.02, 0.01], 1e-7).unwrap();
        let ofdm = OfdmConfig::for_channel(&h, 1024, 4);
        let got = snir(&h, &ofdm).unwrap();
        let eff = 1024.0 / 1028.0;
        let expect = crate::units::linear_to_db(
            eff * dbm_to_linear(-55.0) * h.power_gain() / dbm_to_linear(-120.0),
        );
        assert_relative_eq!(got, expect, epsilon = 1e-12);
    }

    #[test]
    fn interference_limited_snir_forgets_the_transmit_level() {
        let h = unit_tap_at(300, 301);
        let mut ofdm = OfdmConfig::for_channel(&h, 1024, 0);
        ofdm.noise_psd_dbm_hz = -300.0;
        let a = snir(&h, &ofdm).unwrap();
        ofdm.tx_psd_dbm_hz += 25.0;
        let b = snir(&h, &ofdm).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-9);
        let (pu, pi) = power_partition(&h, 1024, 0).unwrap();
        assert_relative_eq!(a, crate::units::linear_to_db(pu / pi), epsilon = 1e-6);
    }

    #[test]
    fn mismatched_grid_is_refused() {
        let h = ImpulseResponse::from_real(&[1.0, 0.5], 1e-7).unwrap();
        let ofdm = OfdmConfig::new(256, 2, 2e-7);
        assert!(matches!(snir(&h, &ofdm), Err(Error::MixedTapSpacing)));
    }

    #[test]
    fn config_validation() {
        assert!(OfdmConfig::new(1, 0, 1e-7).validate().is_err());
        assert!(OfdmConfig::new(256, 256, 1e-7).validate().is_err());
        assert!(OfdmConfig::new(256, 0, 0.0).validate().is_err());
        assert!(OfdmConfig::new(256, 64, 1e-7).validate().is_ok());
    }
}
