//! Shannon-gap rate estimates over the transmission band.

use serde::Serialize;

use crate::channel::ImpulseResponse;
use crate::gen::Ensemble;
use crate::link::ofdm::{snir, OfdmConfig, DEFAULT_NOISE_PSD_DBM_HZ, DEFAULT_TX_PSD_DBM_HZ};
use crate::units::{db_to_linear, dbm_to_linear};
use crate::{Error, Result};

pub const DEFAULT_BANDWIDTH_HZ: f64 = 28e6;
pub const DEFAULT_GAMMA_DB: f64 = 7.0;
pub const DEFAULT_EFFICIENCY_CAP: f64 = 12.0;
pub const DEFAULT_BAND_START_HZ: f64 = 2e6;
pub const DEFAULT_BAND_END_HZ: f64 = 30e6;
pub const DEFAULT_CAPACITY_SUBCARRIERS: usize = 1024;
pub const DEFAULT_M_GRID: [usize; 5] = [256, 512, 1024, 2048, 4096];

/// SNR gap in dB from an uncoded baseline at 1e-7 symbol error rate plus
/// margin, minus coding gain.
pub fn gamma_from_components(margin_db: f64, coding_gain_db: f64) -> f64 {
    9.8 + margin_db - coding_gain_db
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CapacityConfig {
    pub bandwidth_hz: f64,
    pub gamma_db: f64,
    /// Spectral efficiency ceiling per subcarrier, bits/s/Hz.
    pub efficiency_cap: f64,
    pub band_start_hz: f64,
    pub band_end_hz: f64,
    pub tx_psd_dbm_hz: f64,
    pub noise_psd_dbm_hz: f64,
    /// Number of evaluation points across the band.
    pub subcarriers: usize,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        CapacityConfig {
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            gamma_db: DEFAULT_GAMMA_DB,
            efficiency_cap: DEFAULT_EFFICIENCY_CAP,
            band_start_hz: DEFAULT_BAND_START_HZ,
            band_end_hz: DEFAULT_BAND_END_HZ,
            tx_psd_dbm_hz: DEFAULT_TX_PSD_DBM_HZ,
            noise_psd_dbm_hz: DEFAULT_NOISE_PSD_DBM_HZ,
            subcarriers: DEFAULT_CAPACITY_SUBCARRIERS,
        }
    }
}

impl CapacityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::InvalidParameter("bandwidth must be positive".into()));
        }
        if !(self.efficiency_cap > 0.0) {
            return Err(Error::InvalidParameter(
                "efficiency cap must be positive".into(),
            ));
        }
        if self.subcarriers == 0 || !(self.band_end_hz > self.band_start_hz) {
            return Err(Error::EmptyBand);
        }
        Ok(())
    }
}

/// Achievable multicarrier rate in bits/s: guard-efficiency times
/// bandwidth times the capped Shannon-gap efficiency at the channel SNIR.
pub fn achievable_rate_mc(
    h: &ImpulseResponse<f64>,
    ofdm: &OfdmConfig,
    cap: &CapacityConfig,
) -> Result<f64> {
    cap.validate()?;
    let snir_db = snir(h, ofdm)?;
    let eff = (1.0 + db_to_linear(snir_db) / db_to_linear(cap.gamma_db))
        .log2()
        .min(cap.efficiency_cap);
    Ok(ofdm.guard_efficiency() * cap.bandwidth_hz * eff)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CpOperatingPoint {
    pub subcarriers: usize,
    pub guard_samples: usize,
    pub rate_bps: f64,
}

/// Guard lengths examined for DFT size `m`: zero, then doublings up to a
/// quarter symbol.
pub fn default_nu_grid(m: usize) -> Vec<usize> {
    let mut grid = vec![0];
    let mut nu = 1;
    while nu <= m / 4 {
        grid.push(nu);
        nu *= 2;
    }
    grid
}

/// Evaluates the achievable rate on every feasible (M, nu) grid point.
/// Infeasible points (channel longer than M + nu, or nu >= M) are skipped.
pub fn sweep_cp(
    h: &ImpulseResponse<f64>,
    m_grid: &[usize],
    nu_grid: Option<&[usize]>,
    base: &OfdmConfig,
    cap: &CapacityConfig,
) -> Result<Vec<CpOperatingPoint>> {
    if m_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut points = Vec::new();
    for &m in m_grid {
        let nus = match nu_grid {
            Some(g) => g.to_vec(),
            None => default_nu_grid(m),
        };
        for nu in nus {
            if nu >= m || h.len() > m + nu {
                continue;
            }
            let mut ofdm = *base;
            ofdm.subcarriers = m;
            ofdm.guard_samples = nu;
            let rate_bps = achievable_rate_mc(h, &ofdm, cap)?;
            points.push(CpOperatingPoint { subcarriers: m, guard_samples: nu, rate_bps });
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(points)
}

/// Exhaustive rate maximization over the (M, nu) grid. Ties go to the
/// smaller guard first, then the smaller DFT size.
pub fn optimize_cp(
    h: &ImpulseResponse<f64>,
    m_grid: &[usize],
    nu_grid: Option<&[usize]>,
    base: &OfdmConfig,
    cap: &CapacityConfig,
) -> Result<CpOperatingPoint> {
    let points = sweep_cp(h, m_grid, nu_grid, base, cap)?;
    let mut best = points[0];
    for p in &points[1..] {
        let better = p.rate_bps > best.rate_bps
            || (p.rate_bps == best.rate_bps
                && (p.guard_samples < best.guard_samples
                    || (p.guard_samples == best.guard_samples
                        && p.subcarriers < best.subcarriers)));
        if better {
            best = *p;
        }
    }
    Ok(best)
}

/// Shannon-gap capacity in bits/s over the configured band: bandwidth
/// times the mean capped efficiency at the band's evaluation points.
pub fn capacity(h: &ImpulseResponse<f64>, cap: &CapacityConfig) -> Result<f64> {
    cap.validate()?;
    let k = cap.subcarriers;
    let span = cap.band_end_hz - cap.band_start_hz;
    let p_t = dbm_to_linear(cap.tx_psd_dbm_hz);
    let n_0 = dbm_to_linear(cap.noise_psd_dbm_hz);
    let gamma = db_to_linear(cap.gamma_db);
    let mut total = 0.0;
    for i in 0..k {
        let f = cap.band_start_hz + (i as f64 + 0.5) * span / k as f64;
        let snr = p_t * h.frequency_response(f).norm_sqr() / n_0;
        total += (1.0 + snr / gamma).log2().min(cap.efficiency_cap);
    }
    Ok(cap.bandwidth_hz * total / k as f64)
}

pub fn ensemble_capacities(ensemble: &Ensemble, cap: &CapacityConfig) -> Result<Vec<f64>> {
    ensemble
        .realizations
        .iter()
        .map(|r| capacity(&r.channel, cap))
        .collect()
}

/// Empirical CDF of per-realization capacity: sorted (rate, probability)
/// pairs with probabilities i/n for i = 1..n.
pub fn coverage_cdf(ensemble: &Ensemble, cap: &CapacityConfig) -> Result<Vec<(f64, f64)>> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let mut rates = ensemble_capacities(ensemble, cap)?;
    rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = rates.len() as f64;
    Ok(rates
        .into_iter()
        .enumerate()
        .map(|(i, r)| (r, (i + 1) as f64 / n))
        .collect())
}

/// Pearson correlations of capacity with the gain in dB and with the RMS
/// delay spread across an ensemble.
pub fn capacity_gain_correlation(
    ensemble: &Ensemble,
    cap: &CapacityConfig,
) -> Result<(f64, f64)> {
    if ensemble.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: ensemble.len() });
    }
    let rates = ensemble_capacities(ensemble, cap)?;
    let corr_gain = crate::stats::pearson(&rates, &ensemble.gains_db())?;
    let corr_rmsds = crate::stats::pearson(&rates, &ensemble.rmsds_s())?;
    Ok((corr_gain, corr_rmsds))
}
