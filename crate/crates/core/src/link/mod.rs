//! Rate and interference evaluation of generated channels.

pub mod capacity;
pub mod ofdm;

pub use capacity::{
    achievable_rate_mc, capacity, capacity_gain_correlation, coverage_cdf, default_nu_grid,
    ensemble_capacities, gamma_from_components, optimize_cp, sweep_cp, CapacityConfig,
    CpOperatingPoint, DEFAULT_BANDWIDTH_HZ, DEFAULT_BAND_END_HZ, DEFAULT_BAND_START_HZ,
    DEFAULT_CAPACITY_SUBCARRIERS, DEFAULT_EFFICIENCY_CAP, DEFAULT_GAMMA_DB, DEFAULT_M_GRID,
};
pub use ofdm::{
    power_partition, snir, OfdmConfig, DEFAULT_NOISE_PSD_DBM_HZ, DEFAULT_TX_PSD_DBM_HZ,
};
