//! Statistical wireline channel models.
//!
//! The crate covers the full chain from scenario statistics to link metrics:
//! impulse-response synthesis calibrated to measured attenuation and delay
//! spread ensembles, the delay-domain and frequency-domain metrics on those
//! responses, OFDM useful/interference power partitioning with cyclic prefix
//! optimization, water-line-free capacity integration, goodness-of-fit
//! machinery for validating generated ensembles, and linear periodically
//! time-varying extensions built from harmonic tap banks.
//!
//! Core signal types are generic over the scalar ([`Real`], implemented by
//! `f32` and `f64`); the statistics and generation layers work in `f64`.
//! The aliases at the crate root fix the common choice.

pub mod channel;
pub mod error;
pub mod gen;
pub mod io;
pub mod kernel;
pub mod link;
pub mod lptv;
pub mod real;
pub mod rng;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
pub use gen::{
    generate, generate_ensemble, generate_two_tap, two_tap_from_targets, Ensemble,
    GeneratorConfig, PdpFamily, Realization,
};
pub use link::{
    achievable_rate_mc, capacity, capacity_gain_correlation, coverage_cdf, optimize_cp,
    power_partition, snir, sweep_cp, CapacityConfig, CpOperatingPoint, OfdmConfig,
};
pub use lptv::{
    apply_lptv, harmonic_extract, lptv_bank, lptv_equivalent_response, zadeh_compose,
    LptvChannel, SampledResponse,
};
pub use real::Real;
pub use stats::{LineForm, RegressionLine, ScenarioProfile, SummaryStats, TestReport};

/// Impulse response with `f64` taps, the default working type.
pub type ImpulseResponse = channel::ImpulseResponse<f64>;
pub type TransferFunction = channel::TransferFunction<f64>;
pub type NyquistKernel = kernel::NyquistKernel<f64>;

pub type ImpulseResponse32 = channel::ImpulseResponse<f32>;
pub type TransferFunction32 = channel::TransferFunction<f32>;
pub type NyquistKernel32 = kernel::NyquistKernel<f32>;
