use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use wirechan::link::{DEFAULT_GAMMA_DB, DEFAULT_NOISE_PSD_DBM_HZ, DEFAULT_TX_PSD_DBM_HZ};
use wirechan::lptv::{DEFAULT_HARMONIC_STEP_DB, DEFAULT_MAX_HARMONIC, DEFAULT_PERIOD_S};

#[derive(Parser)]
#[command(
    name = "wirechan",
    version,
    about = "Statistical wireline channel generation and link evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Draw a channel ensemble and write it as CSV
    Generate(GenerateArgs),
    /// Gain and delay-spread metrics of a stored channel
    Metrics(MetricsArgs),
    /// Shannon-gap capacity of a stored channel
    Capacity(CapacityArgs),
    /// Capacity coverage CDF over a generated ensemble
    Coverage(CoverageArgs),
    /// Robust regression of delay spread on gain over a generated ensemble
    Regress(RegressArgs),
    /// Lognormality test battery on a generated ensemble's gains
    Tests(TestsArgs),
    /// Achievable-rate sweep over symbol-size/guard grids for a stored channel
    Sweep(SweepArgs),
    /// Harmonic bank of a periodically varying channel over a profile
    Lptv(LptvArgs),
}

#[derive(Args)]
pub struct ProfileSelect {
    /// Built-in scenario name, or a section name inside --config
    #[arg(long, value_name = "NAME")]
    pub profile: Option<String>,
    /// Profile override file: `key = value` lines under [name] sections
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct EnsembleOpts {
    #[command(flatten)]
    pub select: ProfileSelect,
    /// Power delay profile family
    #[arg(long, value_name = "FAMILY", default_value = "gaussian-random")]
    pub pdp: String,
    /// Number of realizations
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Master seed; each realization derives its own stream from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Taps per realization for the multi-tap families
    #[arg(long, default_value_t = 50)]
    pub taps: usize,
    /// Decay constant in taps for the exponential family
    #[arg(long, default_value_t = 10.0)]
    pub decay: f64,
    /// Redraw attenuations falling outside the scenario's measured range
    #[arg(long)]
    pub truncate: bool,
}

#[derive(Args)]
pub struct OutOpt {
    /// Output directory; defaults to $WIRECHAN_OUT, then the working directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct LinkOpts {
    /// Gap to Shannon capacity in dB
    #[arg(long, default_value_t = DEFAULT_GAMMA_DB, allow_negative_numbers = true)]
    pub gamma_db: f64,
    /// Transmit PSD in dBm/Hz
    #[arg(long, default_value_t = DEFAULT_TX_PSD_DBM_HZ, allow_negative_numbers = true)]
    pub tx_psd_dbm_hz: f64,
    /// Noise PSD in dBm/Hz
    #[arg(long, default_value_t = DEFAULT_NOISE_PSD_DBM_HZ, allow_negative_numbers = true)]
    pub noise_psd_dbm_hz: f64,
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub ensemble: EnsembleOpts,
    /// Also write the first N realizations as impulse-response CSVs
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub emit_channels: usize,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Stored impulse response (.csv or .json)
    #[arg(long, value_name = "FILE")]
    pub channel: PathBuf,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct CapacityArgs {
    /// Stored impulse response (.csv or .json)
    #[arg(long, value_name = "FILE")]
    pub channel: PathBuf,
    #[command(flatten)]
    pub link: LinkOpts,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub ensemble: EnsembleOpts,
    #[command(flatten)]
    pub link: LinkOpts,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct RegressArgs {
    #[command(flatten)]
    pub ensemble: EnsembleOpts,
    /// Fit the delay spread directly (linear) or its natural log (log)
    #[arg(long, default_value = "linear")]
    pub form: String,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct TestsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleOpts,
    /// Also write the reports as CSV
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Stored impulse response (.csv or .json)
    #[arg(long, value_name = "FILE")]
    pub channel: PathBuf,
    /// Symbol sizes: `default` or a comma-separated list
    #[arg(long, default_value = "default")]
    pub grid: String,
    /// Guard lengths as a comma-separated list (default: 0,1,2,4,.. up to M/4)
    #[arg(long, value_name = "LIST")]
    pub nu_grid: Option<String>,
    #[command(flatten)]
    pub link: LinkOpts,
    #[command(flatten)]
    pub out: OutOpt,
}

#[derive(Args)]
pub struct LptvArgs {
    #[command(flatten)]
    pub select: ProfileSelect,
    /// Power delay profile family of the underlying draw
    #[arg(long, value_name = "FAMILY", default_value = "gaussian-random")]
    pub pdp: String,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Taps per realization for the multi-tap families
    #[arg(long, default_value_t = 50)]
    pub taps: usize,
    /// Decay constant in taps for the exponential family
    #[arg(long, default_value_t = 10.0)]
    pub decay: f64,
    /// Redraw attenuations falling outside the scenario's measured range
    #[arg(long)]
    pub truncate: bool,
    /// Highest harmonic order kept in the bank
    #[arg(long, default_value_t = DEFAULT_MAX_HARMONIC)]
    pub harmonics: u32,
    /// Power step between consecutive harmonic orders in dB
    #[arg(long, default_value_t = DEFAULT_HARMONIC_STEP_DB, allow_negative_numbers = true)]
    pub step_db: f64,
    /// Variation period in seconds
    #[arg(long, default_value_t = DEFAULT_PERIOD_S)]
    pub period_s: f64,
    #[command(flatten)]
    pub out: OutOpt,
}
