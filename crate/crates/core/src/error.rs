use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate channel: no tap with nonzero amplitude")]
    DegenerateChannel,
    #[error("tap spacing must be positive and finite, got {0}")]
    BadTapSpacing(f64),
    #[error("DFT length {n} is shorter than the channel length {l}")]
    DftTooShort { n: usize, l: usize },
    #[error("roll-off must lie in [0, 1], got {0}")]
    BadRollOff(f64),
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("sample variance is zero")]
    ZeroVariance,
    #[error("samples must be positive to take logarithms")]
    NonPositiveSample,
    #[error("regression inputs are degenerate (x values carry no spread)")]
    DegenerateDesign,
    #[error("mismatched input lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("attenuation draw left truncation bounds unsatisfied after {0} attempts")]
    TruncationUnsatisfied(u32),
    #[error("regression line yields a nonpositive delay spread and no floor is configured")]
    NonPositiveSpread,
    #[error("power delay profile degenerate after {0} synthesis attempts")]
    DegeneratePdp(u32),
    #[error("channel length {l} exceeds symbol plus guard length {m} + {nu}")]
    GuardTooShort { l: usize, m: usize, nu: usize },
    #[error("no subcarrier centers fall inside the requested band")]
    EmptyBand,
    #[error("candidate grid is empty")]
    EmptyGrid,
    #[error("harmonic responses do not share a single tap spacing")]
    MixedTapSpacing,
    #[error("period {t0} s is not an integer multiple of the sample period {ts} s")]
    IncommensuratePeriod { t0: f64, ts: f64 },
    #[error("{got} frames per period resolve harmonics only up to |m| <= {resolvable}, need {need} frames")]
    TooFewFrames { got: usize, resolvable: usize, need: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed profile config, line {line}: {reason}")]
    ProfileConfig { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
