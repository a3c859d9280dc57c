//! Channel synthesis: scenario statistics in, impulse responses out.
//!
//! A realization is built in five steps: shape an unnormalized power delay
//! profile on a unit grid, draw the attenuation, derive the target delay
//! spread from it, scale the taps to hit the gain exactly, and pick the tap
//! spacing that hits the delay spread exactly. The last two steps are
//! algebraic, so the targets are met to rounding error rather than
//! statistically.

use rand::distributions::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::Normal;

use crate::channel::ImpulseResponse;
use crate::rng::stream;
use crate::stats::profiles::ScenarioProfile;
use crate::{Error, Result};

/// Default tap count for multi-tap families.
pub const DEFAULT_TAPS: usize = 50;
/// Default decay constant, in taps, for the exponential profile.
pub const DEFAULT_EXPONENTIAL_DECAY: f64 = 10.0;
/// Default floor applied to regression-line delay spreads, in seconds.
pub const DEFAULT_RMSDS_FLOOR_S: f64 = 1e-9;
const MAX_TRUNCATION_REDRAWS: u32 = 10_000;
const MAX_PDP_ATTEMPTS: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PdpFamily {
    /// Independent standard normal amplitudes.
    GaussianRandom,
    /// Amplitude magnitude exp(-k / decay) with random signs.
    Exponential,
    /// Equal tap powers with random signs.
    EquiPower,
    /// Two unit taps; the minimal profile with a tunable delay spread.
    TwoTap,
}

impl PdpFamily {
    pub const ALL: [PdpFamily; 4] = [
        PdpFamily::GaussianRandom,
        PdpFamily::Exponential,
        PdpFamily::EquiPower,
        PdpFamily::TwoTap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PdpFamily::GaussianRandom => "gaussian-random",
            PdpFamily::Exponential => "exponential",
            PdpFamily::EquiPower => "equi-power",
            PdpFamily::TwoTap => "two-tap",
        }
    }
}

impl std::str::FromStr for PdpFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PdpFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown profile family {s}")))
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub profile: ScenarioProfile,
    pub family: PdpFamily,
    /// Tap count for multi-tap families; the two-tap family always uses 2.
    pub taps: usize,
    pub exponential_decay: f64,
    /// Redraw attenuation until it falls inside the profile's table bounds.
    pub truncate_to_bounds: bool,
    /// Lower bound substituted when a fitted line yields a nonpositive
    /// spread; `None` turns such draws into errors.
    pub rmsds_floor_s: Option<f64>,
    /// Master seed recorded with ensembles generated from this config.
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(profile: ScenarioProfile) -> Self {
        GeneratorConfig {
            profile,
            family: PdpFamily::GaussianRandom,
            taps: DEFAULT_TAPS,
            exponential_decay: DEFAULT_EXPONENTIAL_DECAY,
            truncate_to_bounds: false,
            rmsds_floor_s: Some(DEFAULT_RMSDS_FLOOR_S),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        if self.family != PdpFamily::TwoTap && self.taps < 2 {
            return Err(Error::InvalidParameter(format!(
                "multi-tap families need at least 2 taps, got {}",
                self.taps
            )));
        }
        if !(self.exponential_decay > 0.0) {
            return Err(Error::InvalidParameter(
                "exponential decay must be positive".into(),
            ));
        }
        if let Some(f) = self.rmsds_floor_s {
            if !(f > 0.0) {
                return Err(Error::InvalidParameter(
                    "delay spread floor must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Where in a seeded ensemble a realization came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedPath {
    pub master: u64,
    pub index: u64,
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub channel: ImpulseResponse<f64>,
    pub target_gain_db: f64,
    pub target_rmsds_s: f64,
    pub achieved_gain_db: f64,
    pub achieved_rmsds_s: f64,
    pub seed_path: Option<SeedPath>,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub realizations: Vec<Realization>,
    pub master_seed: u64,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    pub fn gains_db(&self) -> Vec<f64> {
        self.realizations.iter().map(|r| r.achieved_gain_db).collect()
    }

    pub fn attenuations_db(&self) -> Vec<f64> {
        self.realizations.iter().map(|r| -r.achieved_gain_db).collect()
    }

    pub fn rmsds_s(&self) -> Vec<f64> {
        self.realizations.iter().map(|r| r.achieved_rmsds_s).collect()
    }
}

/// Draws the attenuation in dB for a scenario: normal in dB, clamped at 0.
/// With `truncate` set, values outside the profile's table bounds are
/// redrawn (at most 10^4 times).
pub fn draw_attenuation<R: Rng + ?Sized>(
    profile: &ScenarioProfile,
    truncate: bool,
    rng: &mut R,
) -> Result<f64> {
    let normal = Normal::new(profile.atten_mu_db, profile.atten_sigma_db)
        .map_err(|e| Error::InvalidParameter(format!("attenuation distribution: {e}")))?;
    let lo = profile.atten_min_db.unwrap_or(f64::NEG_INFINITY);
    let hi = profile.atten_max_db.unwrap_or(f64::INFINITY);
    let mut attempts = 0u32;
    loop {
        let draw = normal.sample(rng);
        if !truncate || (draw >= lo && draw <= hi) {
            return Ok(draw.max(0.0));
        }
        attempts += 1;
        if attempts >= MAX_TRUNCATION_REDRAWS {
            return Err(Error::TruncationUnsatisfied(attempts));
        }
    }
}

/// Target RMS delay spread in seconds for a channel at `atten_db`.
///
/// Outlier-prone scenarios (kurtosis above 3) with a conditional branch
/// draw from the conditional lognormal above its attenuation threshold;
/// everything else evaluates the profile's preferred fitted line. Line
/// values are floored at `floor_s` when one is given; a nonpositive line
/// value without a floor is an error.
pub fn target_rms_ds<R: Rng + ?Sized>(
    profile: &ScenarioProfile,
    atten_db: f64,
    floor_s: Option<f64>,
    rng: &mut R,
) -> Result<f64> {
    if let Some(cond) = &profile.conditional_spread {
        if profile.rmsds_kurtosis > 3.0 && atten_db > cond.threshold_db {
            // moment-matched lognormal in the linear microsecond domain
            let m2 = cond.mean_us * cond.mean_us;
            let s2 = cond.std_us * cond.std_us;
            let mu_log = (m2 / (m2 + s2).sqrt()).ln();
            let sigma_log = (1.0 + s2 / m2).ln().sqrt();
            let normal = Normal::new(mu_log, sigma_log)
                .map_err(|e| Error::InvalidParameter(format!("conditional spread: {e}")))?;
            return Ok(normal.sample(rng).exp() * 1e-6);
        }
    }
    let us = profile.spread_line().rmsds_us_at(-atten_db);
    let s = us * 1e-6;
    match floor_s {
        Some(f) => Ok(s.max(f)),
        None if s > 0.0 => Ok(s),
        None => Err(Error::NonPositiveSpread),
    }
}

/// Shapes the unnormalized tap amplitudes on a unit delay grid.
pub fn synthesize_pdp<R: Rng + ?Sized>(
    config: &GeneratorConfig,
    rng: &mut R,
) -> Result<ImpulseResponse<f64>> {
    let amps: Vec<f64> = match config.family {
        PdpFamily::GaussianRandom => {
            let normal = Normal::new(0.0, 1.0).unwrap();
            (0..config.taps).map(|_| normal.sample(rng)).collect()
        }
        PdpFamily::Exponential => (0..config.taps)
            .map(|k| {
                let mag = (-(k as f64) / config.exponential_decay).exp();
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect(),
        PdpFamily::EquiPower => (0..config.taps)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect(),
        PdpFamily::TwoTap => vec![1.0, 1.0],
    };
    ImpulseResponse::from_real(&amps, 1.0)
}

/// Runs the full synthesis chain with draws taken from `rng`.
pub fn generate<R: Rng + ?Sized>(config: &GeneratorConfig, rng: &mut R) -> Result<Realization> {
    config.validate()?;
    let (pdp, unit_spread) = {
        let mut attempt = 0u32;
        loop {
            let pdp = synthesize_pdp(config, rng)?;
            let s = pdp.rms_delay_spread();
            if s > 0.0 {
                break (pdp, s);
            }
            attempt += 1;
            if attempt >= MAX_PDP_ATTEMPTS {
                return Err(Error::DegeneratePdp(attempt));
            }
        }
    };
    let atten_db = draw_attenuation(&config.profile, config.truncate_to_bounds, rng)?;
    let target_gain_db = -atten_db;
    let target_rmsds_s = target_rms_ds(&config.profile, atten_db, config.rmsds_floor_s, rng)?;

    let gain_lin = crate::units::db_to_linear(target_gain_db);
    let scale = (gain_lin / pdp.power_gain()).sqrt();
    let taps: Vec<_> = pdp.taps().iter().map(|h| h.scale(scale)).collect();
    let tap_spacing = target_rmsds_s / unit_spread;
    let channel = ImpulseResponse::new(taps, tap_spacing)?;

    Ok(Realization {
        achieved_gain_db: channel.power_gain_db(),
        achieved_rmsds_s: channel.rms_delay_spread(),
        channel,
        target_gain_db,
        target_rmsds_s,
        seed_path: None,
    })
}

/// Builds the two-tap channel that hits the given targets exactly:
/// both taps carry half the linear gain and sit 2 sigma apart.
pub fn two_tap_from_targets(gain_db: f64, rmsds_s: f64) -> Result<Realization> {
    if !(rmsds_s > 0.0) {
        return Err(Error::NonPositiveSpread);
    }
    let amp = (0.5 * crate::units::db_to_linear(gain_db)).sqrt();
    let channel = ImpulseResponse::from_real(&[amp, amp], 2.0 * rmsds_s)?;
    Ok(Realization {
        achieved_gain_db: channel.power_gain_db(),
        achieved_rmsds_s: channel.rms_delay_spread(),
        channel,
        target_gain_db: gain_db,
        target_rmsds_s: rmsds_s,
        seed_path: None,
    })
}

/// Closed-form two-tap synthesis: same draws as [`generate`] with the
/// two-tap family, but no scaling loop.
pub fn generate_two_tap<R: Rng + ?Sized>(
    profile: &ScenarioProfile,
    rng: &mut R,
) -> Result<Realization> {
    profile.validate()?;
    let atten_db = draw_attenuation(profile, false, rng)?;
    let rmsds_s = target_rms_ds(profile, atten_db, Some(DEFAULT_RMSDS_FLOOR_S), rng)?;
    two_tap_from_targets(-atten_db, rmsds_s)
}

/// Generates `count` realizations with per-index seeds derived from
/// `master_seed`; element `i` is reproducible in isolation.
pub fn generate_ensemble(
    config: &GeneratorConfig,
    count: usize,
    master_seed: u64,
) -> Result<Ensemble> {
    if count == 0 {
        return Err(Error::InvalidParameter("ensemble count must be positive".into()));
    }
    config.validate()?;
    let mut realizations = Vec::with_capacity(count);
    for index in 0..count as u64 {
        let mut rng = stream(master_seed, index);
        let mut r = generate(config, &mut rng)?;
        r.seed_path = Some(SeedPath { master: master_seed, index });
        realizations.push(r);
    }
    Ok(Ensemble { realizations, master_seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::profiles::builtin_profile;
    use approx::assert_relative_eq;

    fn urban() -> ScenarioProfile {
        builtin_profile("ih-plc-urban").unwrap()
    }

    #[test]
    fn attenuation_moments_recover_the_table() {
        let p = urban();
        let mut rng = stream(1, 0);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| draw_attenuation(&p, false, &mut rng).unwrap())
            .collect();
        let s = crate::stats::summary_statistics(&draws).unwrap();
        assert!((s.mean - 41.5).abs() < 0.15, "mean {}", s.mean);
        assert!((s.std_dev - 13.4).abs() < 0.15, "std {}", s.std_dev);
    }

    #[test]
    fn vanishing_sigma_collapses_to_mu() {
        let mut p = urban();
        p.atten_sigma_db = 1e-300;
        let mut rng = stream(2, 0);
        for _ in 0..50 {
            assert_eq!(draw_attenuation(&p, false, &mut rng).unwrap(), 41.5);
        }
    }

    #[test]
    fn truncation_respects_table_bounds() {
        let p = builtin_profile("ih-plc-suburban").unwrap();
        let mut rng = stream(3, 0);
        for _ in 0..5000 {
            let a = draw_attenuation(&p, true, &mut rng).unwrap();
            assert!((19.7..=68.1).contains(&a), "draw {a}");
        }
    }

    #[test]
    fn impossible_truncation_errors_out() {
        let mut p = urban();
        p.atten_min_db = Some(400.0);
        p.atten_max_db = Some(401.0);
        let mut rng = stream(4, 0);
        assert!(matches!(
            draw_attenuation(&p, true, &mut rng),
            Err(Error::TruncationUnsatisfied(_))
        ));
    }

    #[test]
    fn line_evaluations_match_hand_arithmetic() {
        let mut rng = stream(5, 0);
        let urban = urban();
        let got = target_rms_ds(&urban, 41.5, None, &mut rng).unwrap();
        assert_relative_eq!(got, 0.2052e-6, max_relative = 1e-12);

        let mv = builtin_profile("mv-plc").unwrap();
        let got = target_rms_ds(&mv, 45.2, None, &mut rng).unwrap();
        assert_relative_eq!(got, 0.522e-6, max_relative = 1e-12);
    }

    #[test]
    fn suburban_below_threshold_uses_its_log_line() {
        let p = builtin_profile("ih-plc-suburban").unwrap();
        let mut rng = stream(6, 0);
        let got = target_rms_ds(&p, 40.0, None, &mut rng).unwrap();
        assert_relative_eq!(got, (-0.027f64 * -40.0 - 2.12).exp() * 1e-6, max_relative = 1e-12);
    }

    #[test]
    fn conditional_branch_reproduces_linear_moments() {
        let p = builtin_profile("ih-plc-suburban").unwrap();
        let mut rng = stream(7, 0);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| target_rms_ds(&p, 50.0, None, &mut rng).unwrap() * 1e6)
            .collect();
        let s = crate::stats::summary_statistics(&draws).unwrap();
        assert!((s.mean - 0.6).abs() < 0.02, "conditional mean {}", s.mean);
        assert!((s.std_dev - 0.3).abs() < 0.02, "conditional std {}", s.std_dev);
    }

    #[test]
    fn negative_line_value_floors_or_errors() {
        let cx = builtin_profile("ih-cx").unwrap();
        let mut rng = stream(8, 0);
        // 0.0016 * 20 - 0.044 < 0
        let floored = target_rms_ds(&cx, 20.0, Some(1e-9), &mut rng).unwrap();
        assert_eq!(floored, 1e-9);
        assert!(matches!(
            target_rms_ds(&cx, 20.0, None, &mut rng),
            Err(Error::NonPositiveSpread)
        ));
    }

    #[test]
    fn pdp_families_have_their_shapes() {
        let mut config = GeneratorConfig::new(urban());
        let mut rng = stream(9, 0);

        config.family = PdpFamily::EquiPower;
        config.taps = 4;
        let pdp = synthesize_pdp(&config, &mut rng).unwrap();
        for h in pdp.taps() {
            assert_eq!(h.norm_sqr(), 1.0);
        }

        config.family = PdpFamily::TwoTap;
        let pdp = synthesize_pdp(&config, &mut rng).unwrap();
        assert_eq!(pdp.taps().len(), 2);
        assert_eq!(pdp.taps()[0].re, 1.0);
        assert_eq!(pdp.taps()[1].re, 1.0);

        config.family = PdpFamily::Exponential;
        config.taps = 30;
        config.exponential_decay = 5.0;
        let pdp = synthesize_pdp(&config, &mut rng).unwrap();
        for (k, h) in pdp.taps().iter().enumerate() {
            assert_relative_eq!(h.norm(), (-(k as f64) / 5.0).exp(), max_relative = 1e-12);
        }

        config.family = PdpFamily::GaussianRandom;
        config.taps = 1000;
        let pdp = synthesize_pdp(&config, &mut rng).unwrap();
        let amps: Vec<f64> = pdp.taps().iter().map(|h| h.re).collect();
        let var = amps.iter().map(|a| a * a).sum::<f64>() / 1000.0;
        assert!((var - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn signs_are_balanced() {
        let mut config = GeneratorConfig::new(urban());
        config.family = PdpFamily::EquiPower;
        config.taps = 4000;
        let mut rng = stream(10, 0);
        let pdp = synthesize_pdp(&config, &mut rng).unwrap();
        let positive = pdp.taps().iter().filter(|h| h.re > 0.0).count();
        assert!((positive as f64 - 2000.0).abs() < 200.0, "{positive} positive of 4000");
    }

    #[test]
    fn generation_hits_both_targets() {
        for family in PdpFamily::ALL {
            let mut config = GeneratorConfig::new(urban());
            config.family = family;
            config.taps = 40;
            for idx in 0..50 {
                let mut rng = stream(11, idx);
                let r = generate(&config, &mut rng).unwrap();
                assert!(
                    (r.achieved_gain_db - r.target_gain_db).abs() < 1e-9,
                    "{}: gain {} vs {}",
                    family.name(),
                    r.achieved_gain_db,
                    r.target_gain_db
                );
                assert!(
                    (r.achieved_rmsds_s - r.target_rmsds_s).abs() / r.target_rmsds_s < 1e-9,
                    "{}: rmsds {} vs {}",
                    family.name(),
                    r.achieved_rmsds_s,
                    r.target_rmsds_s
                );
            }
        }
    }

    #[test]
    fn forced_two_tap_operating_point() {
        let r = two_tap_from_targets(-50.0, 0.2e-6).unwrap();
        for h in r.channel.taps() {
            assert_relative_eq!(h.norm_sqr(), 0.5e-5, max_relative = 1e-12);
        }
        assert_relative_eq!(r.channel.tap_spacing(), 0.4e-6, max_relative = 1e-15);
        assert_relative_eq!(r.achieved_gain_db, -50.0, epsilon = 1e-12);
        assert_relative_eq!(r.achieved_rmsds_s, 0.2e-6, max_relative = 1e-12);
    }

    #[test]
    fn forced_multitap_operating_point() {
        // deterministic profile: sigma ~ 0, flat line at 1.3 us
        let mut p = urban();
        p.atten_mu_db = 50.0;
        p.atten_sigma_db = 1e-300;
        p.linear_line.slope = 0.0;
        p.linear_line.intercept = 1.3;
        let mut config = GeneratorConfig::new(p);
        config.taps = 1000;
        let mut rng = stream(12, 0);
        let r = generate(&config, &mut rng).unwrap();
        assert_relative_eq!(r.achieved_gain_db, -50.0, epsilon = 1e-9);
        assert_relative_eq!(r.achieved_rmsds_s, 1.3e-6, max_relative = 1e-9);
    }

    #[test]
    fn closed_form_matches_general_path_bit_for_bit() {
        let mut config = GeneratorConfig::new(urban());
        config.family = PdpFamily::TwoTap;
        for idx in 0..200 {
            let mut rng_a = stream(13, idx);
            let mut rng_b = stream(13, idx);
            let a = generate(&config, &mut rng_a).unwrap();
            let b = generate_two_tap(&config.profile, &mut rng_b).unwrap();
            assert_eq!(a.channel.tap_spacing().to_bits(), b.channel.tap_spacing().to_bits());
            for (ha, hb) in a.channel.taps().iter().zip(b.channel.taps()) {
                assert_eq!(ha.re.to_bits(), hb.re.to_bits());
                assert_eq!(ha.im.to_bits(), hb.im.to_bits());
            }
        }
    }

    #[test]
    fn ensembles_reproduce_and_are_indexed() {
        let mut config = GeneratorConfig::new(urban());
        config.family = PdpFamily::TwoTap;
        let a = generate_ensemble(&config, 20, 99).unwrap();
        let b = generate_ensemble(&config, 20, 99).unwrap();
        for (x, y) in a.realizations.iter().zip(&b.realizations) {
            assert_eq!(x.achieved_gain_db.to_bits(), y.achieved_gain_db.to_bits());
            assert_eq!(x.achieved_rmsds_s.to_bits(), y.achieved_rmsds_s.to_bits());
        }
        assert_eq!(a.realizations[7].seed_path, Some(SeedPath { master: 99, index: 7 }));
        // single-element ensemble equals the first element of a larger one
        let single = generate_ensemble(&config, 1, 99).unwrap();
        assert_eq!(
            single.realizations[0].achieved_gain_db.to_bits(),
            a.realizations[0].achieved_gain_db.to_bits()
        );
    }

    #[test]
    fn ensemble_gains_look_lognormal() {
        let mut config = GeneratorConfig::new(urban());
        config.family = PdpFamily::TwoTap;
        let ens = generate_ensemble(&config, 5000, 314).unwrap();
        // attenuation is normal in dB by construction; feed the linear
        // gains to the lognormality battery
        let linear_gains: Vec<f64> = ens
            .gains_db()
            .iter()
            .map(|g| crate::units::db_to_linear(*g))
            .collect();
        let reports = crate::stats::lognormality_battery(&linear_gains).unwrap();
        for r in reports.iter().filter(|r| r.is_applicable()) {
            assert!(!r.reject_at_5pct, "{} rejected", r.test_name);
        }
    }

    #[test]
    fn gain_and_spread_move_together_negatively() {
        for p in crate::stats::builtin_profiles() {
            let mut config = GeneratorConfig::new(p.clone());
            config.family = PdpFamily::TwoTap;
            let ens = generate_ensemble(&config, 1000, 2718).unwrap();
            let gains = ens.gains_db();
            let spreads: Vec<f64> = match p.spread_line().form {
                crate::stats::LineForm::Log => {
                    ens.rmsds_s().iter().map(|s| s.ln()).collect()
                }
                crate::stats::LineForm::Linear => ens.rmsds_s(),
            };
            let corr = crate::stats::pearson(&gains, &spreads).unwrap();
            assert!(corr < 0.0, "{}: correlation {corr}", p.name);
        }
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let mut config = GeneratorConfig::new(urban());
        config.taps = 1;
        assert!(config.validate().is_err());
        config.taps = 1;
        config.family = PdpFamily::TwoTap;
        assert!(config.validate().is_ok());
        config.exponential_decay = 0.0;
        assert!(config.validate().is_err());
    }
}
