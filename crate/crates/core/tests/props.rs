//! Property tests for the identities the metric, partition, generation,
//! and serialization layers promise over their whole input domains.

use proptest::prelude::*;
use wirechan::channel::ImpulseResponse;
use wirechan::gen::{generate, GeneratorConfig, PdpFamily};
use wirechan::io;
use wirechan::link::ofdm::power_partition;
use wirechan::stats::profiles::builtin_profiles;

fn ir(amps: &[f64], spacing: f64) -> ImpulseResponse<f64> {
    ImpulseResponse::from_real(amps, spacing).unwrap()
}

/// Channels broad enough that the moment subtraction stays far from
/// cancellation, keeping the 1e-12 identities meaningful.
fn broad_channel() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (
        prop::collection::vec(-2.0f64..2.0, 8..24),
        1e-8f64..1e-5,
    )
        .prop_filter("needs nonzero broad profile", |(amps, spacing)| {
            let Ok(h) = ImpulseResponse::from_real(amps, *spacing) else {
                return false;
            };
            h.rms_delay_spread() >= *spacing
        })
}

proptest! {
    #[test]
    fn mean_bin_power_equals_tap_power((amps, spacing) in broad_channel(), extra in 0usize..6) {
        let h = ir(&amps, spacing);
        let n = h.len() << extra;
        let tf = h.transfer_function(n).unwrap();
        let rel = (tf.mean_bin_power() - h.power_gain()).abs() / h.power_gain();
        prop_assert!(rel < 1e-9, "parseval off by {rel}");
    }

    #[test]
    fn spread_ignores_leading_zeros((amps, spacing) in broad_channel(), shift in 0usize..5) {
        let h = ir(&amps, spacing);
        let mut padded = vec![0.0; shift];
        padded.extend_from_slice(&amps);
        let rel = (ir(&padded, spacing).rms_delay_spread() - h.rms_delay_spread()).abs()
            / h.rms_delay_spread();
        prop_assert!(rel < 1e-12, "shift changed spread by {rel}");
    }

    #[test]
    fn spread_ignores_amplitude_scale((amps, spacing) in broad_channel(), c in 0.01f64..100.0) {
        let h = ir(&amps, spacing);
        let scaled: Vec<f64> = amps.iter().map(|a| a * c).collect();
        let rel = (ir(&scaled, spacing).rms_delay_spread() - h.rms_delay_spread()).abs()
            / h.rms_delay_spread();
        prop_assert!(rel < 1e-12, "amplitude scale changed spread by {rel}");
    }

    #[test]
    fn spread_scales_with_the_grid((amps, spacing) in broad_channel(), c in 0.01f64..100.0) {
        let h = ir(&amps, spacing);
        let rel = (ir(&amps, spacing * c).rms_delay_spread() - c * h.rms_delay_spread()).abs()
            / (c * h.rms_delay_spread());
        prop_assert!(rel < 1e-12, "grid scale law off by {rel}");
    }

    #[test]
    fn two_tap_spread_closed_form(
        a in prop::sample::select(vec![-1.0f64, 1.0]).prop_flat_map(|s| (0.05f64..2.0).prop_map(move |m| s * m)),
        b in prop::sample::select(vec![-1.0f64, 1.0]).prop_flat_map(|s| (0.05f64..2.0).prop_map(move |m| s * m)),
        tau in 1e-8f64..1e-5,
    ) {
        let h = ir(&[a, b], tau);
        let closed = (a * b).abs() / (a * a + b * b) * tau;
        let rel = (h.rms_delay_spread() - closed).abs() / closed;
        prop_assert!(rel < 1e-12, "closed form off by {rel}");
    }

    #[test]
    fn partition_conserves_power(
        (amps, spacing) in broad_channel(),
        m in prop::sample::select(vec![64usize, 256, 1024]),
        nu in 0usize..128,
    ) {
        let h = ir(&amps, spacing);
        let (pu, pi) = power_partition(&h, m, nu).unwrap();
        let gain = h.power_gain();
        prop_assert!((pu + pi - gain).abs() <= 1e-12 * gain);
        prop_assert!(pu >= 0.0 && pi >= 0.0);
        // full guard coverage leaves nothing as interference
        if nu + 1 >= h.len() {
            prop_assert!(pi == 0.0);
        }
    }

    #[test]
    fn generation_hits_both_targets(
        profile_idx in 0usize..7,
        family_idx in 0usize..4,
        taps in 2usize..80,
        seed in any::<u64>(),
    ) {
        let mut config = GeneratorConfig::new(builtin_profiles()[profile_idx].clone());
        config.family = PdpFamily::ALL[family_idx];
        config.taps = taps;
        config.seed = seed;
        let mut rng = wirechan::rng::stream(seed, 0);
        let r = generate(&config, &mut rng).unwrap();
        prop_assert!(
            (r.achieved_gain_db - r.target_gain_db).abs() < 1e-9,
            "gain {} vs target {}",
            r.achieved_gain_db,
            r.target_gain_db
        );
        let rel = (r.achieved_rmsds_s - r.target_rmsds_s).abs() / r.target_rmsds_s;
        prop_assert!(rel < 1e-9, "spread off target by {rel}");
    }

    #[test]
    fn impulse_csv_and_json_round_trip((amps, spacing) in broad_channel()) {
        let h = ir(&amps, spacing);
        let back = io::impulse_from_csv(&io::impulse_to_csv(&h)).unwrap();
        prop_assert_eq!(back.len(), h.len());
        prop_assert!(back.tap_spacing().to_bits() == h.tap_spacing().to_bits());
        for (x, y) in back.taps().iter().zip(h.taps()) {
            prop_assert!(x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
        }
        let back = io::impulse_from_json(&io::impulse_to_json(&h)).unwrap();
        for (x, y) in back.taps().iter().zip(h.taps()) {
            prop_assert!(x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
        }
    }
}
