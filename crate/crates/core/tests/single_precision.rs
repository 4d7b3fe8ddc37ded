//! The whole pipeline in f32.

use basstune::advisor::{combined_response, transposition_loss};
use basstune::analysis::{cycle_f0_track, estimate_f0_track, sweep_range, F0Config};
use basstune::monitors::{bundled_dataset, median_response};
use basstune::perception::PhonLevel;
use basstune::voice::{reference_driven_profile, synth_voice};
use basstune::{AudioClipF32, VoiceParamsF32};

#[test]
fn f32_pipeline_matches_f64_within_float_tolerance() {
    let clip: AudioClipF32 = synth_voice(&VoiceParamsF32::long_default()).unwrap();
    let track = estimate_f0_track(&clip, &F0Config::default()).unwrap();
    assert!((track.steady_f0().unwrap() - 49.48).abs() < 0.2);
    let sweep = sweep_range(&cycle_f0_track(&clip, (25.0, 120.0), -60.0).unwrap()).unwrap();
    assert!((sweep - 1.0).abs() < 0.15);

    let speakers = median_response(&bundled_dataset::<f32>(), 1.0 / 3.0).unwrap();
    let curve = combined_response(&speakers, PhonLevel::new(60.0f32).unwrap()).unwrap();
    let r32 = transposition_loss(&reference_driven_profile::<f32>(), -5.0, &curve).unwrap();

    let speakers64 = median_response(&bundled_dataset::<f64>(), 1.0 / 3.0).unwrap();
    let curve64 = combined_response(&speakers64, PhonLevel::new(60.0).unwrap()).unwrap();
    let r64 = transposition_loss(&reference_driven_profile::<f64>(), -5.0, &curve64).unwrap();
    let diff = (r32.total_power_delta_db as f64 - r64.total_power_delta_db).abs();
    assert!(diff < 1e-3, "f32 {} vs f64 {}", r32.total_power_delta_db, r64.total_power_delta_db);
}
