//! Fits the geometric partial roll-off of the bundled driven profile so a
//! perfect-fourth drop on the bundled combined curve (60 phon) costs 4.5 dB.

use basstune::advisor::{combined_response, transposition_loss, SpectralProfile};
use basstune::monitors::{bundled_dataset, median_response, DEFAULT_SMOOTH_OCTAVES};
use basstune::perception::PhonLevel;

fn main() {
    let speakers = median_response(&bundled_dataset(), DEFAULT_SMOOTH_OCTAVES).unwrap();
    let curve = combined_response(&speakers, PhonLevel::new(60.0).unwrap()).unwrap();
    let amps = |r: f64| -> Vec<f64> { (0..5).map(|k| r.powi(k)).collect() };
    let total = |a: &[f64]| {
        transposition_loss(&SpectralProfile::harmonic(49.48, a).unwrap(), -5.0, &curve)
            .unwrap()
            .total_power_delta_db
    };
    let (mut lo, mut hi) = (0.01, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if total(&amps(mid)) < -4.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rounded: Vec<f64> = amps(0.5 * (lo + hi))
        .iter()
        .map(|a| (a * 1e4).round() / 1e4)
        .collect();
    let report = transposition_loss(&SpectralProfile::harmonic(49.48, &rounded).unwrap(), -5.0, &curve).unwrap();
    println!("amplitudes {rounded:?}");
    for d in &report.per_partial {
        println!("  h{} {:.2} -> {:.2} Hz: {:+.3} dB", d.harmonic, d.f_from, d.f_to, d.delta_db);
    }
    println!("total {:+.4} dB", report.total_power_delta_db);
}
