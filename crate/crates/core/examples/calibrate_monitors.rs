//! Bisects the synthetic dataset's corner frequency so the smoothed median
//! loses 6.30 dB from 49.48 Hz down a perfect fourth.

use basstune::monitors::{median_response, synthetic, DEFAULT_SMOOTH_OCTAVES};

fn delta(corner: f64) -> f64 {
    let curve = median_response(&synthetic::generate(corner), DEFAULT_SMOOTH_OCTAVES).unwrap();
    let to = 49.48 * 2f64.powf(-5.0 / 12.0);
    curve.speaker_gain_delta(49.48, to).unwrap()
}

fn main() {
    let (mut lo, mut hi) = (30.0, 60.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if delta(mid) > -6.3 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let corner = (0.5 * (lo + hi) * 1e4).round() / 1e4;
    println!("corner {corner} Hz -> delta {:.4} dB", delta(corner));
}
