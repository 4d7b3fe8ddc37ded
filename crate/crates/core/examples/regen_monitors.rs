//! Rewrites `data/near_field_synthetic36.csv` from the generator.

use basstune::monitors::synthetic;

fn main() -> std::io::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/near_field_synthetic36.csv");
    std::fs::write(path, synthetic::to_csv(&synthetic::generate(synthetic::CORNER_HZ)))
}
