//! Quantum-to-classical ratio at ωp over photon number and bandwidth, against
//! the narrowband estimate B(n + 1)/(2n(γp + γf)).

use std::path::PathBuf;

use squeezed_control::lab::{execute, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/configs/ratio_sweep.json"
            ))
        });
    let cfg = ExperimentConfig::load(&path)?;
    let outcome = execute(&cfg)?;
    println!(
        "{:>8} {:>8} {:>12} {:>12} {:>7}",
        "n", "B/γ", "engine", "estimate", "dev"
    );
    for r in outcome.summary.ratios.as_deref().unwrap_or_default() {
        println!(
            "{:>8} {:>8} {:>12.3} {:>12.3} {:>6.1}%",
            r.photons,
            r.bandwidth_ratio,
            r.ratio_engine,
            r.ratio_formula,
            100.0 * (r.ratio_engine / r.ratio_formula - 1.0)
        );
    }
    Ok(())
}
