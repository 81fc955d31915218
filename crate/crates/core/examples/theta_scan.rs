//! Sinusoidal mask Φ = α sin(β(ω − ωp/2) + θ) scanned in θ. At the first null
//! amplitude α* the quantum term vanishes for θ = ±π/2 and is unchanged for
//! θ = 0, π.

use std::path::PathBuf;

use squeezed_control::lab::{execute, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/configs/theta_scan.json"
            ))
        });
    let cfg = ExperimentConfig::load(&path)?;
    let outcome = execute(&cfg)?;
    let t = outcome.summary.theta.as_ref().expect("theta summary");
    let how = if t.alpha_from_search {
        "searched"
    } else {
        "given"
    };
    println!(
        "alpha = {:.6} rad ({how}), beta = {} fs",
        t.alpha_rad, t.beta_fs
    );
    println!("contrast min/max = {:.3}%", 100.0 * t.contrast);
    println!(
        "theta at min {:.4}, at max {:.4}",
        t.theta_at_min_rad, t.theta_at_max_rad
    );
    println!("I_q/I_c at the minimum = {:.2e}", t.quantum_residual_at_min);
    if let Some(s) = &outcome.summary.stochastic {
        if let Some(c) = s.contrast {
            println!("stochastic ({} shots): contrast {:.2}%", s.shots, 100.0 * c);
        }
    }
    Ok(())
}
