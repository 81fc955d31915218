//! Finite SLM resolution: the same sinusoidal null mask displayed on SLMs
//! with fewer and fewer pixels. The staircase leaks quantum signal back in.

use std::path::PathBuf;

use squeezed_control::lab::{Bench, Experiment, ExperimentConfig};
use squeezed_control::oracles::sinusoidal_null_alpha;
use squeezed_control::shaper::MaskDescriptor;

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
    let Experiment::ThetaScan { beta_fs, .. } = cfg.experiment else {
        return Err("expects a theta_scan config".into());
    };

    let ideal = Bench::new(&cfg.source, cfg.grid, cfg.detector, None)?;
    let alpha = sinusoidal_null_alpha(&cfg.grid, ideal.pair_weights(), beta_fs)?;
    let null = MaskDescriptor::Sinusoidal {
        alpha,
        beta: beta_fs,
        theta: std::f64::consts::FRAC_PI_2,
    };
    println!("alpha* = {alpha:.6} rad, {} modes", cfg.grid.n_modes());
    println!("{:>8} {:>12} {:>12}", "pixels", "I/I0", "I_q/I_c");
    for pixels in [
        None,
        Some(4096),
        Some(1024),
        Some(640),
        Some(256),
        Some(128),
    ] {
        let bench = Bench::new(&cfg.source, cfg.grid, cfg.detector, pixels)?;
        let zero = bench.at_pump(&bench.mask(MaskDescriptor::Zero)?)?;
        let p = bench.at_pump(&bench.mask(null.clone())?)?;
        let label = pixels.map_or("ideal".to_string(), |n| n.to_string());
        println!(
            "{label:>8} {:>12.4e} {:>12.4e}",
            p.total / zero.total,
            p.quantum / p.classical
        );
    }
    Ok(())
}
