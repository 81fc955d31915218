//! Split-delay scan: one spectral half is delayed against the other and the
//! pump-frequency signal is recorded. The quantum term follows a sinc² in τ
//! while the incoherent background does not move.

use std::path::PathBuf;

use squeezed_control::lab::{execute, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/configs/delay_scan.json"
            ))
        });
    let cfg = ExperimentConfig::load(&path)?;
    let outcome = execute(&cfg)?;
    let scan = outcome.scan.expect("delay scan produces a scan");
    let fit = outcome.summary.delay_fit.expect("delay fit");

    let b = cfg.source.bandwidth;
    // sinc²(Bτ/2) has its half maximum at Bτ/2 = 1.39156
    let sinc_fwhm = 4.0 * 1.391_557_377 / b;
    println!(
        "FWHM in tau      {:.3} fs  (sinc² {:.3} fs)",
        fit.fwhm_tau_fs, sinc_fwhm
    );
    println!("relative delay   {:.3} fs", fit.fwhm_relative_delay_fs);
    println!("min I_q/I_q(0)   {:.2e}", fit.min_quantum_fraction);
    println!("max |ΔI_c|       {:e}", fit.classical_max_change);

    for (x, p) in scan
        .x
        .iter()
        .zip(&scan.points)
        .step_by(scan.x.len().div_ceil(11))
    {
        println!("{x:>9.1} fs  I_total {:.5}  I_q {:.5}", p.total, p.quantum);
    }
    Ok(())
}
