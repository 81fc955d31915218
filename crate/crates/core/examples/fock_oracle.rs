//! Two-mode squeezed vacuum built in a truncated Fock basis, compared with
//! the Gaussian moments used by the engine.

use squeezed_control::oracles::{fock_two_mode_moments, FockOracleConfig};

fn main() -> squeezed_control::Result<()> {
    println!(
        "{:>5} {:>5} {:>14} {:>10} {:>10} {:>10}",
        "r", "N", "<n>", "d<n>", "d|m|²", "1-norm"
    );
    for &r in &[0.25, 0.5, 1.0, 1.5] {
        for &n in &[20, 40, 80] {
            let m = match fock_two_mode_moments(&FockOracleConfig::new(r, n)?) {
                Ok(m) => m,
                Err(e) => {
                    println!("{r:>5} {n:>5}  {e}");
                    continue;
                }
            };
            let s2 = r.sinh().powi(2);
            println!(
                "{r:>5} {n:>5} {:>14.10} {:>10.1e} {:>10.1e} {:>10.1e}",
                m.photons,
                (m.photons - s2).abs(),
                (m.anomalous_sq() - s2 * (s2 + 1.0)).abs(),
                1.0 - m.norm
            );
        }
    }
    Ok(())
}
