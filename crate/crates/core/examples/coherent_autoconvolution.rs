//! Transform-limited Gaussian pulse: FFT autoconvolution against the closed
//! form and against the direct pair sum.

use squeezed_control::engine::sfg_coherent;
use squeezed_control::fields::coherent_pulse;
use squeezed_control::oracles::{direct_spectrum, gaussian_autoconvolution, relative_sup};
use squeezed_control::shaper::{polynomial_mask, PhaseMask};
use squeezed_control::spectral::{
    fwhm_wavelength_to_angular, gaussian_envelope, make_grid, wavelength_to_angular,
};

fn main() -> squeezed_control::Result<()> {
    let pump = wavelength_to_angular(532.0)?;
    let fwhm = fwhm_wavelength_to_angular(1064.0, 60.0)?;
    let grid = make_grid(pump, 0.3, 2048)?;
    let env = gaussian_envelope(&grid, grid.degenerate_freq(), fwhm, 1.0)?;
    let field = coherent_pulse(&env, &PhaseMask::zero(&grid))?;

    let out = sfg_coherent(&field, &PhaseMask::zero(&grid))?;
    let j = grid.center_output_index();
    let exact = gaussian_autoconvolution(1.0, fwhm, grid.degenerate_freq(), pump);
    println!(
        "I(wp)  fft {:.9e}  closed form {:.9e}",
        out.intensity[j], exact
    );

    let direct = direct_spectrum(&field, &PhaseMask::zero(&grid))?;
    println!(
        "sup |fft - direct| / max = {:.2e}",
        relative_sup(&out.intensity, &direct)
    );

    // second-order dispersion stretches the pulse and lowers the SFG peak
    let chirp = polynomial_mask(&grid, pump, &[0.0, 0.0, 200.0])?;
    let chirped = sfg_coherent(&field, &chirp)?;
    println!(
        "with 200 fs^2 chirp: I(wp) / I_TL = {:.4}",
        chirped.intensity[j] / out.intensity[j]
    );
    Ok(())
}
