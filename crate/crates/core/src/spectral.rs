//! Frequency grid, unit conversions and spectral envelopes.
//!
//! Everything downstream works in angular frequency (rad/fs). Wavelengths in
//! nm are converted at the boundary with the helpers in this module.
//!
//! The grid is symmetric about the degenerate frequency `ωp/2` with a
//! half-mode offset, so mode `i` and mode `n−1−i` always sum to the pump
//! frequency. Lower-half frequencies are computed as `ωp − ω_upper`, which is
//! an exact floating-point subtraction (Sterbenz), so `ω_i + ω_pair(i) == ωp`
//! holds bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT_NM_PER_FS: f64 = 299.792_458;

/// Angular frequency (rad/fs) of a vacuum wavelength in nm.
pub fn wavelength_to_angular(lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm > 0.0) || !lambda_nm.is_finite() {
        return Err(invalid(
            "wavelength",
            format!("must be positive, got {lambda_nm}"),
        ));
    }
    Ok(std::f64::consts::TAU * SPEED_OF_LIGHT_NM_PER_FS / lambda_nm)
}

/// Vacuum wavelength (nm) of an angular frequency in rad/fs.
pub fn angular_to_wavelength(omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    Ok(std::f64::consts::TAU * SPEED_OF_LIGHT_NM_PER_FS / omega)
}

/// First-order conversion of a wavelength FWHM about `lambda0_nm` to an
/// angular-frequency FWHM: `Δω = 2πcΔλ/λ0²`.
pub fn fwhm_wavelength_to_angular(lambda0_nm: f64, delta_lambda_nm: f64) -> Result<f64> {
    if !(lambda0_nm > 0.0) || !lambda0_nm.is_finite() {
        return Err(invalid(
            "wavelength",
            format!("must be positive, got {lambda0_nm}"),
        ));
    }
    if !(delta_lambda_nm >= 0.0) || !delta_lambda_nm.is_finite() {
        return Err(invalid(
            "fwhm_nm",
            format!("must be non-negative, got {delta_lambda_nm}"),
        ));
    }
    Ok(
        std::f64::consts::TAU * SPEED_OF_LIGHT_NM_PER_FS * delta_lambda_nm
            / (lambda0_nm * lambda0_nm),
    )
}

/// Uniform angular-frequency grid with half-offset modes about `ωp/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pump_freq: f64,
    half_span: f64,
    n_modes: usize,
    spacing: f64,
}

impl SpectralGrid {
    pub fn new(pump_freq: f64, half_span: f64, n_modes: usize) -> Result<Self> {
        if n_modes < 4 || !n_modes.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n_modes must be even and >= 4, got {n_modes}"
            )));
        }
        if !(half_span > 0.0) || !half_span.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half_span must be positive, got {half_span}"
            )));
        }
        if !pump_freq.is_finite() || !(pump_freq / 2.0 - half_span > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "grid reaches non-positive frequencies: ωp/2 = {}, half_span = {half_span}",
                pump_freq / 2.0
            )));
        }
        Ok(Self {
            pump_freq,
            half_span,
            n_modes,
            spacing: 2.0 * half_span / n_modes as f64,
        })
    }

    pub fn pump_freq(&self) -> f64 {
        self.pump_freq
    }

    /// `ωp/2`.
    pub fn degenerate_freq(&self) -> f64 {
        self.pump_freq / 2.0
    }

    pub fn half_span(&self) -> f64 {
        self.half_span
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_pairs(&self) -> usize {
        self.n_modes / 2
    }

    /// Mode spacing δω.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the partner mode, `ω_i + ω_pair(i) = ωp`.
    #[inline]
    pub fn pair(&self, i: usize) -> usize {
        self.n_modes - 1 - i
    }

    /// Signed offset `ω_i − ωp/2`. Partner offsets are exact negations.
    #[inline]
    pub fn offset(&self, i: usize) -> f64 {
        let half = self.n_modes / 2;
        if i >= half {
            ((i - half) as f64 + 0.5) * self.spacing
        } else {
            -(((half - 1 - i) as f64 + 0.5) * self.spacing)
        }
    }

    #[inline]
    pub fn omega(&self, i: usize) -> f64 {
        let half = self.n_modes / 2;
        if i >= half {
            self.degenerate_freq() + self.offset(i)
        } else {
            self.pump_freq - (self.degenerate_freq() + self.offset(self.pair(i)))
        }
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_modes).map(|i| self.omega(i)).collect()
    }

    /// Upper-half mode index of pair `k` (offset `(k+½)δω`).
    #[inline]
    pub fn upper_mode(&self, pair: usize) -> usize {
        self.n_modes / 2 + pair
    }

    /// Lower-half mode index of pair `k` (offset `−(k+½)δω`).
    #[inline]
    pub fn lower_mode(&self, pair: usize) -> usize {
        self.n_modes / 2 - 1 - pair
    }

    /// Pair index of mode `i`.
    #[inline]
    pub fn pair_index(&self, i: usize) -> usize {
        let half = self.n_modes / 2;
        if i >= half {
            i - half
        } else {
            half - 1 - i
        }
    }

    /// Number of bins of the sum-frequency grid, `2N − 1`.
    pub fn output_len(&self) -> usize {
        2 * self.n_modes - 1
    }

    /// Output bin holding `Ω = ωp` exactly.
    pub fn center_output_index(&self) -> usize {
        self.n_modes - 1
    }

    /// Sum frequency of output bin `j` (modes `i`, `k` with `i + k = j`).
    pub fn output_omega(&self, j: usize) -> f64 {
        let shift = j as f64 - (self.n_modes - 1) as f64;
        self.pump_freq + shift * self.spacing
    }

    pub fn output_omegas(&self) -> Vec<f64> {
        (0..self.output_len())
            .map(|j| self.output_omega(j))
            .collect()
    }

    /// Output bin index for a sum frequency, if it lies on the grid.
    pub fn output_index_of(&self, omega: f64) -> Option<usize> {
        let pos = (omega - self.pump_freq) / self.spacing + (self.n_modes - 1) as f64;
        let idx = pos.round();
        if (pos - idx).abs() > 1e-6 || idx < 0.0 || idx >= self.output_len() as f64 {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Total width of the output grid, `(2N − 1)·δω`.
    pub fn output_span(&self) -> f64 {
        self.output_len() as f64 * self.spacing
    }

    pub(crate) fn check_same(&self, other: &SpectralGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grid ({}, {}, {}) vs ({}, {}, {})",
                self.pump_freq,
                self.half_span,
                self.n_modes,
                other.pump_freq,
                other.half_span,
                other.n_modes
            )))
        }
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len == self.n_modes {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what} has {len} samples, grid has {} modes",
                self.n_modes
            )))
        }
    }

    /// Verifies that `pump_freq` names the same pump as this grid.
    pub(crate) fn check_pump(&self, pump_freq: f64) -> Result<()> {
        if (self.pump_freq - pump_freq).abs() <= 1e-12 * self.pump_freq.abs() {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grid degenerate frequency {} != ωp/2 = {}",
                self.degenerate_freq(),
                pump_freq / 2.0
            )))
        }
    }
}

/// Builds the paired grid; see [`SpectralGrid::new`].
pub fn make_grid(pump_freq: f64, half_span: f64, n_modes: usize) -> Result<SpectralGrid> {
    SpectralGrid::new(pump_freq, half_span, n_modes)
}

/// Real, non-negative spectral amplitude `A(ω)` in √(photons per mode).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEnvelope {
    grid: SpectralGrid,
    amplitude: Vec<f64>,
}

impl SpectralEnvelope {
    pub fn new(grid: SpectralGrid, amplitude: Vec<f64>) -> Result<Self> {
        grid.check_len(amplitude.len(), "envelope")?;
        if let Some(bad) = amplitude.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(invalid(
                "amplitude",
                format!("must be finite and >= 0, got {bad}"),
            ));
        }
        Ok(Self { grid, amplitude })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        Self {
            amplitude: vec![0.0; grid.n_modes()],
            grid,
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    /// Mean photon number per mode, `A²`.
    pub fn photons(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a * a).collect()
    }
}

/// Gaussian envelope whose intensity `A²` has the requested FWHM and peak
/// `peak_photons`.
pub fn gaussian_envelope(
    grid: &SpectralGrid,
    center: f64,
    fwhm: f64,
    peak_photons: f64,
) -> Result<SpectralEnvelope> {
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(invalid("fwhm", format!("must be positive, got {fwhm}")));
    }
    if !(peak_photons >= 0.0) || !peak_photons.is_finite() {
        return Err(invalid(
            "peak_photons",
            format!("must be non-negative, got {peak_photons}"),
        ));
    }
    let k = 2.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
    let peak = peak_photons.sqrt();
    let degenerate = grid.degenerate_freq();
    let amplitude = (0..grid.n_modes())
        .map(|i| {
            // offsets keep the envelope bit-symmetric when centered at ωp/2
            let d = grid.offset(i) - (center - degenerate);
            peak * (-k * d * d).exp()
        })
        .collect();
    Ok(SpectralEnvelope {
        grid: *grid,
        amplitude,
    })
}

/// Flat-top envelope: `√n̄` for modes with `|ω − center| < width/2`, zero elsewhere.
pub fn flat_envelope(
    grid: &SpectralGrid,
    center: f64,
    width: f64,
    photons: f64,
) -> Result<SpectralEnvelope> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(invalid("width", format!("must be positive, got {width}")));
    }
    if !(photons >= 0.0) || !photons.is_finite() {
        return Err(invalid(
            "photons",
            format!("must be non-negative, got {photons}"),
        ));
    }
    let degenerate = grid.degenerate_freq();
    let amp = photons.sqrt();
    let amplitude = (0..grid.n_modes())
        .map(|i| {
            let d = grid.offset(i) - (center - degenerate);
            if d.abs() < width / 2.0 {
                amp
            } else {
                0.0
            }
        })
        .collect();
    Ok(SpectralEnvelope {
        grid: *grid,
        amplitude,
    })
}

/// FWHM of a sampled single-peaked profile by linear interpolation of the
/// half-maximum crossings. Returns `None` if either crossing is missing.
pub fn sampled_fwhm(x: &[f64], y: &[f64]) -> Option<f64> {
    let (imax, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(ymax > 0.0) {
        return None;
    }
    let half = ymax / 2.0;
    let mut left = None;
    for i in (0..imax).rev() {
        if y[i] < half {
            let t = (half - y[i]) / (y[i + 1] - y[i]);
            left = Some(x[i] + t * (x[i + 1] - x[i]));
            break;
        }
    }
    let mut right = None;
    for i in imax + 1..y.len() {
        if y[i] < half {
            let t = (y[i - 1] - half) / (y[i - 1] - y[i]);
            right = Some(x[i - 1] + t * (x[i] - x[i - 1]));
            break;
        }
    }
    Some(right? - left?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn standard_pump_grid() {
        let wp = 3.5407;
        let g = make_grid(wp, 0.15, 1024).unwrap();
        assert_eq!(g.pair(0), 1023);
        let first = g.omega(0);
        let last = g.omega(1023);
        assert!((first - (wp / 2.0 - 0.15 + g.spacing() / 2.0)).abs() < 1e-12);
        assert!((last - (wp / 2.0 + 0.15 - g.spacing() / 2.0)).abs() < 1e-12);
        assert!(first > 1.6203 && last < 1.9205);
    }

    #[test]
    fn four_mode_grid() {
        let g = make_grid(2.0, 0.5, 4).unwrap();
        assert_eq!(g.omegas(), vec![0.625, 0.875, 1.125, 1.375]);
        for i in 0..4 {
            assert_eq!(g.omega(i) + g.omega(g.pair(i)), 2.0);
        }
    }

    #[test]
    fn grid_preconditions() {
        assert!(make_grid(2.0, 0.5, 5).is_err());
        assert!(make_grid(2.0, 0.5, 2).is_err());
        assert!(make_grid(2.0, 0.0, 8).is_err());
        assert!(make_grid(2.0, 1.0, 8).is_err());
        assert!(make_grid(2.0, -0.1, 8).is_err());
    }

    #[test]
    fn output_grid_center_is_pump() {
        let g = make_grid(3.5407, 0.15, 64).unwrap();
        assert_eq!(g.output_omega(g.center_output_index()), 3.5407);
        assert_eq!(g.output_index_of(3.5407), Some(63));
        assert_eq!(g.output_index_of(3.5407 + 0.3 * g.spacing()), None);
        assert!((g.output_omega(0) - 2.0 * g.omega(0)).abs() < 1e-12);
    }

    #[test]
    fn unit_conversions() {
        let w = wavelength_to_angular(1064.0).unwrap();
        assert!((w - 1.770_349_2).abs() < 1e-6);
        let b = fwhm_wavelength_to_angular(1064.0, 60.0).unwrap();
        assert!((b - 0.099_831_72).abs() < 1e-7);
        assert!((b / std::f64::consts::TAU * 1000.0 - 15.9).abs() < 0.05);
        let gp = fwhm_wavelength_to_angular(532.0, 0.01).unwrap();
        assert!((gp - 6.656e-5).abs() < 1e-8);
        assert!(wavelength_to_angular(0.0).is_err());
        assert!(wavelength_to_angular(-5.0).is_err());
        assert!(fwhm_wavelength_to_angular(1064.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_envelope_properties() {
        let g = make_grid(3.5407, 0.3, 2048).unwrap();
        let fwhm = 0.099_85;
        let env = gaussian_envelope(&g, g.degenerate_freq(), fwhm, 1.0).unwrap();
        for i in 0..g.n_modes() {
            assert_eq!(env.amplitude()[i], env.amplitude()[g.pair(i)]);
        }
        // A² at center ± fwhm/2 is one half
        let k = 2.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
        let a = (-k * (fwhm / 2.0).powi(2)).exp();
        assert!((a * a - 0.5).abs() < 1e-14);
        let measured = sampled_fwhm(&g.omegas(), &env.photons()).unwrap();
        assert!((measured - fwhm).abs() <= g.spacing());

        let zero = gaussian_envelope(&g, g.degenerate_freq(), fwhm, 0.0).unwrap();
        assert!(zero.amplitude().iter().all(|&a| a == 0.0));
        assert!(gaussian_envelope(&g, 1.0, 0.0, 1.0).is_err());
        assert!(gaussian_envelope(&g, 1.0, 0.1, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn pairing_is_exact(
            wp in 0.5f64..10.0,
            frac in 0.01f64..0.24,
            half in 2usize..600,
        ) {
            let n = 2 * half;
            let g = make_grid(wp, frac * wp, n).unwrap();
            for i in 0..n {
                prop_assert_eq!(g.pair(g.pair(i)), i);
                prop_assert_eq!(g.omega(i) + g.omega(g.pair(i)), g.pump_freq());
                prop_assert_eq!(g.offset(i), -g.offset(g.pair(i)));
            }
        }

        #[test]
        fn wavelength_round_trip(lambda in 100.0f64..5000.0) {
            let back = angular_to_wavelength(wavelength_to_angular(lambda).unwrap()).unwrap();
            prop_assert!(((back - lambda) / lambda).abs() < 1e-12);
        }
    }
}
