use serde::{Deserialize, Serialize};

use super::fft::CircularConvolver;
use super::SfgSpectrum;
use crate::error::{invalid, Error, Result};
use crate::lineshape::LineshapeKind;
use crate::spectral::SpectralGrid;

/// Spectrometer resolution (or final-level width) applied to SFG spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorResponse {
    #[serde(rename = "fwhm_rad_per_fs")]
    pub fwhm: f64,
    pub lineshape: LineshapeKind,
}

impl DetectorResponse {
    pub fn new(fwhm: f64, lineshape: LineshapeKind) -> Result<Self> {
        if !(fwhm >= 0.0) || !fwhm.is_finite() {
            return Err(invalid(
                "detector.fwhm",
                format!("must be >= 0, got {fwhm}"),
            ));
        }
        Ok(Self { fwhm, lineshape })
    }

    /// Ideal detector.
    pub fn none() -> Self {
        Self {
            fwhm: 0.0,
            lineshape: LineshapeKind::Gaussian,
        }
    }

    pub(crate) fn convolver(&self, grid: &SpectralGrid) -> Result<CircularConvolver> {
        Ok(CircularConvolver::new(&kernel_weights(
            grid,
            self.fwhm,
            self.lineshape,
        )?))
    }
}

/// Pump spectrum: center, FWHM and shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpLine {
    #[serde(rename = "freq_rad_per_fs")]
    pub freq: f64,
    #[serde(rename = "linewidth_rad_per_fs")]
    pub linewidth: f64,
    pub lineshape: LineshapeKind,
}

impl PumpLine {
    pub fn new(freq: f64, linewidth: f64, lineshape: LineshapeKind) -> Result<Self> {
        if !(linewidth >= 0.0) || !linewidth.is_finite() {
            return Err(invalid(
                "pump_linewidth",
                format!("must be >= 0, got {linewidth}"),
            ));
        }
        Ok(Self {
            freq,
            linewidth,
            lineshape,
        })
    }

    /// Unit-area pump density `L_p(Ω − ωp)` sampled on the output grid.
    pub(crate) fn density_on(&self, grid: &SpectralGrid) -> Result<Vec<f64>> {
        let w = kernel_weights(grid, self.linewidth, self.lineshape)?;
        let len = w.len();
        let center = grid.center_output_index();
        let inv = 1.0 / grid.spacing();
        Ok((0..len)
            .map(|j| w[(j + len - center) % len] * inv)
            .collect())
    }
}

fn kernel_weights(grid: &SpectralGrid, fwhm: f64, shape: LineshapeKind) -> Result<Vec<f64>> {
    let span = grid.output_span();
    if !(fwhm >= 0.0) || !fwhm.is_finite() {
        return Err(invalid("fwhm", format!("must be >= 0, got {fwhm}")));
    }
    if fwhm > span {
        return Err(Error::KernelTooWide { fwhm, span });
    }
    Ok(shape.periodic_weights(fwhm, grid.output_len(), grid.spacing()))
}

/// Convolves every intensity series of `spectrum` with the unit-area detector
/// kernel. Circular on the output grid, so `Σ I·δω` is conserved.
pub fn convolve_response(
    spectrum: &SfgSpectrum,
    response: &DetectorResponse,
) -> Result<SfgSpectrum> {
    let conv = response.convolver(&spectrum.grid)?;
    let mut out = spectrum.clone();
    if conv.is_identity() {
        return Ok(out);
    }
    let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
    out.intensity = clamp(conv.convolve(&spectrum.intensity));
    out.quantum = spectrum.quantum.as_ref().map(|q| clamp(conv.convolve(q)));
    out.classical = spectrum.classical.as_ref().map(|c| clamp(conv.convolve(c)));
    if let (Some(q), Some(c)) = (&out.quantum, &out.classical) {
        out.intensity = q.iter().zip(c).map(|(a, b)| a + b).collect();
    }
    // independent-bin approximation for already-averaged data
    let sq_kernel = {
        let w = response.lineshape.periodic_weights(
            response.fwhm,
            spectrum.grid.output_len(),
            spectrum.grid.spacing(),
        );
        CircularConvolver::new(&w.iter().map(|x| x * x).collect::<Vec<_>>())
    };
    let propagate = |s: &Vec<f64>| {
        let var: Vec<f64> = s.iter().map(|x| x * x).collect();
        sq_kernel
            .convolve(&var)
            .into_iter()
            .map(|v| v.max(0.0).sqrt())
            .collect::<Vec<_>>()
    };
    out.stderr = spectrum.stderr.as_ref().map(propagate);
    out.stderr_quantum = spectrum.stderr_quantum.as_ref().map(propagate);
    out.provenance.detector = Some(*response);
    Ok(out)
}
