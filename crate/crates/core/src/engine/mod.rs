//! Sum-frequency / two-photon spectra.
//!
//! Three routes share one output grid (`2N − 1` bins, spacing δω, bin `N − 1`
//! at exactly `Ω = ωp`):
//!
//! * [`sfg_coherent`]: autoconvolution of a deterministic field, `I = |C|²`.
//! * [`sfg_ensemble`]: shot average of the stochastic surrogate. The quantum
//!   part is `|⟨C⟩|²` with `C` taken in each shot's pump frame, spread over Ω
//!   by the sampled pump detunings; the classical part is the remainder of
//!   `⟨|C|²⟩`.
//! * [`sfg_gaussian_decomposition`]: exact Gaussian-moment expressions.
//!
//! Ensemble and moment intensities are spectral densities in Ω: the quantum
//! peak is `|A|²·L_p(Ω − ωp)` with a unit-area pump line, the classical
//! background is `2δω·Σ n(ω)n(Ω − ω)` (both Gaussian pairings).

mod ensemble;
mod fft;
mod response;

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use ensemble::{sfg_ensemble, sfg_ensemble_with, EnsembleOptions, StochasticSource};
pub use fft::{Autoconvolver, CircularConvolver};
pub use response::{convolve_response, DetectorResponse, PumpLine};

use crate::error::{invalid, Result};
use crate::fields::{CoherentField, GaussianStateMoments};
use crate::shaper::{MaskDescriptor, PhaseMask};
use crate::spectral::{angular_to_wavelength, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Coherent,
    SqueezedStochastic,
    UncorrelatedStochastic,
    SqueezedMoments,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: SourceKind,
    pub mask: MaskDescriptor,
    pub shots: Option<u64>,
    pub master_seed: Option<u64>,
    pub pump: Option<PumpLine>,
    pub detector: Option<DetectorResponse>,
}

/// Output spectrum on the sum-frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfgSpectrum {
    pub grid: SpectralGrid,
    pub intensity: Vec<f64>,
    pub quantum: Option<Vec<f64>>,
    pub classical: Option<Vec<f64>>,
    pub stderr: Option<Vec<f64>>,
    pub stderr_quantum: Option<Vec<f64>>,
    /// Shot-mean pair-sum amplitude `⟨C⟩` before the detector, in each shot's
    /// pump frame (bin `N − 1` is the shot's own pump frequency).
    #[serde(skip)]
    pub mean_amplitude: Option<Vec<Complex64>>,
    /// Standard error of `⟨C(Ω)⟩` (complex, both quadratures).
    #[serde(skip)]
    pub amplitude_stderr: Option<Vec<f64>>,
    pub provenance: Provenance,
}

/// Values of a spectrum at `Ω = ωp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpValues {
    pub total: f64,
    pub quantum: Option<f64>,
    pub classical: Option<f64>,
    pub stderr: Option<f64>,
    pub stderr_quantum: Option<f64>,
}

impl SfgSpectrum {
    fn deterministic(grid: SpectralGrid, intensity: Vec<f64>, provenance: Provenance) -> Self {
        Self {
            grid,
            intensity,
            quantum: None,
            classical: None,
            stderr: None,
            stderr_quantum: None,
            mean_amplitude: None,
            amplitude_stderr: None,
            provenance,
        }
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.grid.output_omegas()
    }

    pub fn len(&self) -> usize {
        self.intensity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensity.is_empty()
    }

    pub fn at_bin(&self, j: usize) -> PumpValues {
        PumpValues {
            total: self.intensity[j],
            quantum: self.quantum.as_ref().map(|v| v[j]),
            classical: self.classical.as_ref().map(|v| v[j]),
            stderr: self.stderr.as_ref().map(|v| v[j]),
            stderr_quantum: self.stderr_quantum.as_ref().map(|v| v[j]),
        }
    }

    pub fn at_pump(&self) -> PumpValues {
        self.at_bin(self.grid.center_output_index())
    }

    /// `Σ I·δω`.
    pub fn total_power(&self) -> f64 {
        self.intensity.iter().sum::<f64>() * self.grid.spacing()
    }

    /// Multiplies every intensity series (and its errors) by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| x * factor).collect::<Vec<_>>();
        Self {
            grid: self.grid,
            intensity: s(&self.intensity),
            quantum: self.quantum.as_ref().map(s),
            classical: self.classical.as_ref().map(s),
            stderr: self
                .stderr
                .as_ref()
                .map(|v| v.iter().map(|x| x * factor.abs()).collect()),
            stderr_quantum: self
                .stderr_quantum
                .as_ref()
                .map(|v| v.iter().map(|x| x * factor.abs()).collect()),
            mean_amplitude: self.mean_amplitude.clone(),
            amplitude_stderr: self.amplitude_stderr.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// Rows `omega_rad_per_fs,lambda_nm,I_total,I_q,I_c,stderr`. A coherent
    /// spectrum is all quantum term (`I_c = 0`); missing errors are written as 0.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "omega_rad_per_fs",
            "lambda_nm",
            "I_total",
            "I_q",
            "I_c",
            "stderr",
        ])?;
        for j in 0..self.len() {
            let omega = self.grid.output_omega(j);
            let v = self.at_bin(j);
            let q = v.quantum.unwrap_or(v.total);
            let c = v.classical.unwrap_or(0.0);
            w.write_record([
                omega.to_string(),
                angular_to_wavelength(omega)?.to_string(),
                v.total.to_string(),
                q.to_string(),
                c.to_string(),
                v.stderr.unwrap_or(0.0).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Pair-sum amplitude `C(Ω) = δω·Σ_ω E'(ω)E'(Ω − ω)` of a masked field on the output grid.
pub fn coherent_amplitude(field: &CoherentField, mask: &PhaseMask) -> Result<Vec<Complex64>> {
    let grid = *field.grid();
    let shaped = mask.apply(&grid, field.amplitude())?;
    let conv = Autoconvolver::new(grid.n_modes());
    let dw = grid.spacing();
    Ok(conv
        .autoconvolve(&shaped)
        .into_iter()
        .map(|c| c * dw)
        .collect())
}

/// SFG spectrum `I(Ω) = |C(Ω)|²` of a coherent field after the mask.
pub fn sfg_coherent(field: &CoherentField, mask: &PhaseMask) -> Result<SfgSpectrum> {
    let c = coherent_amplitude(field, mask)?;
    Ok(SfgSpectrum::deterministic(
        *field.grid(),
        c.iter().map(|v| v.norm_sqr()).collect(),
        Provenance {
            source: SourceKind::Coherent,
            mask: mask.descriptor().clone(),
            shots: None,
            master_seed: None,
            pump: None,
            detector: None,
        },
    ))
}

/// Quantum pair-sum amplitude `A = δω·Σ_ξ m(ξ)e^{i[Φ(ωp/2+ξ)+Φ(ωp/2−ξ)]}`,
/// the sum running over all modes (each pair twice).
pub fn quantum_amplitude(moments: &GaussianStateMoments, mask: &PhaseMask) -> Result<Complex64> {
    let grid = moments.grid();
    grid.check_same(mask.grid())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, m) in moments.anomalous().iter().enumerate() {
        acc += m * Complex64::cis(mask.pair_sum(k));
    }
    Ok(acc * (2.0 * grid.spacing()))
}

/// Gaussian-moment engine with the mask-independent parts precomputed.
#[derive(Debug, Clone)]
pub struct MomentEngine {
    moments: GaussianStateMoments,
    pump: PumpLine,
    detector: DetectorResponse,
    /// `L_p ⊛ D` on the output grid (unit area).
    peak_profile: Vec<f64>,
    /// Detector-convolved classical background.
    classical: Vec<f64>,
}

impl MomentEngine {
    pub fn new(
        moments: &GaussianStateMoments,
        pump: &PumpLine,
        detector: &DetectorResponse,
    ) -> Result<Self> {
        let grid = *moments.grid();
        grid.check_pump(pump.freq)?;
        let conv = detector.convolver(&grid)?;
        let peak_profile = conv.convolve(&pump.density_on(&grid)?);

        let n: Vec<Complex64> = moments
            .photons()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let auto = Autoconvolver::new(grid.n_modes()).autoconvolve(&n);
        let two_dw = 2.0 * grid.spacing();
        let raw: Vec<f64> = auto.iter().map(|c| (c.re * two_dw).max(0.0)).collect();
        let classical = conv
            .convolve(&raw)
            .into_iter()
            .map(|v| v.max(0.0))
            .collect();
        Ok(Self {
            moments: moments.clone(),
            pump: *pump,
            detector: *detector,
            peak_profile: peak_profile.into_iter().map(|v| v.max(0.0)).collect(),
            classical,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.moments.grid()
    }

    /// Classical background (mask independent).
    pub fn classical(&self) -> &[f64] {
        &self.classical
    }

    /// `(L_p ⊛ D)` evaluated at `Ω = ωp`.
    pub fn peak_density(&self) -> f64 {
        self.peak_profile[self.grid().center_output_index()]
    }

    /// `(I_total, I_q, I_c)` at `Ω = ωp`.
    pub fn at_pump(&self, mask: &PhaseMask) -> Result<(f64, f64, f64)> {
        let a = quantum_amplitude(&self.moments, mask)?;
        let q = a.norm_sqr() * self.peak_density();
        let c = self.classical[self.grid().center_output_index()];
        Ok((q + c, q, c))
    }

    pub fn spectrum(&self, mask: &PhaseMask) -> Result<SfgSpectrum> {
        let a2 = quantum_amplitude(&self.moments, mask)?.norm_sqr();
        let quantum: Vec<f64> = self.peak_profile.iter().map(|p| a2 * p).collect();
        let intensity = quantum
            .iter()
            .zip(&self.classical)
            .map(|(q, c)| q + c)
            .collect();
        let mut s = SfgSpectrum::deterministic(
            *self.grid(),
            intensity,
            Provenance {
                source: SourceKind::SqueezedMoments,
                mask: mask.descriptor().clone(),
                shots: None,
                master_seed: None,
                pump: Some(self.pump),
                detector: Some(self.detector),
            },
        );
        s.quantum = Some(quantum);
        s.classical = Some(self.classical.clone());
        Ok(s)
    }
}

/// Exact quantum/classical decomposition from Gaussian moments.
pub fn sfg_gaussian_decomposition(
    moments: &GaussianStateMoments,
    mask: &PhaseMask,
    pump: &PumpLine,
    detector: &DetectorResponse,
) -> Result<SfgSpectrum> {
    MomentEngine::new(moments, pump, detector)?.spectrum(mask)
}

/// Approximate quantum-to-classical ratio at the pump frequency,
/// `B/(2(γp+γf))·(n²+n)/n²`.
pub fn qc_ratio_formula(
    bandwidth: f64,
    pump_linewidth: f64,
    detector_fwhm: f64,
    photons: f64,
) -> Result<f64> {
    let widths = pump_linewidth + detector_fwhm;
    if !(widths > 0.0) {
        return Err(invalid(
            "gamma",
            format!("γp + γf must be positive, got {widths}"),
        ));
    }
    if !(photons > 0.0) {
        return Err(invalid(
            "photons",
            format!("must be positive, got {photons}"),
        ));
    }
    Ok(bandwidth / (2.0 * widths) * (photons * photons + photons) / (photons * photons))
}

#[cfg(test)]
mod tests;
