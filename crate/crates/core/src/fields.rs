//! Field sources: coherent pulses, the stochastic classical surrogate of
//! broadband squeezed vacuum, an uncorrelated thermal control, and the exact
//! Gaussian-state second moments.
//!
//! Pairs are indexed by `k`, the pair with offsets `±(k+½)δω` about `ωp/2`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lineshape::LineshapeKind;
use crate::rng::{ShotKey, SHOT_STREAM};
use crate::shaper::PhaseMask;
use crate::spectral::{SpectralEnvelope, SpectralGrid};

/// Deterministic field `E(ω) = A(ω)e^{iΘ(ω)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentField {
    grid: SpectralGrid,
    amplitude: Vec<Complex64>,
}

impl CoherentField {
    pub fn new(grid: SpectralGrid, amplitude: Vec<Complex64>) -> Result<Self> {
        grid.check_len(amplitude.len(), "field")?;
        if amplitude
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(invalid("field", "amplitudes must be finite"));
        }
        Ok(Self { grid, amplitude })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }
}

/// Pulse with envelope `A` and spectral phase `Θ` (given as a mask on the same grid).
pub fn coherent_pulse(envelope: &SpectralEnvelope, phase: &PhaseMask) -> Result<CoherentField> {
    envelope.grid().check_same(phase.grid())?;
    let amplitude = envelope
        .amplitude()
        .iter()
        .zip(phase.phase())
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();
    CoherentField::new(*envelope.grid(), amplitude)
}

/// Source model of broadband squeezed vacuum from a narrowband pump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezedVacuumSpec {
    grid: SpectralGrid,
    pump_linewidth: f64,
    pump_lineshape: LineshapeKind,
    squeeze: Vec<f64>,
    carrier_scaling: bool,
    envelope_jitter: f64,
    jitter_modes: usize,
}

impl SqueezedVacuumSpec {
    /// `squeeze[k]` is the squeezing parameter `r` of pair `k`.
    pub fn new(grid: SpectralGrid, squeeze: Vec<f64>) -> Result<Self> {
        if squeeze.len() != grid.n_pairs() {
            return Err(invalid(
                "squeeze",
                format!("expected {} pairs, got {}", grid.n_pairs(), squeeze.len()),
            ));
        }
        if let Some(bad) = squeeze.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(invalid(
                "squeeze",
                format!("r must be finite and >= 0, got {bad}"),
            ));
        }
        Ok(Self {
            grid,
            pump_linewidth: 0.0,
            pump_lineshape: LineshapeKind::Lorentzian,
            squeeze,
            carrier_scaling: false,
            envelope_jitter: 0.0,
            jitter_modes: DEFAULT_JITTER_MODES,
        })
    }

    /// Flat photon number `photons` over `|ξ| < bandwidth/2`, vacuum elsewhere.
    pub fn flat_band(grid: SpectralGrid, bandwidth: f64, photons: f64) -> Result<Self> {
        check_band(bandwidth, photons)?;
        let r = photons.sqrt().asinh();
        let squeeze = (0..grid.n_pairs())
            .map(|k| {
                if grid.offset(grid.upper_mode(k)) < bandwidth / 2.0 {
                    r
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(grid, squeeze)
    }

    /// Gaussian photon-number profile with FWHM `bandwidth` and peak `peak_photons`.
    pub fn gaussian_band(grid: SpectralGrid, bandwidth: f64, peak_photons: f64) -> Result<Self> {
        check_band(bandwidth, peak_photons)?;
        let k4 = 4.0 * std::f64::consts::LN_2 / (bandwidth * bandwidth);
        let squeeze = (0..grid.n_pairs())
            .map(|k| {
                let xi = grid.offset(grid.upper_mode(k));
                (peak_photons * (-k4 * xi * xi).exp()).sqrt().asinh()
            })
            .collect();
        Self::new(grid, squeeze)
    }

    pub fn with_pump_line(mut self, linewidth: f64, shape: LineshapeKind) -> Result<Self> {
        if !(linewidth >= 0.0) || !linewidth.is_finite() {
            return Err(invalid(
                "pump_linewidth",
                format!("must be >= 0, got {linewidth}"),
            ));
        }
        self.pump_linewidth = linewidth;
        self.pump_lineshape = shape;
        Ok(self)
    }

    pub fn with_envelope_jitter(mut self, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(invalid(
                "envelope_jitter",
                format!("must be >= 0, got {sigma}"),
            ));
        }
        self.envelope_jitter = sigma;
        Ok(self)
    }

    /// Number of cosine modes `K` in the jitter shape (correlation length
    /// ≈ half_span/K).
    pub fn with_jitter_modes(mut self, modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(invalid("jitter_modes", "need at least one mode"));
        }
        self.jitter_modes = modes;
        Ok(self)
    }

    pub fn with_carrier_scaling(mut self, on: bool) -> Self {
        self.carrier_scaling = on;
        self
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn pump_freq(&self) -> f64 {
        self.grid.pump_freq()
    }

    pub fn pump_linewidth(&self) -> f64 {
        self.pump_linewidth
    }

    pub fn pump_lineshape(&self) -> LineshapeKind {
        self.pump_lineshape
    }

    pub fn squeeze(&self) -> &[f64] {
        &self.squeeze
    }

    pub fn carrier_scaling(&self) -> bool {
        self.carrier_scaling
    }

    pub fn envelope_jitter(&self) -> f64 {
        self.envelope_jitter
    }

    pub fn jitter_modes(&self) -> usize {
        self.jitter_modes
    }

    /// Amplitude factor `√(ω/(ωp/2))` of mode `i`, or 1 with scaling off.
    fn carrier_factor(&self, i: usize) -> f64 {
        if self.carrier_scaling {
            (self.grid.omega(i) / self.grid.degenerate_freq()).sqrt()
        } else {
            1.0
        }
    }

    /// Mean photon number per mode.
    pub fn photons(&self) -> Vec<f64> {
        (0..self.grid.n_modes())
            .map(|i| {
                let s = self.squeeze[self.grid.pair_index(i)].sinh();
                let f = self.carrier_factor(i);
                f * f * s * s
            })
            .collect()
    }

    /// FWHM of the photon-number spectrum, measured on the grid.
    pub fn bandwidth_fwhm(&self) -> Option<f64> {
        crate::spectral::sampled_fwhm(&self.grid.omegas(), &self.photons())
    }

    /// Lognormal envelope factor of pair `k`: `g = exp(σZ − σ²)` with
    /// `Z(u) = [a_0 + Σ_q (a_q cos qπu + b_q sin qπu)]/√(K+1)`,
    /// `u = ξ/half_span`. `Z` has unit variance everywhere, so `⟨g²⟩ = 1`.
    fn jitter_factor(&self, k: usize, coeffs: &[f64]) -> f64 {
        let sigma = self.envelope_jitter;
        if sigma == 0.0 {
            return 1.0;
        }
        let x = std::f64::consts::PI * self.grid.offset(self.grid.upper_mode(k))
            / self.grid.half_span();
        let (c1, s1) = (x.cos(), x.sin());
        // cos(qx), sin(qx) by the Chebyshev recurrence
        let (mut cp, mut c) = (1.0, c1);
        let (mut sp, mut s) = (0.0, s1);
        let mut z = coeffs[0];
        for ab in coeffs[1..].chunks_exact(2) {
            z += ab[0] * c + ab[1] * s;
            let cn = 2.0 * c1 * c - cp;
            let sn = 2.0 * c1 * s - sp;
            cp = c;
            c = cn;
            sp = s;
            s = sn;
        }
        let z = z / ((coeffs.len() / 2 + 1) as f64).sqrt();
        (sigma * z - sigma * sigma).exp()
    }
}

/// Default `K` of the envelope-jitter shape.
pub const DEFAULT_JITTER_MODES: usize = 16;

fn check_band(bandwidth: f64, photons: f64) -> Result<()> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(invalid(
            "bandwidth",
            format!("must be positive, got {bandwidth}"),
        ));
    }
    if !(photons >= 0.0) || !photons.is_finite() {
        return Err(invalid("photons", format!("must be >= 0, got {photons}")));
    }
    Ok(())
}

/// Second moments of the multimode squeezed vacuum: `n(ω) = ⟨a†a⟩` per mode and
/// `m(ξ) = ⟨a(ωp/2+ξ)a(ωp/2−ξ)⟩` per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStateMoments {
    grid: SpectralGrid,
    photons: Vec<f64>,
    anomalous: Vec<Complex64>,
}

impl GaussianStateMoments {
    pub fn new(grid: SpectralGrid, photons: Vec<f64>, anomalous: Vec<Complex64>) -> Result<Self> {
        grid.check_len(photons.len(), "photons")?;
        if anomalous.len() != grid.n_pairs() {
            return Err(invalid(
                "anomalous",
                format!("expected {} pairs, got {}", grid.n_pairs(), anomalous.len()),
            ));
        }
        Ok(Self {
            grid,
            photons,
            anomalous,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn photons(&self) -> &[f64] {
        &self.photons
    }

    pub fn anomalous(&self) -> &[Complex64] {
        &self.anomalous
    }

    /// Same photon numbers with the pair correlator the classical surrogate
    /// attains, `i·√(n₊n₋)` (`i·n` for symmetric spectra).
    pub fn classical_surrogate(&self) -> Self {
        let anomalous = (0..self.grid.n_pairs())
            .map(|k| {
                let n_up = self.photons[self.grid.upper_mode(k)];
                let n_lo = self.photons[self.grid.lower_mode(k)];
                Complex64::new(0.0, (n_up * n_lo).sqrt())
            })
            .collect();
        Self {
            grid: self.grid,
            photons: self.photons.clone(),
            anomalous,
        }
    }
}

/// `n = sinh²r`, `m = i·sinh r·cosh r` (pump phase zero).
pub fn squeezed_moments(spec: &SqueezedVacuumSpec) -> GaussianStateMoments {
    let grid = spec.grid;
    let photons = spec.photons();
    let anomalous = (0..grid.n_pairs())
        .map(|k| {
            let r = spec.squeeze[k];
            let scale =
                spec.carrier_factor(grid.upper_mode(k)) * spec.carrier_factor(grid.lower_mode(k));
            Complex64::new(0.0, scale * r.sinh() * r.cosh())
        })
        .collect();
    GaussianStateMoments {
        grid,
        photons,
        anomalous,
    }
}

/// One shot of a stochastic source.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub grid: SpectralGrid,
    pub field: Vec<Complex64>,
    pub key: ShotKey,
    /// Pump detuning δ (rad/fs) drawn for this shot; shifts the shot's
    /// sum-frequency spectrum to `Ω + δ`.
    pub detuning: f64,
}

struct ShotDraws {
    jitter: Vec<f64>,
    detuning: f64,
}

fn shot_draws(spec: &SqueezedVacuumSpec, key: &ShotKey) -> ShotDraws {
    let mut rng = key.stream(SHOT_STREAM);
    let detuning = spec.pump_lineshape.draw(spec.pump_linewidth, &mut rng);
    let jitter = if spec.envelope_jitter > 0.0 {
        (0..=2 * spec.jitter_modes)
            .map(|_| rng.sample(StandardNormal))
            .collect()
    } else {
        Vec::new()
    };
    ShotDraws { jitter, detuning }
}

fn circular_gaussian<R: Rng>(rng: &mut R, mean_photons: f64) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y) * (mean_photons / 2.0).sqrt()
}

/// Stochastic surrogate with perfect pair correlations:
/// `E(ωp/2+ξ) = c·g`, `E(ωp/2−ξ) = i·c*·g`, `c` circular Gaussian with
/// `⟨|c|²⟩ = sinh²r`. With carrier scaling off, `E₊E₋ = i|c|²g²` has phase
/// exactly π/2.
pub fn sample_realization(
    spec: &SqueezedVacuumSpec,
    master_seed: u64,
    shot_index: u64,
) -> FieldRealization {
    let key = ShotKey::new(master_seed, shot_index);
    let draws = shot_draws(spec, &key);
    let grid = spec.grid;
    let mut field = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
    let base = key.base();
    for (k, &r) in spec.squeeze.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        let mut rng = base.clone();
        rng.set_stream(k as u64);
        let s = r.sinh();
        let c = circular_gaussian(&mut rng, s * s);
        let g = spec.jitter_factor(k, &draws.jitter);
        let (up, lo) = (grid.upper_mode(k), grid.lower_mode(k));
        field[up] = c * (g * spec.carrier_factor(up));
        field[lo] = Complex64::i() * c.conj() * (g * spec.carrier_factor(lo));
    }
    FieldRealization {
        grid,
        field,
        key,
        detuning: draws.detuning,
    }
}

/// Control source: same per-mode thermal statistics, independent `c` for every mode.
pub fn uncorrelated_thermal_realization(
    spec: &SqueezedVacuumSpec,
    master_seed: u64,
    shot_index: u64,
) -> FieldRealization {
    let key = ShotKey::new(master_seed, shot_index);
    let draws = shot_draws(spec, &key);
    let grid = spec.grid;
    let mut field = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
    let base = key.base();
    for (k, &r) in spec.squeeze.iter().enumerate() {
        if r == 0.0 {
            continue;
        }
        let mut rng = base.clone();
        rng.set_stream(k as u64);
        let s = r.sinh();
        let c_up = circular_gaussian(&mut rng, s * s);
        let c_lo = circular_gaussian(&mut rng, s * s);
        let g = spec.jitter_factor(k, &draws.jitter);
        let (up, lo) = (grid.upper_mode(k), grid.lower_mode(k));
        field[up] = c_up * (g * spec.carrier_factor(up));
        field[lo] = c_lo * (g * spec.carrier_factor(lo));
    }
    FieldRealization {
        grid,
        field,
        key,
        detuning: draws.detuning,
    }
}
