//! Slow, independent reference computations used to check the engine.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fields::CoherentField;
use crate::shaper::PhaseMask;
use crate::spectral::SpectralGrid;

/// `C(Ω_j) = δω·Σ_{i+k=j} E_i E_k` by explicit summation.
pub fn direct_amplitude(grid: &SpectralGrid, field: &[Complex64], j: usize) -> Complex64 {
    let n = grid.n_modes();
    let lo = j.saturating_sub(n - 1);
    let hi = j.min(n - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in lo..=hi {
        acc += field[i] * field[j - i];
    }
    acc * grid.spacing()
}

/// `|C(Ω)|²` at each target frequency by direct pair summation over the masked field.
pub fn direct_pair_sum(
    field: &CoherentField,
    mask: &PhaseMask,
    targets: &[f64],
) -> Result<Vec<f64>> {
    let grid = field.grid();
    let shaped = mask.apply(grid, field.amplitude())?;
    targets
        .iter()
        .map(|&omega| {
            let j = grid
                .output_index_of(omega)
                .ok_or(Error::OffGridTarget(omega))?;
            Ok(direct_amplitude(grid, &shaped, j).norm_sqr())
        })
        .collect()
}

/// Full direct spectrum, O(N²).
pub fn direct_spectrum(field: &CoherentField, mask: &PhaseMask) -> Result<Vec<f64>> {
    let grid = field.grid();
    let shaped = mask.apply(grid, field.amplitude())?;
    Ok((0..grid.output_len())
        .map(|j| direct_amplitude(grid, &shaped, j).norm_sqr())
        .collect())
}

/// Continuum SFG intensity of a transform-limited Gaussian field
/// `A = √n̄·exp(−2ln2(ω−ω0)²/f²)`: `n̄²·π/(2a)·exp(−a(Ω−2ω0)²)` with `a = 2ln2/f²`.
pub fn gaussian_autoconvolution(peak_photons: f64, fwhm: f64, center: f64, omega: f64) -> f64 {
    let a = 2.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
    let d = omega - 2.0 * center;
    peak_photons * peak_photons * std::f64::consts::PI / (2.0 * a) * (-a * d * d).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOracleConfig {
    pub squeeze: f64,
    pub truncation: usize,
    pub pump_phase: f64,
}

impl FockOracleConfig {
    pub fn new(squeeze: f64, truncation: usize) -> Result<Self> {
        if !(squeeze >= 0.0) || !squeeze.is_finite() {
            return Err(invalid("squeeze", format!("must be >= 0, got {squeeze}")));
        }
        if truncation < 4 {
            return Err(invalid(
                "truncation",
                format!("must be >= 4, got {truncation}"),
            ));
        }
        Ok(Self {
            squeeze,
            truncation,
            pump_phase: 0.0,
        })
    }
}

/// Largest tolerated norm deficit of the truncated state.
pub const FOCK_NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockMoments {
    /// `⟨a₊†a₊⟩`
    pub photons: f64,
    /// `⟨a₋†a₋⟩`
    pub photons_partner: f64,
    /// `⟨a₊a₋⟩`
    #[serde(skip)]
    pub anomalous: Complex64,
    /// `⟨a₊†a₋†a₋a₊⟩`
    pub fourth: f64,
    pub norm: f64,
}

impl FockMoments {
    pub fn anomalous_sq(&self) -> f64 {
        self.anomalous.norm_sqr()
    }
}

/// Dense two-mode state `ψ[i][j]` on `(N+1)²` Fock levels.
struct TwoModeState {
    dim: usize,
    amp: Vec<Complex64>,
}

impl TwoModeState {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            amp: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.amp[i * self.dim + j]
    }

    /// Annihilation on the first (`first = true`) or second mode.
    fn lower(&self, first: bool) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let (si, sj) = if first { (i + 1, j) } else { (i, j + 1) };
                if si < self.dim && sj < self.dim {
                    let k = if first { si } else { sj };
                    out.amp[i * self.dim + j] = self.at(si, sj) * (k as f64).sqrt();
                }
            }
        }
        out
    }

    fn inner(&self, other: &Self) -> Complex64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Moments of the two-mode squeezed vacuum `Σ_k (i·e^{iφ}tanh r)^k/cosh r |k,k⟩`
/// truncated at `k ≤ N_max`, computed with explicit ladder operators.
pub fn fock_two_mode_moments(cfg: &FockOracleConfig) -> Result<FockMoments> {
    let dim = cfg.truncation + 1;
    let t = cfg.squeeze.tanh();
    let c0 = 1.0 / cfg.squeeze.cosh();
    let step = Complex64::i() * Complex64::cis(cfg.pump_phase) * t;
    let mut psi = TwoModeState::zeros(dim);
    let mut coeff = Complex64::new(c0, 0.0);
    for k in 0..dim {
        psi.amp[k * dim + k] = coeff;
        coeff *= step;
    }
    let norm = psi.inner(&psi).re;
    let deficit = 1.0 - norm;
    if deficit > FOCK_NORM_TOLERANCE {
        return Err(Error::TruncationTooSmall {
            deficit,
            threshold: FOCK_NORM_TOLERANCE,
        });
    }
    let a1 = psi.lower(true);
    let a2 = psi.lower(false);
    let a2a1 = a1.lower(false);
    Ok(FockMoments {
        photons: a1.inner(&a1).re,
        photons_partner: a2.inner(&a2).re,
        anomalous: psi.inner(&a2a1),
        fourth: a2a1.inner(&a2a1).re,
        norm,
    })
}

/// First zero of the Bessel function J0.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// `|Σ_k w_k e^{2iα cos(βξ_k)}|²`, the pair-sum interference at `θ = π/2`.
pub fn sinusoidal_suppression(grid: &SpectralGrid, weights: &[f64], alpha: f64, beta: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, w) in weights.iter().enumerate() {
        let xi = grid.offset(grid.upper_mode(k));
        acc += Complex64::cis(2.0 * alpha * (beta * xi).cos()) * *w;
    }
    acc.norm_sqr()
}

/// Amplitude `α*` of the symmetric sinusoidal mask that minimizes the
/// pair-sum interference for per-pair weights `weights` (e.g. `|m(ξ)|`).
/// A coarse scan of `[0, π]` finds the first local minimum; golden-section
/// search then refines it to 1e−6.
pub fn sinusoidal_null_alpha(grid: &SpectralGrid, weights: &[f64], beta: f64) -> Result<f64> {
    if weights.len() != grid.n_pairs() {
        return Err(invalid(
            "weights",
            format!("expected {} pairs, got {}", grid.n_pairs(), weights.len()),
        ));
    }
    if !(beta * grid.half_span() >= 10.0 * std::f64::consts::PI) {
        return Err(invalid(
            "beta",
            format!(
                "β·half_span must be >= 10π, got {}",
                beta * grid.half_span()
            ),
        ));
    }
    let f = |a: f64| sinusoidal_suppression(grid, weights, a, beta);
    const SCAN: usize = 256;
    let h = std::f64::consts::PI / SCAN as f64;
    let vals: Vec<f64> = (0..=SCAN).map(|i| f(i as f64 * h)).collect();
    let first_min = (1..SCAN)
        .find(|&i| vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1])
        .ok_or_else(|| Error::SearchFailed("no interior minimum on [0, π]".into()))?;
    let (mut lo, mut hi) = ((first_min - 1) as f64 * h, (first_min + 1) as f64 * h);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-6 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One line of the verification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Quick oracle suite: fast path vs direct sums, Fock moments, antisymmetric
/// invariance on the moment path.
pub fn verify_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut record = |name: &str, res: Result<(bool, String)>| {
        let (passed, detail) = res.unwrap_or_else(|e| (false, e.to_string()));
        out.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    };

    record("fast_path_vs_direct_sum", check_fast_path(128));
    record("fock_moments", check_fock());
    record("antisymmetric_invariance", check_antisymmetric());
    out
}

fn check_fast_path(n: usize) -> Result<(bool, String)> {
    use rand::{Rng, SeedableRng};
    let grid = crate::spectral::make_grid(3.5407, 0.15, n)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(n as u64);
    let field: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let field = CoherentField::new(grid, field)?;
    let mask = crate::shaper::sinusoidal_mask(&grid, grid.pump_freq(), 1.3, 200.0, 0.4)?;
    let fast = crate::engine::sfg_coherent(&field, &mask)?;
    let slow = direct_spectrum(&field, &mask)?;
    let err = relative_sup(&fast.intensity, &slow);
    Ok((err <= 1e-9, format!("relative sup error {err:.3e} (N={n})")))
}

fn check_fock() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for r in [0.25, 0.5, 1.0] {
        let m = fock_two_mode_moments(&FockOracleConfig::new(r, 80)?)?;
        let n = r.sinh().powi(2);
        let m2 = n * (n + 1.0);
        worst = worst
            .max((m.photons - n).abs())
            .max((m.anomalous_sq() - m2).abs())
            .max((m.fourth - (n * n + m2)).abs());
    }
    Ok((worst <= 1e-8, format!("max deviation {worst:.3e}")))
}

fn check_antisymmetric() -> Result<(bool, String)> {
    use crate::engine::{DetectorResponse, MomentEngine, PumpLine};
    use crate::fields::{squeezed_moments, SqueezedVacuumSpec};
    use crate::lineshape::LineshapeKind;
    use rand::{Rng, SeedableRng};
    let grid = crate::spectral::make_grid(3.5407, 0.06, 256)?;
    let spec = SqueezedVacuumSpec::flat_band(grid, 0.1, 10.0)?;
    let engine = MomentEngine::new(
        &squeezed_moments(&spec),
        &PumpLine::new(grid.pump_freq(), 0.0, LineshapeKind::Lorentzian)?,
        &DetectorResponse::none(),
    )?;
    let (_, base, _) = engine.at_pump(&PhaseMask::zero(&grid))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut phases = vec![0.0; grid.n_modes()];
    for k in 0..grid.n_pairs() {
        let p: f64 = rng.random_range(-10.0..10.0);
        phases[grid.upper_mode(k)] = p;
        phases[grid.lower_mode(k)] = -p;
    }
    let (_, q, _) = engine.at_pump(&PhaseMask::tabulated(&grid, phases)?)?;
    Ok((
        q.to_bits() == base.to_bits(),
        format!("I_q {q:e} vs zero-mask {base:e}"),
    ))
}

/// `max|a − b| / max|b|`.
pub fn relative_sup(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}
