//! Spectral phase masks: construction, composition, SLM pixelation and
//! application to complex spectral fields.
//!
//! Phases are stored unwrapped. Wrapping to `[−π, π)` happens only when a
//! mask is exported.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::SpectralGrid;

/// Parametric description of a phase mask. All frequency arguments are
/// offsets `ω − ωp/2` in rad/fs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaskDescriptor {
    Zero,
    /// `Φ = τ|ω − ωp/2|`; delays one spectral half by `2τ` relative to the other.
    SplitDelay {
        #[serde(rename = "tau_fs")]
        tau: f64,
    },
    /// `Φ = α·sin(β(ω − ωp/2) + θ)`.
    Sinusoidal {
        #[serde(rename = "alpha_rad")]
        alpha: f64,
        #[serde(rename = "beta_fs")]
        beta: f64,
        #[serde(rename = "theta_rad")]
        theta: f64,
    },
    /// `Φ = Σ_k c_k (ω − ωp/2)^k`, `c_k` in fs^k.
    Polynomial {
        #[serde(rename = "coeffs_fs_pow_k")]
        coeffs: Vec<f64>,
    },
    /// Staircase sampling of `source` at the centers of `n_pixels` mode-aligned blocks.
    Pixelated {
        n_pixels: usize,
        source: Box<MaskDescriptor>,
    },
    /// Sum of the parts' phases.
    Composite {
        parts: Vec<MaskDescriptor>,
    },
    /// Per-mode phases, typically read back from an exported mask file.
    Tabulated {
        #[serde(rename = "phases_rad")]
        phases: Vec<f64>,
    },
}

impl MaskDescriptor {
    /// Phase at frequency offset `x = ω − ωp/2`.
    pub fn evaluate(&self, grid: &SpectralGrid, x: f64) -> f64 {
        match self {
            MaskDescriptor::Zero => 0.0,
            MaskDescriptor::SplitDelay { tau } => tau * x.abs(),
            MaskDescriptor::Sinusoidal { alpha, beta, theta } => {
                alpha * (beta * x + canonical_theta(*theta)).sin()
            }
            MaskDescriptor::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
            MaskDescriptor::Pixelated { n_pixels, source } => {
                let blocks = PixelBlocks::new(grid.n_modes(), *n_pixels);
                let b = blocks.block_of(nearest_mode(grid, x));
                source.evaluate(grid, blocks.center_offset(grid, b))
            }
            MaskDescriptor::Composite { parts } => parts.iter().map(|p| p.evaluate(grid, x)).sum(),
            MaskDescriptor::Tabulated { phases } => phases[nearest_mode(grid, x)],
        }
    }

    /// Descriptor of the mask with opposite phase.
    pub fn negated(&self) -> MaskDescriptor {
        match self {
            MaskDescriptor::Zero => MaskDescriptor::Zero,
            MaskDescriptor::SplitDelay { tau } => MaskDescriptor::SplitDelay { tau: -tau },
            MaskDescriptor::Sinusoidal { alpha, beta, theta } => MaskDescriptor::Sinusoidal {
                alpha: -alpha,
                beta: *beta,
                theta: *theta,
            },
            MaskDescriptor::Polynomial { coeffs } => MaskDescriptor::Polynomial {
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
            MaskDescriptor::Pixelated { n_pixels, source } => MaskDescriptor::Pixelated {
                n_pixels: *n_pixels,
                source: Box::new(source.negated()),
            },
            MaskDescriptor::Composite { parts } => MaskDescriptor::Composite {
                parts: parts.iter().map(MaskDescriptor::negated).collect(),
            },
            MaskDescriptor::Tabulated { phases } => MaskDescriptor::Tabulated {
                phases: phases.iter().map(|p| -p).collect(),
            },
        }
    }

    fn validate(&self, grid: &SpectralGrid) -> Result<()> {
        let finite = |v: f64, name: &'static str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        };
        match self {
            MaskDescriptor::Zero => Ok(()),
            MaskDescriptor::SplitDelay { tau } => finite(*tau, "tau"),
            MaskDescriptor::Sinusoidal { alpha, beta, theta } => {
                finite(*alpha, "alpha")?;
                finite(*beta, "beta")?;
                finite(*theta, "theta")
            }
            MaskDescriptor::Polynomial { coeffs } => {
                coeffs.iter().try_for_each(|c| finite(*c, "coeffs"))
            }
            MaskDescriptor::Pixelated { n_pixels, source } => {
                if *n_pixels == 0 || *n_pixels > grid.n_modes() {
                    return Err(invalid(
                        "n_pixels",
                        format!("must be in 1..={}, got {n_pixels}", grid.n_modes()),
                    ));
                }
                source.validate(grid)
            }
            MaskDescriptor::Composite { parts } => parts.iter().try_for_each(|p| p.validate(grid)),
            MaskDescriptor::Tabulated { phases } => {
                grid.check_len(phases.len(), "tabulated mask")?;
                phases.iter().try_for_each(|p| finite(*p, "phases"))
            }
        }
    }
}

fn nearest_mode(grid: &SpectralGrid, x: f64) -> usize {
    let pos = x / grid.spacing() + grid.n_modes() as f64 / 2.0 - 0.5;
    pos.round().clamp(0.0, (grid.n_modes() - 1) as f64) as usize
}

/// Contiguous mode blocks of an SLM; the first `n % p` blocks carry one extra mode.
#[derive(Debug, Clone, Copy)]
struct PixelBlocks {
    base: usize,
    rem: usize,
}

impl PixelBlocks {
    fn new(n_modes: usize, n_pixels: usize) -> Self {
        Self {
            base: n_modes / n_pixels,
            rem: n_modes % n_pixels,
        }
    }

    fn start(&self, b: usize) -> usize {
        b * self.base + b.min(self.rem)
    }

    fn len(&self, b: usize) -> usize {
        self.base + usize::from(b < self.rem)
    }

    fn block_of(&self, i: usize) -> usize {
        let wide = self.rem * (self.base + 1);
        if i < wide {
            i / (self.base + 1)
        } else {
            self.rem + (i - wide) / self.base
        }
    }

    fn center_offset(&self, grid: &SpectralGrid, b: usize) -> f64 {
        let s = self.start(b);
        let e = s + self.len(b) - 1;
        0.5 * (grid.offset(s) + grid.offset(e))
    }
}

/// Phase mask `Φ(ω)` sampled on a grid, with the descriptor it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMask {
    grid: SpectralGrid,
    phase: Vec<f64>,
    descriptor: MaskDescriptor,
}

impl PhaseMask {
    /// Evaluates `descriptor` on every mode of `grid`.
    pub fn from_descriptor(grid: &SpectralGrid, descriptor: MaskDescriptor) -> Result<Self> {
        descriptor.validate(grid)?;
        let phase = (0..grid.n_modes())
            .map(|i| descriptor.evaluate(grid, grid.offset(i)))
            .collect::<Vec<_>>();
        if let Some(bad) = phase.iter().find(|p| !p.is_finite()) {
            return Err(invalid(
                "phase",
                format!("evaluated to non-finite value {bad}"),
            ));
        }
        Ok(Self {
            grid: *grid,
            phase,
            descriptor,
        })
    }

    pub fn zero(grid: &SpectralGrid) -> Self {
        Self {
            grid: *grid,
            phase: vec![0.0; grid.n_modes()],
            descriptor: MaskDescriptor::Zero,
        }
    }

    /// Mask with explicit per-mode phases.
    pub fn tabulated(grid: &SpectralGrid, phases: Vec<f64>) -> Result<Self> {
        Self::from_descriptor(grid, MaskDescriptor::Tabulated { phases })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn descriptor(&self) -> &MaskDescriptor {
        &self.descriptor
    }

    /// Largest deviation between the stored phases and a fresh evaluation of the descriptor.
    pub fn descriptor_residual(&self) -> f64 {
        (0..self.grid.n_modes())
            .map(|i| {
                (self.descriptor.evaluate(&self.grid, self.grid.offset(i)) - self.phase[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `Φ(ω_i) + Φ(ω_pair(i))` for pair `k`, evaluated by mirrored index.
    #[inline]
    pub fn pair_sum(&self, pair: usize) -> f64 {
        self.phase[self.grid.upper_mode(pair)] + self.phase[self.grid.lower_mode(pair)]
    }

    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid,
            phase: self.phase.iter().map(|p| -p).collect(),
            descriptor: self.descriptor.negated(),
        }
    }

    /// Composite mask; phases add.
    pub fn compose(masks: &[&PhaseMask]) -> Result<Self> {
        let first = masks
            .first()
            .ok_or_else(|| invalid("masks", "composite needs at least one part"))?;
        let grid = first.grid;
        let mut phase = vec![0.0; grid.n_modes()];
        for m in masks {
            grid.check_same(&m.grid)?;
            for (p, q) in phase.iter_mut().zip(&m.phase) {
                *p += q;
            }
        }
        Ok(Self {
            grid,
            phase,
            descriptor: MaskDescriptor::Composite {
                parts: masks.iter().map(|m| m.descriptor.clone()).collect(),
            },
        })
    }

    /// `E'(ω) = E(ω)·e^{iΦ(ω)}`.
    pub fn apply(&self, grid: &SpectralGrid, field: &[Complex64]) -> Result<Vec<Complex64>> {
        self.grid.check_same(grid)?;
        grid.check_len(field.len(), "field")?;
        Ok(field
            .iter()
            .zip(&self.phase)
            .map(|(e, &p)| e * Complex64::cis(p))
            .collect())
    }

    /// Writes `omega_rad_per_fs,phase_rad_wrapped` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["omega_rad_per_fs", "phase_rad_wrapped"])?;
        for (i, p) in self.phase.iter().enumerate() {
            w.write_record([self.grid.omega(i).to_string(), wrap_phase(*p).to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a mask written by [`PhaseMask::write_csv`]. The frequency column
    /// must match `grid` mode by mode.
    pub fn read_csv<R: Read>(grid: &SpectralGrid, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.len() != 2
            || &headers[0] != "omega_rad_per_fs"
            || &headers[1] != "phase_rad_wrapped"
        {
            return Err(invalid(
                "mask csv",
                format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()),
            ));
        }
        let mut phases = Vec::with_capacity(grid.n_modes());
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid("mask csv", format!("row {}: {e}", i + 1)))
            };
            let omega = parse(&rec[0])?;
            let phase = parse(&rec[1])?;
            if i >= grid.n_modes() {
                return Err(Error::GridMismatch(format!(
                    "mask file has more than {} rows",
                    grid.n_modes()
                )));
            }
            if (omega - grid.omega(i)).abs() > 1e-9 * grid.omega(i) {
                return Err(Error::GridMismatch(format!(
                    "row {}: omega {omega} does not match grid mode {}",
                    i + 1,
                    grid.omega(i)
                )));
            }
            phases.push(phase);
        }
        grid.check_len(phases.len(), "mask file")?;
        Self::tabulated(grid, phases)
    }
}

/// Wraps a phase into `[−π, π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi - TAU * ((phi + PI) / TAU).floor();
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

const THETA_LATTICE: f64 = (1u64 << 36) as f64;

/// Snaps `θ` onto a lattice of 2⁻³⁶ turns in (−½, ½]. Values that differ by a
/// whole number of turns (up to rounding) map to the same float, and `−θ`
/// maps to the exact negation.
pub fn canonical_theta(theta: f64) -> f64 {
    let turns = theta / TAU;
    let frac = turns - turns.round();
    let mut k = (frac * THETA_LATTICE).round();
    if k <= -THETA_LATTICE / 2.0 {
        k += THETA_LATTICE;
    }
    k * (TAU / THETA_LATTICE)
}

pub fn split_delay_mask(grid: &SpectralGrid, pump_freq: f64, tau: f64) -> Result<PhaseMask> {
    grid.check_pump(pump_freq)?;
    PhaseMask::from_descriptor(grid, MaskDescriptor::SplitDelay { tau })
}

/// Sinusoidal mask; `theta` is canonicalized with [`canonical_theta`].
pub fn sinusoidal_mask(
    grid: &SpectralGrid,
    pump_freq: f64,
    alpha: f64,
    beta: f64,
    theta: f64,
) -> Result<PhaseMask> {
    grid.check_pump(pump_freq)?;
    if !theta.is_finite() {
        return Err(invalid("theta", format!("must be finite, got {theta}")));
    }
    PhaseMask::from_descriptor(
        grid,
        MaskDescriptor::Sinusoidal {
            alpha,
            beta,
            theta: canonical_theta(theta),
        },
    )
}

pub fn polynomial_mask(grid: &SpectralGrid, pump_freq: f64, coeffs: &[f64]) -> Result<PhaseMask> {
    grid.check_pump(pump_freq)?;
    PhaseMask::from_descriptor(
        grid,
        MaskDescriptor::Polynomial {
            coeffs: coeffs.to_vec(),
        },
    )
}

/// Staircase approximation of `mask` over `n_pixels` SLM elements.
pub fn pixelate_mask(mask: &PhaseMask, n_pixels: usize) -> Result<PhaseMask> {
    PhaseMask::from_descriptor(
        &mask.grid,
        MaskDescriptor::Pixelated {
            n_pixels,
            source: Box::new(mask.descriptor.clone()),
        },
    )
}

pub fn apply_mask(
    grid: &SpectralGrid,
    field: &[Complex64],
    mask: &PhaseMask,
) -> Result<Vec<Complex64>> {
    mask.apply(grid, field)
}
