use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft::{Autoconvolver, CircularConvolver};
use super::{DetectorResponse, Provenance, PumpLine, SfgSpectrum, SourceKind};
use crate::error::{invalid, Result};
use crate::fields::{
    sample_realization, uncorrelated_thermal_realization, FieldRealization, SqueezedVacuumSpec,
};
use crate::shaper::PhaseMask;

/// Shots per work unit; partial sums are merged in ascending chunk order.
const CHUNK: u64 = 16;
/// Chunks evaluated concurrently before merging.
const WAVE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StochasticSource {
    /// Pair-correlated surrogate of squeezed vacuum.
    Paired,
    /// Control with independent modes.
    Uncorrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleOptions {
    pub shots: u64,
    pub master_seed: u64,
    pub source: StochasticSource,
}

struct Accumulator {
    /// Σ C in each shot's own pump frame.
    amplitude: Vec<Complex64>,
    /// Σ |C|² in the pump frame.
    amplitude_sq: Vec<f64>,
    /// Σ C², for the variance along the direction of ⟨C⟩.
    amplitude_c2: Vec<Complex64>,
    raw: Vec<f64>,
    detected: Vec<f64>,
    detected_sq: Vec<f64>,
    /// Shot count per Ω-bin detuning shift.
    shifts: BTreeMap<i64, u64>,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Self {
            amplitude: vec![Complex64::new(0.0, 0.0); len],
            amplitude_sq: vec![0.0; len],
            amplitude_c2: vec![Complex64::new(0.0, 0.0); len],
            raw: vec![0.0; len],
            detected: vec![0.0; len],
            detected_sq: vec![0.0; len],
            shifts: BTreeMap::new(),
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        for (a, b) in self.amplitude.iter_mut().zip(&other.amplitude) {
            *a += b;
        }
        for (a, b) in self.amplitude_sq.iter_mut().zip(&other.amplitude_sq) {
            *a += b;
        }
        for (a, b) in self.amplitude_c2.iter_mut().zip(&other.amplitude_c2) {
            *a += b;
        }
        for (a, b) in self.raw.iter_mut().zip(&other.raw) {
            *a += b;
        }
        for (a, b) in self.detected.iter_mut().zip(&other.detected) {
            *a += b;
        }
        for (a, b) in self.detected_sq.iter_mut().zip(&other.detected_sq) {
            *a += b;
        }
        for (s, n) in &other.shifts {
            *self.shifts.entry(*s).or_insert(0) += n;
        }
    }
}

/// `out[j] = Σ_s p_s·v[j − s]`, dropping what falls off the grid.
fn spread(v: &[f64], shifts: &BTreeMap<i64, u64>, total: f64) -> Vec<f64> {
    let len = v.len() as i64;
    let mut out = vec![0.0; v.len()];
    for (&s, &n) in shifts {
        let p = n as f64 / total;
        let lo = s.max(0);
        let hi = (len + s).min(len);
        for j in lo..hi {
            out[j as usize] += p * v[(j - s) as usize];
        }
    }
    out
}

struct ShotContext<'a> {
    spec: &'a SqueezedVacuumSpec,
    mask: &'a PhaseMask,
    options: EnsembleOptions,
    autoconv: Autoconvolver,
    detector: CircularConvolver,
}

impl ShotContext<'_> {
    fn realization(&self, shot: u64) -> FieldRealization {
        match self.options.source {
            StochasticSource::Paired => {
                sample_realization(self.spec, self.options.master_seed, shot)
            }
            StochasticSource::Uncorrelated => {
                uncorrelated_thermal_realization(self.spec, self.options.master_seed, shot)
            }
        }
    }

    fn run_chunk(&self, chunk: u64) -> Accumulator {
        let grid = self.spec.grid();
        let len = grid.output_len();
        let dw = grid.spacing();
        let mut acc = Accumulator::new(len);
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(self.options.shots);
        let mut shifted = vec![Complex64::new(0.0, 0.0); len];
        let mut density = vec![0.0; len];
        for shot in start..end {
            let r = self.realization(shot);
            let shaped = self
                .mask
                .apply(grid, &r.field)
                .expect("mask grid checked before the run");
            let c: Vec<Complex64> = self
                .autoconv
                .autoconvolve(&shaped)
                .into_iter()
                .map(|v| v * dw)
                .collect();
            for (j, v) in c.iter().enumerate() {
                acc.amplitude[j] += v;
                acc.amplitude_sq[j] += v.norm_sqr();
                acc.amplitude_c2[j] += v * v;
            }
            // the shot's sum-frequency spectrum sits at Ω + δ
            let bins = (r.detuning / dw).round();
            let s = if bins.abs() < len as f64 {
                bins as i64
            } else {
                len as i64
            };
            *acc.shifts.entry(s).or_insert(0) += 1;
            shifted
                .iter_mut()
                .for_each(|v| *v = Complex64::new(0.0, 0.0));
            for (j, v) in c.iter().enumerate() {
                let t = j as i64 + s;
                if (0..len as i64).contains(&t) {
                    shifted[t as usize] = *v;
                }
            }
            for (d, v) in density.iter_mut().zip(&shifted) {
                *d = v.norm_sqr() / dw;
            }
            let detected = self.detector.convolve(&density);
            for j in 0..len {
                acc.raw[j] += density[j];
                let d = detected[j].max(0.0);
                acc.detected[j] += d;
                acc.detected_sq[j] += d * d;
            }
        }
        acc
    }
}

/// Shot-averaged SFG spectrum of the pair-correlated squeezed-vacuum surrogate.
pub fn sfg_ensemble(
    spec: &SqueezedVacuumSpec,
    mask: &PhaseMask,
    shots: u64,
    master_seed: u64,
    detector: &DetectorResponse,
) -> Result<SfgSpectrum> {
    sfg_ensemble_with(
        spec,
        mask,
        EnsembleOptions {
            shots,
            master_seed,
            source: StochasticSource::Paired,
        },
        detector,
    )
}

/// Ensemble average for either stochastic source. Output is bit-identical for
/// a given `(spec, mask, options, detector)` regardless of the thread count.
pub fn sfg_ensemble_with(
    spec: &SqueezedVacuumSpec,
    mask: &PhaseMask,
    options: EnsembleOptions,
    detector: &DetectorResponse,
) -> Result<SfgSpectrum> {
    if options.shots == 0 {
        return Err(invalid("shots", "need at least one shot"));
    }
    let grid = *spec.grid();
    grid.check_same(mask.grid())?;
    let len = grid.output_len();
    let dw = grid.spacing();
    let ctx = ShotContext {
        spec,
        mask,
        options,
        autoconv: Autoconvolver::new(grid.n_modes()),
        detector: detector.convolver(&grid)?,
    };

    let n_chunks = options.shots.div_ceil(CHUNK);
    let mut total = Accumulator::new(len);
    let chunk_ids: Vec<u64> = (0..n_chunks).collect();
    for wave in chunk_ids.chunks(WAVE) {
        let partials: Vec<Accumulator> = wave.par_iter().map(|&c| ctx.run_chunk(c)).collect();
        for p in &partials {
            total.merge(p);
        }
    }

    let m = options.shots as f64;
    // Quantum part: the shot-mean pair-sum amplitude in the pump frame,
    // spread over Ω by the empirical pump-detuning distribution.
    let mean_amp: Vec<Complex64> = total.amplitude.iter().map(|a| a / m).collect();
    let amp_var: Vec<f64> = total
        .amplitude_sq
        .iter()
        .zip(&mean_amp)
        .map(|(s2, a)| {
            if options.shots > 1 {
                ((s2 - m * a.norm_sqr()) / (m - 1.0)).max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let amplitude_stderr: Vec<f64> = amp_var.iter().map(|v| (v / m).sqrt()).collect();
    let coherent: Vec<f64> = mean_amp.iter().map(|a| a.norm_sqr() / dw).collect();
    let quantum_raw = spread(&coherent, &total.shifts, m);
    let classical_raw: Vec<f64> = total
        .raw
        .iter()
        .zip(&quantum_raw)
        .map(|(r, q)| (r / m - q).max(0.0))
        .collect();
    // δ|⟨C⟩|² = 2|⟨C⟩|·δC_∥, with δC_∥ the fluctuation along ⟨C⟩
    let coherent_se: Vec<f64> = (0..len)
        .map(|j| {
            let a = mean_amp[j];
            if options.shots < 2 || a.norm() == 0.0 {
                return 0.0;
            }
            let pseudo = (total.amplitude_c2[j] - a * a * m) / (m - 1.0);
            let u = a.conj() / a.norm();
            let var_par = (0.5 * (amp_var[j] + (pseudo * u * u).re)).max(0.0);
            2.0 * a.norm() * (var_par / m).sqrt() / dw
        })
        .collect();
    let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
    let quantum = clamp(ctx.detector.convolve(&quantum_raw));
    let classical = clamp(ctx.detector.convolve(&classical_raw));
    let intensity: Vec<f64> = quantum.iter().zip(&classical).map(|(q, c)| q + c).collect();
    let stderr: Vec<f64> = total
        .detected
        .iter()
        .zip(&total.detected_sq)
        .map(|(s, s2)| {
            if options.shots > 1 {
                let mean = s / m;
                ((s2 / m - mean * mean).max(0.0) * m / (m - 1.0) / m).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    // The detector commutes with the detuning shift, so both error terms are
    // formed on the detected pump-frame profile. Amplitude errors of nearby
    // bins are treated as fully correlated (conservative); the second term is
    // the multinomial noise of the empirical detuning histogram.
    let detected_q = ctx.detector.convolve(&coherent);
    let detected_se = ctx.detector.convolve(&coherent_se);
    let detected_q2: Vec<f64> = detected_q.iter().map(|q| q * q).collect();
    let stderr_quantum: Vec<f64> = spread(&detected_se, &total.shifts, m)
        .iter()
        .zip(spread(&detected_q2, &total.shifts, m))
        .zip(spread(&detected_q, &total.shifts, m))
        .map(|((se, q2), q)| (se * se + ((q2 - q * q) / m).max(0.0)).sqrt())
        .collect();

    Ok(SfgSpectrum {
        grid,
        intensity,
        quantum: Some(quantum),
        classical: Some(classical),
        stderr: Some(stderr),
        stderr_quantum: Some(stderr_quantum),
        mean_amplitude: Some(mean_amp),
        amplitude_stderr: Some(amplitude_stderr),
        provenance: Provenance {
            source: match options.source {
                StochasticSource::Paired => SourceKind::SqueezedStochastic,
                StochasticSource::Uncorrelated => SourceKind::UncorrelatedStochastic,
            },
            mask: mask.descriptor().clone(),
            shots: Some(options.shots),
            master_seed: Some(options.master_seed),
            pump: Some(PumpLine {
                freq: spec.pump_freq(),
                linewidth: spec.pump_linewidth(),
                lineshape: spec.pump_lineshape(),
            }),
            detector: Some(*detector),
        },
    })
}
