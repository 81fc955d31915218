use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{Experiment, ExperimentConfig, Profile, SourceChoice, SourceConfig};
use super::fit::{fit_fwhm, tl_pulse_duration, FwhmFit};
use crate::engine::{
    convolve_response, qc_ratio_formula, sfg_coherent, sfg_ensemble_with, DetectorResponse,
    EnsembleOptions, MomentEngine, SfgSpectrum, StochasticSource,
};
use crate::error::{Error, Result};
use crate::fields::{
    coherent_pulse, squeezed_moments, CoherentField, GaussianStateMoments, SqueezedVacuumSpec,
};
use crate::oracles::sinusoidal_null_alpha;
use crate::shaper::{pixelate_mask, sinusoidal_mask, split_delay_mask, MaskDescriptor, PhaseMask};
use crate::spectral::{flat_envelope, gaussian_envelope, SpectralGrid};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `I(ωp)` of one scan point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointValues {
    pub total: f64,
    pub quantum: f64,
    pub classical: f64,
    pub stderr: f64,
}

impl PointValues {
    fn scaled(self, f: f64) -> Self {
        Self {
            total: self.total * f,
            quantum: self.quantum * f,
            classical: self.classical * f,
            stderr: self.stderr * f,
        }
    }
}

/// Scan series, normalized to the zero-mask value of the same source and path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub x: Vec<f64>,
    pub x_unit: String,
    pub points: Vec<PointValues>,
    /// Extra named columns appended after the standard ones.
    pub extra: Vec<(String, Vec<f64>)>,
}

impl ScanResult {
    pub fn column(&self, f: impl Fn(&PointValues) -> f64) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["x", "x_unit", "I_total", "I_q", "I_c", "stderr"];
        header.extend(self.extra.iter().map(|(n, _)| n.as_str()));
        w.write_record(&header)?;
        for (i, p) in self.points.iter().enumerate() {
            let mut row = vec![
                self.x[i].to_string(),
                self.x_unit.clone(),
                p.total.to_string(),
                p.quantum.to_string(),
                p.classical.to_string(),
                p.stderr.to_string(),
            ];
            row.extend(self.extra.iter().map(|(_, v)| v[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One configured source on one grid, with both evaluation paths.
pub struct Bench {
    grid: SpectralGrid,
    source: SourceConfig,
    detector: DetectorResponse,
    slm_pixels: Option<usize>,
    coherent: Option<CoherentField>,
    spec: Option<SqueezedVacuumSpec>,
    moments: Option<MomentEngine>,
    photons: Vec<f64>,
    weights: Vec<f64>,
}

impl Bench {
    pub fn new(
        source: &SourceConfig,
        grid: SpectralGrid,
        detector: DetectorResponse,
        slm_pixels: Option<usize>,
    ) -> Result<Self> {
        let mut bench = Self {
            grid,
            source: source.clone(),
            detector,
            slm_pixels,
            coherent: None,
            spec: None,
            moments: None,
            photons: Vec::new(),
            weights: Vec::new(),
        };
        let center = grid.degenerate_freq();
        match source.kind {
            SourceChoice::Coherent => {
                let env = match source.profile {
                    Profile::Flat => {
                        flat_envelope(&grid, center, source.bandwidth, source.photons)?
                    }
                    Profile::Gaussian => {
                        gaussian_envelope(&grid, center, source.bandwidth, source.photons)?
                    }
                };
                let a = env.amplitude();
                bench.weights = (0..grid.n_pairs())
                    .map(|k| a[grid.upper_mode(k)] * a[grid.lower_mode(k)])
                    .collect();
                bench.photons = env.photons();
                bench.coherent = Some(coherent_pulse(&env, &PhaseMask::zero(&grid))?);
            }
            SourceChoice::Squeezed | SourceChoice::Uncorrelated => {
                let spec = match source.profile {
                    Profile::Flat => {
                        SqueezedVacuumSpec::flat_band(grid, source.bandwidth, source.photons)?
                    }
                    Profile::Gaussian => {
                        SqueezedVacuumSpec::gaussian_band(grid, source.bandwidth, source.photons)?
                    }
                }
                .with_pump_line(source.pump_linewidth, source.pump_lineshape)?
                .with_envelope_jitter(source.envelope_jitter)?
                .with_jitter_modes(source.jitter_modes)?
                .with_carrier_scaling(source.carrier_scaling);
                let mut moments = squeezed_moments(&spec);
                if source.kind == SourceChoice::Uncorrelated {
                    let photons = moments.photons().to_vec();
                    let cross = moments.classical_surrogate();
                    bench.weights = cross.anomalous().iter().map(|m| m.norm()).collect();
                    moments = GaussianStateMoments::new(
                        grid,
                        photons,
                        vec![Complex64::new(0.0, 0.0); grid.n_pairs()],
                    )?;
                } else {
                    bench.weights = moments.anomalous().iter().map(|m| m.norm()).collect();
                }
                bench.photons = moments.photons().to_vec();
                let pump = crate::engine::PumpLine::new(
                    source.pump_freq,
                    source.pump_linewidth,
                    source.pump_lineshape,
                )?;
                bench.moments = Some(MomentEngine::new(&moments, &pump, &detector)?);
                bench.spec = Some(spec);
            }
        }
        Ok(bench)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Photon number per mode (field intensity for the coherent source).
    pub fn photons(&self) -> &[f64] {
        &self.photons
    }

    /// Per-pair weights `|m|` (or `|E₊E₋|`) that set the pair-sum interference.
    pub fn pair_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Builds `descriptor` on this grid, pixelated if an SLM is configured.
    pub fn mask(&self, descriptor: MaskDescriptor) -> Result<PhaseMask> {
        let m = PhaseMask::from_descriptor(&self.grid, descriptor)?;
        self.pixelate(m)
    }

    fn pixelate(&self, m: PhaseMask) -> Result<PhaseMask> {
        match self.slm_pixels {
            Some(p) => pixelate_mask(&m, p),
            None => Ok(m),
        }
    }

    /// Deterministic spectrum: coherent autoconvolution or Gaussian moments.
    pub fn spectrum(&self, mask: &PhaseMask) -> Result<SfgSpectrum> {
        match (&self.coherent, &self.moments) {
            (Some(field), _) => convolve_response(&sfg_coherent(field, mask)?, &self.detector),
            (None, Some(engine)) => engine.spectrum(mask),
            _ => unreachable!("bench has a source"),
        }
    }

    pub fn at_pump(&self, mask: &PhaseMask) -> Result<PointValues> {
        if let Some(engine) = &self.moments {
            let (total, quantum, classical) = engine.at_pump(mask)?;
            return Ok(PointValues {
                total,
                quantum,
                classical,
                stderr: 0.0,
            });
        }
        let p = self.spectrum(mask)?.at_pump();
        Ok(PointValues {
            total: p.total,
            quantum: p.total,
            classical: 0.0,
            stderr: 0.0,
        })
    }

    /// Whether a stochastic path exists for this source.
    pub fn has_stochastic(&self) -> bool {
        self.spec.is_some()
    }

    pub fn stochastic_spectrum(
        &self,
        mask: &PhaseMask,
        shots: u64,
        master_seed: u64,
    ) -> Result<SfgSpectrum> {
        let spec = self.spec.as_ref().ok_or_else(|| Error::Config {
            field: "run.stochastic".into(),
            line: None,
            reason: "the coherent source has no stochastic path".into(),
        })?;
        let source = match self.source.kind {
            SourceChoice::Uncorrelated => StochasticSource::Uncorrelated,
            _ => StochasticSource::Paired,
        };
        sfg_ensemble_with(
            spec,
            mask,
            EnsembleOptions {
                shots,
                master_seed,
                source,
            },
            &self.detector,
        )
    }

    pub fn stochastic_at_pump(
        &self,
        mask: &PhaseMask,
        shots: u64,
        master_seed: u64,
    ) -> Result<PointValues> {
        let p = self
            .stochastic_spectrum(mask, shots, master_seed)?
            .at_pump();
        Ok(PointValues {
            total: p.total,
            quantum: p.quantum.unwrap_or(p.total),
            classical: p.classical.unwrap_or(0.0),
            stderr: p.stderr.unwrap_or(0.0),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunProvenance {
    pub program: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub master_seed: u64,
    pub experiment: &'static str,
    pub config: serde_json::Value,
}

impl RunProvenance {
    pub fn of(cfg: &ExperimentConfig) -> Result<Self> {
        let json = cfg.to_json()?;
        Ok(Self {
            program: "sqzlab",
            version: VERSION,
            config_sha256: hex::encode(Sha256::digest(json.as_bytes())),
            master_seed: cfg.master_seed,
            experiment: cfg.experiment.name(),
            config: serde_json::from_str(&json)?,
        })
    }

    fn csv_comment(&self) -> String {
        format!(
            "# {} {} experiment={} config_sha256={} master_seed={}\n",
            self.program, self.version, self.experiment, self.config_sha256, self.master_seed
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanFit {
    pub fwhm_tau_fs: f64,
    /// Relative delay between the two spectral halves is `2τ`.
    pub fwhm_relative_delay_fs: f64,
    pub peak_tau_fs: f64,
    pub min_quantum_fraction: f64,
    pub classical_max_change: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaSummary {
    pub alpha_rad: f64,
    pub alpha_from_search: bool,
    pub beta_fs: f64,
    /// `min I_total / max I_total` over the scan.
    pub contrast: f64,
    pub theta_at_min_rad: f64,
    pub theta_at_max_rad: f64,
    /// `I_q / I_c` at the scan minimum.
    pub quantum_residual_at_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub photons: f64,
    pub bandwidth_ratio: f64,
    pub bandwidth_rad_per_fs: f64,
    pub ratio_engine: f64,
    pub ratio_formula: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtPump {
    pub total: f64,
    pub quantum: f64,
    pub classical: f64,
    pub qc_ratio: Option<f64>,
    pub qc_ratio_formula: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: &'static str,
    /// Zero-mask `I_total(ωp)` used to normalize every intensity.
    pub normalization: f64,
    pub at_pump: AtPump,
    pub tl_duration_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_fit: Option<ScanFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<RatioRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stochastic: Option<StochasticSummary>,
    pub provenance: RunProvenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct StochasticSummary {
    pub shots: u64,
    pub normalization: f64,
    pub at_pump: PointValues,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrast: Option<f64>,
}

/// Everything a run produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub spectrum: SfgSpectrum,
    pub scan: Option<ScanResult>,
    pub stochastic_spectrum: Option<SfgSpectrum>,
    pub stochastic_scan: Option<ScanResult>,
    pub summary: Summary,
}

/// Evaluates `masks` at the pump frequency, concurrently, in scan order.
fn scan_points(bench: &Bench, masks: &[PhaseMask]) -> Result<Vec<PointValues>> {
    masks.par_iter().map(|m| bench.at_pump(m)).collect()
}

fn stochastic_points(
    bench: &Bench,
    masks: &[PhaseMask],
    cfg: &ExperimentConfig,
) -> Result<Vec<PointValues>> {
    masks
        .iter()
        .map(|m| bench.stochastic_at_pump(m, cfg.shots, cfg.master_seed))
        .collect()
}

fn normalize(points: Vec<PointValues>, norm: f64) -> Vec<PointValues> {
    let f = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    points.into_iter().map(|p| p.scaled(f)).collect()
}

fn scaled_spectrum(s: SfgSpectrum, norm: f64) -> SfgSpectrum {
    if norm > 0.0 {
        s.scaled(1.0 / norm)
    } else {
        s
    }
}

/// Runs the configured experiment in memory.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let provenance = RunProvenance::of(cfg)?;
    if let Experiment::RatioSweep {
        photons,
        bandwidth_ratio,
    } = &cfg.experiment
    {
        return ratio_sweep(cfg, photons, bandwidth_ratio, provenance);
    }

    let bench = Bench::new(&cfg.source, cfg.grid, cfg.detector, cfg.slm_pixels)?;
    let zero = bench.mask(MaskDescriptor::Zero)?;
    let base = bench.mask(cfg.mask.clone())?;
    let reference = bench.at_pump(&zero)?;
    let norm = reference.total;
    let spectrum = bench.spectrum(&base)?;
    let raw_at = bench.at_pump(&base)?;
    let stochastic = cfg.stochastic && bench.has_stochastic();
    let stochastic_norm = if stochastic {
        Some(bench.stochastic_at_pump(&zero, cfg.shots, cfg.master_seed)?)
    } else {
        None
    };

    let compose = |scan: MaskDescriptor| -> Result<PhaseMask> {
        if cfg.mask == MaskDescriptor::Zero {
            bench.mask(scan)
        } else {
            bench.mask(MaskDescriptor::Composite {
                parts: vec![cfg.mask.clone(), scan],
            })
        }
    };

    let (is_squeezed, formula) = match cfg.source.kind {
        SourceChoice::Squeezed => (
            true,
            qc_ratio_formula(
                cfg.source.bandwidth,
                cfg.source.pump_linewidth,
                cfg.detector.fwhm,
                cfg.source.photons,
            )
            .ok(),
        ),
        _ => (false, None),
    };
    let mut summary = Summary {
        experiment: cfg.experiment.name(),
        normalization: norm,
        at_pump: AtPump {
            total: raw_at.total,
            quantum: raw_at.quantum,
            classical: raw_at.classical,
            qc_ratio: (is_squeezed && raw_at.classical > 0.0)
                .then(|| raw_at.quantum / raw_at.classical),
            qc_ratio_formula: formula,
        },
        tl_duration_fs: tl_pulse_duration(bench.grid(), bench.photons()).ok(),
        delay_fit: None,
        theta: None,
        ratios: None,
        stochastic: None,
        provenance,
    };

    let scan;
    let mut stochastic_scan = None;
    match &cfg.experiment {
        Experiment::Spectrum => {
            // one-point scan: the base mask at ωp
            scan = Some(ScanResult {
                x: vec![cfg.source.pump_freq],
                x_unit: "rad_per_fs".into(),
                points: normalize(vec![raw_at], norm),
                extra: Vec::new(),
            });
        }
        Experiment::DelayScan { tau_fs } => {
            let masks = tau_fs
                .iter()
                .map(|&tau| {
                    split_delay_mask(bench.grid(), cfg.source.pump_freq, tau)
                        .and_then(|m| compose(m.descriptor().clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            let points = scan_points(&bench, &masks)?;
            let q: Vec<f64> = points.iter().map(|p| p.quantum).collect();
            let qmax = q.iter().cloned().fold(0.0, f64::max);
            let fit: Option<FwhmFit> = fit_fwhm(tau_fs, &q).ok();
            summary.delay_fit = fit.map(|f| ScanFit {
                fwhm_tau_fs: f.fwhm,
                fwhm_relative_delay_fs: 2.0 * f.fwhm,
                peak_tau_fs: f.peak_x,
                min_quantum_fraction: if qmax > 0.0 {
                    q.iter().cloned().fold(f64::INFINITY, f64::min) / qmax
                } else {
                    0.0
                },
                classical_max_change: points
                    .iter()
                    .map(|p| (p.classical - reference.classical).abs())
                    .fold(0.0, f64::max),
            });
            if stochastic {
                stochastic_scan = Some(ScanResult {
                    x: tau_fs.clone(),
                    x_unit: "fs".into(),
                    points: normalize(
                        stochastic_points(&bench, &masks, cfg)?,
                        stochastic_norm.unwrap().total,
                    ),
                    extra: Vec::new(),
                });
            }
            scan = Some(ScanResult {
                x: tau_fs.clone(),
                x_unit: "fs".into(),
                points: normalize(points, norm),
                extra: Vec::new(),
            });
        }
        Experiment::ThetaScan {
            alpha,
            beta_fs,
            theta_rad,
        } => {
            let (alpha, searched) = match alpha {
                Some(a) => (*a, false),
                None => (
                    sinusoidal_null_alpha(bench.grid(), bench.pair_weights(), *beta_fs).map_err(
                        |e| Error::Config {
                            field: "run.experiment.alpha_rad".into(),
                            line: None,
                            reason: e.to_string(),
                        },
                    )?,
                    true,
                ),
            };
            let masks = theta_rad
                .iter()
                .map(|&theta| {
                    sinusoidal_mask(bench.grid(), cfg.source.pump_freq, alpha, *beta_fs, theta)
                        .and_then(|m| compose(m.descriptor().clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            let points = scan_points(&bench, &masks)?;
            let (imin, imax) = extremes(&points);
            let contrast = if points[imax].total > 0.0 {
                points[imin].total / points[imax].total
            } else {
                0.0
            };
            summary.theta = Some(ThetaSummary {
                alpha_rad: alpha,
                alpha_from_search: searched,
                beta_fs: *beta_fs,
                contrast,
                theta_at_min_rad: theta_rad[imin],
                theta_at_max_rad: theta_rad[imax],
                quantum_residual_at_min: if points[imin].classical > 0.0 {
                    points[imin].quantum / points[imin].classical
                } else {
                    f64::NAN
                },
            });
            if stochastic {
                let sp = normalize(
                    stochastic_points(&bench, &masks, cfg)?,
                    stochastic_norm.unwrap().total,
                );
                let (smin, smax) = extremes(&sp);
                if let Some(s) = summary.stochastic.as_mut() {
                    s.contrast = Some(sp[smin].total / sp[smax].total);
                }
                stochastic_scan = Some(ScanResult {
                    x: theta_rad.clone(),
                    x_unit: "rad".into(),
                    points: sp,
                    extra: Vec::new(),
                });
            }
            scan = Some(ScanResult {
                x: theta_rad.clone(),
                x_unit: "rad".into(),
                points: normalize(points, norm),
                extra: Vec::new(),
            });
        }
        Experiment::RatioSweep { .. } => unreachable!("handled above"),
    }

    let stochastic_spectrum = match stochastic_norm {
        Some(sn) => {
            let s = bench.stochastic_spectrum(&base, cfg.shots, cfg.master_seed)?;
            let at = s.at_pump();
            let contrast = stochastic_scan
                .as_ref()
                .filter(|_| summary.theta.is_some())
                .map(|sc| {
                    let (a, b) = extremes(&sc.points);
                    sc.points[a].total / sc.points[b].total
                });
            let at = PointValues {
                total: at.total,
                quantum: at.quantum.unwrap_or(at.total),
                classical: at.classical.unwrap_or(0.0),
                stderr: at.stderr.unwrap_or(0.0),
            };
            if let Experiment::Spectrum = cfg.experiment {
                stochastic_scan = Some(ScanResult {
                    x: vec![cfg.source.pump_freq],
                    x_unit: "rad_per_fs".into(),
                    points: normalize(vec![at], sn.total),
                    extra: Vec::new(),
                });
            }
            summary.stochastic = Some(StochasticSummary {
                shots: cfg.shots,
                normalization: sn.total,
                at_pump: at,
                contrast,
            });
            Some(scaled_spectrum(s, sn.total))
        }
        None => None,
    };

    Ok(Outcome {
        spectrum: scaled_spectrum(spectrum, norm),
        scan,
        stochastic_spectrum,
        stochastic_scan,
        summary,
    })
}

/// Indices of the smallest and largest `I_total`, first occurrence.
fn extremes(points: &[PointValues]) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, p) in points.iter().enumerate() {
        if p.total < points[imin].total {
            imin = i;
        }
        if p.total > points[imax].total {
            imax = i;
        }
    }
    (imin, imax)
}

/// Grid used for a ratio-sweep point of bandwidth `b`.
pub fn sweep_grid(cfg: &ExperimentConfig, bandwidth: f64) -> Result<SpectralGrid> {
    SpectralGrid::new(cfg.source.pump_freq, 1.5 * bandwidth, cfg.grid.n_modes())
}

fn ratio_sweep(
    cfg: &ExperimentConfig,
    photons: &[f64],
    ratios: &[f64],
    provenance: RunProvenance,
) -> Result<Outcome> {
    let widths = cfg.source.pump_linewidth + cfg.detector.fwhm;
    let points: Vec<(f64, f64)> = ratios
        .iter()
        .flat_map(|&r| photons.iter().map(move |&n| (n, r)))
        .collect();
    let kind = match cfg.source.kind {
        SourceChoice::Coherent => {
            return Err(Error::Config {
                field: "source.kind".into(),
                line: None,
                reason: "ratio sweep needs a squeezed or uncorrelated source".into(),
            })
        }
        k => k,
    };
    let rows: Vec<(RatioRow, PointValues)> = points
        .par_iter()
        .map(|&(n, r)| {
            let b = r * widths;
            let source = SourceConfig {
                kind,
                bandwidth: b,
                photons: n,
                ..cfg.source.clone()
            };
            let bench = Bench::new(&source, sweep_grid(cfg, b)?, cfg.detector, None)?;
            let p = bench.at_pump(&bench.mask(MaskDescriptor::Zero)?)?;
            Ok((
                RatioRow {
                    photons: n,
                    bandwidth_ratio: r,
                    bandwidth_rad_per_fs: b,
                    ratio_engine: p.quantum / p.classical,
                    ratio_formula: qc_ratio_formula(
                        b,
                        cfg.source.pump_linewidth,
                        cfg.detector.fwhm,
                        n,
                    )?,
                },
                p,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let bench = Bench::new(&cfg.source, cfg.grid, cfg.detector, cfg.slm_pixels)?;
    let zero = bench.mask(MaskDescriptor::Zero)?;
    let reference = bench.at_pump(&zero)?;
    let spectrum = scaled_spectrum(
        bench.spectrum(&bench.mask(cfg.mask.clone())?)?,
        reference.total,
    );
    let scan = ScanResult {
        x: rows.iter().map(|(r, _)| r.photons).collect(),
        x_unit: "photons".into(),
        points: rows.iter().map(|(_, p)| p.scaled(1.0 / p.total)).collect(),
        extra: vec![
            (
                "bandwidth_ratio".into(),
                rows.iter().map(|(r, _)| r.bandwidth_ratio).collect(),
            ),
            (
                "ratio_engine".into(),
                rows.iter().map(|(r, _)| r.ratio_engine).collect(),
            ),
            (
                "ratio_formula".into(),
                rows.iter().map(|(r, _)| r.ratio_formula).collect(),
            ),
        ],
    };
    let summary = Summary {
        experiment: cfg.experiment.name(),
        normalization: reference.total,
        at_pump: AtPump {
            total: reference.total,
            quantum: reference.quantum,
            classical: reference.classical,
            qc_ratio: (reference.classical > 0.0).then(|| reference.quantum / reference.classical),
            qc_ratio_formula: qc_ratio_formula(
                cfg.source.bandwidth,
                cfg.source.pump_linewidth,
                cfg.detector.fwhm,
                cfg.source.photons,
            )
            .ok(),
        },
        tl_duration_fs: tl_pulse_duration(bench.grid(), bench.photons()).ok(),
        delay_fit: None,
        theta: None,
        ratios: Some(rows.into_iter().map(|(r, _)| r).collect()),
        stochastic: None,
        provenance,
    };
    Ok(Outcome {
        spectrum,
        scan: Some(scan),
        stochastic_spectrum: None,
        stochastic_scan: None,
        summary,
    })
}

fn write_file(
    path: &Path,
    comment: &str,
    body: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    let mut buf = comment.as_bytes().to_vec();
    body(&mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Runs the experiment and writes `spectrum.csv`, `scan.csv` (scans only),
/// the `_stochastic` variants when enabled, and `summary.json` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let outcome = execute(cfg)?;
    write_outcome(&outcome, out_dir)
}

pub fn write_outcome(outcome: &Outcome, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let comment = outcome.summary.provenance.csv_comment();
    let mut written = Vec::new();
    let mut emit = |name: &str, body: &dyn Fn(&mut Vec<u8>) -> Result<()>| -> Result<()> {
        let path = out_dir.join(name);
        write_file(&path, &comment, |b| body(b))?;
        written.push(path);
        Ok(())
    };
    emit("spectrum.csv", &|b| outcome.spectrum.write_csv(b))?;
    if let Some(scan) = &outcome.scan {
        emit("scan.csv", &|b| scan.write_csv(b))?;
    }
    if let Some(s) = &outcome.stochastic_spectrum {
        emit("spectrum_stochastic.csv", &|b| s.write_csv(b))?;
    }
    if let Some(scan) = &outcome.stochastic_scan {
        emit("scan_stochastic.csv", &|b| scan.write_csv(b))?;
    }
    let path = out_dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&outcome.summary)?;
    json.push('\n');
    std::fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}
