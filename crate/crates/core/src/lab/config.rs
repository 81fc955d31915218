//! Experiment configuration: a single JSON document with unit-suffixed keys.
//!
//! Wavelength-domain widths are converted at the wavelength they refer to:
//! pump and detector widths at the pump wavelength, source bandwidth and grid
//! span at the degenerate wavelength `2λp`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{DetectorResponse, PumpLine};
use crate::error::{Error, Result};
use crate::fields::DEFAULT_JITTER_MODES;
use crate::lineshape::LineshapeKind;
use crate::shaper::MaskDescriptor;
use crate::spectral::{
    angular_to_wavelength, fwhm_wavelength_to_angular, wavelength_to_angular, SpectralGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceChoice {
    Coherent,
    Squeezed,
    Uncorrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Flat,
    Gaussian,
}

/// Either an explicit list or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueList {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl ValueList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ValueList::List(v) => v.clone(),
            ValueList::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaChoice {
    Value(f64),
    Auto(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawExperiment {
    Spectrum,
    DelayScan {
        tau_fs: ValueList,
    },
    ThetaScan {
        alpha_rad: AlphaChoice,
        beta_fs: f64,
        theta_rad: ValueList,
    },
    RatioSweep {
        photons: ValueList,
        bandwidth_ratio: ValueList,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSource {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<SourceChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_wavelength_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_freq_rad_per_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_linewidth_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_linewidth_rad_per_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_lineshape: Option<LineshapeKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_rad_per_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photons: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeeze: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_jitter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter_modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_scaling: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_span_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_span_rad_per_fs: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDetector {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_rad_per_fs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lineshape: Option<LineshapeKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRun {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<RawExperiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stochastic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSlm {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixels: Option<usize>,
}

/// The document as written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<RawSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<RawGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slm: Option<RawSlm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector: Option<RawDetector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RawRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceConfig {
    pub kind: SourceChoice,
    pub pump_freq: f64,
    pub pump_linewidth: f64,
    pub pump_lineshape: LineshapeKind,
    pub profile: Profile,
    pub bandwidth: f64,
    /// Peak photon number per mode.
    pub photons: f64,
    pub envelope_jitter: f64,
    /// Number of cosine/sine modes in the envelope jitter.
    pub jitter_modes: usize,
    pub carrier_scaling: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    DelayScan {
        tau_fs: Vec<f64>,
    },
    ThetaScan {
        alpha: Option<f64>,
        beta_fs: f64,
        theta_rad: Vec<f64>,
    },
    RatioSweep {
        photons: Vec<f64>,
        bandwidth_ratio: Vec<f64>,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::DelayScan { .. } => "delay_scan",
            Experiment::ThetaScan { .. } => "theta_scan",
            Experiment::RatioSweep { .. } => "ratio_sweep",
        }
    }
}

/// Validated configuration, all quantities in rad/fs and fs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub source: SourceConfig,
    pub grid: SpectralGrid,
    pub mask: MaskDescriptor,
    /// SLM element count; every mask is pixelated when set.
    pub slm_pixels: Option<usize>,
    pub detector: DetectorResponse,
    pub experiment: Experiment,
    pub shots: u64,
    pub master_seed: u64,
    pub stochastic: bool,
    pub out_dir: Option<String>,
}

pub const DEFAULT_SHOTS: u64 = 2000;

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::ConfigSyntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_raw(&raw).map_err(|e| match e {
            Error::Config { field, reason, .. } => {
                let line = locate(text, &field);
                Error::Config {
                    field,
                    line,
                    reason,
                }
            }
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            field: "<file>".into(),
            line: None,
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let src = raw.source.as_ref().ok_or_else(|| missing("source"))?;
        let kind = src.kind.ok_or_else(|| missing("source.kind"))?;
        let pump_freq = match exclusive(
            "source.pump",
            ("pump_wavelength_nm", src.pump_wavelength_nm),
            ("pump_freq_rad_per_fs", src.pump_freq_rad_per_fs),
        )? {
            Unit::Nm(l) => {
                wavelength_to_angular(l).map_err(|e| cfg("source.pump_wavelength_nm", e))?
            }
            Unit::Rad(w) => positive("source.pump_freq_rad_per_fs", w)?,
            Unit::Missing => return Err(missing("source.pump_wavelength_nm")),
        };
        let pump_nm = angular_to_wavelength(pump_freq).map_err(|e| cfg("source.pump", e))?;
        let degenerate_nm = 2.0 * pump_nm;

        let pump_linewidth = match exclusive(
            "source.pump_linewidth",
            ("pump_linewidth_nm", src.pump_linewidth_nm),
            ("pump_linewidth_rad_per_fs", src.pump_linewidth_rad_per_fs),
        )? {
            Unit::Nm(v) => fwhm_wavelength_to_angular(pump_nm, v)
                .map_err(|e| cfg("source.pump_linewidth_nm", e))?,
            Unit::Rad(v) => non_negative("source.pump_linewidth_rad_per_fs", v)?,
            Unit::Missing => 0.0,
        };
        let bandwidth = match exclusive(
            "source.bandwidth",
            ("bandwidth_nm", src.bandwidth_nm),
            ("bandwidth_rad_per_fs", src.bandwidth_rad_per_fs),
        )? {
            Unit::Nm(v) => {
                positive("source.bandwidth_nm", v)?;
                fwhm_wavelength_to_angular(degenerate_nm, v)
                    .map_err(|e| cfg("source.bandwidth_nm", e))?
            }
            Unit::Rad(v) => positive("source.bandwidth_rad_per_fs", v)?,
            Unit::Missing => return Err(missing("source.bandwidth")),
        };
        let photons = match (src.photons, src.squeeze) {
            (Some(_), Some(_)) => {
                return Err(cfg_msg(
                    "source.photons",
                    "`photons` and `squeeze` are mutually exclusive",
                ))
            }
            (Some(n), None) => non_negative("source.photons", n)?,
            (None, Some(r)) => non_negative("source.squeeze", r)?.sinh().powi(2),
            (None, None) => return Err(missing("source.photons")),
        };
        let envelope_jitter =
            non_negative("source.envelope_jitter", src.envelope_jitter.unwrap_or(0.0))?;
        let jitter_modes = src.jitter_modes.unwrap_or(DEFAULT_JITTER_MODES);
        if jitter_modes == 0 {
            return Err(cfg_msg("source.jitter_modes", "must be at least 1"));
        }
        let source = SourceConfig {
            kind,
            pump_freq,
            pump_linewidth,
            pump_lineshape: src.pump_lineshape.unwrap_or(LineshapeKind::Lorentzian),
            profile: src.profile.unwrap_or(Profile::Flat),
            bandwidth,
            photons,
            envelope_jitter,
            jitter_modes,
            carrier_scaling: src.carrier_scaling.unwrap_or(false),
        };

        let g = raw.grid.as_ref().ok_or_else(|| missing("grid"))?;
        let n_modes = g.n_modes.ok_or_else(|| missing("grid.n_modes"))?;
        let half_span = match exclusive(
            "grid.half_span",
            ("half_span_nm", g.half_span_nm),
            ("half_span_rad_per_fs", g.half_span_rad_per_fs),
        )? {
            Unit::Nm(v) => fwhm_wavelength_to_angular(degenerate_nm, v)
                .map_err(|e| cfg("grid.half_span_nm", e))?,
            Unit::Rad(v) => v,
            Unit::Missing => 0.75 * bandwidth,
        };
        let grid = SpectralGrid::new(pump_freq, half_span, n_modes).map_err(|e| cfg("grid", e))?;

        let mask = raw.mask.clone().unwrap_or(MaskDescriptor::Zero);
        let base = crate::shaper::PhaseMask::from_descriptor(&grid, mask.clone())
            .map_err(|e| cfg("mask", e))?;
        let slm_pixels = raw.slm.as_ref().and_then(|s| s.pixels);
        if let Some(p) = slm_pixels {
            crate::shaper::pixelate_mask(&base, p).map_err(|e| cfg("slm.pixels", e))?;
        }

        let d = raw.detector.as_ref().ok_or_else(|| missing("detector"))?;
        let fwhm = match exclusive(
            "detector.fwhm",
            ("fwhm_nm", d.fwhm_nm),
            ("fwhm_rad_per_fs", d.fwhm_rad_per_fs),
        )? {
            Unit::Nm(v) => {
                fwhm_wavelength_to_angular(pump_nm, v).map_err(|e| cfg("detector.fwhm_nm", e))?
            }
            Unit::Rad(v) => non_negative("detector.fwhm_rad_per_fs", v)?,
            Unit::Missing => return Err(missing("detector.fwhm")),
        };
        let detector = DetectorResponse::new(fwhm, d.lineshape.unwrap_or(LineshapeKind::Gaussian))
            .map_err(|e| cfg("detector.fwhm", e))?;
        if fwhm > grid.output_span() {
            return Err(cfg_msg(
                "detector.fwhm",
                "wider than the sum-frequency window",
            ));
        }
        PumpLine::new(pump_freq, pump_linewidth, source.pump_lineshape)
            .map_err(|e| cfg("source.pump_linewidth", e))?;

        let run = raw.run.as_ref().ok_or_else(|| missing("run"))?;
        let experiment = match run
            .experiment
            .as_ref()
            .ok_or_else(|| missing("run.experiment"))?
        {
            RawExperiment::Spectrum => Experiment::Spectrum,
            RawExperiment::DelayScan { tau_fs } => Experiment::DelayScan {
                tau_fs: finite_list("run.experiment.tau_fs", tau_fs)?,
            },
            RawExperiment::ThetaScan {
                alpha_rad,
                beta_fs,
                theta_rad,
            } => Experiment::ThetaScan {
                alpha: match alpha_rad {
                    AlphaChoice::Value(a) => Some(finite("run.experiment.alpha_rad", *a)?),
                    AlphaChoice::Auto(_) => None,
                },
                beta_fs: finite("run.experiment.beta_fs", *beta_fs)?,
                theta_rad: finite_list("run.experiment.theta_rad", theta_rad)?,
            },
            RawExperiment::RatioSweep {
                photons,
                bandwidth_ratio,
            } => {
                let photons = finite_list("run.experiment.photons", photons)?;
                if photons.iter().any(|n| *n <= 0.0) {
                    return Err(cfg_msg(
                        "run.experiment.photons",
                        "photon numbers must be positive",
                    ));
                }
                let bandwidth_ratio =
                    finite_list("run.experiment.bandwidth_ratio", bandwidth_ratio)?;
                if bandwidth_ratio.iter().any(|r| *r <= 0.0) {
                    return Err(cfg_msg(
                        "run.experiment.bandwidth_ratio",
                        "ratios must be positive",
                    ));
                }
                if pump_linewidth + fwhm <= 0.0 {
                    return Err(cfg_msg(
                        "detector.fwhm",
                        "ratio sweep needs a nonzero pump linewidth or detector width",
                    ));
                }
                Experiment::RatioSweep {
                    photons,
                    bandwidth_ratio,
                }
            }
        };
        let shots = run.shots.unwrap_or(DEFAULT_SHOTS);
        if shots == 0 {
            return Err(cfg_msg("run.shots", "must be at least 1"));
        }
        Ok(Self {
            source,
            grid,
            mask,
            slm_pixels,
            detector,
            experiment,
            shots,
            master_seed: run.master_seed.unwrap_or(0),
            stochastic: run.stochastic.unwrap_or(false),
            out_dir: run.out_dir.clone(),
        })
    }

    /// Equivalent document using only native units; parsing it gives back `self`.
    pub fn to_raw(&self) -> RawConfig {
        let s = &self.source;
        let list = |v: &Vec<f64>| ValueList::List(v.clone());
        RawConfig {
            source: Some(RawSource {
                kind: Some(s.kind),
                pump_freq_rad_per_fs: Some(s.pump_freq),
                pump_linewidth_rad_per_fs: Some(s.pump_linewidth),
                pump_lineshape: Some(s.pump_lineshape),
                profile: Some(s.profile),
                bandwidth_rad_per_fs: Some(s.bandwidth),
                photons: Some(s.photons),
                envelope_jitter: Some(s.envelope_jitter),
                jitter_modes: Some(s.jitter_modes),
                carrier_scaling: Some(s.carrier_scaling),
                ..Default::default()
            }),
            grid: Some(RawGrid {
                n_modes: Some(self.grid.n_modes()),
                half_span_rad_per_fs: Some(self.grid.half_span()),
                half_span_nm: None,
            }),
            mask: Some(self.mask.clone()),
            slm: self.slm_pixels.map(|p| RawSlm { pixels: Some(p) }),
            detector: Some(RawDetector {
                fwhm_nm: None,
                fwhm_rad_per_fs: Some(self.detector.fwhm),
                lineshape: Some(self.detector.lineshape),
            }),
            run: Some(RawRun {
                experiment: Some(match &self.experiment {
                    Experiment::Spectrum => RawExperiment::Spectrum,
                    Experiment::DelayScan { tau_fs } => RawExperiment::DelayScan {
                        tau_fs: list(tau_fs),
                    },
                    Experiment::ThetaScan {
                        alpha,
                        beta_fs,
                        theta_rad,
                    } => RawExperiment::ThetaScan {
                        alpha_rad: alpha
                            .map_or(AlphaChoice::Auto(AutoKeyword::Auto), AlphaChoice::Value),
                        beta_fs: *beta_fs,
                        theta_rad: list(theta_rad),
                    },
                    Experiment::RatioSweep {
                        photons,
                        bandwidth_ratio,
                    } => RawExperiment::RatioSweep {
                        photons: list(photons),
                        bandwidth_ratio: list(bandwidth_ratio),
                    },
                }),
                shots: Some(self.shots),
                master_seed: Some(self.master_seed),
                stochastic: Some(self.stochastic),
                out_dir: self.out_dir.clone(),
            }),
        }
    }

    /// Normalized JSON (native units, all defaults explicit).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_raw())?)
    }

    pub fn pump_line(&self) -> PumpLine {
        PumpLine {
            freq: self.source.pump_freq,
            linewidth: self.source.pump_linewidth,
            lineshape: self.source.pump_lineshape,
        }
    }
}

enum Unit {
    Nm(f64),
    Rad(f64),
    Missing,
}

fn exclusive(field: &str, nm: (&str, Option<f64>), rad: (&str, Option<f64>)) -> Result<Unit> {
    match (nm.1, rad.1) {
        (Some(_), Some(_)) => Err(cfg_msg(
            field,
            &format!("`{}` and `{}` are mutually exclusive", nm.0, rad.0),
        )),
        (Some(v), None) => Ok(Unit::Nm(v)),
        (None, Some(v)) => Ok(Unit::Rad(v)),
        (None, None) => Ok(Unit::Missing),
    }
}

fn cfg_msg(field: &str, reason: &str) -> Error {
    Error::Config {
        field: field.to_string(),
        line: None,
        reason: reason.to_string(),
    }
}

fn cfg(field: &str, e: Error) -> Error {
    cfg_msg(field, &e.to_string())
}

fn missing(field: &str) -> Error {
    cfg_msg(field, "required but missing")
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_msg(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_msg(field, &format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_msg(field, &format!("must be >= 0, got {v}")))
    }
}

fn finite_list(field: &str, list: &ValueList) -> Result<Vec<f64>> {
    let v = list.values();
    if v.is_empty() {
        return Err(cfg_msg(field, "list must not be empty"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(cfg_msg(field, "values must be finite"));
    }
    Ok(v)
}

/// Best-effort line of `path` (dotted) in the document: the deepest key found
/// in order, so a missing leaf points at its enclosing block.
fn locate(text: &str, path: &str) -> Option<usize> {
    let mut from = 0;
    let mut found = None;
    for seg in path.split('.') {
        let quoted = format!("\"{seg}");
        match text[from..].find(&quoted) {
            Some(pos) => {
                from += pos + quoted.len();
                found = Some(from);
            }
            None => break,
        }
    }
    found.map(|pos| text[..pos].matches('\n').count() + 1)
}
