//! Config-driven experiment runner behind the `sqzlab` binary.

mod config;
mod fit;
mod run;

pub use config::{
    AlphaChoice, Experiment, ExperimentConfig, Profile, RawConfig, SourceChoice, SourceConfig,
    ValueList, DEFAULT_SHOTS,
};
pub use fit::{fit_fwhm, tl_pulse_duration, FwhmFit};
pub use run::{
    execute, run_experiment, sweep_grid, write_outcome, Bench, Outcome, PointValues, RatioRow,
    RunProvenance, ScanFit, ScanResult, Summary, ThetaSummary, VERSION,
};
