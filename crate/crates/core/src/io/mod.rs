//! Configuration, execution and serialization for the command-line tool.

mod config;
mod emit;
mod run;

pub use config::{
    parse_config, parse_config_for, preset_text, validate, ConfigError, ConfigErrors, ExperimentConfig, Mode, TrainPolicyKind, PRESETS,
};
pub use emit::{emit_plotdata, fmt_f64, render_csv, PlotData, SweepSlice};
pub use run::{run, Manifest, ManifestEntry, NoiseTestReport, OuCheck, RunError, RunOptions, RunSummary, OU_RMS_TOLERANCE};
