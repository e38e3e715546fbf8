//! Experiment configuration: a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#', blank lines are ignored
//! mode = simulate
//! gamma = 0.2
//! J = 15
//! W = 1000/T        # rates may be written per period
//! horizon = 100T    # durations may be written in periods
//! probe_times = 50T, 100T
//! ```
//!
//! A trailing `T` multiplies by the period, a trailing `/T` divides by it.
//! Lists are comma separated. Keys are case sensitive; unknown keys are
//! rejected. Every problem found is reported, not only the first.
//!
//! Time is measured in units of `1/ω`, so the reference model has `ω = 1`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::dynamics::FidelityConvention;
use crate::noise::{AmplitudeLaw, DEFAULT_MAX_GAMMA_DT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Simulate,
    Sweep,
    MarkovScan,
    Washout,
    NoiseTest,
    Crosscheck,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Simulate,
        Mode::Sweep,
        Mode::MarkovScan,
        Mode::Washout,
        Mode::NoiseTest,
        Mode::Crosscheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Sweep => "sweep",
            Mode::MarkovScan => "markov-scan",
            Mode::Washout => "washout",
            Mode::NoiseTest => "noise-test",
            Mode::Crosscheck => "crosscheck",
        }
    }

    /// Keys that must appear explicitly for this mode.
    fn required(self) -> &'static [&'static str] {
        match self {
            Mode::Simulate | Mode::Washout => &["J", "W"],
            _ => &[],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected one of {})", names(&Mode::ALL)))
    }
}

fn names(modes: &[Mode]) -> String {
    modes.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TrainPolicyKind {
    Shared,
    #[default]
    Fresh,
}

impl TrainPolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Shared => "shared",
            Self::Fresh => "fresh",
        }
    }
}

impl FromStr for TrainPolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shared" => Ok(Self::Shared),
            "fresh" => Ok(Self::Fresh),
            _ => Err(format!("unknown train policy `{s}` (expected shared or fresh)")),
        }
    }
}

/// Named parameter sets.
pub const PRESETS: [&str; 1] = ["flux-qubit"];

/// Commented config text for a preset, suitable as a starting file.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "flux-qubit" => Some(FLUX_QUBIT),
        _ => None,
    }
}

const FLUX_QUBIT: &str = "\
# Superconducting flux qubit, in units where omega = 1.
#
# The level spacing of such a qubit is omega ~ 1e9 - 1e10 Hz and its
# relaxation time T1 ~ 1 us. Taking T ~ 5 ns (read as nanoseconds) gives
# omega * T ~ 5, so one simulator time unit is 1/omega ~ 0.1 - 1 ns.
# The nanosecond reading of T is an assumption.
preset = flux-qubit
omega = 1.0
T = 5.0
g = 0.4
gamma = 0.2
";

fn apply_preset(name: &str, c: &mut ExperimentConfig) -> bool {
    match name {
        "flux-qubit" => {
            c.omega = 1.0;
            c.period = 5.0;
            c.g = 0.4;
            c.gamma = 0.2;
            true
        }
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub preset: Option<String>,
    pub omega: f64,
    pub g: f64,
    pub gamma: f64,
    /// `T`.
    pub period: f64,
    /// `J`.
    pub mean_amplitude: f64,
    /// `W`, per unit time.
    pub rate: f64,
    pub amplitude_law: AmplitudeLaw,
    pub dt: f64,
    pub horizon: f64,
    /// Output spacing, a multiple of `dt`.
    pub record_every: f64,
    pub n_traj: usize,
    pub n_trains: usize,
    pub master_seed: u64,
    pub train_policy: TrainPolicyKind,
    pub fidelity_convention: FidelityConvention,
    /// Also write the ensemble density matrix in simulate mode.
    pub density: bool,
    pub j_values: Vec<f64>,
    /// Per unit time.
    pub w_values: Vec<f64>,
    pub probe_times: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub t_probe: f64,
    pub n_paths: usize,
    pub ou_dt: f64,
    pub ou_horizon: f64,
    pub max_lag: f64,
    pub out_dir: String,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl ExperimentConfig {
    /// Defaults for the reference model (`ω = 1`, `T = 5`, `g = 0.4`, `γ = 0.2`).
    pub fn defaults(mode: Mode) -> Self {
        Self::defaults_for_period(mode, 5.0)
    }

    fn defaults_for_period(mode: Mode, period: f64) -> Self {
        Self {
            mode,
            preset: None,
            omega: 1.0,
            g: 0.4,
            gamma: 0.2,
            period,
            mean_amplitude: 0.0,
            rate: 0.0,
            amplitude_law: AmplitudeLaw::Exponential,
            dt: 1e-3,
            horizon: 100.0 * period,
            record_every: period,
            n_traj: 2000,
            n_trains: 32,
            master_seed: 1,
            train_policy: TrainPolicyKind::Fresh,
            fidelity_convention: FidelityConvention::QExponent,
            density: false,
            j_values: linspace(0.0, 20.0, 16),
            w_values: linspace(50.0 / period, 1200.0 / period, 16),
            probe_times: vec![50.0 * period, 100.0 * period],
            gamma_values: vec![0.2, 0.5, 1.0, 2.0, 5.0],
            t_probe: 50.0 * period,
            n_paths: 10_000,
            ou_dt: 0.01,
            ou_horizon: 500.0,
            max_lag: 25.0,
            out_dir: "out".into(),
        }
    }

    /// Writes every field back out; `parse_config` of the result returns an
    /// equal config.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mode", self.mode.to_string());
        if let Some(p) = &self.preset {
            kv("preset", p.clone());
        }
        kv("omega", num(self.omega));
        kv("g", num(self.g));
        kv("gamma", num(self.gamma));
        kv("T", num(self.period));
        kv("J", num(self.mean_amplitude));
        kv("W", num(self.rate));
        kv("amplitude_law", self.amplitude_law.to_string());
        kv("dt", num(self.dt));
        kv("horizon", num(self.horizon));
        kv("record_every", num(self.record_every));
        kv("n_traj", self.n_traj.to_string());
        kv("n_trains", self.n_trains.to_string());
        kv("master_seed", self.master_seed.to_string());
        kv("train_policy", self.train_policy.as_str().into());
        kv("fidelity_convention", self.fidelity_convention.to_string());
        kv("density", self.density.to_string());
        kv("J_values", list(&self.j_values));
        kv("W_values", list(&self.w_values));
        kv("probe_times", list(&self.probe_times));
        kv("gamma_values", list(&self.gamma_values));
        kv("t_probe", num(self.t_probe));
        kv("n_paths", self.n_paths.to_string());
        kv("ou_dt", num(self.ou_dt));
        kv("ou_horizon", num(self.ou_horizon));
        kv("max_lag", num(self.max_lag));
        kv("out_dir", self.out_dir.clone());
        s
    }

    /// Steps of `dt` per recorded sample.
    pub fn record_stride(&self) -> usize {
        (self.record_every / self.dt).round() as usize
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}{key}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{} configuration error(s):\n{}", .0.len(), .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl ConfigErrors {
    pub fn mentions(&self, key: &str) -> bool {
        self.0.iter().any(|e| e.key == key)
    }
}

const KEYS: [&str; 28] = [
    "mode",
    "preset",
    "omega",
    "g",
    "gamma",
    "T",
    "J",
    "W",
    "amplitude_law",
    "dt",
    "horizon",
    "record_every",
    "n_traj",
    "n_trains",
    "master_seed",
    "train_policy",
    "fidelity_convention",
    "density",
    "J_values",
    "W_values",
    "probe_times",
    "gamma_values",
    "t_probe",
    "n_paths",
    "ou_dt",
    "ou_horizon",
    "max_lag",
    "out_dir",
];

struct Raw {
    line: usize,
    value: String,
}

struct Parser {
    raw: BTreeMap<String, Raw>,
    errors: Vec<ConfigError>,
}

impl Parser {
    fn err(&mut self, key: &str, message: impl Into<String>) {
        let line = self.raw.get(key).map(|r| r.line);
        self.errors.push(ConfigError {
            key: key.into(),
            line,
            message: message.into(),
        });
    }

    fn get<V>(&mut self, key: &str, slot: &mut V, parse: impl Fn(&str) -> Result<V, String>) {
        let Some(raw) = self.raw.get(key) else { return };
        match parse(&raw.value) {
            Ok(v) => *slot = v,
            Err(m) => self.err(key, m),
        }
    }
}

fn parse_quantity(s: &str, period: f64) -> Result<f64, String> {
    let s = s.trim();
    let (body, factor) = if let Some(b) = s.strip_suffix("/T") {
        (b, 1.0 / period)
    } else if let Some(b) = s.strip_suffix('T') {
        (b, period)
    } else {
        (s, 1.0)
    };
    // a bare `T` is one period
    let body = if body.trim().is_empty() && factor == period { "1" } else { body };
    let x: f64 = body
        .trim()
        .parse()
        .map_err(|_| format!("expected a number (optionally suffixed T or /T), got `{s}`"))?;
    if !x.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    // keep plain numbers bit-exact
    Ok(if factor == 1.0 { x } else { x * factor })
}

fn parse_list(s: &str, period: f64) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|p| parse_quantity(p, period)).collect()
}

fn parse_int<V: FromStr>(s: &str) -> Result<V, String> {
    s.trim().parse().map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    parse_inner(text, None)
}

/// Like [`parse_config`] for a mode chosen elsewhere (the command line): the
/// document may omit `mode`, and must agree with `mode` if it sets it.
pub fn parse_config_for(text: &str, mode: Mode) -> Result<ExperimentConfig, ConfigErrors> {
    parse_inner(text, Some(mode))
}

fn parse_inner(text: &str, given: Option<Mode>) -> Result<ExperimentConfig, ConfigErrors> {
    let mut p = Parser {
        raw: BTreeMap::new(),
        errors: vec![],
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            p.errors.push(ConfigError {
                key: content.into(),
                line: Some(line_no),
                message: "expected `key = value`".into(),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            p.errors.push(ConfigError {
                key: k.into(),
                line: Some(line_no),
                message: "unknown key".into(),
            });
            continue;
        }
        if let Some(prev) = p.raw.get(k) {
            let msg = format!("duplicate key (first set on line {})", prev.line);
            p.errors.push(ConfigError {
                key: k.into(),
                line: Some(line_no),
                message: msg,
            });
            continue;
        }
        p.raw.insert(
            k.into(),
            Raw {
                line: line_no,
                value: v.into(),
            },
        );
    }

    let mut mode = given.unwrap_or(Mode::Simulate);
    if p.raw.contains_key("mode") {
        p.get("mode", &mut mode, |s| s.parse());
        if let Some(g) = given.filter(|&g| g != mode) {
            p.err("mode", format!("config says {mode} but {g} was requested"));
            mode = g;
        }
    } else if given.is_none() {
        p.err("mode", "required");
    }

    // the period is needed to read T-suffixed quantities, so it goes first
    let mut preset: Option<String> = None;
    p.get("preset", &mut preset, |s| Ok(Some(s.to_string())));
    let mut base = ExperimentConfig::defaults(mode);
    if let Some(name) = &preset {
        if !apply_preset(name, &mut base) {
            let msg = format!("unknown preset `{name}` (available: {})", PRESETS.join(", "));
            p.err("preset", msg);
        }
    }
    let mut period = base.period;
    p.get("T", &mut period, |s| parse_quantity(s, 1.0));
    let period_ok = period.is_finite() && period > 0.0;
    if !period_ok {
        p.err("T", "must be positive");
    }
    let per = if period_ok { period } else { 1.0 };
    let mut c = ExperimentConfig::defaults_for_period(mode, per);
    c.preset = preset.clone();
    if let Some(name) = &preset {
        apply_preset(name, &mut c);
    }
    c.period = period;

    let q = |s: &str| parse_quantity(s, per);
    let l = |s: &str| parse_list(s, per);
    p.get("omega", &mut c.omega, q);
    p.get("g", &mut c.g, q);
    p.get("gamma", &mut c.gamma, q);
    p.get("J", &mut c.mean_amplitude, q);
    p.get("W", &mut c.rate, q);
    p.get("amplitude_law", &mut c.amplitude_law, |s| s.parse().map_err(|e| format!("{e}")));
    p.get("dt", &mut c.dt, q);
    p.get("horizon", &mut c.horizon, q);
    p.get("record_every", &mut c.record_every, q);
    p.get("n_traj", &mut c.n_traj, parse_int);
    p.get("n_trains", &mut c.n_trains, parse_int);
    p.get("master_seed", &mut c.master_seed, parse_int);
    p.get("train_policy", &mut c.train_policy, |s| s.parse());
    p.get("fidelity_convention", &mut c.fidelity_convention, |s| s.parse().map_err(|e| format!("{e}")));
    p.get("density", &mut c.density, parse_bool);
    p.get("J_values", &mut c.j_values, l);
    p.get("W_values", &mut c.w_values, l);
    p.get("probe_times", &mut c.probe_times, l);
    p.get("gamma_values", &mut c.gamma_values, l);
    p.get("t_probe", &mut c.t_probe, q);
    p.get("n_paths", &mut c.n_paths, parse_int);
    p.get("ou_dt", &mut c.ou_dt, q);
    p.get("ou_horizon", &mut c.ou_horizon, q);
    p.get("max_lag", &mut c.max_lag, q);
    p.get("out_dir", &mut c.out_dir, |s| Ok(s.to_string()));

    for &key in mode.required() {
        if !p.raw.contains_key(key) {
            p.err(key, format!("required for mode {mode}"));
        }
    }
    validate_into(&c, &mut p);

    if p.errors.is_empty() {
        Ok(c)
    } else {
        // stable order: by line, then key
        p.errors.sort_by(|a, b| a.line.cmp(&b.line).then(a.key.cmp(&b.key)));
        Err(ConfigErrors(p.errors))
    }
}

/// Checks the module-level invariants of an already-built config.
pub fn validate(c: &ExperimentConfig) -> Result<(), ConfigErrors> {
    let mut p = Parser {
        raw: BTreeMap::new(),
        errors: vec![],
    };
    validate_into(c, &mut p);
    if p.errors.is_empty() {
        Ok(())
    } else {
        Err(ConfigErrors(p.errors))
    }
}

fn is_multiple(x: f64, step: f64) -> bool {
    let k = (x / step).round();
    k >= 1.0 && (k * step - x).abs() <= 1e-9 * x.abs().max(step)
}

fn validate_into(c: &ExperimentConfig, p: &mut Parser) {
    let mut rule = |ok: bool, key: &str, msg: &str| {
        if !ok {
            p.err(key, msg.to_string());
        }
    };
    rule(c.omega > 0.0, "omega", "must be positive");
    rule(c.g >= 0.0, "g", "must be non-negative");
    rule(c.gamma > 0.0, "gamma", "must be positive");
    rule(c.mean_amplitude >= 0.0, "J", "must be non-negative (J >= 0)");
    rule(c.rate >= 0.0, "W", "must be non-negative (W >= 0)");
    if let AmplitudeLaw::Gamma { shape } = c.amplitude_law {
        rule(shape > 0.0 && shape.is_finite(), "amplitude_law", "gamma shape must be positive");
    }

    let dt_ok = c.dt > 0.0 && c.dt.is_finite();
    rule(dt_ok, "dt", "must be positive");
    if dt_ok && c.omega > 0.0 && c.gamma > 0.0 {
        let max_dt = (0.01 / c.omega).min(0.1 / c.gamma);
        rule(
            c.dt <= max_dt * (1.0 + 1e-12),
            "dt",
            &format!("must not exceed min(0.01/omega, 0.1/gamma) = {max_dt}"),
        );
    }
    if dt_ok {
        let needs_horizon = matches!(c.mode, Mode::Simulate | Mode::Washout | Mode::Crosscheck | Mode::NoiseTest);
        if needs_horizon {
            rule(is_multiple(c.horizon, c.dt), "horizon", "must be a positive multiple of dt");
        }
        if matches!(c.mode, Mode::Simulate | Mode::Washout | Mode::Crosscheck) {
            let ok = is_multiple(c.record_every, c.dt)
                && c.horizon > 0.0
                && is_multiple(c.horizon, c.record_every);
            rule(ok, "record_every", "must be a multiple of dt that divides horizon");
        }
        if c.mode == Mode::Sweep {
            rule(
                c.probe_times.iter().all(|&t| is_multiple(t, c.dt)),
                "probe_times",
                "each probe time must be a positive multiple of dt",
            );
        }
        if c.mode == Mode::MarkovScan {
            rule(is_multiple(c.t_probe, c.dt), "t_probe", "must be a positive multiple of dt");
            for &gamma in &c.gamma_values {
                if gamma > 0.0 && c.dt > 0.1 / gamma {
                    rule(false, "gamma_values", &format!("gamma = {gamma} needs dt <= {}", 0.1 / gamma));
                    break;
                }
            }
        }
    }
    rule(c.n_trains >= 1, "n_trains", "must be at least 1");
    rule(c.n_traj >= 1, "n_traj", "must be at least 1");

    let increasing = |xs: &[f64]| !xs.is_empty() && xs.windows(2).all(|w| w[1] > w[0]);
    match c.mode {
        Mode::Sweep => {
            rule(increasing(&c.j_values), "J_values", "must be non-empty and strictly increasing");
            rule(c.j_values.iter().all(|&j| j >= 0.0), "J_values", "must be non-negative");
            rule(increasing(&c.w_values), "W_values", "must be non-empty and strictly increasing");
            rule(c.w_values.iter().all(|&w| w >= 0.0), "W_values", "must be non-negative");
            rule(increasing(&c.probe_times), "probe_times", "must be non-empty and strictly increasing");
        }
        Mode::MarkovScan => {
            rule(increasing(&c.gamma_values), "gamma_values", "must be non-empty and strictly increasing");
            rule(c.gamma_values.iter().all(|&g| g > 0.0), "gamma_values", "must be positive");
        }
        Mode::NoiseTest => {
            rule(c.n_trains >= 100, "n_trains", "noise-test needs at least 100 trains");
            rule(c.n_paths >= 2, "n_paths", "must be at least 2");
            let ou_ok = c.ou_dt > 0.0 && c.ou_dt * c.gamma <= DEFAULT_MAX_GAMMA_DT;
            rule(ou_ok, "ou_dt", &format!("must satisfy 0 < ou_dt * gamma <= {DEFAULT_MAX_GAMMA_DT}"));
            rule(c.max_lag > 0.0, "max_lag", "must be positive");
            rule(c.ou_horizon > c.max_lag, "ou_horizon", "must exceed max_lag");
        }
        _ => {}
    }
    rule(!c.out_dir.trim().is_empty(), "out_dir", "must not be empty");
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "mode = simulate\ngamma = 0.2\nJ = 15\nW = 200\nT = 5\ng = 0.4\n";

    #[test]
    fn minimal_simulate_config_fills_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.mode, Mode::Simulate);
        assert_eq!(c.mean_amplitude, 15.0);
        assert_eq!(c.rate, 200.0);
        assert_eq!(c.dt, 1e-3);
        assert_eq!(c.horizon, 500.0);
        assert_eq!(c.fidelity_convention, FidelityConvention::QExponent);
        assert_eq!(c.train_policy, TrainPolicyKind::Fresh);
        assert_eq!(parse_config(&c.to_config_text()).unwrap(), c);
    }

    #[test]
    fn negative_rate_is_named() {
        let err = parse_config("mode = simulate\nJ = 1\nW = -1\n").unwrap_err();
        assert!(err.mentions("W"));
        let text = err.to_string();
        assert!(text.contains("W") && text.contains("non-negative"), "{text}");
    }

    #[test]
    fn all_errors_are_collected() {
        let err = parse_config("mode = simulate\nJ = -2\nW = x\nbogus = 1\ndt = 0.5\n").unwrap_err();
        for key in ["J", "W", "bogus", "dt"] {
            assert!(err.mentions(key), "missing {key} in {err}");
        }
    }

    #[test]
    fn missing_required_keys() {
        let err = parse_config("mode = washout\n").unwrap_err();
        assert!(err.mentions("J") && err.mentions("W"));
        assert!(parse_config("J = 1\n").unwrap_err().mentions("mode"));
    }

    #[test]
    fn mode_from_caller() {
        let c = parse_config_for("J = 1\nW = 2\n", Mode::Washout).unwrap();
        assert_eq!(c.mode, Mode::Washout);
        let err = parse_config_for("mode = sweep\n", Mode::Washout).unwrap_err();
        assert!(err.mentions("mode"));
    }

    #[test]
    fn period_suffixes() {
        let c = parse_config("mode = simulate\nT = 4\nJ = 15\nW = 1000/T\nhorizon = 10T\nrecord_every = 0.5T\n").unwrap();
        assert_eq!(c.rate, 250.0);
        assert_eq!(c.horizon, 40.0);
        assert_eq!(c.record_every, 2.0);
        assert_eq!(c.t_probe, 200.0);
    }

    #[test]
    fn flux_qubit_preset() {
        let text = preset_text("flux-qubit").unwrap();
        assert!(text.contains("1e9") && text.contains("T1"));
        let c = parse_config(&format!("mode = crosscheck\n{text}")).unwrap();
        assert_eq!((c.omega, c.period, c.g, c.gamma), (1.0, 5.0, 0.4, 0.2));
        assert_eq!(c.preset.as_deref(), Some("flux-qubit"));
        let c2 = parse_config("mode = crosscheck\npreset = flux-qubit\ngamma = 0.5\n").unwrap();
        assert_eq!(c2.gamma, 0.5);
        assert_eq!(parse_config(&c2.to_config_text()).unwrap(), c2);
        assert!(parse_config("mode = crosscheck\npreset = nope\n").unwrap_err().mentions("preset"));
    }

    #[test]
    fn comments_and_duplicates() {
        let c = parse_config("# hi\nmode = simulate # trailing\n\nJ = 1\nW = 2\n").unwrap();
        assert_eq!(c.rate, 2.0);
        let err = parse_config("mode = simulate\nJ = 1\nJ = 2\nW = 1\n").unwrap_err();
        assert_eq!(err.0[0].line, Some(3));
    }

    #[test]
    fn mode_specific_checks() {
        let err = parse_config("mode = sweep\nJ_values = 3, 1\nprobe_times = 0.0005\n").unwrap_err();
        assert!(err.mentions("J_values") && err.mentions("probe_times"));
        let err = parse_config("mode = noise-test\nn_trains = 10\nou_dt = 1\n").unwrap_err();
        assert!(err.mentions("n_trains") && err.mentions("ou_dt"));
        let err = parse_config("mode = markov-scan\ngamma_values = 0.2, 200\n").unwrap_err();
        assert!(err.mentions("gamma_values"));
    }
}
