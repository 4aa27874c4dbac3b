//! Run configuration: a flat key-value text file with dotted section keys.
//!
//! The format is deliberately minimal so figure recipes can live in docs
//! and diff cleanly: one `section.key = value` pair per line, `#` starts a
//! full-line comment, lists are comma-separated, and a phase grid can be
//! given either as an explicit list or as `grid:N` (N points uniform over
//! one period). Unknown or duplicated keys are rejected rather than
//! ignored, and `parse(serialize(config))` reproduces the configuration
//! exactly.

use crate::error::{Error, Result};
use crate::interface::{DetectorSpec, FilterConvention, FilterSpec};
use crate::optimizer::OptimizationBounds;
use crate::qkd::ProtocolParams;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

/// Output serialization format for datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Comma-separated values with a header row.
    Csv,
    /// JSON arrays of records.
    Json,
}

impl OutputFormat {
    /// Lowercase name used in config files and flags.
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// Parses a format name (case-insensitive).
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown output format '{other}' (expected 'csv' or 'json')"
            ))),
        }
    }

    /// File extension without the dot.
    pub fn extension(self) -> &'static str {
        self.name()
    }
}

/// Interferometer phase values for a scan: an explicit list or a uniform
/// grid of `N` points covering `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseList {
    /// `N` points `k·2π/N`, `k = 0..N`.
    Grid(usize),
    /// Explicit phase values in radians.
    Explicit(Vec<f64>),
}

impl PhaseList {
    /// Materializes the phase values.
    pub fn points(&self) -> Vec<f64> {
        match self {
            PhaseList::Grid(n) => (0..*n).map(|k| k as f64 * TAU / *n as f64).collect(),
            PhaseList::Explicit(values) => values.clone(),
        }
    }

    /// Number of phase values.
    pub fn len(&self) -> usize {
        match self {
            PhaseList::Grid(n) => *n,
            PhaseList::Explicit(values) => values.len(),
        }
    }

    /// True when the list holds no phases.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn parse(value: &str) -> Result<Self> {
        if let Some(n) = value.strip_prefix("grid:") {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid phase grid size '{n}'")))?;
            Ok(PhaseList::Grid(n))
        } else {
            Ok(PhaseList::Explicit(parse_f64_list(value)?))
        }
    }

    fn serialize(&self) -> String {
        match self {
            PhaseList::Grid(n) => format!("grid:{n}"),
            PhaseList::Explicit(values) => join_f64_list(values),
        }
    }
}

/// Detector section.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Detection efficiency `ε`.
    pub epsilon: f64,
    /// Dark count rate `γ` in Hz.
    pub gamma_hz: f64,
    /// Gate width `δt` in seconds.
    pub gate_s: f64,
    /// Pulse period `T` in seconds.
    pub period_s: f64,
}

/// Spectral filter section.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    /// Carrier reflection coefficient `r`.
    pub r: f64,
    /// Sideband suppression coefficient `ϱ`.
    pub rho: f64,
    /// Apply the coefficients as amplitude square roots instead of
    /// verbatim multipliers.
    pub physical: bool,
}

/// Interference scan section.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    /// Carrier amplitude for phase scans.
    pub alpha0: f64,
    /// Modulation depth for phase scans.
    pub beta: f64,
    /// Interferometer phases for `phase-scan`.
    pub delta_phi: PhaseList,
    /// Modulation depths for `visibility`.
    pub betas: Vec<f64>,
    /// Channel losses in dB for `keyrate`/`optimize`.
    pub losses_db: Vec<f64>,
    /// Restrict the click model to sideband orders `|m| ≤` this value.
    pub max_click_order: Option<u32>,
}

/// Key-rate protocol section.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    /// Carrier amplitude `α₀`.
    pub alpha0: f64,
    /// Modulation depth `β`.
    pub beta: f64,
    /// Error-correction inefficiency `f`.
    pub f_ec: f64,
}

/// Tomography section.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyConfig {
    /// Carrier amplitude `α₀`.
    pub alpha0: f64,
    /// Modulation depth `β`.
    pub beta: f64,
    /// Acquisition time per projector in seconds.
    pub duration_s: f64,
    /// RNG seed for the Poisson sampling.
    pub seed: u64,
    /// Residual V-rail phase offset in radians (0 = calibrated).
    pub v_phase_offset_rad: f64,
    /// Use expected counts and a noiseless detector instead of sampling.
    pub ideal: bool,
}

/// Optimizer section.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Upper `α₀` bound.
    pub alpha0_max: f64,
    /// Upper `β` bound.
    pub beta_max: f64,
    /// Coarse grid points per axis.
    pub grid: usize,
    /// Seed each loss with the previous optimum.
    pub warm_start: bool,
}

/// Output section.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Directory datasets are written into (created if missing).
    pub dir: PathBuf,
    /// Dataset format.
    pub format: OutputFormat,
}

/// Complete run configuration with defaults for every key.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub detector: DetectorConfig,
    pub filter: FilterConfig,
    pub scan: ScanConfig,
    pub protocol: ProtocolConfig,
    pub tomography: TomographyConfig,
    pub optimizer: OptimizerConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            detector: DetectorConfig {
                epsilon: 0.1,
                gamma_hz: 100.0,
                gate_s: 3.3e-9,
                period_s: 1e-8,
            },
            filter: FilterConfig {
                r: 0.99,
                rho: 1e-4,
                physical: false,
            },
            scan: ScanConfig {
                alpha0: 0.08,
                beta: 0.15,
                delta_phi: PhaseList::Grid(720),
                betas: (1..=40).map(|k| k as f64 * 0.05).collect(),
                losses_db: (0..=12).map(|k| k as f64 * 5.0).collect(),
                max_click_order: None,
            },
            protocol: ProtocolConfig {
                alpha0: 0.8,
                beta: 0.65,
                f_ec: 1.25,
            },
            tomography: TomographyConfig {
                alpha0: 0.15,
                beta: 0.15,
                duration_s: 10.0,
                seed: 7,
                v_phase_offset_rad: 0.0,
                ideal: false,
            },
            optimizer: OptimizerConfig {
                alpha0_max: 2.0,
                beta_max: 1.5,
                grid: 32,
                warm_start: true,
            },
            output: OutputConfig {
                dir: PathBuf::from("out"),
                format: OutputFormat::Csv,
            },
        }
    }
}

impl RunConfig {
    /// Parses a config file, starting from defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text)
    }

    /// Parses config text, starting from defaults. Unknown and repeated
    /// keys are errors.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "line {}: key '{key}' given more than once",
                    lineno + 1
                )));
            }
            config
                .set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "detector.epsilon" => self.detector.epsilon = parse_f64(key, value)?,
            "detector.gamma_hz" => self.detector.gamma_hz = parse_f64(key, value)?,
            "detector.gate_s" => self.detector.gate_s = parse_f64(key, value)?,
            "detector.period_s" => self.detector.period_s = parse_f64(key, value)?,
            "filter.r" => self.filter.r = parse_f64(key, value)?,
            "filter.rho" => self.filter.rho = parse_f64(key, value)?,
            "filter.physical" => self.filter.physical = parse_bool(key, value)?,
            "scan.alpha0" => self.scan.alpha0 = parse_f64(key, value)?,
            "scan.beta" => self.scan.beta = parse_f64(key, value)?,
            "scan.delta_phi" => self.scan.delta_phi = PhaseList::parse(value)?,
            "scan.betas" => self.scan.betas = parse_f64_list(value)?,
            "scan.losses_db" => self.scan.losses_db = parse_f64_list(value)?,
            "scan.max_click_order" => {
                self.scan.max_click_order = if value.eq_ignore_ascii_case("none") {
                    None
                } else {
                    Some(value.parse().map_err(|_| {
                        Error::Config(format!("{key}: invalid order '{value}'"))
                    })?)
                }
            }
            "protocol.alpha0" => self.protocol.alpha0 = parse_f64(key, value)?,
            "protocol.beta" => self.protocol.beta = parse_f64(key, value)?,
            "protocol.f_ec" => self.protocol.f_ec = parse_f64(key, value)?,
            "tomography.alpha0" => self.tomography.alpha0 = parse_f64(key, value)?,
            "tomography.beta" => self.tomography.beta = parse_f64(key, value)?,
            "tomography.duration_s" => self.tomography.duration_s = parse_f64(key, value)?,
            "tomography.seed" => {
                self.tomography.seed = value.parse().map_err(|_| {
                    Error::Config(format!("{key}: invalid seed '{value}'"))
                })?
            }
            "tomography.v_phase_offset_rad" => {
                self.tomography.v_phase_offset_rad = parse_f64(key, value)?
            }
            "tomography.ideal" => self.tomography.ideal = parse_bool(key, value)?,
            "optimizer.alpha0_max" => self.optimizer.alpha0_max = parse_f64(key, value)?,
            "optimizer.beta_max" => self.optimizer.beta_max = parse_f64(key, value)?,
            "optimizer.grid" => {
                self.optimizer.grid = value.parse().map_err(|_| {
                    Error::Config(format!("{key}: invalid grid size '{value}'"))
                })?
            }
            "optimizer.warm_start" => self.optimizer.warm_start = parse_bool(key, value)?,
            "output.dir" => self.output.dir = PathBuf::from(value),
            "output.format" => self.output.format = OutputFormat::parse(value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Serializes every key in a stable order; parsing the result yields
    /// an identical configuration.
    pub fn to_config_string(&self) -> String {
        let d = &self.detector;
        let f = &self.filter;
        let s = &self.scan;
        let p = &self.protocol;
        let t = &self.tomography;
        let o = &self.optimizer;
        let out = &self.output;
        let max_order = match s.max_click_order {
            Some(m) => m.to_string(),
            None => "none".into(),
        };
        format!(
            "# Subcarrier-wave to dual-rail simulation parameters\n\
             detector.epsilon = {}\n\
             detector.gamma_hz = {}\n\
             detector.gate_s = {}\n\
             detector.period_s = {}\n\
             filter.r = {}\n\
             filter.rho = {}\n\
             filter.physical = {}\n\
             scan.alpha0 = {}\n\
             scan.beta = {}\n\
             scan.delta_phi = {}\n\
             scan.betas = {}\n\
             scan.losses_db = {}\n\
             scan.max_click_order = {}\n\
             protocol.alpha0 = {}\n\
             protocol.beta = {}\n\
             protocol.f_ec = {}\n\
             tomography.alpha0 = {}\n\
             tomography.beta = {}\n\
             tomography.duration_s = {}\n\
             tomography.seed = {}\n\
             tomography.v_phase_offset_rad = {}\n\
             tomography.ideal = {}\n\
             optimizer.alpha0_max = {}\n\
             optimizer.beta_max = {}\n\
             optimizer.grid = {}\n\
             optimizer.warm_start = {}\n\
             output.dir = {}\n\
             output.format = {}\n",
            d.epsilon,
            d.gamma_hz,
            d.gate_s,
            d.period_s,
            f.r,
            f.rho,
            f.physical,
            s.alpha0,
            s.beta,
            s.delta_phi.serialize(),
            join_f64_list(&s.betas),
            join_f64_list(&s.losses_db),
            max_order,
            p.alpha0,
            p.beta,
            p.f_ec,
            t.alpha0,
            t.beta,
            t.duration_s,
            t.seed,
            t.v_phase_offset_rad,
            t.ideal,
            o.alpha0_max,
            o.beta_max,
            o.grid,
            o.warm_start,
            self_display_path(&out.dir),
            out.format.name(),
        )
    }

    /// Checks every section against the model-level invariants.
    pub fn validate(&self) -> Result<()> {
        self.detector_spec()?;
        self.filter_spec()?;
        if !self.scan.alpha0.is_finite() || self.scan.alpha0 <= 0.0 {
            return Err(Error::Config(format!(
                "scan.alpha0 = {} must be positive",
                self.scan.alpha0
            )));
        }
        if !self.scan.beta.is_finite() || self.scan.beta <= 0.0 {
            return Err(Error::Config(format!(
                "scan.beta = {} must be positive",
                self.scan.beta
            )));
        }
        if self.scan.delta_phi.is_empty() {
            return Err(Error::Config("scan.delta_phi must not be empty".into()));
        }
        if self.scan.betas.is_empty() {
            return Err(Error::Config("scan.betas must not be empty".into()));
        }
        if self.scan.losses_db.is_empty() {
            return Err(Error::Config("scan.losses_db must not be empty".into()));
        }
        if self.scan.losses_db.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(Error::Config(
                "scan.losses_db values must be finite and >= 0 dB".into(),
            ));
        }
        self.protocol_params().map_err(config_err)?;
        if !self.tomography.duration_s.is_finite() || self.tomography.duration_s <= 0.0 {
            return Err(Error::Config(format!(
                "tomography.duration_s = {} must be positive",
                self.tomography.duration_s
            )));
        }
        if !self.tomography.alpha0.is_finite() || self.tomography.alpha0 <= 0.0 {
            return Err(Error::Config(format!(
                "tomography.alpha0 = {} must be positive",
                self.tomography.alpha0
            )));
        }
        if !self.tomography.beta.is_finite() || self.tomography.beta <= 0.0 {
            return Err(Error::Config(format!(
                "tomography.beta = {} must be positive",
                self.tomography.beta
            )));
        }
        if !self.tomography.v_phase_offset_rad.is_finite() {
            return Err(Error::Config(
                "tomography.v_phase_offset_rad must be finite".into(),
            ));
        }
        self.optimization_bounds().validate().map_err(config_err)?;
        Ok(())
    }

    /// Detector model from the config.
    pub fn detector_spec(&self) -> Result<DetectorSpec> {
        let d = &self.detector;
        DetectorSpec::new(d.epsilon, d.gamma_hz, d.gate_s, d.period_s).map_err(config_err)
    }

    /// Filter model from the config, honoring the `physical` flag.
    pub fn filter_spec(&self) -> Result<FilterSpec> {
        let convention = if self.filter.physical {
            FilterConvention::PhysicalSqrt
        } else {
            FilterConvention::AsWritten
        };
        FilterSpec::new(self.filter.r, self.filter.rho)
            .map(|f| f.with_convention(convention))
            .map_err(config_err)
    }

    /// Key-rate protocol parameters from the config.
    pub fn protocol_params(&self) -> Result<ProtocolParams> {
        ProtocolParams::new(
            self.protocol.alpha0,
            self.protocol.beta,
            self.filter_spec()?,
            self.detector_spec()?,
            self.protocol.f_ec,
        )
    }

    /// Optimizer search box from the config.
    pub fn optimization_bounds(&self) -> OptimizationBounds {
        OptimizationBounds {
            alpha0_low: 0.0,
            alpha0_high: self.optimizer.alpha0_max,
            beta_low: 0.0,
            beta_high: self.optimizer.beta_max,
            coarse_grid: self.optimizer.grid,
        }
    }
}

fn self_display_path(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: invalid number '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config(format!(
            "{key}: invalid boolean '{other}' (expected true or false)"
        ))),
    }
}

fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| Error::Config(format!("invalid number '{}' in list", item.trim())))
        })
        .collect()
}

fn join_f64_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
