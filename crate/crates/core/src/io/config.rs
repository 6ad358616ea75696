use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::model::{Kernel, ModelParams};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DLOGISTIC_OUT_DIR";
const FALLBACK_OUT_DIR: &str = "dlogistic-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    /// Equilibrium and existence thresholds.
    Equilibrium,
    /// C, S and their derivatives on a frequency grid.
    Transforms,
    /// Hopf curve in the (r, tau_m) plane, or crossings at a fixed r.
    Hopf,
    /// Stability verdicts on an (r, tau_m) grid.
    Region,
    /// Stability verdict at one (r, tau_m).
    Classify,
    /// Time series at one (r, tau_m).
    Simulate,
    /// Attractor envelope over a range of tau_m.
    Bifurcation,
    /// Post-transient (n, feedback) pairs.
    Phase,
    /// All datasets for one preset figure.
    ReproduceFigure,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Equilibrium => "equilibrium",
            CommandName::Transforms => "transforms",
            CommandName::Hopf => "hopf",
            CommandName::Region => "region",
            CommandName::Classify => "classify",
            CommandName::Simulate => "simulate",
            CommandName::Bifurcation => "bifurcation",
            CommandName::Phase => "phase",
            CommandName::ReproduceFigure => "reproduce-figure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            FigureId::Fig3 => 3,
            FigureId::Fig4 => 4,
            FigureId::Fig5 => 5,
            FigureId::Fig6 => 6,
            FigureId::Fig7 => 7,
        };
        write!(f, "fig{n}")
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.to_string() == s.trim())
            .ok_or_else(|| format!("unknown figure `{s}`, expected one of fig3..fig7"))
    }
}

impl TryFrom<String> for FigureId {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<FigureId> for String {
    fn from(id: FigureId) -> String {
        id.to_string()
    }
}

/// Command-line flags; every flag except `--config` is also a config key.
#[derive(Debug, Parser)]
#[command(name = "dlogistic", version, about = "Stability and simulation of the delayed logistic model with inflow")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Command to run; may also be given as `command` in the config file.
    #[arg(value_enum)]
    command: Option<CommandName>,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    values: FileConfig,
}

/// Raw settings, as read from a config file or flags.
#[derive(Debug, Clone, Default, PartialEq, clap::Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    /// Carrying capacity.
    #[arg(long = "K")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Constant inflow.
    #[arg(long = "D")]
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Growth rate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Mean delay.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// `dirac`, `uniform:sigma=<x>` or `gamma:p=<n>`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Grid size for sweeps, regions and transform tables.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Absolute integration step.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Integration step as a fraction of tau_m (sweeps).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_fraction: Option<f64>,
    /// Constant initial history n0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub history: Option<f64>,
    /// Sweep horizon in units of tau_m.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Keep every n-th integration step in trajectory output.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
    /// fig3 .. fig7.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureId>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl FileConfig {
    /// Fields set in `over` replace those in `self`.
    fn overlay(self, over: FileConfig) -> FileConfig {
        FileConfig {
            command: over.command.or(self.command),
            k: over.k.or(self.k),
            d: over.d.or(self.d),
            r: over.r.or(self.r),
            tau: over.tau.or(self.tau),
            kernel: over.kernel.or(self.kernel),
            tau_min: over.tau_min.or(self.tau_min),
            tau_max: over.tau_max.or(self.tau_max),
            r_min: over.r_min.or(self.r_min),
            r_max: over.r_max.or(self.r_max),
            points: over.points.or(self.points),
            omega_max: over.omega_max.or(self.omega_max),
            t_end: over.t_end.or(self.t_end),
            step: over.step.or(self.step),
            step_fraction: over.step_fraction.or(self.step_fraction),
            history: over.history.or(self.history),
            horizon: over.horizon.or(self.horizon),
            stride: over.stride.or(self.stride),
            figure: over.figure.or(self.figure),
            out: over.out.or(self.out),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat table of scalars serializes")
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub k: f64,
    pub d: f64,
    pub r: Option<f64>,
    pub tau: Option<f64>,
    pub kernel: Kernel,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points: Option<usize>,
    pub omega_max: Option<f64>,
    pub t_end: Option<f64>,
    pub step: Option<f64>,
    pub step_fraction: Option<f64>,
    pub history: Option<f64>,
    pub horizon: Option<f64>,
    pub stride: Option<usize>,
    pub figure: Option<FigureId>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: CommandName::Equilibrium,
            k: 5.0,
            d: 3.0,
            r: Some(2.0),
            tau: None,
            kernel: Kernel::Uniform { sigma: 1.0 },
            tau_min: None,
            tau_max: None,
            r_min: None,
            r_max: None,
            points: None,
            omega_max: None,
            t_end: None,
            step: None,
            step_fraction: None,
            history: None,
            horizon: None,
            stride: None,
            figure: None,
            out: None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(config_err(format!("`{name}` must be finite and > 0, got {x}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    fn from_file_config(fc: FileConfig) -> Result<Self, CliError> {
        let defaults = RunConfig::default();
        let command = fc
            .command
            .ok_or_else(|| config_err("missing `command` (give it as the first argument or in the config file)"))?;
        let kernel = match fc.kernel.as_deref() {
            Some(spec) => parse_kernel_spec(spec).map_err(|e| config_err(format!("`kernel`: {e}")))?,
            None => defaults.kernel,
        };
        let cfg = RunConfig {
            command,
            k: fc.k.unwrap_or(defaults.k),
            d: fc.d.unwrap_or(defaults.d),
            r: fc.r.or(defaults.r),
            tau: fc.tau,
            kernel,
            tau_min: fc.tau_min,
            tau_max: fc.tau_max,
            r_min: fc.r_min,
            r_max: fc.r_max,
            points: fc.points,
            omega_max: fc.omega_max,
            t_end: fc.t_end,
            step: fc.step,
            step_fraction: fc.step_fraction,
            history: fc.history,
            horizon: fc.horizon,
            stride: fc.stride,
            figure: fc.figure,
            out: fc.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of parsing: a config file that reproduces this run.
    pub fn to_file_config(&self) -> FileConfig {
        FileConfig {
            command: Some(self.command),
            k: Some(self.k),
            d: Some(self.d),
            r: self.r,
            tau: self.tau,
            kernel: Some(self.kernel.to_string()),
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            r_min: self.r_min,
            r_max: self.r_max,
            points: self.points,
            omega_max: self.omega_max,
            t_end: self.t_end,
            step: self.step,
            step_fraction: self.step_fraction,
            history: self.history,
            horizon: self.horizon,
            stride: self.stride,
            figure: self.figure,
            out: self.out.clone(),
        }
    }

    /// `out`, then `$DLOGISTIC_OUT_DIR`, then `./dlogistic-out`.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR))
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let r = self.require_r()?;
        Ok(ModelParams::new(r, self.k, self.d)?)
    }

    fn require<T: Copy>(&self, name: &str, v: Option<T>) -> Result<T, CliError> {
        v.ok_or_else(|| config_err(format!("missing `{name}` (required by {})", self.command.as_str())))
    }

    pub(crate) fn require_r(&self) -> Result<f64, CliError> {
        self.require("r", self.r)
    }

    pub(crate) fn require_tau(&self) -> Result<f64, CliError> {
        self.require("tau", self.tau)
    }

    pub(crate) fn require_tau_range(&self) -> Result<(f64, f64), CliError> {
        Ok((self.require("tau-min", self.tau_min)?, self.require("tau-max", self.tau_max)?))
    }

    pub(crate) fn require_r_range(&self) -> Result<(f64, f64), CliError> {
        Ok((self.require("r-min", self.r_min)?, self.require("r-max", self.r_max)?))
    }

    pub(crate) fn require_figure(&self) -> Result<FigureId, CliError> {
        self.require("figure", self.figure)
    }

    /// Range and presence checks against the command's preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        // K and D through the model's own validation
        ModelParams::new(self.r.unwrap_or(1.0), self.k, self.d)?;
        positive("r", self.r)?;
        if let Some(tau) = self.tau {
            if !(tau.is_finite() && tau >= 0.0) {
                return Err(config_err(format!("`tau` must be finite and >= 0, got {tau}")));
            }
        }
        for (name, v) in [
            ("tau-min", self.tau_min),
            ("tau-max", self.tau_max),
            ("r-min", self.r_min),
            ("r-max", self.r_max),
            ("omega-max", self.omega_max),
            ("t-end", self.t_end),
            ("step", self.step),
            ("step-fraction", self.step_fraction),
            ("history", self.history),
            ("horizon", self.horizon),
        ] {
            positive(name, v)?;
        }
        if let (Some(lo), Some(hi)) = (self.tau_min, self.tau_max) {
            if lo >= hi {
                return Err(config_err(format!("`tau-min` ({lo}) must be below `tau-max` ({hi})")));
            }
        }
        if let (Some(lo), Some(hi)) = (self.r_min, self.r_max) {
            if lo >= hi {
                return Err(config_err(format!("`r-min` ({lo}) must be below `r-max` ({hi})")));
            }
        }
        if let Some(n) = self.points {
            if n < 2 {
                return Err(config_err(format!("`points` must be >= 2, got {n}")));
            }
        }
        if self.stride == Some(0) {
            return Err(config_err("`stride` must be >= 1"));
        }

        match self.command {
            CommandName::Equilibrium | CommandName::Transforms | CommandName::Hopf => {
                if self.command == CommandName::Equilibrium {
                    self.require_r()?;
                }
                if self.command == CommandName::Hopf && self.d == 0.0 {
                    // the curve parametrization needs D > 0
                    self.require_r()?;
                }
            }
            CommandName::Region => {
                self.require_r_range()?;
                self.require_tau_range()?;
            }
            CommandName::Classify | CommandName::Simulate | CommandName::Phase => {
                self.require_r()?;
                self.require_tau()?;
            }
            CommandName::Bifurcation => {
                self.require_r()?;
                self.require_tau_range()?;
            }
            CommandName::ReproduceFigure => {
                self.require_figure()?;
            }
        }
        Ok(())
    }
}

/// Parse a kernel spec such as `gamma:p=2`.
pub fn parse_kernel_spec(spec: &str) -> crate::Result<Kernel> {
    let kernel: Kernel = spec.parse()?;
    kernel.validate()?;
    Ok(kernel)
}

/// Parse the text of a TOML config file.
pub fn parse_config_file(text: &str) -> Result<FileConfig, CliError> {
    toml::from_str(text).map_err(|e| config_err(format!("config file: {}", e.message())))
}

fn read_config_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_file(&text)
}

/// Parse argv (program name first) plus the optional `--config` file.
/// `Err(Ok(..))` carries clap's own output (help, version, usage errors).
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, Result<clap::Error, CliError>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(Ok)?;
    let file = match &cli.config {
        Some(path) => read_config_file(path).map_err(Err)?,
        None => FileConfig::default(),
    };
    let mut flags = cli.values;
    flags.command = cli.command;
    RunConfig::from_file_config(file.overlay(flags)).map_err(Err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, String> {
        let argv = std::iter::once("dlogistic").chain(args.iter().copied());
        parse_config(argv).map_err(|e| match e {
            Ok(clap) => clap.to_string(),
            Err(cli) => cli.to_string(),
        })
    }

    #[test]
    fn flags_select_command_and_kernel() {
        let cfg = parse(&["hopf", "--kernel", "gamma:p=2", "--K", "5", "--D", "3"]).unwrap();
        assert_eq!(cfg.command, CommandName::Hopf);
        assert_eq!(cfg.kernel, Kernel::Gamma { p: 2 });
        assert_eq!((cfg.k, cfg.d), (5.0, 3.0));
    }

    #[test]
    fn invalid_sigma_names_the_field() {
        let err = parse(&["hopf", "--kernel", "uniform:sigma=2.5"]).unwrap_err();
        assert!(err.contains("kernel") && err.contains("sigma"), "{err}");
    }

    #[test]
    fn missing_required_value_is_reported() {
        let err = parse(&["classify", "--r", "5"]).unwrap_err();
        assert!(err.contains("`tau`"), "{err}");
        let err = parse(&["--r", "5"]).unwrap_err();
        assert!(err.contains("`command`"), "{err}");
    }

    #[test]
    fn negative_inflow_rejected() {
        let err = parse(&["equilibrium", "--r", "1", "--D", "-1"]).unwrap_err();
        assert!(err.contains("`D`"), "{err}");
    }

    #[test]
    fn file_keys_mirror_flags() {
        let fc = parse_config_file("command = \"classify\"\nK = 5.0\nr = 5\ntau = 5\nkernel = \"gamma:p=2\"\ntau-min = 0.5\n").unwrap();
        assert_eq!(fc.command, Some(CommandName::Classify));
        assert_eq!(fc.tau_min, Some(0.5));
        let err = parse_config_file("command = \"hopf\"\nsigma = 1\n").unwrap_err().to_string();
        assert!(err.contains("sigma"), "{err}");
    }

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = RunConfig::default();
        let text = cfg.to_file_config().to_toml();
        let back = RunConfig::from_file_config(parse_config_file(&text).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_file_config().to_toml(), text);
    }
}
