//! Experiment configuration: JSON file values overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;
use crate::parser::SymbolSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Symbols,
    Quantize,
    Propagate,
    Bosonize,
    IdentityCheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Quadrature,
    Series,
}

/// Complex vector written as comma-separated entries such as `0.6,0.3-0.1i,2i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexVec(pub Vec<Complex64>);

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex entry".into());
    }
    let bad = || format!("malformed complex number '{text}'");
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

impl FromStr for ComplexVec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Ok(ComplexVec(Vec::new()));
        }
        s.split(',')
            .map(parse_complex)
            .collect::<Result<_, _>>()
            .map(ComplexVec)
    }
}

impl fmt::Display for ComplexVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else if c.im.is_sign_negative() {
                write!(f, "{}{}i", c.re, c.im)?;
            } else {
                write!(f, "{}+{}i", c.re, c.im)?;
            }
        }
        Ok(())
    }
}

impl Serialize for ComplexVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ComplexVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Fully resolved experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub modes: usize,
    pub cutoff: u32,
    pub time: f64,
    pub slices: Vec<usize>,
    pub flag_modes: Vec<usize>,
    pub symbol: String,
    pub z0: ComplexVec,
    pub z1: ComplexVec,
    pub backend: Backend,
    pub quad_nodes: usize,
    pub series_degree: u32,
    pub format: Format,
}

/// Every field optional; the shape of both the config file and the flag set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub modes: Option<usize>,
    pub cutoff: Option<u32>,
    pub time: Option<f64>,
    pub slices: Option<Vec<usize>>,
    pub flag_modes: Option<Vec<usize>>,
    pub symbol: Option<String>,
    pub z0: Option<ComplexVec>,
    pub z1: Option<ComplexVec>,
    pub backend: Option<Backend>,
    pub quad_nodes: Option<usize>,
    pub series_degree: Option<u32>,
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

pub const MAX_MODES: usize = 8;
pub const MAX_CUTOFF: u32 = 200;

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `top` replaced.
    pub fn overlay(mut self, top: &PartialConfig) -> Self {
        overlay!(
            self,
            top,
            command,
            modes,
            cutoff,
            time,
            slices,
            flag_modes,
            symbol,
            z0,
            z1,
            backend,
            quad_nodes,
            series_degree,
            format
        );
        self
    }

    /// Fill defaults and validate.
    pub fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("no command given".into()))?;
        let modes = self.modes.unwrap_or(1);
        let cutoff = self.cutoff.unwrap_or(16);
        let zeros = || ComplexVec(vec![Complex64::new(0.0, 0.0); modes]);
        let fill = |v: Option<ComplexVec>| match v {
            Some(v) if !v.0.is_empty() => v,
            _ => zeros(),
        };
        let default_nodes = match command {
            Command::IdentityCheck => 24,
            _ => (8 * cutoff as usize).clamp(24, 400),
        };
        let cfg = ExperimentConfig {
            command,
            modes,
            cutoff,
            time: self.time.unwrap_or(1.0),
            slices: self.slices.unwrap_or_else(|| vec![8, 16, 32, 64]),
            flag_modes: self.flag_modes.unwrap_or_else(|| vec![modes]),
            symbol: self.symbol.unwrap_or_else(|| "zs1 z1".into()),
            z0: fill(self.z0),
            z1: fill(self.z1),
            backend: self.backend.unwrap_or_default(),
            quad_nodes: self.quad_nodes.unwrap_or(default_nodes),
            series_degree: self.series_degree.unwrap_or(16),
            format: self.format.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(1..=MAX_MODES).contains(&self.modes) {
            return bad(format!(
                "modes must be in 1..={MAX_MODES}, got {}",
                self.modes
            ));
        }
        if !(1..=MAX_CUTOFF).contains(&self.cutoff) {
            return bad(format!(
                "cutoff must be in 1..={MAX_CUTOFF}, got {}",
                self.cutoff
            ));
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return bad(format!(
                "time must be finite and nonnegative, got {}",
                self.time
            ));
        }
        if self.slices.is_empty() || self.slices.contains(&0) {
            return bad("slices must be a nonempty list of positive integers".into());
        }
        if self.flag_modes.is_empty() || self.flag_modes.iter().any(|&n| n == 0 || n > self.modes) {
            return bad(format!(
                "flag modes must be a nonempty list within 1..={}",
                self.modes
            ));
        }
        if !(1..=400).contains(&self.quad_nodes) {
            return bad(format!(
                "quad nodes must be in 1..=400, got {}",
                self.quad_nodes
            ));
        }
        if self.series_degree == 0 {
            return bad("series degree must be positive".into());
        }
        for (name, v) in [("z0", &self.z0), ("z1", &self.z1)] {
            if v.0.len() != self.modes {
                return bad(format!(
                    "{name} has {} entries for {} modes",
                    v.0.len(),
                    self.modes
                ));
            }
            if v.0.iter().any(|c| !c.is_finite()) {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.command == Command::Bosonize && (self.cutoff as usize) < self.modes {
            return bad(format!(
                "bosonize needs cutoff ≥ modes, got cutoff {} for {} modes",
                self.cutoff, self.modes
            ));
        }
        SymbolSpec::parse(&self.symbol, self.modes)?;
        Ok(())
    }
}

/// Command-line flags.
#[derive(Debug, Parser)]
#[command(
    name = "bargmann",
    version,
    about = "Symbol calculus, quantization and propagator experiments"
)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Number of modes d.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Total-degree cutoff M.
    #[arg(long)]
    pub cutoff: Option<u32>,
    #[arg(long)]
    pub time: Option<f64>,
    /// Comma-separated slice counts N.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub slices: Option<Vec<usize>>,
    /// Comma-separated flag projections n.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub flag_modes: Option<Vec<usize>>,
    /// Symbol text, e.g. "zs1 z1 + 0.1 zs1^2 z1^2".
    #[arg(long, allow_hyphen_values = true)]
    pub symbol: Option<String>,
    /// Comma-separated complex entries, e.g. "0.6,0.3-0.1i".
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<ComplexVec>,
    #[arg(long, allow_hyphen_values = true)]
    pub z1: Option<ComplexVec>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long)]
    pub series_degree: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    fn flags(&self) -> PartialConfig {
        PartialConfig {
            command: self.command,
            modes: self.modes,
            cutoff: self.cutoff,
            time: self.time,
            slices: self.slices.clone(),
            flag_modes: self.flag_modes.clone(),
            symbol: self.symbol.clone(),
            z0: self.z0.clone(),
            z1: self.z1.clone(),
            backend: self.backend,
            quad_nodes: self.quad_nodes,
            series_degree: self.series_degree,
            format: self.format,
        }
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let base = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        base.overlay(&self.flags()).resolve()
    }
}
