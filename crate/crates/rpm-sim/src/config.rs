//! Run configuration: Table-style defaults, flat key=value files, and
//! flag overrides resolved in one place.
//!
//! Precedence is fixed: command-line flags override file values, which
//! override the built-in defaults. Parsing and validation are separate
//! stages so a caller can report *where* a bad value came from (line
//! number for files, flag name for CLI) before invariants are checked.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::spin::FieldParams;

/// How populations are read out of the final statevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Exact |amplitude|² populations.
    Analytic,
    /// Multinomial shot sampling with a seeded generator.
    Sampled,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Analytic => write!(f, "analytic"),
            Mode::Sampled => write!(f, "sampled"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "sampled" => Ok(Mode::Sampled),
            other => Err(format!("mode must be 'analytic' or 'sampled', got '{other}'")),
        }
    }
}

/// Fully resolved run description shared by the sweep and dynamics paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Physical model parameters, including the field angle θ used by
    /// single-angle dynamics runs.
    pub field: FieldParams,
    /// Number of uniformly spaced sweep angles on [0, π].
    pub theta_points: usize,
    /// Step duration in seconds.
    pub dt: f64,
    /// Number of channel steps per trajectory.
    pub n_steps: usize,
    /// Readout mode for the quantum path.
    pub mode: Mode,
    /// Shots per measurement in sampled mode.
    pub shots: u64,
    /// Base seed; per-measurement seeds are derived from it.
    pub seed: u64,
    /// Optional CSV destination.
    pub out_csv: Option<PathBuf>,
    /// Optional SVG destination.
    pub out_plot: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            field: FieldParams::default(),
            theta_points: 21,
            dt: 5e-5,
            n_steps: 15,
            mode: Mode::Analytic,
            shots: 8192,
            seed: 42,
            out_csv: None,
            out_plot: None,
        }
    }
}

impl ExperimentConfig {
    /// Uniform sweep grid over [0, π] with `theta_points` entries.
    ///
    /// A single-point grid sits at 0 so that requesting an endpoint
    /// always evaluates it.
    pub fn theta_grid(&self) -> Vec<f64> {
        let n = self.theta_points;
        if n == 1 {
            return vec![0.0];
        }
        (0..n).map(|i| i as f64 * PI / (n - 1) as f64).collect()
    }

    /// Check every invariant, naming the first violated one.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.field
            .validate()
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        if !(self.field.theta.is_finite() && (0.0..=PI).contains(&self.field.theta)) {
            return Err(ConfigError::Validation(format!(
                "theta must lie in [0, π], got {}",
                self.field.theta
            )));
        }
        if self.theta_points == 0 {
            return Err(ConfigError::Validation(
                "theta_points must be ≥ 1".to_string(),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ConfigError::Validation(format!(
                "dt must be a positive duration, got {}",
                self.dt
            )));
        }
        if self.n_steps == 0 {
            return Err(ConfigError::Validation("steps must be ≥ 1".to_string()));
        }
        if self.mode == Mode::Sampled && self.shots == 0 {
            return Err(ConfigError::Validation(
                "shots must be ≥ 1 in sampled mode".to_string(),
            ));
        }
        Ok(())
    }

    /// Resolve defaults ← file ← flags, then validate.
    pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(file) = file {
            file.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Partial configuration from one source (a file or the flag set).
///
/// `None` fields leave the lower-precedence value untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub ax: Option<f64>,
    pub ay: Option<f64>,
    pub az: Option<f64>,
    pub b0: Option<f64>,
    pub gamma: Option<f64>,
    pub hbar: Option<f64>,
    pub phi: Option<f64>,
    pub kd: Option<f64>,
    pub theta: Option<f64>,
    pub theta_points: Option<usize>,
    pub dt: Option<f64>,
    pub n_steps: Option<usize>,
    pub mode: Option<Mode>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub out_csv: Option<PathBuf>,
    pub out_plot: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($src:expr => $dst:expr) => {
                if let Some(v) = &$src {
                    $dst = v.clone();
                }
            };
        }
        set!(self.ax => cfg.field.ax);
        set!(self.ay => cfg.field.ay);
        set!(self.az => cfg.field.az);
        set!(self.b0 => cfg.field.b0);
        set!(self.gamma => cfg.field.gamma);
        set!(self.hbar => cfg.field.hbar);
        set!(self.phi => cfg.field.phi);
        set!(self.kd => cfg.field.kd);
        set!(self.theta => cfg.field.theta);
        set!(self.theta_points => cfg.theta_points);
        set!(self.dt => cfg.dt);
        set!(self.n_steps => cfg.n_steps);
        set!(self.mode => cfg.mode);
        set!(self.shots => cfg.shots);
        set!(self.seed => cfg.seed);
        if self.out_csv.is_some() {
            cfg.out_csv = self.out_csv.clone();
        }
        if self.out_plot.is_some() {
            cfg.out_plot = self.out_plot.clone();
        }
    }
}

/// Configuration-stage failures, displayed with their category name so
/// CLI stderr lines are grep-able.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("ParseError: line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ValidationError: {0}")]
    Validation(String),
    #[error("IoFailure: {0}")]
    Io(#[from] std::io::Error),
}

/// Parse a flat `key = value` file into an override set.
///
/// Lines are independent; `#` starts a comment and blank lines are
/// skipped. Unknown keys are rejected with their line number rather
/// than ignored, so typos cannot silently fall back to defaults.
pub fn parse_config_file(path: &Path) -> Result<Overrides, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Parse config text; line numbers in errors are 1-based.
pub fn parse_config_str(text: &str) -> Result<Overrides, ConfigError> {
    let mut out = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected 'key = value', got '{content}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: format!("key '{key}' has no value"),
            });
        }
        set_key(&mut out, key, value).map_err(|message| ConfigError::Parse { line, message })?;
    }
    Ok(out)
}

fn set_key(out: &mut Overrides, key: &str, value: &str) -> Result<(), String> {
    fn float(key: &str, value: &str) -> Result<f64, String> {
        value
            .parse::<f64>()
            .map_err(|_| format!("key '{key}' expects a number, got '{value}'"))
    }
    fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
        value
            .parse::<T>()
            .map_err(|_| format!("key '{key}' expects a non-negative integer, got '{value}'"))
    }
    match key {
        "ax" => out.ax = Some(float(key, value)?),
        "ay" => out.ay = Some(float(key, value)?),
        "az" => out.az = Some(float(key, value)?),
        "b0" => out.b0 = Some(float(key, value)?),
        "gamma" => out.gamma = Some(float(key, value)?),
        "hbar" => out.hbar = Some(float(key, value)?),
        "phi" => out.phi = Some(float(key, value)?),
        "kd" => out.kd = Some(float(key, value)?),
        "theta" => out.theta = Some(float(key, value)?),
        "theta_points" => out.theta_points = Some(integer(key, value)?),
        "dt" => out.dt = Some(float(key, value)?),
        "steps" => out.n_steps = Some(integer(key, value)?),
        "mode" => out.mode = Some(value.parse::<Mode>()?),
        "shots" => out.shots = Some(integer(key, value)?),
        "seed" => out.seed = Some(integer(key, value)?),
        "out_csv" => out.out_csv = Some(PathBuf::from(value)),
        "out_plot" => out.out_plot = Some(PathBuf::from(value)),
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}
