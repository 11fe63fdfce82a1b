use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

/// Environment variable naming the directory for relative output paths.
pub const OUTPUT_DIR_ENV: &str = "QSC_OUTPUT_DIR";

/// Contents of a `--config` file. Every field is optional; command-line flags
/// take precedence over it and it takes precedence over built-in defaults.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub slots: Option<usize>,
    pub t: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub methods: Option<Vec<String>>,
    pub kernel: Option<KernelConfig>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum KernelConfig {
    Exponential(ExponentialKernel),
    Tabulated(TabulatedKernel),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExponentialKernel {
    pub amplitude: f64,
    pub tau: f64,
    #[serde(default)]
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TabulatedKernel {
    pub grid: Vec<f64>,
    pub values: Vec<[f64; 2]>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("config {}: {e}", path.display())))?;
        if let Some(tol) = cfg.tolerance {
            positive("tolerance", tol)?;
        }
        Ok(cfg)
    }

    /// Rejects a config written for a different subcommand.
    pub fn check_subcommand(&self, name: &str) -> Result<(), CliError> {
        match &self.subcommand {
            Some(s) if s != name => Err(CliError::input(format!(
                "config is for subcommand `{s}`, not `{name}`"
            ))),
            _ => Ok(()),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// Flag, then config, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

pub fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::input(format!("{name} must be positive and finite, got {x}")))
    }
}

pub fn non_negative(name: &str, x: f64) -> Result<f64, CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::input(format!("{name} must be non-negative and finite, got {x}")))
    }
}

/// Resolves an output path; relative paths land in `$QSC_OUTPUT_DIR` when set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{s}` is not `re,im`"));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
        None => Complex64::new(parse(s)?, 0.0),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}
