//! Run configuration file and flag merging.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use qap_core::apgen::Mode;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Generator,
    LogSignal,
    GridFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lift,
    Lower,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub input: Option<PathBuf>,
    pub kind: Option<InputKind>,
    pub mode: Option<Mode>,
    pub epsilons: Option<Vec<f64>>,
    pub tau_range: Option<(i64, i64)>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub input: Option<PathBuf>,
    pub direction: Option<Direction>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub system: Option<PathBuf>,
    pub history: Option<PathBuf>,
    pub n_end: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApCheckConfig {
    pub window: Option<(i64, i64)>,
    pub tau_range: Option<(i64, i64)>,
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfieldConfig {
    pub spec: Option<PathBuf>,
    pub r0: Option<f64>,
    pub tail_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub grid_points: Option<usize>,
    pub spot_samples: Option<usize>,
    pub spot_radius: Option<f64>,
    #[serde(default)]
    pub ap: ApCheckConfig,
}

/// Config file contents. Every field is optional; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub q: Option<f64>,
    pub window: Option<(i64, i64)>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub analyze: AnalyzeConfig,
    #[serde(default)]
    pub transform: TransformConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub hopfield: HopfieldConfig,
}

impl RunConfig {
    /// Loads a config file and resolves its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = read_json(path, "config")?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(inner) = p.as_mut() {
                if inner.is_relative() {
                    *inner = base.join(&*inner);
                }
            }
        };
        fix(&mut cfg.out);
        fix(&mut cfg.analyze.input);
        fix(&mut cfg.transform.input);
        fix(&mut cfg.solve.system);
        fix(&mut cfg.solve.history);
        fix(&mut cfg.hopfield.spec);
        Ok(cfg)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {what} file {}: {e}", path.display())))
}

/// Parses `A..B`.
pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad start {a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad end {b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

pub fn require<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("missing required parameter `{what}`")))
}
