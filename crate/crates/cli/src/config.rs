//! Sweep configuration, read from TOML.
//!
//! ```toml
//! omega = 1.0
//! modes = ["collective", "independent"]
//! outputs = ["mean_work", "variance", "nsr", "lambda_w", "sigma", "tur_q", "ratio_rm"]
//! computation_path = "direct_sum"        # or "closed_form", "both"
//! erasure_entropy = 0.6931471805599453   # defaults to ln 2
//!
//! [grid]
//! n = [3, 10]                            # or { start = 1, end = 50 }
//! beta = { min = 0.01, max = 5.0, points = 200, spacing = "log" }
//! ```

use std::fmt;
use std::path::Path;

use qie_core::metrics::MIN_ERASURE_ENTROPY;
use qie_core::CouplingMode;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    MeanWork,
    Variance,
    Nsr,
    LambdaW,
    Sigma,
    TurQ,
    /// `p_m^col / p_m^ind` at the top level `m = n/2`.
    #[serde(alias = "ratio_Rm")]
    RatioRm,
}

impl Output {
    pub const ALL: [Output; 7] = [
        Output::MeanWork,
        Output::Variance,
        Output::Nsr,
        Output::LambdaW,
        Output::Sigma,
        Output::TurQ,
        Output::RatioRm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::MeanWork => "mean_work",
            Output::Variance => "variance",
            Output::Nsr => "nsr",
            Output::LambdaW => "lambda_w",
            Output::Sigma => "sigma",
            Output::TurQ => "tur_q",
            Output::RatioRm => "ratio_rm",
        }
    }

    /// Outputs that both computation paths produce independently.
    pub fn has_closed_form(self) -> bool {
        matches!(self, Output::MeanWork | Output::Variance | Output::Nsr)
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    #[default]
    DirectSum,
    ClosedForm,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum NGrid {
    List(Vec<u32>),
    Range { start: u32, end: u32, step: Option<u32> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum BetaGrid {
    List(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        points: usize,
        #[serde(default)]
        spacing: Spacing,
        #[serde(default)]
        include_zero: bool,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: NGrid,
    beta: BetaGrid,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: RawGrid,
    #[serde(default = "default_omega")]
    omega: f64,
    #[serde(default = "default_modes")]
    modes: Vec<CouplingMode>,
    #[serde(default = "default_erasure")]
    erasure_entropy: f64,
    #[serde(default = "default_outputs")]
    outputs: Vec<Output>,
    #[serde(default)]
    computation_path: PathChoice,
}

fn default_omega() -> f64 {
    1.0
}
fn default_modes() -> Vec<CouplingMode> {
    CouplingMode::ALL.to_vec()
}
fn default_erasure() -> f64 {
    MIN_ERASURE_ENTROPY
}
fn default_outputs() -> Vec<Output> {
    Output::ALL.to_vec()
}

/// A validated sweep: sorted, deduplicated grids and settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_values: Vec<u32>,
    pub beta_values: Vec<f64>,
    pub omega: f64,
    pub modes: Vec<CouplingMode>,
    pub erasure_entropy: f64,
    pub outputs: Vec<Output>,
    pub computation_path: PathChoice,
}

/// Points of a spaced range, endpoints included.
pub fn spaced(min: f64, max: f64, points: usize, spacing: Spacing) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| {
            let t = i as f64 / last;
            match spacing {
                Spacing::Linear => min + (max - min) * t,
                Spacing::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
            }
        })
        .map(|v| v.clamp(min, max))
        .collect()
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<SweepConfig, String> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        SweepConfig::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<SweepConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        SweepConfig::from_toml_str(&text).map_err(|message| CliError::Config {
            path: path.to_path_buf(),
            message,
        })
    }

    fn from_raw(raw: RawConfig) -> std::result::Result<SweepConfig, String> {
        let field = |name: &str, msg: &str| format!("field `{name}`: {msg}");

        let mut n_values = match raw.grid.n {
            NGrid::List(v) => v,
            NGrid::Range { start, end, step } => {
                let step = step.unwrap_or(1);
                if step == 0 {
                    return Err(field("grid.n.step", "must be positive"));
                }
                if end < start {
                    return Err(field("grid.n", "end is below start"));
                }
                (start..=end).step_by(step as usize).collect()
            }
        };
        if n_values.is_empty() {
            return Err(field("grid.n", "grid is empty"));
        }
        if n_values.contains(&0) {
            return Err(field("grid.n", "qubit counts must be positive"));
        }
        n_values.sort_unstable();
        n_values.dedup();

        let mut beta_values = match raw.grid.beta {
            BetaGrid::List(v) => v,
            BetaGrid::Range {
                min,
                max,
                points,
                spacing,
                include_zero,
            } => {
                if points == 0 {
                    return Err(field("grid.beta.points", "must be positive"));
                }
                if !(min.is_finite() && max.is_finite() && min <= max) {
                    return Err(field("grid.beta", "need finite min <= max"));
                }
                if spacing == Spacing::Log && min <= 0.0 {
                    return Err(field("grid.beta.min", "log spacing needs min > 0"));
                }
                let mut v = spaced(min, max, points, spacing);
                if include_zero {
                    v.insert(0, 0.0);
                }
                v
            }
        };
        if beta_values.is_empty() {
            return Err(field("grid.beta", "grid is empty"));
        }
        if beta_values.iter().any(|b| b.is_nan() || *b < 0.0) {
            return Err(field("grid.beta", "inverse temperatures must be >= 0"));
        }
        beta_values.sort_by(f64::total_cmp);
        beta_values.dedup();

        if !(raw.omega.is_finite() && raw.omega > 0.0) {
            return Err(field("omega", "must be a positive finite number"));
        }
        if !(raw.erasure_entropy >= MIN_ERASURE_ENTROPY) {
            return Err(field("erasure_entropy", "must be at least ln 2"));
        }

        let mut modes = raw.modes;
        if modes.is_empty() {
            return Err(field("modes", "list is empty"));
        }
        modes.sort();
        modes.dedup();

        let mut outputs = raw.outputs;
        if outputs.is_empty() {
            return Err(field("outputs", "list is empty"));
        }
        outputs.sort();
        outputs.dedup();

        Ok(SweepConfig {
            n_values,
            beta_values,
            omega: raw.omega,
            modes,
            erasure_entropy: raw.erasure_entropy,
            outputs,
            computation_path: raw.computation_path,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = SweepConfig::from_toml_str("[grid]\nn = [10, 3, 3]\nbeta = [0.5, 0.0]\n").unwrap();
        assert_eq!(c.n_values, vec![3, 10]);
        assert_eq!(c.beta_values, vec![0.0, 0.5]);
        assert_eq!(c.modes, CouplingMode::ALL.to_vec());
        assert_eq!(c.outputs, Output::ALL.to_vec());
        assert_eq!(c.computation_path, PathChoice::DirectSum);
        assert_eq!(c.erasure_entropy, std::f64::consts::LN_2);
    }

    #[test]
    fn ranges_expand() {
        let c = SweepConfig::from_toml_str(
            "[grid]\nn = { start = 1, end = 9, step = 4 }\nbeta = { min = 0.01, max = 1.0, points = 3, include_zero = true }\n",
        )
        .unwrap();
        assert_eq!(c.n_values, vec![1, 5, 9]);
        assert_eq!(c.beta_values.len(), 4);
        assert_eq!(c.beta_values[0], 0.0);
        assert!((c.beta_values[2] - 0.1).abs() < 1e-15);
        assert_eq!(c.beta_values[3], 1.0);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let err = SweepConfig::from_toml_str("[grid]\nn = []\nbeta = [0.0]\n").unwrap_err();
        assert!(err.contains("grid.n"), "{err}");
        let err = SweepConfig::from_toml_str("[grid]\nn = [1]\nbeta = [0.0]\nomeg = 2.0\n").unwrap_err();
        assert!(err.contains("omeg") && err.contains("line 4"), "{err}");
        let err = SweepConfig::from_toml_str("[grid]\nn = [1]\nbeta = [-1.0]\n").unwrap_err();
        assert!(err.contains("grid.beta"), "{err}");
    }
}
