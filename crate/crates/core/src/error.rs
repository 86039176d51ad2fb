use thiserror::Error;

use crate::params::Violation;

/// Errors raised while evaluating the physical model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("no advective delay defined: flow velocity is zero")]
    NoFlow,
    #[error("concentration requires t > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("lambert_w argument must be >= 0, got {0}")]
    NegativeLambertArgument(f64),
    #[error("bias outside the linear region: V_ov = {v_ov}, V_SD = {v_sd}")]
    NotLinearRegion { v_ov: f64, v_sd: f64 },
    #[error("threshold voltage needs {0}")]
    MissingDoping(&'static str),
    #[error("flicker PSD is undefined at f = 0")]
    ZeroFrequency,
    #[error("invalid symbol statistics: {0}")]
    InvalidStats(String),
    #[error("no ML threshold between symbols {lower} and {upper}")]
    NoThreshold { lower: usize, upper: usize },
    #[error("alphabet size M = {0} is not supported (need M >= 2)")]
    AlphabetSize(usize),
    #[error("explicit symbol levels have length {got}, expected M = {expected}")]
    LevelCount { got: usize, expected: usize },
}

/// Errors raised while reading a configuration document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` does not accept unit suffix `{suffix}`")]
    UnitSuffix {
        line: usize,
        key: String,
        suffix: String,
    },
    #[error("parameter validation failed: {}", fmt_violations(.0))]
    Invalid(Vec<Violation>),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
