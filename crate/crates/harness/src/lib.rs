//! Experiment runner for the `spis-core` estimators: TOML scenarios in,
//! CSV or JSON result rows out.

pub mod config;
pub mod report;
pub mod runner;

use std::path::Path;

pub use config::{ConfigError, ExperimentConfig, Method, Target, ValidatedConfig};
pub use report::{render, to_csv, to_json, Format, CSV_HEADER};
pub use runner::{run_experiment, ResultRow, RunError};

/// Bundled scenarios as (name, TOML text).
pub const SCENARIOS: &[(&str, &str)] = &[
    ("table1", include_str!("../scenarios/table1.toml")),
    ("figure2", include_str!("../scenarios/figure2.toml")),
    ("table2", include_str!("../scenarios/table2.toml")),
    ("table3", include_str!("../scenarios/table3.toml")),
    ("overshoot", include_str!("../scenarios/overshoot.toml")),
    ("example5", include_str!("../scenarios/example5.toml")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Reads a config file, or a bundled scenario when `arg` names one and no
/// such file exists.
pub fn load_config(arg: &str) -> Result<ValidatedConfig, LoadError> {
    let text = if Path::new(arg).exists() || bundled(arg).is_none() {
        std::fs::read_to_string(arg).map_err(|source| LoadError::Io {
            path: arg.to_string(),
            source,
        })?
    } else {
        bundled(arg).expect("checked above").to_string()
    };
    Ok(ExperimentConfig::from_toml(&text)?.validate()?)
}
