//! Flat `key = value` sweep-configuration files and their manifest echo.
//!
//! One pair per line; `#` starts a comment; list values are comma-separated.
//! Keys containing a dot are provenance entries written by run manifests and
//! are ignored on input, so a manifest is itself a valid config file:
//! re-running a sweep from `manifest.txt` reproduces it bit for bit.
//!
//! Unset keys keep their values from [`SweepConfig::standard`], so a config
//! file only needs the fields it changes. Unknown bare keys are rejected —
//! a typo must not silently fall back to a default.
//!
//! [`SweepConfig::standard`]: dicke_core::sweep::SweepConfig::standard

use std::fmt::Display;
use std::str::FromStr;

use dicke_core::dynamics::TimeGrid;
use dicke_core::SweepConfig64;

use crate::CliError;

/// Parse a sweep configuration, starting from the standard scan and
/// overriding one field per recognized key.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig64, CliError> {
    let mut cfg = SweepConfig64::standard();
    let mut t_max = cfg.time_grid.t_max();
    let mut n_points = cfg.time_grid.n_points();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "config line {}: expected `key = value`, got `{line}`",
                index + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.contains('.') {
            continue; // manifest provenance entry
        }
        match key {
            "n_qubits" => cfg.n_qubits_list = parse_list(key, value)?,
            "lambda" => cfg.lambda_grid = parse_list(key, value)?,
            "n_bar" => cfg.n_bar_grid = parse_list(key, value)?,
            "eps" => cfg.eps_grid = parse_list(key, value)?,
            "t_max" => t_max = parse_scalar(key, value)?,
            "n_points" => n_points = parse_scalar(key, value)?,
            "n_fock" => cfg.n_fock = parse_scalar(key, value)?,
            "tail_tol" => cfg.tail_tol = parse_scalar(key, value)?,
            other => {
                return Err(CliError::Config(format!(
                    "config line {}: unknown key `{other}`",
                    index + 1
                )))
            }
        }
    }
    cfg.time_grid = TimeGrid::new(t_max, n_points)?;
    cfg.validate()?;
    Ok(cfg)
}

/// The configuration as manifest/config-file lines, in parse order.
///
/// Floats use Rust's shortest round-trip formatting, so parsing the echo
/// recovers the exact bit pattern of every value — the foundation of the
/// "re-run the manifest, get identical outputs" guarantee.
pub fn sweep_config_lines(cfg: &SweepConfig64) -> Vec<(&'static str, String)> {
    vec![
        ("n_qubits", join(&cfg.n_qubits_list)),
        ("lambda", join(&cfg.lambda_grid)),
        ("n_bar", join(&cfg.n_bar_grid)),
        ("eps", join(&cfg.eps_grid)),
        ("t_max", cfg.time_grid.t_max().to_string()),
        ("n_points", cfg.time_grid.n_points().to_string()),
        ("n_fock", cfg.n_fock.to_string()),
        ("tail_tol", cfg.tail_tol.to_string()),
    ]
}

fn parse_scalar<V: FromStr>(key: &str, value: &str) -> Result<V, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("config key `{key}`: cannot parse `{value}`")))
}

fn parse_list<V: FromStr>(key: &str, value: &str) -> Result<Vec<V>, CliError> {
    value
        .split(',')
        .map(|item| parse_scalar(key, item.trim()))
        .collect()
}

fn join<V: Display>(values: &[V]) -> String {
    values
        .iter()
        .map(V::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
