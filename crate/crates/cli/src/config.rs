//! JSON scenario file. Every field is optional; command-line flags win.

use anyhow::{Context, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// A number or a string with a unit. Bare numbers follow the flag rules:
/// Hz for frequencies, mm for lengths.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    pub fn text(&self) -> String {
        match self {
            Value::Number(v) => format!("{v}"),
            Value::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub freq: Option<Value>,
    pub f0: Option<Value>,
    pub er: Option<f64>,
    pub h: Option<Value>,
    pub r_edge: Option<Value>,
    pub fidelity: Option<String>,
    pub f_start: Option<Value>,
    pub f_stop: Option<Value>,
    pub points: Option<usize>,
    pub unit: Option<String>,
    pub format: Option<String>,
    pub ports: Option<String>,
    pub port: Option<String>,
    pub spacing: Option<Value>,
    pub element: Option<String>,
    pub step: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}
