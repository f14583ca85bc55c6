use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Parameters are kept as text until an experiment types them, so that
/// unknown or malformed values can be reported together.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    experiment: Option<String>,
    #[serde(default)]
    parameters: BTreeMap<String, Json>,
    #[serde(default)]
    output_path: Option<PathBuf>,
    #[serde(default)]
    format: Option<Format>,
}

fn param_text(key: &str, v: &Json) -> Result<String, String> {
    match v {
        Json::Number(n) => Ok(n.to_string()),
        Json::String(s) => Ok(s.clone()),
        Json::Bool(b) => Ok(b.to_string()),
        _ => Err(format!("parameter {key} must be a number or string")),
    }
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            ..Self::default()
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let raw: FileConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let parameters = raw
            .parameters
            .iter()
            .map(|(k, v)| Ok((k.clone(), param_text(k, v)?)))
            .collect::<Result<_, String>>()?;
        Ok(Self {
            experiment: raw.experiment.unwrap_or_default(),
            parameters,
            output_path: raw.output_path,
            format: raw.format.unwrap_or_default(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let fail = |reason: String| CliError::ConfigFile {
            path: path.display().to_string(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        Self::from_json(&text).map_err(fail)
    }

    /// Parses `key=value` pairs as given on the command line.
    pub fn parse_param(pair: &str) -> Result<(String, String), String> {
        match pair.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                Ok((k.trim().to_string(), v.trim().to_string()))
            }
            _ => Err(format!("expected key=value, got {pair:?}")),
        }
    }

    /// The echo embedded in every table. The output path is left out so
    /// that the same run written to two places gives identical bytes.
    pub fn echo_json(&self) -> Json {
        serde_json::json!({
            "experiment": self.experiment,
            "parameters": self.parameters,
            "format": self.format,
        })
    }

    pub fn echo(&self) -> String {
        self.echo_json().to_string()
    }
}
