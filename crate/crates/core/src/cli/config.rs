//! Run configuration: a strict JSON document with the top-level keys
//! `params` or `raw_params`, `init`, `integration` and `outputs`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::integrator::{
    IntegrationOpts, Method, DEFAULT_ATOL, DEFAULT_DIVERGENCE_BOUND, DEFAULT_DT_MAX,
    DEFAULT_DT_MIN, DEFAULT_RK4_DT, DEFAULT_RTOL, DEFAULT_T_END,
};
use crate::model::{nondimensionalize, ModelError, ModelParams, RawParams, State};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{}", describe(.line, .field, .message))]
    ConfigParse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
}

fn describe(line: &Option<usize>, field: &Option<String>, message: &str) -> String {
    let mut s = String::from("config error");
    if let Some(l) = line {
        s += &format!(" at line {l}");
    }
    if let Some(f) = field {
        s += &format!(" in field `{f}`");
    }
    s + ": " + message
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MethodName {
    Rk4,
    #[default]
    Rk45,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct IntegrationSection {
    method: MethodName,
    t_end: Option<f64>,
    dt: Option<f64>,
    rtol: Option<f64>,
    atol: Option<f64>,
    dt_min: Option<f64>,
    dt_max: Option<f64>,
    record_every: Option<usize>,
    stop_when_stationary: Option<f64>,
    divergence_bound: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    params: Option<ModelParams>,
    raw_params: Option<RawParams>,
    init: Option<State>,
    #[serde(default)]
    integration: IntegrationSection,
    #[serde(default)]
    outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub init: Option<State>,
    pub integration: IntegrationOpts,
    pub outputs: Outputs,
}

/// 1-based line of the first occurrence of the JSON key `"name"`.
fn key_line(text: &str, name: &str) -> Option<usize> {
    let needle = format!("\"{name}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

fn invalid(text: &str, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::ConfigParse {
        line: key_line(text, field),
        field: Some(field.to_string()),
        message: message.into(),
    }
}

fn model_error(text: &str, e: ModelError) -> ConfigError {
    let field = match &e {
        ModelError::AlleeOutOfRange { .. } => "m",
        ModelError::NonPositiveParam { name, .. } => name,
        ModelError::OutsideDomain(_) => "init",
        ModelError::InvalidStep(_) => "params",
    };
    invalid(text, field, e.to_string())
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| {
            let message = e.to_string();
            let field = message.split('`').nth(1).map(str::to_string);
            ConfigError::ConfigParse {
                line: Some(e.line()),
                field,
                message,
            }
        })?;
        let params = match (doc.params, doc.raw_params) {
            (Some(p), None) => {
                p.validate().map_err(|e| model_error(text, e))?;
                p
            }
            (None, Some(raw)) => nondimensionalize(&raw).map_err(|e| model_error(text, e))?,
            (Some(_), Some(_)) => {
                return Err(invalid(
                    text,
                    "raw_params",
                    "give either `params` or `raw_params`, not both",
                ))
            }
            (None, None) => {
                return Err(ConfigError::ConfigParse {
                    line: None,
                    field: Some("params".into()),
                    message: "one of `params` or `raw_params` is required".into(),
                })
            }
        };
        if let Some(init) = doc.init {
            if !init.in_domain() {
                return Err(invalid(
                    text,
                    "init",
                    ModelError::OutsideDomain(init).to_string(),
                ));
            }
        }
        let integration = integration_opts(text, &doc.integration)?;
        Ok(Self {
            params,
            init: doc.init,
            integration,
            outputs: doc.outputs,
        })
    }
}

fn integration_opts(text: &str, s: &IntegrationSection) -> Result<IntegrationOpts, ConfigError> {
    let method = match s.method {
        MethodName::Rk4 => {
            for (name, v) in [
                ("rtol", s.rtol),
                ("atol", s.atol),
                ("dt_min", s.dt_min),
                ("dt_max", s.dt_max),
            ] {
                if v.is_some() {
                    return Err(invalid(text, name, "only applies to method \"rk45\""));
                }
            }
            Method::Rk4 {
                dt: s.dt.unwrap_or(DEFAULT_RK4_DT),
            }
        }
        MethodName::Rk45 => {
            if s.dt.is_some() {
                return Err(invalid(text, "dt", "only applies to method \"rk4\""));
            }
            Method::Rk45 {
                rtol: s.rtol.unwrap_or(DEFAULT_RTOL),
                atol: s.atol.unwrap_or(DEFAULT_ATOL),
                dt_min: s.dt_min.unwrap_or(DEFAULT_DT_MIN),
                dt_max: s.dt_max.unwrap_or(DEFAULT_DT_MAX),
            }
        }
    };
    let opts = IntegrationOpts {
        method,
        t_end: s.t_end.unwrap_or(DEFAULT_T_END),
        record_every: s.record_every,
        stop_when_stationary: s.stop_when_stationary,
        divergence_bound: s.divergence_bound.unwrap_or(DEFAULT_DIVERGENCE_BOUND),
        project_to_domain: true,
    };
    opts.validate()
        .map_err(|e| invalid(text, "integration", e.to_string()))?;
    Ok(opts)
}
