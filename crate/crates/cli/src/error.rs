use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{param}`: {message}")]
    Config { param: String, message: String },
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct Report<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameter: Option<&'a str>,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn config(param: &str, message: impl Into<String>) -> Self {
        CliError::Config { param: param.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    /// One-line JSON error report for standard error.
    pub fn report(&self) -> String {
        let (kind, parameter) = match self {
            CliError::Config { param, .. } => ("config", Some(param.as_str())),
            CliError::Numerical(_) => ("numerical", None),
            CliError::Io(_) => ("io", None),
        };
        let message = match self {
            CliError::Config { message, .. } => message.clone(),
            other => other.to_string(),
        };
        serde_json::to_string(&Report { error: kind, parameter, message, exit_code: self.exit_code() })
            .expect("report serialises")
    }
}

impl From<laser_entropy::Error> for CliError {
    fn from(e: laser_entropy::Error) -> Self {
        use laser_entropy::Error as E;
        match &e {
            E::Domain { param, reason } | E::Config { param, reason } => {
                CliError::config(flag_name(param), reason.clone())
            }
            E::Truncation { .. } => CliError::config("n-max", e.to_string()),
            _ if e.is_input_error() => CliError::config("input", e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Flag spelling of a core parameter name.
fn flag_name(param: &str) -> &str {
    match param {
        "n_paths" | "n_samples" => "paths",
        "r" => "amplitude",
        "photon_flow" => "photon-flow",
        "centre_frequency" => "centre-frequency",
        "q_factor" => "q-factor",
        "phase_variance" | "segment_phase_variance" => "phase-variance",
        "n_grid" => "n-grid",
        "n_max" => "n-max",
        "duration" => "segments",
        "theta" => "temperature",
        "grid_points" => "grid",
        other => other,
    }
}
