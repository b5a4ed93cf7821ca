use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular at {what}: {detail}")]
    Singularity { what: &'static str, detail: String },

    #[error("no convergence after {iterations} iterations (trace: {trace:?})")]
    NonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("degenerate interaction kernel: {0}")]
    DegenerateKernel(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("model validity: {0}")]
    ModelValidity(String),

    #[error("modulational instability: {0}")]
    ModulationalInstability(String),

    #[error("step size: {0}")]
    StepSize(String),

    #[error("numerical blow-up at step {step}: |psi| range [{min_abs:e}, {max_abs:e}]")]
    Blowup {
        step: usize,
        min_abs: f64,
        max_abs: f64,
    },

    #[error("flow wavenumber {k_flow} is not commensurate with the grid; nearest valid speed ratio is {nearest_speed_ratio}")]
    Commensurability {
        k_flow: f64,
        nearest_speed_ratio: f64,
    },

    #[error("measurement quality: {0}")]
    MeasurementQuality(String),

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("bracket: {0}")]
    Bracket(String),

    #[error("eigensolver: {0}")]
    Eigensolver(String),

    #[error("format: {0}")]
    Format(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::Format(_)
            | Error::Geometry(_)
            | Error::Io { .. }
            | Error::Domain(_)
            | Error::DegenerateKernel(_)
            | Error::ModelValidity(_)
            | Error::ModulationalInstability(_)
            | Error::Commensurability { .. }
            | Error::Shape { .. } => 2,
            Error::Singularity { .. }
            | Error::NonConvergence { .. }
            | Error::StepSize(_)
            | Error::Blowup { .. }
            | Error::Eigensolver(_) => 3,
            Error::MeasurementQuality(_) | Error::DomainTooSmall(_) | Error::Bracket(_) => 4,
        }
    }
}
