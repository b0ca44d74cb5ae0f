use thiserror::Error;

/// Evaluation of a free energy outside its admissible interval.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("phase field c = {c} is outside the admissible interval {interval} of the {energy} free energy")]
pub struct DomainError {
    pub c: f64,
    pub energy: &'static str,
    pub interval: &'static str,
}

/// Failures of the time integrators and linear solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("non-finite value in component {component} at index {index} (t = {t})")]
    NonFinite { component: &'static str, index: usize, t: f64 },
    #[error("time step underflow: dt = {dt:e} at t = {t} (max wave speed {smax:e})")]
    DtUnderflow { dt: f64, t: f64, smax: f64 },
    #[error("Newton iteration failed to converge at t = {t} with dt = {dt:e} below dt_min")]
    NewtonFailure { t: f64, dt: f64 },
    #[error("singular matrix: zero pivot in row {row}")]
    Singular { row: usize },
    #[error("{0}")]
    Unsupported(String),
}

/// Invalid user-supplied configuration, reported per field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { field: field.into(), message: message.into() }
    }
}

/// Top-level error of the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
