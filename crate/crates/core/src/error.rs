use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A zero detuning in a perturbative denominator.
    #[error("resonant divergence: {0} detuning is zero")]
    Resonance(&'static str),

    #[error(
        "quadrature did not converge after {refinements} refinements \
         (estimate {estimate:e}, previous {previous:e}, tolerance {tolerance:e})"
    )]
    Quadrature {
        estimate: f64,
        previous: f64,
        tolerance: f64,
        refinements: usize,
    },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNonConvergence { sweeps: usize, off_norm: f64 },

    /// The dressed state connected to a bare basis state could not be identified.
    #[error(
        "strong mixing: best overlap {overlap:.4} with bare state {bare_index} is below \
         {threshold}; spectrum {spectrum:?} rad/s"
    )]
    StrongMixing {
        bare_index: usize,
        overlap: f64,
        threshold: f64,
        spectrum: Vec<f64>,
    },

    #[error("configuration error{}: `{key}`: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("table parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no point with an identified dressed state")]
    EmptyResult,
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    /// Short machine-readable tag, used in sweep tables.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Resonance(_) => "resonance",
            Error::Quadrature { .. } => "quadrature",
            Error::EigenNonConvergence { .. } => "eigen_nonconvergence",
            Error::StrongMixing { .. } => "strong_mixing",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::EmptyResult => "empty_result",
        }
    }
}
