use thiserror::Error;

use crate::kinetics::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("{what} = {value} outside admissible range [{lo}, {hi}]")]
    Domain { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("{operation} requires the {required:?} regime, found {found:?}")]
    Regime {
        operation: &'static str,
        required: Regime,
        found: Regime,
    },

    #[error("no coexistence equilibrium: regime is {0:?}")]
    NoCoexistence(Regime),

    #[error("{what} did not converge after {iterations} iterations{}", fmt_index(.index))]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        index: Option<usize>,
    },

    #[error("blow-up at t = {t}: field `{field}` reached {value} at cell {index}")]
    BlowUp { t: f64, field: &'static str, index: usize, value: f64 },

    #[error("positivity violated at t = {t}: field `{field}` = {value} at cell {index}")]
    Positivity { t: f64, field: &'static str, index: usize, value: f64 },

    #[error("insufficient linear window: {found} qualifying snapshots, need {required}")]
    InsufficientWindow { found: usize, required: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

fn fmt_index(index: &Option<usize>) -> String {
    match index {
        Some(i) => format!(" at grid point {i}"),
        None => String::new(),
    }
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for failures of the numerics (as opposed to rejected inputs).
    pub fn is_numerical(&self) -> bool {
        if let Error::Context { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::NonConvergence { .. } | Error::BlowUp { .. } | Error::Positivity { .. } | Error::InsufficientWindow { .. }
        )
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Domain { .. } => "domain",
            Error::Regime { .. } => "regime",
            Error::NoCoexistence(_) => "no_coexistence",
            Error::NonConvergence { .. } => "non_convergence",
            Error::BlowUp { .. } => "blow_up",
            Error::Positivity { .. } => "positivity",
            Error::InsufficientWindow { .. } => "insufficient_window",
            Error::Io(_) => "io",
            Error::Context { source, .. } => source.code(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
