use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no admissible Bernstein frame: {0}")]
    NoAdmissibleFrame(String),

    #[error("no feasible (beta, C) pair among {evaluated} candidates")]
    NoFeasiblePair { evaluated: usize },

    #[error("no convergence after {iterations} iterations (gap {gap:.3e}, sup {sup:.3e}{})",
        if *diverged { ", diverged" } else { "" })]
    NonConvergence { iterations: usize, gap: f64, sup: f64, diverged: bool },

    #[error("homotopy stage {stage} failed: {source}")]
    StageFailed { stage: usize, source: Box<Error> },

    #[error("bracket not found: {0}")]
    BracketNotFound(String),

    /// A computed result missed an internal accuracy check.
    #[error("tolerance check failed: {0}")]
    Tolerance(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for outcomes that signal a failed iteration rather than bad input.
    pub fn is_nonconvergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } | Error::BracketNotFound(_) | Error::NoFeasiblePair { .. } => true,
            Error::StageFailed { source, .. } => source.is_nonconvergence(),
            _ => false,
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
