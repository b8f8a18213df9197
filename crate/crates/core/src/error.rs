use thiserror::Error;

/// Errors produced by the solvers, bound evaluators and certificate builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates the documented precondition of an operation.
    #[error("precondition violated in {op}: {reason}")]
    Precondition { op: &'static str, reason: String },

    /// An iterative method hit its iteration cap.
    #[error("{op} did not converge after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    /// A root bracket does not change sign.
    #[error("root bracket [{a}, {b}] does not change sign (f(a) = {fa:e}, f(b) = {fb:e})")]
    Bracket { a: f64, b: f64, fa: f64, fb: f64 },

    /// A trial function or disk does not fit the geometry it was built for.
    #[error("geometry violation: {0}")]
    Geometry(String),

    /// A monomial family cannot supply the requested number of members.
    #[error("family capacity {capacity} is below the requested size {requested} (deficit {})", requested - capacity)]
    Capacity { capacity: usize, requested: usize },

    /// A certificate pipeline failed in one of its stages.
    #[error("certificate stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn pre(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Precondition { op, reason: reason.into() }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
