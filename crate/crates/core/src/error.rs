use thiserror::Error;

use crate::model::{ValidationReport, Violation};

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} id `{id}`{context}")]
    UnknownId {
        kind: &'static str,
        id: String,
        context: String,
    },

    #[error("scenario is not well-formed ({} violations):\n{}", .0.violations.len(), .0)]
    InvalidScenario(ValidationReport),

    #[error("design is infeasible:\n{}", format_violations(.0))]
    InfeasibleDesign(Vec<Violation>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no available route for commute `{commute}` at interval {t}")]
    NoAvailableRoute { commute: String, t: usize },

    #[error("choice probabilities are nondifferentiable at boundary: {0}")]
    NondifferentiableAtBoundary(String),

    #[error("linear program error: {0}")]
    Lp(String),

    #[error("LP solver stalled after {iterations} iterations (phase {phase}): {detail}")]
    LpStall {
        iterations: usize,
        phase: u8,
        detail: String,
    },

    #[error("optimizer failed at iteration {iteration}: {source}")]
    OptimizerStep {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("enumeration search space too large: estimated {estimate:.3e} combinations (limit {limit:.1e})")]
    SearchSpaceTooLarge { estimate: f64, limit: f64 },

    #[error("design grid contains no feasible point")]
    EmptyGrid,

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}
