use thiserror::Error;

/// Errors raised by the geometry kernel and the rerouting pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed instance: dimension mismatch, `d < 2`, non-finite data.
    #[error("instance error: {0}")]
    Instance(String),

    /// A parameter outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A segment meets an obstacle boundary in infinitely many points.
    #[error("U-M violation: edge {edge} runs along the boundary of obstacle {obstacle} for t in [{t_lo}, {t_hi}]")]
    UmViolation {
        edge: usize,
        obstacle: usize,
        t_lo: f64,
        t_hi: f64,
    },

    /// Crossing schedule invariants could not be established.
    #[error("schedule error: {0}")]
    Schedule(String),

    /// Collar routing failed.
    #[error("collar error: {0}")]
    Collar(String),

    /// The assembly engine reached a state its case analysis rules out.
    #[error("engine error: {0}")]
    Engine(String),

    /// Route query does not satisfy `x, y ∈ U∖(∪ S_i)` or is otherwise malformed.
    #[error("input error: {0}")]
    Input(String),

    /// Hypothesis check failed on the obstacle family.
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Re-labels a U-M violation with the polyline edge it occurred on.
    pub(crate) fn on_edge(self, edge: usize) -> Self {
        match self {
            Error::UmViolation {
                obstacle,
                t_lo,
                t_hi,
                ..
            } => Error::UmViolation {
                edge,
                obstacle,
                t_lo,
                t_hi,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
