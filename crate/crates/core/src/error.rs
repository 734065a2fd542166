use crate::integrator::SimulationState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trajectory error: {0}")]
    Trajectory(String),

    /// Non-finite or runaway values. Carries the last state that was still finite.
    #[error("blow-up detected at t = {time}")]
    BlowUp {
        time: f64,
        last_good: Box<SimulationState>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
