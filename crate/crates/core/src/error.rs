use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller broke an API precondition (mismatched lengths, dead qubit,
    /// overlapping locations in one step, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// An invalid experiment or model configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A least-squares fit could not be computed from the supplied data.
    #[error("fit error: {0}")]
    Fit(String),

    /// A numeric argument was outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Ancilla verification failed `attempts` times under an abort policy.
    #[error("ancilla verification failed {attempts} times; trial aborted")]
    TrialAborted { attempts: u32 },
}
