use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    /// Post-selection on an outcome whose probability is (numerically) zero.
    #[error("impossible outcome {outcome} on qubit {qubit} (probability {probability:e})")]
    ImpossibleOutcome {
        qubit: usize,
        outcome: u8,
        probability: f64,
    },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("zero Hamiltonian: theta and gamma are both zero")]
    ZeroHamiltonian,

    #[error("numerical failure: {what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("no {n} successes in a row after {attempts} attempts")]
    Exhausted { n: usize, attempts: u64 },

    #[error("wrong regime: {0}")]
    Regime(String),

    #[error("no exceptional point found: minimal gap {best_gap:e} at {best_param} exceeds tolerance {tolerance:e}")]
    EpNotFound {
        best_param: f64,
        best_gap: f64,
        tolerance: f64,
    },

    /// Configuration errors; each entry names the offending field.
    #[error("invalid config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
