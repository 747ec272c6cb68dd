use alloc::string::String;

/// Errors raised by profile construction, aggregation and the estimators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("athlete names must be non-empty")]
    EmptyName,
    #[error("athlete `{0}` appears more than once in a race")]
    DuplicateAthlete(String),
    #[error("race {race} is not a permutation of the roster")]
    RosterMismatch { race: usize },
    #[error("unknown athlete `{0}`")]
    UnknownAthlete(String),
    #[error("a profile needs at least one race and one athlete")]
    EmptyProfile,
    #[error("cannot remove the only athlete of a profile")]
    LastAthlete,
    #[error("expected a vector of length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("score table defines no vector for field size {0}")]
    MissingVector(usize),
    #[error("invalid score table: {0}")]
    InvalidTable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse `{0}` as a number")]
    ParseNumber(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no witness exists: {0}")]
    NoWitness(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
