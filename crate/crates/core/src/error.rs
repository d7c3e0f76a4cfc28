use thiserror::Error;

use crate::state::Action;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("bin dimensions must be positive, got {length}x{width}x{height}")]
    InvalidBin { length: u32, width: u32, height: u32 },
    #[error("item dimensions must be positive, got ({l}, {w}, {h})")]
    InvalidItem { l: u32, w: u32, h: u32 },
    #[error("action index {index} outside [0, {limit})")]
    ActionIndex { index: usize, limit: usize },
    #[error("footprint {l}x{w} at ({x}, {y}) leaves the {length}x{width} grid")]
    OutOfBounds { x: u32, y: u32, l: u32, w: u32, length: u32, width: u32 },
    #[error("placement {0:?} violates the containment or stability constraints")]
    ConstraintViolation(Action),
    #[error("rotated action {0:?} submitted to an episode without rotation")]
    RotationDisabled(Action),
    #[error("episode already finished")]
    EpisodeDone,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatagenError {
    #[error("invalid item thresholds [{min}, {max}] for bin {bin}")]
    InvalidThresholds { min: u32, max: u32, bin: String },
    #[error("cutting did not converge after {restarts} restarts")]
    CutExhausted { restarts: u32 },
    #[error("dataset line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("no feasible action for the current item")]
    NoFeasibleAction,
    #[error("bridge process could not be started: {0}")]
    Spawn(String),
    #[error("bridge process exited or closed its pipes")]
    ProcessDied,
    #[error("bridge did not answer within {0:?}")]
    Timeout(std::time::Duration),
    #[error("bridge protocol violation: {0}")]
    Protocol(String),
    #[error("bridge chose action {0}, which the feasibility mask forbids")]
    MaskRejected(usize),
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("no feasible action for the current item")]
    NoFeasibleAction,
    #[error("lookahead of {k} items exceeds the exhaustive-search limit of {limit}")]
    TooManyItems { k: usize, limit: usize },
    #[error("lookahead window is empty")]
    EmptyWindow,
    #[error(transparent)]
    Policy(#[from] PolicyError),
}
