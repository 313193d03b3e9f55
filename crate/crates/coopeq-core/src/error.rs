//! Structured errors shared by every module of the crate.

use alloc::string::String;
use core::fmt;

/// Errors raised by game construction, enumeration caps and solver limits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoopError {
    /// A mixed profile (or strategy index) does not match the game shape.
    /// Carries the offending player (0-based).
    DimensionMismatch { player: usize, detail: String },
    /// A list of blocks is not a partition of the player set.
    InvalidPartition { detail: String },
    /// A requested computation exceeds a configured cap (e.g. the maximum
    /// player count for coalition-structure enumeration).
    Capacity { detail: String },
    /// A generator or configuration parameter is out of its valid range.
    InvalidParameter { detail: String },
    /// A strategy label or index does not exist for the given player.
    UnknownStrategy { player: usize, detail: String },
    /// The CPT solving pipeline is unavailable at this game size.
    CptUnavailable { detail: String },
    /// Induced-game thresholds admit no profile.
    InfeasibleThresholds { detail: String },
    /// An internal consistency check failed (indicates a bug).
    Internal { detail: String },
}

impl fmt::Display for CoopError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoopError::DimensionMismatch { player, detail } => {
                write!(f, "dimension mismatch for player {}: {}", player + 1, detail)
            }
            CoopError::InvalidPartition { detail } => {
                write!(f, "invalid coalition structure: {detail}")
            }
            CoopError::Capacity { detail } => write!(f, "capacity exceeded: {detail}"),
            CoopError::InvalidParameter { detail } => write!(f, "invalid parameter: {detail}"),
            CoopError::UnknownStrategy { player, detail } => {
                write!(f, "unknown strategy for player {}: {}", player + 1, detail)
            }
            CoopError::CptUnavailable { detail } => {
                write!(f, "CPT mode unavailable at this size: {detail}")
            }
            CoopError::InfeasibleThresholds { detail } => {
                write!(f, "infeasible induced-game thresholds: {detail}")
            }
            CoopError::Internal { detail } => write!(f, "internal consistency error: {detail}"),
        }
    }
}

impl core::error::Error for CoopError {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, CoopError>;
