use thiserror::Error;

use crate::types::ParticipantId;

pub type Result<T, E = SortitionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SortitionError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("percentile requested over an empty sample")]
    EmptySample,

    #[error("no active participant contributed a score in epoch {epoch}")]
    NoContributions { epoch: u64 },

    #[error("contributions are for epoch {got}, state is at epoch {expected}")]
    EpochMismatch { expected: u64, got: u64 },

    #[error("participant {0} contributed a score but is not in the active set")]
    InactiveContributor(ParticipantId),

    #[error("no target supplied for participant {0}")]
    MissingTarget(ParticipantId),

    #[error("participant {0} is not part of the system state")]
    UnknownParticipant(ParticipantId),

    #[error("participant {0} already exists")]
    DuplicateParticipant(ParticipantId),

    #[error("system state has no participants")]
    EmptyState,

    #[error("{0}")]
    Degenerate(String),

    #[error("runs cover {merit} and {random} epochs respectively")]
    EpochCountMismatch { merit: usize, random: usize },
}

impl SortitionError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        SortitionError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
