//! Conformance checking: token-based replay and optimal alignments.

mod alignment;
mod replay;

use thiserror::Error;

pub use alignment::{
    align, align_trace, align_with, AlignOptions, Alignment, AlignmentCosts, ModelPart, Move, DEFAULT_SEARCH_BUDGET,
    SKIP,
};
pub(crate) use replay::Replayer;
pub use replay::{token_replay, token_replay_with_depth, ReplayResult, DEFAULT_SILENT_DEPTH};

use crate::eventlog::EventLogError;
use crate::petrinet::NetError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConformanceError {
    #[error("label `{0}` is shared by several transitions")]
    DuplicateLabel(String),
    #[error("initial marking is empty")]
    EmptyInitialMarking,
    #[error("final marking is empty")]
    EmptyFinalMarking,
    #[error("final marking is not reachable")]
    NoFinalMarkingPath,
    #[error("search expanded more than {budget} states")]
    SearchBudgetExceeded { budget: usize },
    #[error("log and model move costs must be positive")]
    InvalidCosts,
    #[error(transparent)]
    Log(#[from] EventLogError),
    #[error(transparent)]
    Net(#[from] NetError),
}
