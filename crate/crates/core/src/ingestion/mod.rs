//! Game records and their conversion to per-round constraint sets.

mod events;
mod llm;
mod record;
mod rounds;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::grammar::GrammarError;

pub use events::{
    extract_avalon_events, extract_avalon_events_with, extract_events, extract_mafia_events, extract_mafia_events_with,
};
pub use llm::{render_prompt, CompletionClient, Extractor, Template, DEFAULT_RETRIES};
pub use record::{
    load_record, load_records, Assassination, Ballot, ChatLine, Condition, GameRecord, Proposal, QuestResult, Reveal,
    RoundEvents, Vote, VoteTarget,
};
pub use rounds::{load_constraint_rounds, load_constraint_rounds_with};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("bad record: {0}")]
    BadRecord(String),
    #[error("{context}: {source}")]
    Grammar { context: String, source: GrammarError },
    #[error("round {0} is missing")]
    MissingRound(usize),
    #[error("round {round} appears in more than one file: {files:?}")]
    DuplicateRound { round: usize, files: Vec<PathBuf> },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    InFile { path: PathBuf, source: Box<IngestError> },
    #[error("endpoint error: {0}")]
    Endpoint(String),
    #[error("no valid document after {attempts} attempts; last error: {last}")]
    ExtractionInvalid { attempts: usize, last: GrammarError },
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::BadRecord(_) => "BAD_RECORD",
            IngestError::Grammar { source, .. } => source.code(),
            IngestError::MissingRound(_) => "MISSING_ROUND",
            IngestError::DuplicateRound { .. } => "DUPLICATE_ROUND",
            IngestError::Io { .. } => "IO_ERROR",
            IngestError::InFile { source, .. } => source.code(),
            IngestError::Endpoint(_) => "ENDPOINT_ERROR",
            IngestError::ExtractionInvalid { .. } => "EXTRACTION_INVALID",
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        IngestError::Io { path: path.to_path_buf(), message: e.to_string() }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        IngestError::InFile { path: path.to_path_buf(), source: Box::new(self) }
    }
}
