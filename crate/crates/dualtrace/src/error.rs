//! Error types shared across the pipeline stages.

use thiserror::Error;

/// Errors raised while parsing or validating a log stream.
#[derive(Debug, Error)]
pub enum LogError {
    /// A record could not be decoded at all.
    #[error("malformed record at line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    /// A record decoded but violates the schema (field-level constraint).
    #[error("schema violation at line {line}: {msg}")]
    Schema { line: usize, msg: String },

    /// The stream as a whole is inconsistent (ordering, missing records).
    #[error("log integrity error: {msg}")]
    Integrity { msg: String },

    #[error("log I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("range [{left}, {right}) out of bounds for document of length {len}")]
    OutOfBounds { left: usize, right: usize, len: usize },
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    /// An edit script's keep/delete spans do not cover the source text.
    #[error("delta consumed {consumed} of {available} source symbols")]
    DeltaSpanMismatch { consumed: usize, available: usize },

    /// Splicing a window snapshot outside the prior document state.
    #[error("pass {pass}: splice [{left}, {right}) outside prior document of length {len}")]
    SpliceOutOfBounds { pass: u64, left: usize, right: usize, len: usize },

    /// Snapshot replay requires pass 0 first.
    #[error("snapshot log does not start with pass 0")]
    MissingInitialPass,

    /// A browser-source record past pass 0 is missing its edit script.
    #[error("pass {pass}: browser snapshot carries no delta")]
    MissingDelta { pass: u64 },

    #[error("dsw step: document length {actual} does not match declared length {declared}")]
    DocLengthMismatch { declared: usize, actual: usize },

    #[error("dsw step: {0}")]
    DocAccess(#[from] DocError),
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("malformed script at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An action cannot be applied to the current editor state.
    #[error("action {index} invalid: {msg}")]
    InvalidAction { index: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum HybridizeError {
    /// Two corrections target the same key events.
    #[error("conflicting corrections for windows {window_ids:?}")]
    ConflictingCorrections { window_ids: Vec<(u64, u64)> },

    /// The text log does not temporally cover the key log.
    #[error("mismatched session logs: {msg}")]
    MismatchedLogs { msg: String },

    #[error(transparent)]
    Snapshot(#[from] SnapshotError),

    #[error(transparent)]
    Log(#[from] LogError),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("pinyin format error: {msg}")]
    PinyinFormat { msg: String },

    /// Letters recovered from the trace do not spell the recorded pinyin.
    #[error("timestamp propagation failed for \"{pinyin}\": {msg}")]
    Propagation { pinyin: String, msg: String },

    /// A segmenter broke its contract.
    #[error("segmentation of \"{text}\" violated the segmenter contract: {msg}")]
    Segmentation { text: String, msg: String },

    /// Word/character/syllable counts do not line up.
    #[error("segmentation tree for \"{text}\": {msg}")]
    Tree { text: String, msg: String },
}
