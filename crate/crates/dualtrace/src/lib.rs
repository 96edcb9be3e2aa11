//! Offline alignment of keystroke logs with rendered-text snapshot logs,
//! and fine-grained timing analysis of the merged dual trace.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! - [`simulator`]: deterministically replays scripted editing sessions
//!   through a simulated editor and pinyin input method, emitting a
//!   keystroke log, a windowed text-snapshot log, and exact ground truth.
//! - [`snapshot`]: the two text-logging strategies (whole-text diffs and
//!   the dynamic snapshot window) plus full-document reconstruction.
//! - [`hybridizer`]: aligns the two logs into a dual trace via coherence
//!   checking, rule matching and solving.
//! - [`analyzer`]: segmentation trees and temporal metrics over the dual
//!   trace: five pinyin interval categories, alphabetic within/between-word
//!   intervals, dwell/flight/rollover decomposition, outlier filtering and
//!   summary statistics.

pub mod analyzer;
pub mod cli;
pub mod document;
pub mod error;
pub mod hybridizer;
pub mod ime;
pub mod rng;
pub mod simulator;
pub mod snapshot;
pub mod trace;

pub use document::Document;
pub use trace::{
    AlignmentStatus, DualTraceEvent, Dsw, ImeAnnotation, Key, KeyEvent, KeyKind, RuleName,
    SnapshotSource, TextSnapshot, Timestamp,
};
