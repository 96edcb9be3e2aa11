//! The dynamic-snapshot-window stepper.
//!
//! One call per logging pass: tune the window around the activity since the
//! last pass, capture the windowed text if there is anything to record, and
//! return the window primed for the next pass.

use crate::document::Document;
use crate::error::SnapshotError;
use crate::trace::{Dsw, SnapshotSource, TextSnapshot, Timestamp};

/// Editor state sampled at a pass boundary.
#[derive(Debug, Clone, Copy)]
pub struct DswStepInput {
    /// Window as left by the previous pass.
    pub dsw: Dsw,
    /// Current cursor position.
    pub c_pos: usize,
    /// Selection anchor; equals `c_pos` when nothing is selected.
    pub selection_start: usize,
    /// BACKSPACE presses since the last snapshot.
    pub back_counter: u64,
    /// CANC presses since the last snapshot.
    pub canc_counter: u64,
    /// Current document length in symbols.
    pub doc_length: usize,
}

/// Logger-side context the stepper needs beyond the sampled editor state.
#[derive(Debug, Clone, Copy)]
pub struct StepContext {
    pub pass_id: u64,
    pub t: Timestamp,
    /// Document length at the previous snapshot, for the offset.
    pub prev_doc_length: usize,
}

/// Net signed document length change since the previous snapshot. CANC
/// deletions and net shrinkage yield negative values, net insertion
/// positive ones; the CANC count itself is already reflected in the length.
pub fn compute_offset(_canc_counter: u64, doc_length: usize, prev_doc_length: usize) -> i64 {
    doc_length as i64 - prev_doc_length as i64
}

/// Tune the window, optionally capture a snapshot, and prime the window for
/// the next pass.
pub fn dsw_step(
    input: &DswStepInput,
    doc: &Document,
    ctx: &StepContext,
) -> Result<(Option<TextSnapshot>, Dsw), SnapshotError> {
    if doc.len() != input.doc_length {
        return Err(SnapshotError::DocLengthMismatch {
            declared: input.doc_length,
            actual: doc.len(),
        });
    }

    // Tune the window. The left bound chases the selection anchor, then the
    // backspace reach, then the cursor; it is never negative.
    let mut left = input.dsw.left.min(input.selection_start) as i64;
    left = (left - input.back_counter as i64).min(input.c_pos as i64);
    let left = left.max(0) as usize;
    let right = input.dsw.right.max(input.c_pos);

    let snapshot = if left == right && input.back_counter == 0 && input.canc_counter == 0 {
        None
    } else {
        let text = doc.slice_clamped(left, right)?;
        let captured_right = left + text.chars().count();
        Some(TextSnapshot {
            pass_id: ctx.pass_id,
            text,
            dsw: Dsw::new(left, captured_right),
            offset: compute_offset(input.canc_counter, input.doc_length, ctx.prev_doc_length),
            t: ctx.t,
            source: SnapshotSource::Editor,
            delta: None,
        })
    };

    let next = Dsw::new(input.c_pos.min(input.selection_start), input.c_pos);
    Ok((snapshot, next))
}
