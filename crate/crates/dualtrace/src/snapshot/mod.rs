//! Text-logging strategies: whole-text diff snapshots with reconstruction,
//! the dynamic-snapshot-window stepper, and full-document replay.

mod diff;
mod dsw;
mod reconstruct;

pub use diff::{apply_delta, diff, DiffDelta, DiffOp};
pub use dsw::{compute_offset, dsw_step, DswStepInput, StepContext};
pub use reconstruct::{
    browser_snapshot, initial_snapshot, reconstruct, reconstruct_states, TextState,
};
