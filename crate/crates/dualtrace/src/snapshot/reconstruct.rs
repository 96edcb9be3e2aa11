//! Full-document replay from a snapshot log.

use crate::document::Document;
use crate::error::SnapshotError;
use crate::snapshot::diff::{apply_delta, diff};
use crate::trace::{Dsw, SnapshotSource, TextSnapshot, Timestamp};

/// Document state after one logged pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TextState {
    pub pass_id: u64,
    pub t: Timestamp,
    pub text: String,
}

/// Replay a snapshot log into the document state after each logged pass.
///
/// Editor snapshots splice their window text over the prior-state range
/// `[left, left + len(text) - offset)`: the offset recovers the pre-edit
/// extent of the window. Browser snapshots replay their edit script.
pub fn reconstruct_states(snapshots: &[TextSnapshot]) -> Result<Vec<TextState>, SnapshotError> {
    let first = snapshots.first().ok_or(SnapshotError::MissingInitialPass)?;
    if first.pass_id != 0 {
        return Err(SnapshotError::MissingInitialPass);
    }

    let mut states = Vec::with_capacity(snapshots.len());
    let mut doc = Document::from_text(&first.text);
    states.push(TextState { pass_id: first.pass_id, t: first.t, text: doc.to_string() });

    for snap in &snapshots[1..] {
        match snap.source {
            SnapshotSource::Editor => splice_window(&mut doc, snap)?,
            SnapshotSource::Browser => {
                let delta = snap
                    .delta
                    .as_ref()
                    .ok_or(SnapshotError::MissingDelta { pass: snap.pass_id })?;
                let next = apply_delta(&doc.to_string(), delta).map_err(|_| {
                    SnapshotError::SpliceOutOfBounds {
                        pass: snap.pass_id,
                        left: 0,
                        right: 0,
                        len: doc.len(),
                    }
                })?;
                doc = Document::from_text(&next);
            }
        }
        states.push(TextState { pass_id: snap.pass_id, t: snap.t, text: doc.to_string() });
    }
    Ok(states)
}

/// Pass ids paired with the full document text after each logged pass.
pub fn reconstruct(snapshots: &[TextSnapshot]) -> Result<Vec<(u64, String)>, SnapshotError> {
    Ok(reconstruct_states(snapshots)?.into_iter().map(|s| (s.pass_id, s.text)).collect())
}

fn splice_window(doc: &mut Document, snap: &TextSnapshot) -> Result<(), SnapshotError> {
    let window_len = snap.text.chars().count() as i64;
    let prior_extent = window_len - snap.offset;
    let left = snap.dsw.left;
    let right_i = left as i64 + prior_extent;
    if prior_extent < 0 || right_i < left as i64 || right_i > doc.len() as i64 {
        return Err(SnapshotError::SpliceOutOfBounds {
            pass: snap.pass_id,
            left,
            right: right_i.max(0) as usize,
            len: doc.len(),
        });
    }
    doc.replace(left, right_i as usize, &snap.text)
        .map_err(|_| SnapshotError::SpliceOutOfBounds {
            pass: snap.pass_id,
            left,
            right: right_i as usize,
            len: doc.len(),
        })
}

/// Build the initial (pass 0) record carrying the full text.
pub fn initial_snapshot(text: &str, t: Timestamp, source: SnapshotSource) -> TextSnapshot {
    TextSnapshot {
        pass_id: 0,
        text: text.to_string(),
        dsw: Dsw::new(0, text.chars().count()),
        offset: 0,
        t,
        source,
        delta: None,
    }
}

/// Build a browser-style diff record for one pass: the whole-text strategy
/// that stores only the difference between consecutive versions.
pub fn browser_snapshot(
    pass_id: u64,
    prev_text: &str,
    cur_text: &str,
    t: Timestamp,
) -> TextSnapshot {
    let delta = diff(cur_text, prev_text);
    let prev: Vec<char> = prev_text.chars().collect();
    let cur: Vec<char> = cur_text.chars().collect();
    let prefix = prev.iter().zip(cur.iter()).take_while(|(a, b)| a == b).count();
    let mut suffix = 0;
    while suffix < prev.len().min(cur.len()) - prefix.min(prev.len().min(cur.len()))
        && prev[prev.len() - 1 - suffix] == cur[cur.len() - 1 - suffix]
    {
        suffix += 1;
    }
    TextSnapshot {
        pass_id,
        text: String::new(),
        dsw: Dsw::new(prefix.min(cur.len() - suffix), cur.len() - suffix),
        offset: cur.len() as i64 - prev.len() as i64,
        t,
        source: SnapshotSource::Browser,
        delta: Some(delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::SnapshotSource::Editor;

    fn editor_snap(pass_id: u64, text: &str, left: usize, offset: i64, t: u64) -> TextSnapshot {
        TextSnapshot {
            pass_id,
            text: text.to_string(),
            dsw: Dsw::new(left, left + text.chars().count()),
            offset,
            t: Timestamp(t),
            source: Editor,
            delta: None,
        }
    }

    #[test]
    fn initial_pass_alone_reproduces_initial_text() {
        let log = vec![initial_snapshot("A joirney o", Timestamp(0), Editor)];
        let out = reconstruct(&log).unwrap();
        assert_eq!(out, vec![(0, "A joirney o".to_string())]);
    }

    #[test]
    fn window_replacement_recovers_pre_edit_extent_from_offset() {
        // "journey " (8 symbols) replaced by "travel " (7): offset -1.
        let log = vec![
            initial_snapshot("A journey of a t", Timestamp(0), Editor),
            editor_snap(6, "travel ", 2, -1, 100),
        ];
        let out = reconstruct(&log).unwrap();
        assert_eq!(out[1].1, "A travel of a t");
    }

    #[test]
    fn splice_outside_prior_bounds_names_the_pass() {
        let log = vec![
            initial_snapshot("ab", Timestamp(0), Editor),
            editor_snap(3, "xyz", 1, -4, 100),
        ];
        match reconstruct(&log) {
            Err(SnapshotError::SpliceOutOfBounds { pass, .. }) => assert_eq!(pass, 3),
            other => panic!("expected splice error, got {other:?}"),
        }
    }

    #[test]
    fn missing_initial_pass_is_rejected() {
        let log = vec![editor_snap(1, "x", 0, 1, 100)];
        assert!(matches!(reconstruct(&log), Err(SnapshotError::MissingInitialPass)));
    }

    #[test]
    fn browser_log_replays_through_deltas() {
        let versions = ["", "hallo", "hello", "hello world", "held"];
        let mut log = vec![initial_snapshot(versions[0], Timestamp(0), SnapshotSource::Browser)];
        for (i, pair) in versions.windows(2).enumerate() {
            log.push(browser_snapshot(i as u64 + 1, pair[0], pair[1], Timestamp(100 * (i as u64 + 1))));
        }
        let out = reconstruct(&log).unwrap();
        let texts: Vec<&str> = out.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(texts, versions);
    }
}
