//! Aligns a keystroke log with reconstructed text states through three
//! passes — coherence checker, solution finder, solver — producing the
//! dual trace.

mod coherence;
mod rules;
mod solve;

pub use coherence::{
    check_coherence, check_events, windows_from_checks, CoherenceWindow, EventCheck,
    IncoherenceCause, StateIndex,
};
pub use rules::{default_rules, find_solutions, KeyIndex, Rule, RuleMatch, RulePayload, TripleContext};
pub use solve::{replay_dual_trace, solve};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::HybridizeError;
use crate::ime::PunctuationMap;
use crate::snapshot::reconstruct_states;
use crate::trace::{AlignmentStatus, DualTraceEvent, KeyEvent, KeyKind, TextSnapshot};

/// Counts of coherent/resolved/unresolved keydowns, for the diagnostics
/// report.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub events: usize,
    pub keydowns: usize,
    pub coherent: usize,
    pub resolved: BTreeMap<String, usize>,
    pub unresolved: usize,
}

impl Diagnostics {
    pub fn from_trace(trace: &[DualTraceEvent]) -> Self {
        let mut d = Diagnostics { events: trace.len(), ..Default::default() };
        for ev in trace.iter().filter(|e| e.base.kind == KeyKind::Down) {
            d.keydowns += 1;
            match &ev.status {
                AlignmentStatus::Coherent => d.coherent += 1,
                AlignmentStatus::Resolved(rule) => {
                    *d.resolved.entry(rule.as_str().to_string()).or_insert(0) += 1;
                }
                AlignmentStatus::Unresolved => d.unresolved += 1,
            }
        }
        d
    }

    pub fn resolved_total(&self) -> usize {
        self.resolved.values().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagnostics serialize")
    }
}

/// Full pipeline: reconstruct text states, check coherence, match rules,
/// solve. Fails if the text log does not temporally cover the key log.
pub fn hybridize(
    keys: &[KeyEvent],
    snapshots: &[TextSnapshot],
) -> Result<(Vec<DualTraceEvent>, Diagnostics), HybridizeError> {
    hybridize_with(keys, snapshots, PunctuationMap::default())
}

pub fn hybridize_with(
    keys: &[KeyEvent],
    snapshots: &[TextSnapshot],
    punctuation: PunctuationMap,
) -> Result<(Vec<DualTraceEvent>, Diagnostics), HybridizeError> {
    if keys.is_empty() {
        return Ok((Vec::new(), Diagnostics::default()));
    }
    let states = reconstruct_states(snapshots)?;
    // Document edits happen at keydowns; the text log must extend past the
    // last of them or the sessions do not match. Trailing keyups are fine.
    let last_down_t = keys.iter().filter(|e| e.kind == KeyKind::Down).map(|e| e.t).max();
    let last_text_t = states.last().expect("pass 0 present").t;
    if let Some(last_down_t) = last_down_t {
        if last_text_t <= last_down_t {
            return Err(HybridizeError::MismatchedLogs {
                msg: format!(
                    "text log ends at {} ms, before the last keypress at {} ms",
                    last_text_t.millis(),
                    last_down_t.millis()
                ),
            });
        }
    }

    let index = StateIndex::new(&states);
    let checks = check_events(keys, &index);
    let windows = windows_from_checks(&checks);
    let matches = find_solutions(&windows, keys, &index, &default_rules(punctuation));
    let trace = solve(keys, &windows, &matches)?;
    let diagnostics = Diagnostics::from_trace(&trace);
    Ok((trace, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{
        run_session, type_keys, EditorAction, ImeChoice, Layout, Lexicon, SessionConfig,
        FIXTURE_LEXICON,
    };
    use crate::trace::Key;

    #[test]
    fn empty_logs_give_empty_trace() {
        let snapshots =
            vec![crate::snapshot::initial_snapshot("", crate::trace::Timestamp(0), crate::trace::SnapshotSource::Editor)];
        let (trace, diag) = hybridize(&[], &snapshots).unwrap();
        assert!(trace.is_empty());
        assert_eq!(diag.keydowns, 0);
    }

    #[test]
    fn pure_latin_session_is_fully_coherent() {
        let mut actions = type_keys("plain text here", 60, 90);
        actions.push(EditorAction::Pass);
        let out =
            run_session(&actions, &Lexicon::default(), &SessionConfig::default()).unwrap();
        let (trace, diag) = hybridize(&out.key_log, &out.text_log).unwrap();
        assert_eq!(diag.unresolved, 0);
        assert_eq!(diag.resolved_total(), 0);
        assert_eq!(diag.coherent, diag.keydowns);
        assert!(trace.iter().all(|e| e.status == AlignmentStatus::Coherent));
    }

    #[test]
    fn text_log_shorter_than_key_activity_is_mismatched() {
        let mut actions = type_keys("abc", 60, 90);
        actions.push(EditorAction::Pass);
        let out =
            run_session(&actions, &Lexicon::default(), &SessionConfig::default()).unwrap();
        let truncated = vec![out.text_log[0].clone()];
        let err = hybridize(&out.key_log, &truncated).unwrap_err();
        assert!(matches!(err, HybridizeError::MismatchedLogs { .. }), "{err}");
    }

    #[test]
    fn ime_session_resolves_all_incoherences() {
        let lexicon = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        let mut actions = Vec::new();
        for c in "dianretan".chars() {
            actions.push(EditorAction::TypeKey { key: Key::Char(c), dwell_ms: 60, gap_ms: 120 });
            actions.push(EditorAction::Pass);
        }
        actions.push(EditorAction::ImeConfirm {
            choice: ImeChoice::Spacebar,
            dwell_ms: 60,
            gap_ms: 300,
        });
        actions.push(EditorAction::Pass);
        let config = SessionConfig { layout: Layout::Pinyin, ..SessionConfig::default() };
        let out = run_session(&actions, &lexicon, &config).unwrap();
        let (trace, diag) = hybridize(&out.key_log, &out.text_log).unwrap();
        assert_eq!(diag.unresolved, 0);
        assert_eq!(diag.resolved.get("syllabic_division"), Some(&2));
        assert_eq!(diag.resolved.get("ime_confirmation"), Some(&1));
        let conf = trace.iter().find(|e| e.is_confirmation()).unwrap();
        let ime = conf.ime.as_ref().unwrap();
        assert_eq!(ime.text, "电热毯");
        assert_eq!(ime.pinyin, "dian're'tan");

        // Replaying corrected positions reproduces the final text.
        assert_eq!(replay_dual_trace(&trace).unwrap(), out.truth.final_text);
    }

    #[test]
    fn window_tiling_partitions_the_whole_range() {
        let lexicon = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        let actions = crate::simulator::random_ime_script(11, &lexicon);
        let config = SessionConfig { layout: Layout::Pinyin, ..SessionConfig::default() };
        let out = run_session(&actions, &lexicon, &config).unwrap();
        let states = reconstruct_states(&out.text_log).unwrap();
        let windows = check_coherence(&out.key_log, &states);
        assert_eq!(windows.first().unwrap().start_id, out.key_log.first().unwrap().id);
        assert_eq!(windows.last().unwrap().end_id, out.key_log.last().unwrap().id);
        for pair in windows.windows(2) {
            assert_eq!(pair[0].end_id + 1, pair[1].start_id, "gap or overlap");
        }
    }
}
