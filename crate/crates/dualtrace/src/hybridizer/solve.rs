//! Pass three: rewrite the key log into the dual trace, applying the
//! corrections found for each incoherent window.

use std::collections::BTreeMap;

use crate::document::Document;
use crate::error::HybridizeError;
use crate::hybridizer::coherence::CoherenceWindow;
use crate::hybridizer::rules::{RuleMatch, RulePayload};
use crate::trace::{
    AlignmentStatus, DualTraceEvent, ImeAnnotation, Key, KeyEvent, KeyKind, RuleName,
};

enum Correction {
    ShiftRight { separator_index: usize },
    TwoSymbolDeletion,
    Rendered(char),
    Ime(ImeAnnotation),
}

/// Apply rule matches over the key log. The solver annotates and
/// re-positions events but never inserts or drops any.
pub fn solve(
    keys: &[KeyEvent],
    windows: &[CoherenceWindow],
    matches: &[RuleMatch],
) -> Result<Vec<DualTraceEvent>, HybridizeError> {
    let mut corrections: BTreeMap<u64, (RuleName, Correction, (u64, u64))> = BTreeMap::new();
    let mut conflicts: Vec<(u64, u64)> = Vec::new();

    for m in matches {
        let span = (m.window.start_id, m.window.end_id);
        let mut insert = |id: u64, rule: RuleName, c: Correction| {
            if let Some((_, _, prev_span)) = corrections.get(&id) {
                conflicts.push(*prev_span);
                conflicts.push(span);
            } else {
                corrections.insert(id, (rule, c, span));
            }
        };
        match &m.payload {
            RulePayload::SyllabicDivision { displaced } => {
                for (id, sep) in displaced {
                    insert(*id, m.rule, Correction::ShiftRight { separator_index: *sep });
                }
            }
            RulePayload::SeparatorDeletion { event_id, .. } => {
                insert(*event_id, m.rule, Correction::TwoSymbolDeletion);
            }
            RulePayload::ChinesePunctuation { event_id, rendered, .. } => {
                insert(*event_id, m.rule, Correction::Rendered(*rendered));
            }
            RulePayload::ImeConfirmation { event_id, text, pinyin, start, end } => {
                insert(
                    *event_id,
                    m.rule,
                    Correction::Ime(ImeAnnotation {
                        text: text.clone(),
                        pinyin: pinyin.clone(),
                        start: *start,
                        end: *end,
                    }),
                );
            }
        }
    }
    if !conflicts.is_empty() {
        conflicts.sort_unstable();
        conflicts.dedup();
        return Err(HybridizeError::ConflictingCorrections { window_ids: conflicts });
    }

    let incoherent_ids: std::collections::BTreeSet<u64> = windows
        .iter()
        .filter(|w| !w.coherent)
        .flat_map(|w| w.start_id..=w.end_id)
        .collect();

    let trace = keys
        .iter()
        .map(|ev| {
            if ev.kind == KeyKind::Up {
                return DualTraceEvent::coherent(ev.clone());
            }
            match corrections.get(&ev.id) {
                Some((rule, correction, _)) => {
                    let mut out = DualTraceEvent {
                        base: ev.clone(),
                        status: AlignmentStatus::Resolved(*rule),
                        ime: None,
                        rendered: None,
                    };
                    match correction {
                        Correction::ShiftRight { separator_index } => {
                            out.base.position = separator_index + 1;
                        }
                        Correction::TwoSymbolDeletion => {}
                        Correction::Rendered(c) => out.rendered = Some(*c),
                        Correction::Ime(annotation) => out.ime = Some(annotation.clone()),
                    }
                    out
                }
                None if incoherent_ids.contains(&ev.id) => DualTraceEvent::unresolved(ev.clone()),
                None => DualTraceEvent::coherent(ev.clone()),
            }
        })
        .collect();
    Ok(trace)
}

/// Replay a dual trace's typed symbols at their corrected positions into a
/// fresh document. Verification helper for position-shift soundness; it
/// presumes a selection-free session and fails on unresolved events.
pub fn replay_dual_trace(events: &[DualTraceEvent]) -> Result<String, HybridizeError> {
    let mut doc = Document::new();
    for ev in events.iter().filter(|e| e.base.kind == KeyKind::Down) {
        let pos = ev.base.position;
        let oob = |stage: &str| HybridizeError::MismatchedLogs {
            msg: format!("replay: event {} {} out of bounds", ev.base.id, stage),
        };
        match (&ev.status, &ev.base.key) {
            (AlignmentStatus::Unresolved, _) => {
                return Err(HybridizeError::MismatchedLogs {
                    msg: format!("replay: event {} is unresolved", ev.base.id),
                });
            }
            (AlignmentStatus::Resolved(RuleName::ImeConfirmation), _) => {
                let ime = ev.ime.as_ref().expect("confirmation annotation");
                let pinyin_len = ime.pinyin.chars().count();
                doc.replace(ime.start, ime.start + pinyin_len, &ime.text)
                    .map_err(|_| oob("confirmation"))?;
            }
            (AlignmentStatus::Resolved(RuleName::SyllabicDivision), key) => {
                let letter = key.typed_symbol().ok_or_else(|| oob("letter"))?;
                let mut text = String::from(crate::ime::SEPARATOR);
                text.push(letter);
                doc.insert(pos - 1, &text).map_err(|_| oob("separator"))?;
            }
            (AlignmentStatus::Resolved(RuleName::SeparatorDeletion), _) => {
                doc.delete(pos - 2, pos).map_err(|_| oob("deletion"))?;
            }
            (AlignmentStatus::Resolved(RuleName::ChinesePunctuation), _) => {
                let mark = ev.rendered.expect("punctuation annotation");
                doc.insert(pos, &mark.to_string()).map_err(|_| oob("punctuation"))?;
            }
            (AlignmentStatus::Coherent, Key::Backspace) => {
                if pos > 0 {
                    doc.delete(pos - 1, pos).map_err(|_| oob("backspace"))?;
                }
            }
            (AlignmentStatus::Coherent, Key::Canc) => {
                if pos < doc.len() {
                    doc.delete(pos, pos + 1).map_err(|_| oob("canc"))?;
                }
            }
            (AlignmentStatus::Coherent, Key::Other(label)) => {
                doc.insert(pos, label).map_err(|_| oob("label"))?;
            }
            (AlignmentStatus::Coherent, key) => {
                let symbol = key.typed_symbol().expect("printable");
                doc.insert(pos, &symbol.to_string()).map_err(|_| oob("symbol"))?;
            }
        }
    }
    Ok(doc.to_string())
}
