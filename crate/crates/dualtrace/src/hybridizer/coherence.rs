//! Pass one: mark each keystroke as coherent or incoherent against the
//! reconstructed text states.

use crate::snapshot::TextState;
use crate::trace::{Key, KeyEvent, KeyKind, Timestamp};

/// A maximal run of consecutive events with one coherence value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoherenceWindow {
    pub start_id: u64,
    pub end_id: u64,
    pub coherent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncoherenceCause {
    /// The typed symbol (or expected edit) is not where the log says.
    Mismatch,
    /// No text event at or after the keypress to check against.
    NoTextWindow,
}

#[derive(Debug, Clone)]
pub struct EventCheck {
    pub id: u64,
    pub coherent: bool,
    pub cause: Option<IncoherenceCause>,
}

/// Reconstructed states indexed for timestamp pairing.
pub struct StateIndex {
    states: Vec<(Timestamp, Vec<char>)>,
}

impl StateIndex {
    pub fn new(states: &[TextState]) -> Self {
        Self { states: states.iter().map(|s| (s.t, s.text.chars().collect())).collect() }
    }

    /// State of the text event whose timestamp immediately follows `t`.
    pub fn state_after(&self, t: Timestamp) -> Option<&[char]> {
        self.states.iter().find(|(st, _)| *st > t).map(|(_, text)| text.as_slice())
    }

    /// State in effect at `t`: the last text event not after it.
    pub fn state_at(&self, t: Timestamp) -> Option<&[char]> {
        self.states.iter().rev().find(|(st, _)| *st <= t).map(|(_, text)| text.as_slice())
    }
}

/// Check every event. Keydowns are compared against the first text state
/// following them; keyups carry no symbol and are vacuously coherent.
pub fn check_events(keys: &[KeyEvent], states: &StateIndex) -> Vec<EventCheck> {
    keys.iter()
        .map(|ev| {
            if ev.kind == KeyKind::Up {
                return EventCheck { id: ev.id, coherent: true, cause: None };
            }
            let (coherent, cause) = check_keydown(ev, states);
            EventCheck { id: ev.id, coherent, cause }
        })
        .collect()
}

fn check_keydown(ev: &KeyEvent, states: &StateIndex) -> (bool, Option<IncoherenceCause>) {
    match &ev.key {
        Key::Other(_) => (true, None),
        Key::Backspace | Key::Canc => {
            let Some(before) = states.state_at(ev.t) else {
                return (false, Some(IncoherenceCause::NoTextWindow));
            };
            let Some(after) = states.state_after(ev.t) else {
                return (false, Some(IncoherenceCause::NoTextWindow));
            };
            let expected = expected_deletion(before, ev);
            if expected == after {
                (true, None)
            } else {
                (false, Some(IncoherenceCause::Mismatch))
            }
        }
        key => {
            let symbol = key.typed_symbol().expect("printable key");
            let Some(after) = states.state_after(ev.t) else {
                return (false, Some(IncoherenceCause::NoTextWindow));
            };
            if after.get(ev.position) == Some(&symbol) {
                (true, None)
            } else {
                (false, Some(IncoherenceCause::Mismatch))
            }
        }
    }
}

fn expected_deletion(before: &[char], ev: &KeyEvent) -> Vec<char> {
    let mut expected = before.to_vec();
    match ev.key {
        Key::Backspace if ev.position > 0 && ev.position <= expected.len() => {
            expected.remove(ev.position - 1);
        }
        Key::Canc if ev.position < expected.len() => {
            expected.remove(ev.position);
        }
        _ => {}
    }
    expected
}

/// Merge per-event checks into maximal windows tiling the id range.
pub fn windows_from_checks(checks: &[EventCheck]) -> Vec<CoherenceWindow> {
    let mut windows: Vec<CoherenceWindow> = Vec::new();
    for check in checks {
        match windows.last_mut() {
            Some(w) if w.coherent == check.coherent && w.end_id + 1 == check.id => {
                w.end_id = check.id;
            }
            _ => windows.push(CoherenceWindow {
                start_id: check.id,
                end_id: check.id,
                coherent: check.coherent,
            }),
        }
    }
    windows
}

/// Coherence windows over a keystroke log and the
/// reconstructed per-pass states.
pub fn check_coherence(keys: &[KeyEvent], states: &[TextState]) -> Vec<CoherenceWindow> {
    let index = StateIndex::new(states);
    windows_from_checks(&check_events(keys, &index))
}
