//! Pass two: match each incoherent window against the known root causes.
//!
//! Rules are an ordered registry; the first match for a window is kept.
//! Each rule sees the incoherent window packaged with its flanking
//! coherent windows.

use crate::hybridizer::coherence::{CoherenceWindow, StateIndex};
use crate::ime::{PunctuationMap, SEPARATOR};
use crate::trace::{Key, KeyEvent, KeyKind, RuleName};

/// An incoherent window with its flanking coherent windows, when present.
#[derive(Debug, Clone, Copy)]
pub struct TripleContext<'a> {
    pub before: Option<&'a CoherenceWindow>,
    pub window: &'a CoherenceWindow,
    pub after: Option<&'a CoherenceWindow>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RulePayload {
    /// Letters displaced by an inserted separator: (event id, separator
    /// index). The letter actually landed one position further right.
    SyllabicDivision { displaced: Vec<(u64, usize)> },
    /// One BACKSPACE that removed the letter and the separator before it.
    SeparatorDeletion { event_id: u64, separator_index: usize },
    /// Latin punctuation rendered as its Chinese counterpart.
    ChinesePunctuation { event_id: u64, latin: char, rendered: char },
    /// Candidate confirmation replacing the transcription.
    ImeConfirmation { event_id: u64, text: String, pinyin: String, start: usize, end: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub window: CoherenceWindow,
    pub rule: RuleName,
    pub payload: RulePayload,
}

/// Dense-id lookup over the key log.
pub struct KeyIndex<'a> {
    events: &'a [KeyEvent],
    first_id: u64,
}

impl<'a> KeyIndex<'a> {
    pub fn new(events: &'a [KeyEvent]) -> Self {
        Self { events, first_id: events.first().map(|e| e.id).unwrap_or(0) }
    }

    pub fn get(&self, id: u64) -> Option<&'a KeyEvent> {
        self.events.get((id - self.first_id) as usize)
    }

    /// Keydown events of a window, in id order.
    pub fn keydowns(&self, window: &CoherenceWindow) -> Vec<&'a KeyEvent> {
        (window.start_id..=window.end_id)
            .filter_map(|id| self.get(id))
            .filter(|e| e.kind == KeyKind::Down)
            .collect()
    }
}

pub trait Rule {
    fn name(&self) -> RuleName;
    fn matches(
        &self,
        ctx: &TripleContext<'_>,
        keys: &KeyIndex<'_>,
        states: &StateIndex,
    ) -> Option<RulePayload>;
}

/// The rule registry in evaluation order.
pub fn default_rules(punctuation: PunctuationMap) -> Vec<Box<dyn Rule>> {
    vec![
        Box::new(SyllabicDivisionRule),
        Box::new(SeparatorDeletionRule),
        Box::new(ChinesePunctuationRule { punctuation }),
        Box::new(ImeConfirmationRule),
    ]
}

/// Try each incoherent window against the rules in order; first match wins.
/// Windows matching no rule stay unmatched.
pub fn find_solutions(
    windows: &[CoherenceWindow],
    keys: &[KeyEvent],
    states: &StateIndex,
    rules: &[Box<dyn Rule>],
) -> Vec<RuleMatch> {
    let index = KeyIndex::new(keys);
    let mut matches = Vec::new();
    for (i, window) in windows.iter().enumerate() {
        if window.coherent {
            continue;
        }
        let before = i.checked_sub(1).map(|j| &windows[j]).filter(|w| w.coherent);
        let after = windows.get(i + 1).filter(|w| w.coherent);
        let ctx = TripleContext { before, window, after };
        for rule in rules {
            if let Some(payload) = rule.matches(&ctx, &index, states) {
                matches.push(RuleMatch { window: *window, rule: rule.name(), payload });
                break;
            }
        }
    }
    matches
}

struct SyllabicDivisionRule;

impl Rule for SyllabicDivisionRule {
    fn name(&self) -> RuleName {
        RuleName::SyllabicDivision
    }

    fn matches(
        &self,
        ctx: &TripleContext<'_>,
        keys: &KeyIndex<'_>,
        states: &StateIndex,
    ) -> Option<RulePayload> {
        let downs = keys.keydowns(ctx.window);
        if downs.is_empty() {
            return None;
        }
        let mut displaced = Vec::new();
        for ev in downs {
            if !ev.key.is_latin_letter() {
                return None;
            }
            let letter = ev.key.typed_symbol().expect("letter");
            let after = states.state_after(ev.t)?;
            // The letter sits immediately after a separator, one past where
            // the log expected it.
            if after.get(ev.position) == Some(&SEPARATOR)
                && after.get(ev.position + 1) == Some(&letter)
            {
                displaced.push((ev.id, ev.position));
            } else {
                return None;
            }
        }
        Some(RulePayload::SyllabicDivision { displaced })
    }
}

struct SeparatorDeletionRule;

impl Rule for SeparatorDeletionRule {
    fn name(&self) -> RuleName {
        RuleName::SeparatorDeletion
    }

    fn matches(
        &self,
        ctx: &TripleContext<'_>,
        keys: &KeyIndex<'_>,
        states: &StateIndex,
    ) -> Option<RulePayload> {
        let downs = keys.keydowns(ctx.window);
        let [ev] = downs[..] else { return None };
        if ev.key != Key::Backspace || ev.position < 2 {
            return None;
        }
        let before = states.state_at(ev.t)?;
        let after = states.state_after(ev.t)?;
        // The transcription lost two symbols, and a separator immediately
        // preceded the deleted character.
        if before.get(ev.position - 2) != Some(&SEPARATOR) {
            return None;
        }
        if before.len() != after.len() + 2 || ev.position > before.len() {
            return None;
        }
        let mut expected = before.to_vec();
        expected.drain(ev.position - 2..ev.position);
        if expected == after {
            Some(RulePayload::SeparatorDeletion {
                event_id: ev.id,
                separator_index: ev.position - 2,
            })
        } else {
            None
        }
    }
}

struct ChinesePunctuationRule {
    punctuation: PunctuationMap,
}

impl Rule for ChinesePunctuationRule {
    fn name(&self) -> RuleName {
        RuleName::ChinesePunctuation
    }

    fn matches(
        &self,
        ctx: &TripleContext<'_>,
        keys: &KeyIndex<'_>,
        states: &StateIndex,
    ) -> Option<RulePayload> {
        let downs = keys.keydowns(ctx.window);
        let [ev] = downs[..] else { return None };
        let Key::Char(latin) = ev.key else { return None };
        let rendered = self.punctuation.convert(latin)?;
        let after = states.state_after(ev.t)?;
        if after.get(ev.position) == Some(&rendered) {
            Some(RulePayload::ChinesePunctuation { event_id: ev.id, latin, rendered })
        } else {
            None
        }
    }
}

struct ImeConfirmationRule;

impl Rule for ImeConfirmationRule {
    fn name(&self) -> RuleName {
        RuleName::ImeConfirmation
    }

    fn matches(
        &self,
        ctx: &TripleContext<'_>,
        keys: &KeyIndex<'_>,
        states: &StateIndex,
    ) -> Option<RulePayload> {
        let downs = keys.keydowns(ctx.window);
        let [ev] = downs[..] else { return None };
        if ev.key != Key::Spacebar && !ev.key.is_digit() {
            return None;
        }
        let before = states.state_at(ev.t)?;
        let after = states.state_after(ev.t)?;
        // The confirmation key's own symbol must be absent from where the
        // log put it.
        let symbol = ev.key.typed_symbol().expect("space or digit");
        if after.get(ev.position) == Some(&symbol) {
            return None;
        }
        let (start, replaced, inserted) = changed_region(before, after)?;
        let pinyin: String = replaced.iter().collect();
        let text: String = inserted.iter().collect();
        let transcription_ok = replaced
            .iter()
            .all(|c| c.is_ascii_alphabetic() || *c == SEPARATOR)
            && replaced.iter().any(|c| c.is_ascii_alphabetic());
        let inserted_ok = !inserted.is_empty() && inserted.iter().all(|c| !c.is_ascii());
        if transcription_ok && inserted_ok {
            Some(RulePayload::ImeConfirmation {
                event_id: ev.id,
                text,
                pinyin,
                start,
                end: start + inserted.len(),
            })
        } else {
            None
        }
    }
}

/// Maximal common prefix and suffix; returns (start, replaced, inserted).
fn changed_region(before: &[char], after: &[char]) -> Option<(usize, Vec<char>, Vec<char>)> {
    let prefix = before.iter().zip(after.iter()).take_while(|(a, b)| a == b).count();
    let max_suffix = before.len().min(after.len()) - prefix;
    let mut suffix = 0;
    while suffix < max_suffix
        && before[before.len() - 1 - suffix] == after[after.len() - 1 - suffix]
    {
        suffix += 1;
    }
    let replaced = before[prefix..before.len() - suffix].to_vec();
    let inserted = after[prefix..after.len() - suffix].to_vec();
    if replaced.is_empty() && inserted.is_empty() {
        None
    } else {
        Some((prefix, replaced, inserted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::TextState;
    use crate::trace::Timestamp;

    fn down(id: u64, key: Key, position: usize, t: u64) -> KeyEvent {
        KeyEvent { id, kind: KeyKind::Down, key, position, t: Timestamp(t) }
    }

    fn states(list: &[(u64, &str)]) -> StateIndex {
        let states: Vec<TextState> = list
            .iter()
            .map(|(t, text)| TextState { pass_id: *t, t: Timestamp(*t), text: text.to_string() })
            .collect();
        StateIndex::new(&states)
    }

    fn window(id: u64) -> CoherenceWindow {
        CoherenceWindow { start_id: id, end_id: id, coherent: false }
    }

    #[test]
    fn displaced_letter_matches_syllabic_division() {
        let keys = vec![down(270, Key::Char('r'), 4, 1800)];
        let idx = states(&[(1700, "dian"), (1900, "dian'r")]);
        let w = window(270);
        let matches =
            find_solutions(&[w], &keys, &idx, &default_rules(PunctuationMap::default()));
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].rule, RuleName::SyllabicDivision);
        assert_eq!(
            matches[0].payload,
            RulePayload::SyllabicDivision { displaced: vec![(270, 4)] }
        );
    }

    #[test]
    fn double_symbol_backspace_matches_separator_deletion() {
        let keys = vec![down(5, Key::Backspace, 6, 1000)];
        let idx = states(&[(900, "dian'r"), (1100, "dian")]);
        let matches =
            find_solutions(&[window(5)], &keys, &idx, &default_rules(PunctuationMap::default()));
        assert_eq!(matches[0].rule, RuleName::SeparatorDeletion);
        assert_eq!(
            matches[0].payload,
            RulePayload::SeparatorDeletion { event_id: 5, separator_index: 4 }
        );
    }

    #[test]
    fn latin_period_against_chinese_mark_matches_punctuation() {
        let keys = vec![down(9, Key::Char('.'), 3, 1000)];
        let idx = states(&[(900, "电热毯"), (1100, "电热毯。")]);
        let matches =
            find_solutions(&[window(9)], &keys, &idx, &default_rules(PunctuationMap::default()));
        assert_eq!(matches[0].rule, RuleName::ChinesePunctuation);
        assert_eq!(
            matches[0].payload,
            RulePayload::ChinesePunctuation { event_id: 9, latin: '.', rendered: '。' }
        );
    }

    #[test]
    fn spacebar_over_replaced_transcription_matches_confirmation() {
        let keys = vec![down(275, Key::Spacebar, 11, 2800)];
        let idx = states(&[(2700, "dian're'tan"), (2900, "电热毯")]);
        let matches =
            find_solutions(&[window(275)], &keys, &idx, &default_rules(PunctuationMap::default()));
        assert_eq!(matches[0].rule, RuleName::ImeConfirmation);
        assert_eq!(
            matches[0].payload,
            RulePayload::ImeConfirmation {
                event_id: 275,
                text: "电热毯".into(),
                pinyin: "dian're'tan".into(),
                start: 0,
                end: 3,
            }
        );
    }

    #[test]
    fn confirmation_in_context_keeps_flanking_text() {
        let keys = vec![down(40, Key::Char('1'), 18, 5000)];
        let idx = states(&[(4900, "千里之行，shi'yu'zu'xia"), (5100, "千里之行，始于足下")]);
        let matches =
            find_solutions(&[window(40)], &keys, &idx, &default_rules(PunctuationMap::default()));
        match &matches[0].payload {
            RulePayload::ImeConfirmation { text, pinyin, start, end, .. } => {
                assert_eq!(text, "始于足下");
                assert_eq!(pinyin, "shi'yu'zu'xia");
                assert_eq!((*start, *end), (5, 9));
            }
            other => panic!("wrong payload {other:?}"),
        }
    }

    #[test]
    fn unmatched_window_stays_unmatched() {
        // A stray space that neither landed nor replaced anything.
        let keys = vec![down(3, Key::Spacebar, 9, 1000)];
        let idx = states(&[(900, "abc"), (1100, "abc")]);
        let matches =
            find_solutions(&[window(3)], &keys, &idx, &default_rules(PunctuationMap::default()));
        assert!(matches.is_empty());
    }

    #[test]
    fn rule_order_is_deterministic() {
        let keys = vec![down(270, Key::Char('r'), 4, 1800)];
        let idx = states(&[(1700, "dian"), (1900, "dian'r")]);
        let rules = default_rules(PunctuationMap::default());
        let a = find_solutions(&[window(270)], &keys, &idx, &rules);
        let b = find_solutions(&[window(270)], &keys, &idx, &rules);
        assert_eq!(a, b);
    }
}
