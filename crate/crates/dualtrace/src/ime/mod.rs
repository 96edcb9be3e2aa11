//! A deterministic pinyin input-method simulation.
//!
//! Latin letters accumulate in an uncommitted buffer rendered into the
//! document with syllable separators; SPACEBAR or a digit commits a
//! candidate, replacing the transcription with Chinese text.

pub mod syllable;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::simulator::Lexicon;
use crate::trace::Key;

pub const SEPARATOR: char = '\'';

/// Latin-to-Chinese punctuation conversion used while the Chinese layout is
/// active.
#[derive(Debug, Clone)]
pub struct PunctuationMap {
    map: BTreeMap<char, char>,
}

impl Default for PunctuationMap {
    fn default() -> Self {
        let map = [
            ('.', '。'),
            (',', '，'),
            ('?', '？'),
            ('!', '！'),
            (':', '：'),
            (';', '；'),
        ]
        .into_iter()
        .collect();
        Self { map }
    }
}

impl PunctuationMap {
    pub fn with_pairs(pairs: impl IntoIterator<Item = (char, char)>) -> Self {
        Self { map: pairs.into_iter().collect() }
    }

    pub fn convert(&self, latin: char) -> Option<char> {
        self.map.get(&latin).copied()
    }

    pub fn latin_for(&self, chinese: char) -> Option<char> {
        self.map.iter().find(|(_, c)| **c == chinese).map(|(l, _)| *l)
    }
}

/// Document edit an input produces, relative to the composition region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImeEdit {
    /// Replace the composition's previous rendering with a new one.
    Compose { prev_len: usize, rendered: String },
    /// Replace the rendering with confirmed Chinese text; composition ends.
    Commit { prev_len: usize, text: String, pinyin: String },
    /// Plain insertion at the caret (no composition active).
    Insert { text: String },
    /// Document-level backspace (no composition active).
    DeleteBackward,
    /// Input ignored; carries a warning for the session log.
    Rejected { reason: String },
}

/// Uncommitted composition state. The rendered transcription is the
/// syllable segments joined by separators; the buffer is the segments
/// concatenated bare.
#[derive(Debug, Clone)]
pub struct ImeState {
    segments: Vec<String>,
    lexicon: Arc<Lexicon>,
    punctuation: PunctuationMap,
}

impl ImeState {
    pub fn new(lexicon: Arc<Lexicon>) -> Self {
        Self { segments: Vec::new(), lexicon, punctuation: PunctuationMap::default() }
    }

    pub fn with_punctuation(lexicon: Arc<Lexicon>, punctuation: PunctuationMap) -> Self {
        Self { segments: Vec::new(), lexicon, punctuation }
    }

    pub fn is_composing(&self) -> bool {
        !self.segments.is_empty()
    }

    pub fn buffer(&self) -> String {
        self.segments.concat()
    }

    pub fn rendered(&self) -> String {
        self.segments.join(&SEPARATOR.to_string())
    }

    pub fn rendered_len(&self) -> usize {
        if self.segments.is_empty() {
            0
        } else {
            self.segments.iter().map(String::len).sum::<usize>() + self.segments.len() - 1
        }
    }

    pub fn candidates(&self) -> Option<Vec<String>> {
        if self.segments.is_empty() {
            None
        } else {
            self.lexicon.candidates(&self.buffer())
        }
    }

    /// Feed one key. Letters extend the trailing segment while it stays a
    /// legal syllable prefix and otherwise open a new segment behind a
    /// separator; BACKSPACE drops one buffer letter and, when that empties
    /// the trailing segment, the separator in front of it; SPACEBAR or a
    /// digit commits a candidate.
    pub fn feed(&mut self, key: &Key) -> ImeEdit {
        match key {
            Key::Char(c) if c.is_ascii_alphabetic() => self.feed_letter(c.to_ascii_lowercase()),
            Key::Backspace => self.feed_backspace(),
            Key::Spacebar => {
                if self.is_composing() {
                    self.confirm(0)
                } else {
                    ImeEdit::Insert { text: " ".to_string() }
                }
            }
            Key::Char(c) if c.is_ascii_digit() => {
                if self.is_composing() {
                    match c.to_digit(10) {
                        Some(d) if d >= 1 => self.confirm(d as usize - 1),
                        _ => ImeEdit::Rejected { reason: "digit 0 selects no candidate".into() },
                    }
                } else {
                    ImeEdit::Insert { text: c.to_string() }
                }
            }
            Key::Char(c) => {
                if self.is_composing() {
                    ImeEdit::Rejected {
                        reason: format!("punctuation '{c}' ignored during composition"),
                    }
                } else {
                    let rendered = self.punctuation.convert(*c).unwrap_or(*c);
                    ImeEdit::Insert { text: rendered.to_string() }
                }
            }
            Key::Canc | Key::Other(_) => {
                ImeEdit::Rejected { reason: format!("key {} not handled by ime", key.as_wire()) }
            }
        }
    }

    fn feed_letter(&mut self, c: char) -> ImeEdit {
        let prev_len = self.rendered_len();
        let extended = match self.segments.last() {
            Some(tail) => {
                let mut candidate = tail.clone();
                candidate.push(c);
                syllable::is_syllable_prefix(&candidate)
            }
            None => false,
        };
        if extended {
            self.segments.last_mut().expect("tail exists").push(c);
        } else {
            self.segments.push(c.to_string());
        }
        ImeEdit::Compose { prev_len, rendered: self.rendered() }
    }

    fn feed_backspace(&mut self) -> ImeEdit {
        if self.segments.is_empty() {
            return ImeEdit::DeleteBackward;
        }
        let prev_len = self.rendered_len();
        let tail = self.segments.last_mut().expect("nonempty");
        tail.pop();
        if tail.is_empty() {
            self.segments.pop();
        }
        ImeEdit::Compose { prev_len, rendered: self.rendered() }
    }

    fn confirm(&mut self, choice: usize) -> ImeEdit {
        let candidates = match self.candidates() {
            Some(c) => c,
            None => {
                return ImeEdit::Rejected {
                    reason: format!("no candidates for buffer \"{}\"", self.buffer()),
                }
            }
        };
        match candidates.get(choice) {
            Some(text) => {
                let prev_len = self.rendered_len();
                let pinyin = self.rendered();
                self.segments.clear();
                ImeEdit::Commit { prev_len, text: text.clone(), pinyin }
            }
            None => ImeEdit::Rejected {
                reason: format!(
                    "choice {} beyond {} candidates for \"{}\"",
                    choice + 1,
                    candidates.len(),
                    self.buffer()
                ),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> Arc<Lexicon> {
        Arc::new(
            Lexicon::parse(
                "dianretan 电热毯\ndian 电\nre 热\ntan 毯\nma 马 妈\nxiong 兄\nzhe 这\nchanpin 产品\n",
            )
            .unwrap(),
        )
    }

    fn feed_all(state: &mut ImeState, keys: &str) -> ImeEdit {
        let mut last = ImeEdit::Rejected { reason: String::new() };
        for c in keys.chars() {
            last = state.feed(&Key::Char(c));
        }
        last
    }

    #[test]
    fn separators_appear_at_syllable_boundaries() {
        let mut state = ImeState::new(lexicon());
        let edit = feed_all(&mut state, "dianre");
        assert_eq!(state.rendered(), "dian're");
        assert_eq!(edit, ImeEdit::Compose { prev_len: 6, rendered: "dian're".into() });
    }

    #[test]
    fn backspace_drops_one_letter_until_a_separator_precedes_it() {
        let mut state = ImeState::new(lexicon());
        feed_all(&mut state, "dianre");
        state.feed(&Key::Backspace);
        assert_eq!(state.rendered(), "dian'r");
        // The next backspace deletes the letter and the now-dangling
        // separator: two symbols vanish at once.
        state.feed(&Key::Backspace);
        assert_eq!(state.rendered(), "dian");
    }

    #[test]
    fn spacebar_commits_the_first_candidate() {
        let mut state = ImeState::new(lexicon());
        feed_all(&mut state, "dianretan");
        assert_eq!(state.rendered(), "dian're'tan");
        let edit = state.feed(&Key::Spacebar);
        assert_eq!(
            edit,
            ImeEdit::Commit { prev_len: 11, text: "电热毯".into(), pinyin: "dian're'tan".into() }
        );
        assert!(!state.is_composing());
    }

    #[test]
    fn digit_selects_among_direct_candidates() {
        let mut state = ImeState::new(lexicon());
        feed_all(&mut state, "ma");
        let edit = state.feed(&Key::Char('2'));
        assert!(matches!(edit, ImeEdit::Commit { ref text, .. } if text == "妈"));
    }

    #[test]
    fn digit_beyond_candidate_count_is_rejected() {
        let mut state = ImeState::new(lexicon());
        feed_all(&mut state, "ma");
        let edit = state.feed(&Key::Char('9'));
        assert!(matches!(edit, ImeEdit::Rejected { .. }));
        assert!(state.is_composing());
    }

    #[test]
    fn punctuation_converts_with_empty_buffer() {
        let mut state = ImeState::new(lexicon());
        assert_eq!(state.feed(&Key::Char(',')), ImeEdit::Insert { text: "，".into() });
        assert_eq!(state.feed(&Key::Char('.')), ImeEdit::Insert { text: "。".into() });
    }

    #[test]
    fn syllable_typed_through_degenerate_prefixes_never_splits() {
        let mut state = ImeState::new(lexicon());
        for c in "xiong".chars() {
            state.feed(&Key::Char(c));
            assert!(!state.rendered().contains(SEPARATOR), "at {}", state.rendered());
        }
        assert_eq!(state.rendered(), "xiong");
    }

    #[test]
    fn composed_buffer_concatenates_word_candidates() {
        let mut state = ImeState::new(lexicon());
        feed_all(&mut state, "zhechanpin");
        assert_eq!(state.rendered(), "zhe'chan'pin");
        let edit = state.feed(&Key::Spacebar);
        assert!(matches!(edit, ImeEdit::Commit { ref text, .. } if text == "这产品"));
    }

    #[test]
    fn rendered_strips_to_buffer() {
        let mut state = ImeState::new(lexicon());
        feed_all(&mut state, "dianretan");
        let stripped: String =
            state.rendered().chars().filter(|c| *c != SEPARATOR).collect();
        assert_eq!(stripped, state.buffer());
    }
}
