//! Within-word / between-word classification for alphabetic typing.
//!
//! Intervals are press latencies (keydown to keydown) between consecutive
//! visible events; an interval crossing a word boundary in the produced
//! text is between-word, anything else — including a sentence-final
//! interval — is within-word. Space keystrokes anchor no samples
//! themselves.

use crate::trace::{Key, KeyEvent, KeyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaCategory {
    WithinWord,
    BetweenWord,
}

impl AlphaCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlphaCategory::WithinWord => "within_words",
            AlphaCategory::BetweenWord => "between_words",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaSample {
    pub category: AlphaCategory,
    pub value_ms: i64,
    pub from_id: u64,
    pub to_id: u64,
}

/// Classify a Latin-only span against the text it produced. Each event's
/// logged position locates it in a word of `text` (words are maximal
/// space-free runs); grouped multi-letter events locate by their first
/// character.
pub fn classify_alphabetic(keys: &[KeyEvent], text: &str) -> Vec<AlphaSample> {
    let word_of = word_index(text);

    let anchors: Vec<(&KeyEvent, usize)> = keys
        .iter()
        .filter(|e| e.kind == KeyKind::Down)
        .filter(|e| match &e.key {
            Key::Spacebar => false,
            Key::Char(c) => !c.is_whitespace(),
            Key::Other(_) => true,
            Key::Backspace | Key::Canc => false,
        })
        .filter_map(|e| word_of.get(e.position).copied().flatten().map(|w| (e, w)))
        .collect();

    anchors
        .windows(2)
        .map(|pair| {
            let ((a, wa), (b, wb)) = (pair[0], pair[1]);
            AlphaSample {
                category: if wa == wb {
                    AlphaCategory::WithinWord
                } else {
                    AlphaCategory::BetweenWord
                },
                value_ms: b.t.delta(a.t),
                from_id: a.id,
                to_id: b.id,
            }
        })
        .collect()
}

/// Word index per character position; spaces map to none.
fn word_index(text: &str) -> Vec<Option<usize>> {
    let mut map = Vec::new();
    let mut word = 0usize;
    let mut in_word = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if in_word {
                word += 1;
                in_word = false;
            }
            map.push(None);
        } else {
            in_word = true;
            map.push(Some(word));
        }
    }
    map
}
