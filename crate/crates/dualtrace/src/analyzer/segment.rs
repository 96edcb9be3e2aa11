//! Pluggable word segmentation with a dictionary-based default.

use std::collections::BTreeSet;

use crate::error::AnalysisError;
use crate::simulator::Lexicon;

/// Contract: the concatenation of the returned words equals the input and
/// no word is empty.
pub trait Segmenter {
    fn name(&self) -> &str;
    fn segment(&self, text: &str) -> Vec<String>;
}

/// Forward maximum matching: the longest dictionary prefix wins; a
/// character matching nothing becomes a single-character word.
pub struct MaxMatchSegmenter {
    words: BTreeSet<String>,
    max_chars: usize,
}

impl MaxMatchSegmenter {
    pub fn new(words: BTreeSet<String>) -> Self {
        let max_chars = words.iter().map(|w| w.chars().count()).max().unwrap_or(1);
        Self { words, max_chars }
    }

    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        Self::new(lexicon.words())
    }
}

impl Segmenter for MaxMatchSegmenter {
    fn name(&self) -> &str {
        "fmm"
    }

    fn segment(&self, text: &str) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        let mut words = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let longest = (1..=self.max_chars.min(chars.len() - i))
                .rev()
                .map(|n| chars[i..i + n].iter().collect::<String>())
                .find(|cand| self.words.contains(cand));
            match longest {
                Some(word) => {
                    i += word.chars().count();
                    words.push(word);
                }
                None => {
                    words.push(chars[i].to_string());
                    i += 1;
                }
            }
        }
        words
    }
}

/// Run a segmenter and enforce its contract.
pub fn segment_words(text: &str, seg: &dyn Segmenter) -> Result<Vec<String>, AnalysisError> {
    let words = seg.segment(text);
    if words.iter().any(String::is_empty) {
        return Err(AnalysisError::Segmentation {
            text: text.to_string(),
            msg: format!("segmenter \"{}\" produced an empty word", seg.name()),
        });
    }
    let joined: String = words.concat();
    if joined != text {
        return Err(AnalysisError::Segmentation {
            text: text.to_string(),
            msg: format!("segmenter \"{}\" output concatenates to \"{joined}\"", seg.name()),
        });
    }
    Ok(words)
}
