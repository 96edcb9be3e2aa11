//! The segmentation tree: confirmed text → words → syllables → letters,
//! with timestamps propagated from the letter leaves upward.

use crate::error::AnalysisError;
use crate::ime::SEPARATOR;
use crate::trace::{DualTraceEvent, KeyEvent, Timestamp};

use super::segment::{segment_words, Segmenter};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeLevel {
    Text,
    Word,
    Syllable,
    Letter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationNode {
    pub level: NodeLevel,
    pub content: String,
    pub start_t: Timestamp,
    pub end_t: Timestamp,
    /// Keydown ids anchoring the span, for sample provenance.
    pub start_id: u64,
    pub end_id: u64,
    pub children: Vec<SegmentationNode>,
}

impl SegmentationNode {
    fn from_children(level: NodeLevel, content: String, children: Vec<SegmentationNode>) -> Self {
        let first = children.first().expect("at least one child");
        let last = children.last().expect("at least one child");
        SegmentationNode {
            level,
            content,
            start_t: first.start_t,
            end_t: last.end_t,
            start_id: first.start_id,
            end_id: last.end_id,
            children,
        }
    }

    /// Minimum leaf start and maximum leaf end, for invariant checks.
    pub fn leaf_span(&self) -> (Timestamp, Timestamp) {
        if self.children.is_empty() {
            return (self.start_t, self.end_t);
        }
        let spans: Vec<(Timestamp, Timestamp)> =
            self.children.iter().map(SegmentationNode::leaf_span).collect();
        (
            spans.iter().map(|s| s.0).min().expect("children"),
            spans.iter().map(|s| s.1).max().expect("children"),
        )
    }
}

/// Split a separator-carrying pinyin transcription into its syllables.
pub fn split_syllables(pinyin: &str) -> Result<Vec<String>, AnalysisError> {
    if pinyin.is_empty() {
        return Err(AnalysisError::PinyinFormat { msg: "empty pinyin".into() });
    }
    let sep = SEPARATOR;
    if pinyin.starts_with(sep) || pinyin.ends_with(sep) || pinyin.contains("''") {
        return Err(AnalysisError::PinyinFormat {
            msg: format!("\"{pinyin}\" has a leading, trailing or doubled separator"),
        });
    }
    Ok(pinyin.split(sep).map(str::to_string).collect())
}

/// Attach letter keydowns to the confirmation's syllables: each letter node
/// carries its keydown timestamp, and each syllable spans its first to last
/// letter.
pub fn propagate_timestamps(
    confirmation: &DualTraceEvent,
    letters: &[&KeyEvent],
) -> Result<Vec<SegmentationNode>, AnalysisError> {
    let ime = confirmation.ime.as_ref().ok_or_else(|| AnalysisError::Propagation {
        pinyin: String::new(),
        msg: format!("event {} carries no confirmation annotation", confirmation.base.id),
    })?;
    let syllables = split_syllables(&ime.pinyin)?;
    let expected: usize = syllables.iter().map(String::len).sum();
    if letters.len() != expected {
        return Err(AnalysisError::Propagation {
            pinyin: ime.pinyin.clone(),
            msg: format!("{} letter events for {expected} pinyin letters", letters.len()),
        });
    }

    let mut nodes = Vec::with_capacity(syllables.len());
    let mut cursor = 0usize;
    for syllable in &syllables {
        let count = syllable.len();
        let slice = &letters[cursor..cursor + count];
        for (ev, expected_char) in slice.iter().zip(syllable.chars()) {
            let typed = ev.key.typed_symbol().map(|c| c.to_ascii_lowercase());
            if typed != Some(expected_char) {
                return Err(AnalysisError::Propagation {
                    pinyin: ime.pinyin.clone(),
                    msg: format!(
                        "event {} types {:?}, syllable \"{syllable}\" expects '{expected_char}'",
                        ev.id, ev.key
                    ),
                });
            }
        }
        let children: Vec<SegmentationNode> = slice
            .iter()
            .map(|ev| SegmentationNode {
                level: NodeLevel::Letter,
                content: ev.key.typed_symbol().expect("letter").to_string(),
                start_t: ev.t,
                end_t: ev.t,
                start_id: ev.id,
                end_id: ev.id,
                children: Vec::new(),
            })
            .collect();
        nodes.push(SegmentationNode::from_children(
            NodeLevel::Syllable,
            syllable.clone(),
            children,
        ));
        cursor += count;
    }
    Ok(nodes)
}

/// Build the full tree for one confirmation: root text, word children
/// grouped by character count, syllable and letter descendants.
pub fn build_tree(
    confirmation: &DualTraceEvent,
    letters: &[&KeyEvent],
    segmenter: &dyn Segmenter,
) -> Result<SegmentationNode, AnalysisError> {
    let ime = confirmation.ime.as_ref().ok_or_else(|| AnalysisError::Tree {
        text: String::new(),
        msg: format!("event {} carries no confirmation annotation", confirmation.base.id),
    })?;
    let syllable_nodes = propagate_timestamps(confirmation, letters)?;
    let char_count = ime.text.chars().count();
    if syllable_nodes.len() != char_count {
        return Err(AnalysisError::Tree {
            text: ime.text.clone(),
            msg: format!(
                "{} syllables for {char_count} characters",
                syllable_nodes.len()
            ),
        });
    }

    let words = segment_words(&ime.text, segmenter)?;
    let mut word_nodes = Vec::with_capacity(words.len());
    let mut cursor = 0usize;
    for word in &words {
        let count = word.chars().count();
        let children = syllable_nodes[cursor..cursor + count].to_vec();
        word_nodes.push(SegmentationNode::from_children(
            NodeLevel::Word,
            word.clone(),
            children,
        ));
        cursor += count;
    }
    Ok(SegmentationNode::from_children(NodeLevel::Text, ime.text.clone(), word_nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::segment::MaxMatchSegmenter;
    use crate::simulator::{Lexicon, FIXTURE_LEXICON};
    use crate::trace::{AlignmentStatus, ImeAnnotation, Key, KeyEvent, KeyKind, RuleName};

    fn confirmation(text: &str, pinyin: &str) -> DualTraceEvent {
        DualTraceEvent {
            base: KeyEvent {
                id: 99,
                kind: KeyKind::Down,
                key: Key::Spacebar,
                position: pinyin.chars().count(),
                t: Timestamp(9000),
            },
            status: AlignmentStatus::Resolved(RuleName::ImeConfirmation),
            ime: Some(ImeAnnotation {
                text: text.to_string(),
                pinyin: pinyin.to_string(),
                start: 0,
                end: text.chars().count(),
            }),
            rendered: None,
        }
    }

    fn letters(spelling: &str, start_t: u64) -> Vec<KeyEvent> {
        spelling
            .chars()
            .enumerate()
            .map(|(i, c)| KeyEvent {
                id: i as u64,
                kind: KeyKind::Down,
                key: Key::Char(c),
                position: i,
                t: Timestamp(start_t + 100 * i as u64),
            })
            .collect()
    }

    #[test]
    fn splits_on_separators() {
        assert_eq!(split_syllables("zhe'chan'pin").unwrap(), ["zhe", "chan", "pin"]);
        assert_eq!(split_syllables("dian're'tan").unwrap(), ["dian", "re", "tan"]);
        assert_eq!(split_syllables("ma").unwrap(), ["ma"]);
    }

    #[test]
    fn malformed_separators_are_format_errors() {
        for bad in ["'ma", "ma'", "zh''e", ""] {
            assert!(split_syllables(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn syllable_spans_cover_their_letters() {
        let conf = confirmation("这产品", "zhe'chan'pin");
        let evs = letters("zhechanpin", 1000);
        let refs: Vec<&KeyEvent> = evs.iter().collect();
        let nodes = propagate_timestamps(&conf, &refs).unwrap();
        assert_eq!(nodes.len(), 3);
        assert_eq!(nodes[0].content, "zhe");
        assert_eq!(nodes[0].start_t, Timestamp(1000));
        assert_eq!(nodes[0].end_t, Timestamp(1200));
        assert_eq!(nodes[1].start_t, Timestamp(1300));
        assert_eq!(nodes[1].end_t, Timestamp(1600));
        assert_eq!(nodes[2].start_t, Timestamp(1700));
        assert_eq!(nodes[2].end_t, Timestamp(1900));
    }

    #[test]
    fn single_letter_syllable_has_zero_span() {
        let conf = confirmation("啊", "a");
        let evs = letters("a", 500);
        let refs: Vec<&KeyEvent> = evs.iter().collect();
        let nodes = propagate_timestamps(&conf, &refs).unwrap();
        assert_eq!(nodes[0].start_t, nodes[0].end_t);
    }

    #[test]
    fn letter_count_mismatch_is_a_propagation_error() {
        let conf = confirmation("这产品", "zhe'chan'pin");
        let evs = letters("zhechan", 1000);
        let refs: Vec<&KeyEvent> = evs.iter().collect();
        assert!(matches!(
            propagate_timestamps(&conf, &refs),
            Err(AnalysisError::Propagation { .. })
        ));
    }

    #[test]
    fn tree_groups_characters_into_words() {
        let seg = MaxMatchSegmenter::from_lexicon(&Lexicon::parse(FIXTURE_LEXICON).unwrap());
        let conf = confirmation("这产品", "zhe'chan'pin");
        let evs = letters("zhechanpin", 1000);
        let refs: Vec<&KeyEvent> = evs.iter().collect();
        let tree = build_tree(&conf, &refs, &seg).unwrap();
        assert_eq!(tree.level, NodeLevel::Text);
        assert_eq!(tree.content, "这产品");
        let words: Vec<&str> = tree.children.iter().map(|w| w.content.as_str()).collect();
        assert_eq!(words, ["这", "产品"]);
        let syllable_count: usize = tree.children.iter().map(|w| w.children.len()).sum();
        assert_eq!(syllable_count, 3);
        // Root span equals first/last letter keydown.
        assert_eq!(tree.start_t, Timestamp(1000));
        assert_eq!(tree.end_t, Timestamp(1900));
        // Propagation invariant: every node spans exactly its leaves.
        fn check(node: &SegmentationNode) {
            let (lo, hi) = node.leaf_span();
            assert_eq!((node.start_t, node.end_t), (lo, hi), "node {}", node.content);
            node.children.iter().for_each(check);
        }
        check(&tree);
    }

    #[test]
    fn one_character_confirmation_is_a_four_level_chain() {
        let seg = MaxMatchSegmenter::from_lexicon(&Lexicon::parse(FIXTURE_LEXICON).unwrap());
        let conf = confirmation("马", "ma");
        let evs = letters("ma", 100);
        let refs: Vec<&KeyEvent> = evs.iter().collect();
        let tree = build_tree(&conf, &refs, &seg).unwrap();
        assert_eq!(tree.level, NodeLevel::Text);
        assert_eq!(tree.children.len(), 1);
        assert_eq!(tree.children[0].level, NodeLevel::Word);
        assert_eq!(tree.children[0].children.len(), 1);
        assert_eq!(tree.children[0].children[0].level, NodeLevel::Syllable);
        assert_eq!(tree.children[0].children[0].children.len(), 2);
        assert_eq!(tree.children[0].children[0].children[0].level, NodeLevel::Letter);
    }
}
