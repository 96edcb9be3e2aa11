//! The five-way interkeystroke-interval taxonomy for pinyin input.
//!
//! Letter intervals live inside syllables; syllable boundaries promote to
//! the syllable category, word boundaries to the word category, and the
//! word sequence spans the whole session. Intervals adjacent to a
//! confirmation keystroke belong to the before/after confirmation
//! categories, and adjacent printable pairs not covered by tree structure
//! (punctuation next to letters) count at the letter level. Unresolved
//! spans are excluded everywhere.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::AnalysisError;
use crate::trace::{AlignmentStatus, DualTraceEvent, Key, KeyEvent, KeyKind, Timestamp};

use super::segment::Segmenter;
use super::tree::{build_tree, SegmentationNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IkiCategory {
    /// Two Latin letters within a pinyin syllable (keydown to keydown).
    LatinLetter,
    /// Adjacent syllables within a word.
    PinyinSyllable,
    /// Adjacent words in the session word sequence.
    Word,
    /// The keydown before a confirmation to the confirmation keydown.
    ImeBefore,
    /// The confirmation keydown to the next keydown.
    ImeAfter,
}

impl IkiCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            IkiCategory::LatinLetter => "latin_letters",
            IkiCategory::PinyinSyllable => "pinyin_syllables",
            IkiCategory::Word => "words",
            IkiCategory::ImeBefore => "ime_before",
            IkiCategory::ImeAfter => "ime_after",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IkiSample {
    pub category: IkiCategory,
    pub value_ms: i64,
    pub from_id: u64,
    pub to_id: u64,
}

/// Alternative confirmation-interval readings, kept alongside the primary
/// taxonomy so both are reportable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AltIkiCategory {
    /// A tree's first-word start minus the previous confirmation's keydown.
    WordOnsetFromPrevConfirmation,
    /// A confirmation keydown minus its own composition's first keydown.
    ConfirmationFromCompositionStart,
    /// Confirmation keydown minus the preceding key's keyup (flight time).
    FlightBeforeConfirmation,
    /// Next keydown minus the confirmation's keyup (flight time).
    FlightAfterConfirmation,
}

impl AltIkiCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            AltIkiCategory::WordOnsetFromPrevConfirmation => "word_onset_from_prev_confirmation",
            AltIkiCategory::ConfirmationFromCompositionStart => {
                "confirmation_from_composition_start"
            }
            AltIkiCategory::FlightBeforeConfirmation => "flight_before_confirmation",
            AltIkiCategory::FlightAfterConfirmation => "flight_after_confirmation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AltIkiSample {
    pub category: AltIkiCategory,
    pub value_ms: i64,
    pub from_id: u64,
    pub to_id: u64,
}

/// One confirmation with its segmentation tree.
#[derive(Debug, Clone)]
pub struct ConfirmationTree {
    pub confirmation_id: u64,
    pub confirmation_t: Timestamp,
    pub tree: SegmentationNode,
}

#[derive(Debug, Clone)]
pub struct PinyinAnalysis {
    pub trees: Vec<ConfirmationTree>,
    pub samples: Vec<IkiSample>,
    pub alt_samples: Vec<AltIkiSample>,
}

impl PinyinAnalysis {
    pub fn count(&self, category: IkiCategory) -> usize {
        self.samples.iter().filter(|s| s.category == category).count()
    }

    pub fn values(&self, category: IkiCategory) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.category == category)
            .map(|s| s.value_ms as f64)
            .collect()
    }
}

/// Recover each confirmation's surviving letter keydowns by replaying the
/// composition: letters push, backspaces pop, a confirmation takes the
/// buffer. The recovered letters must spell the recorded pinyin.
pub fn build_confirmation_trees(
    trace: &[DualTraceEvent],
    segmenter: &dyn Segmenter,
) -> Result<Vec<ConfirmationTree>, AnalysisError> {
    let mut stack: Vec<&KeyEvent> = Vec::new();
    let mut trees = Vec::new();

    for ev in trace.iter().filter(|e| e.base.kind == KeyKind::Down) {
        if ev.status == AlignmentStatus::Unresolved {
            continue;
        }
        match &ev.base.key {
            Key::Char(c) if c.is_ascii_alphabetic() => stack.push(&ev.base),
            Key::Backspace => {
                stack.pop();
            }
            _ => {}
        }
        if ev.is_confirmation() {
            let ime = ev.ime.as_ref().expect("confirmation annotation");
            let letter_count = ime.pinyin.chars().filter(|c| *c != crate::ime::SEPARATOR).count();
            if stack.len() < letter_count {
                return Err(AnalysisError::Propagation {
                    pinyin: ime.pinyin.clone(),
                    msg: format!(
                        "only {} letter events precede confirmation {}",
                        stack.len(),
                        ev.base.id
                    ),
                });
            }
            let letters: Vec<&KeyEvent> = stack[stack.len() - letter_count..].to_vec();
            let tree = build_tree(ev, &letters, segmenter)?;
            trees.push(ConfirmationTree {
                confirmation_id: ev.base.id,
                confirmation_t: ev.base.t,
                tree,
            });
            stack.clear();
        }
    }
    Ok(trees)
}

/// Classify the intervals of a dual trace against its confirmation trees.
pub fn compute_ikis(trees: &[ConfirmationTree], trace: &[DualTraceEvent]) -> Vec<IkiSample> {
    let mut samples = Vec::new();

    // Letter level: adjacent letters within each syllable, start - start.
    // Syllable level: adjacent syllables within each word, start - end.
    for unit in trees {
        for word in &unit.tree.children {
            for syllable in &word.children {
                for pair in syllable.children.windows(2) {
                    samples.push(IkiSample {
                        category: IkiCategory::LatinLetter,
                        value_ms: pair[1].start_t.delta(pair[0].start_t),
                        from_id: pair[0].start_id,
                        to_id: pair[1].start_id,
                    });
                }
            }
            for pair in word.children.windows(2) {
                samples.push(IkiSample {
                    category: IkiCategory::PinyinSyllable,
                    value_ms: pair[1].start_t.delta(pair[0].end_t),
                    from_id: pair[0].end_id,
                    to_id: pair[1].start_id,
                });
            }
        }
    }

    let keydowns: Vec<&DualTraceEvent> =
        trace.iter().filter(|e| e.base.kind == KeyKind::Down).collect();
    let unresolved_ids: BTreeSet<u64> = keydowns
        .iter()
        .filter(|e| e.status == AlignmentStatus::Unresolved)
        .map(|e| e.base.id)
        .collect();

    // Word level: the session-wide word sequence, bridging confirmations
    // but not unresolved spans.
    let word_nodes: Vec<(usize, &SegmentationNode)> = trees
        .iter()
        .enumerate()
        .flat_map(|(i, unit)| unit.tree.children.iter().map(move |w| (i, w)))
        .collect();
    for pair in word_nodes.windows(2) {
        let ((_, prev), (_, cur)) = (pair[0], pair[1]);
        let gap_has_unresolved = unresolved_ids
            .range(prev.end_id + 1..cur.start_id)
            .next()
            .is_some();
        if gap_has_unresolved {
            continue;
        }
        samples.push(IkiSample {
            category: IkiCategory::Word,
            value_ms: cur.start_t.delta(prev.end_t),
            from_id: prev.end_id,
            to_id: cur.start_id,
        });
    }

    // Confirmation adjacency: previous keydown -> confirmation, and
    // confirmation -> next keydown.
    let confirmation_ids: BTreeSet<u64> =
        trees.iter().map(|u| u.confirmation_id).collect();
    for (idx, ev) in keydowns.iter().enumerate() {
        if !confirmation_ids.contains(&ev.base.id) {
            continue;
        }
        if let Some(prev) = idx.checked_sub(1).map(|i| keydowns[i]) {
            if prev.status != AlignmentStatus::Unresolved {
                samples.push(IkiSample {
                    category: IkiCategory::ImeBefore,
                    value_ms: ev.base.t.delta(prev.base.t),
                    from_id: prev.base.id,
                    to_id: ev.base.id,
                });
            }
        }
        if let Some(next) = keydowns.get(idx + 1) {
            if next.status != AlignmentStatus::Unresolved {
                samples.push(IkiSample {
                    category: IkiCategory::ImeAfter,
                    value_ms: next.base.t.delta(ev.base.t),
                    from_id: ev.base.id,
                    to_id: next.base.id,
                });
            }
        }
    }

    // Letter-level catch-all: strictly adjacent printable pairs not covered
    // by tree structure and not confirmation-adjacent, e.g. punctuation
    // against a neighboring letter.
    let tree_of_letter: BTreeMap<u64, usize> = trees
        .iter()
        .enumerate()
        .flat_map(|(i, unit)| letter_ids(&unit.tree).into_iter().map(move |id| (id, i)))
        .collect();
    let is_unit = |ev: &DualTraceEvent| -> bool {
        if ev.status == AlignmentStatus::Unresolved || ev.base.key.is_edit_key() {
            return false;
        }
        if ev.base.key.is_latin_letter() {
            tree_of_letter.contains_key(&ev.base.id)
        } else {
            ev.base.key.is_printable()
        }
    };
    for pair in keydowns.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if confirmation_ids.contains(&a.base.id) || confirmation_ids.contains(&b.base.id) {
            continue;
        }
        if !is_unit(a) || !is_unit(b) {
            continue;
        }
        // Pairs of tree letters are covered by the tree passes above.
        if tree_of_letter.contains_key(&a.base.id) && tree_of_letter.contains_key(&b.base.id) {
            continue;
        }
        samples.push(IkiSample {
            category: IkiCategory::LatinLetter,
            value_ms: b.base.t.delta(a.base.t),
            from_id: a.base.id,
            to_id: b.base.id,
        });
    }

    samples
}

fn letter_ids(node: &SegmentationNode) -> Vec<u64> {
    if node.children.is_empty() {
        return vec![node.start_id];
    }
    node.children.iter().flat_map(letter_ids).collect()
}

/// The alternative confirmation-interval metrics: the per-tree formula pair
/// and the keyup-based flight pair.
pub fn compute_alt_ikis(trees: &[ConfirmationTree], trace: &[DualTraceEvent]) -> Vec<AltIkiSample> {
    let mut samples = Vec::new();
    for (i, unit) in trees.iter().enumerate() {
        if let (Some(prev), Some(first_word)) =
            (i.checked_sub(1).map(|j| &trees[j]), unit.tree.children.first())
        {
            samples.push(AltIkiSample {
                category: AltIkiCategory::WordOnsetFromPrevConfirmation,
                value_ms: first_word.start_t.delta(prev.confirmation_t),
                from_id: prev.confirmation_id,
                to_id: first_word.start_id,
            });
        }
        samples.push(AltIkiSample {
            category: AltIkiCategory::ConfirmationFromCompositionStart,
            value_ms: unit.confirmation_t.delta(unit.tree.start_t),
            from_id: unit.tree.start_id,
            to_id: unit.confirmation_id,
        });
    }

    // Flight-time pair, when keyups are present.
    let keydowns: Vec<&DualTraceEvent> =
        trace.iter().filter(|e| e.base.kind == KeyKind::Down).collect();
    let keyup_t: BTreeMap<u64, Timestamp> = {
        // Pair ups with the oldest outstanding down of the same key.
        let mut pending: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        let mut map = BTreeMap::new();
        for ev in trace {
            match ev.base.kind {
                KeyKind::Down => {
                    pending.entry(ev.base.key.as_wire()).or_default().push(ev.base.id)
                }
                KeyKind::Up => {
                    if let Some(stack) = pending.get_mut(&ev.base.key.as_wire()) {
                        if !stack.is_empty() {
                            map.insert(stack.remove(0), ev.base.t);
                        }
                    }
                }
            }
        }
        map
    };
    let confirmation_ids: BTreeSet<u64> = trees.iter().map(|u| u.confirmation_id).collect();
    for (idx, ev) in keydowns.iter().enumerate() {
        if !confirmation_ids.contains(&ev.base.id) {
            continue;
        }
        if let Some(prev) = idx.checked_sub(1).map(|i| keydowns[i]) {
            if let Some(up_t) = keyup_t.get(&prev.base.id) {
                samples.push(AltIkiSample {
                    category: AltIkiCategory::FlightBeforeConfirmation,
                    value_ms: ev.base.t.delta(*up_t),
                    from_id: prev.base.id,
                    to_id: ev.base.id,
                });
            }
        }
        if let Some(next) = keydowns.get(idx + 1) {
            if let Some(up_t) = keyup_t.get(&ev.base.id) {
                samples.push(AltIkiSample {
                    category: AltIkiCategory::FlightAfterConfirmation,
                    value_ms: next.base.t.delta(*up_t),
                    from_id: ev.base.id,
                    to_id: next.base.id,
                });
            }
        }
    }
    samples
}

/// Full pinyin analysis of a dual trace.
pub fn analyze_pinyin(
    trace: &[DualTraceEvent],
    segmenter: &dyn Segmenter,
) -> Result<PinyinAnalysis, AnalysisError> {
    let trees = build_confirmation_trees(trace, segmenter)?;
    let samples = compute_ikis(&trees, trace);
    let alt_samples = compute_alt_ikis(&trees, trace);
    Ok(PinyinAnalysis { trees, samples, alt_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::segment::MaxMatchSegmenter;
    use crate::hybridizer::hybridize;
    use crate::simulator::{
        run_session, EditorAction, ImeChoice, Layout, Lexicon, SessionConfig, FIXTURE_LEXICON,
    };

    fn run_pinyin(actions: &[EditorAction]) -> (Vec<DualTraceEvent>, PinyinAnalysis) {
        let lexicon = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        let config = SessionConfig { layout: Layout::Pinyin, ..SessionConfig::default() };
        let out = run_session(actions, &lexicon, &config).unwrap();
        let (trace, diag) = hybridize(&out.key_log, &out.text_log).unwrap();
        assert_eq!(diag.unresolved, 0, "{diag:?}");
        let seg = MaxMatchSegmenter::from_lexicon(&lexicon);
        let analysis = analyze_pinyin(&trace, &seg).unwrap();
        (trace, analysis)
    }

    fn keys_with_passes(text: &str) -> Vec<EditorAction> {
        let mut actions = Vec::new();
        for c in text.chars() {
            actions.push(EditorAction::TypeKey {
                key: crate::trace::Key::Char(c),
                dwell_ms: 60,
                gap_ms: 140,
            });
            actions.push(EditorAction::Pass);
        }
        actions
    }

    fn confirm(actions: &mut Vec<EditorAction>, choice: ImeChoice) {
        actions.push(EditorAction::ImeConfirm { choice, dwell_ms: 60, gap_ms: 420 });
        actions.push(EditorAction::Pass);
    }

    #[test]
    fn monosyllabic_confirmation_yields_letters_only() {
        let mut actions = keys_with_passes("ma");
        confirm(&mut actions, ImeChoice::Spacebar);
        let (_, analysis) = run_pinyin(&actions);
        assert_eq!(analysis.count(IkiCategory::LatinLetter), 1);
        assert_eq!(analysis.count(IkiCategory::PinyinSyllable), 0);
        assert_eq!(analysis.count(IkiCategory::Word), 0);
        assert_eq!(analysis.count(IkiCategory::ImeBefore), 1);
        assert_eq!(analysis.count(IkiCategory::ImeAfter), 0);
    }

    #[test]
    fn within_tree_counts_telescop_to_letter_pairs() {
        let mut actions = keys_with_passes("zhechanpin");
        confirm(&mut actions, ImeChoice::Spacebar);
        let (_, analysis) = run_pinyin(&actions);
        let tree = &analysis.trees[0].tree;
        let letter_count: usize = letter_ids(tree).len();
        let l = analysis.count(IkiCategory::LatinLetter);
        let s = analysis.count(IkiCategory::PinyinSyllable);
        let w = analysis.count(IkiCategory::Word);
        assert_eq!(l + s + w, letter_count - 1);
        assert_eq!((l, s, w), (7, 1, 1)); // zhe(2) chan(3) pin(2); zhe|chan word, chan|pin syllable
    }

    #[test]
    fn revision_keeps_surviving_letters_only() {
        // Type "dianr", erase the r back across its separator, then retype
        // "retan" and confirm: the survivors spell dianretan.
        let mut actions = keys_with_passes("dianr");
        actions.push(EditorAction::TypeKey {
            key: crate::trace::Key::Backspace,
            dwell_ms: 60,
            gap_ms: 140,
        });
        actions.push(EditorAction::Pass);
        actions.extend(keys_with_passes("retan"));
        confirm(&mut actions, ImeChoice::Spacebar);
        let (_, analysis) = run_pinyin(&actions);
        assert_eq!(analysis.trees.len(), 1);
        assert_eq!(analysis.trees[0].tree.content, "电热毯");
        let ids = letter_ids(&analysis.trees[0].tree);
        assert_eq!(ids.len(), 9);
    }

    #[test]
    fn formula_pair_counts_differ_from_primary() {
        let mut actions = keys_with_passes("ma");
        confirm(&mut actions, ImeChoice::Spacebar);
        actions.extend(keys_with_passes("zhe"));
        confirm(&mut actions, ImeChoice::Digit(1));
        let (_, analysis) = run_pinyin(&actions);
        assert_eq!(analysis.count(IkiCategory::ImeBefore), 2);
        assert_eq!(analysis.count(IkiCategory::ImeAfter), 1);
        let onsets = analysis
            .alt_samples
            .iter()
            .filter(|s| s.category == AltIkiCategory::WordOnsetFromPrevConfirmation)
            .count();
        let spans = analysis
            .alt_samples
            .iter()
            .filter(|s| s.category == AltIkiCategory::ConfirmationFromCompositionStart)
            .count();
        assert_eq!(onsets, 1);
        assert_eq!(spans, 2);
        let flights_before = analysis
            .alt_samples
            .iter()
            .filter(|s| s.category == AltIkiCategory::FlightBeforeConfirmation)
            .count();
        assert_eq!(flights_before, 2);
    }
}
