//! Deterministic replay of scripted editing sessions.
//!
//! A session drives a simulated document editor (and, for the Chinese
//! layout, a pinyin input method) and emits the paired keystroke log and
//! windowed text log, along with exact ground truth for every pass state
//! and input-method confirmation.

mod generate;
mod lexicon;
mod script;

pub use generate::{random_edit_script, random_ime_script, random_timing_script, TimingScript};
pub use lexicon::{Lexicon, FIXTURE_LEXICON};
pub use script::{parse_script, script_to_string, type_keys, EditorAction, ImeChoice};

use std::sync::Arc;

use crate::document::Document;
use crate::error::ScriptError;
use crate::ime::{ImeEdit, ImeState, PunctuationMap};
use crate::snapshot::{dsw_step, initial_snapshot, DswStepInput, StepContext};
use crate::trace::{
    Dsw, Key, KeyEvent, KeyKind, SnapshotSource, TextSnapshot, Timestamp,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    Latin,
    Pinyin,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub layout: Layout,
    pub initial_text: String,
    /// Epoch-style clock base; pass 0 is stamped with it.
    pub start_ms: u64,
    /// Caret position at session start; defaults to the end of the text.
    pub caret: Option<usize>,
    pub punctuation: PunctuationMap,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            layout: Layout::Latin,
            initial_text: String::new(),
            start_ms: 0,
            caret: None,
            punctuation: PunctuationMap::default(),
        }
    }
}

impl SessionConfig {
    pub fn pinyin() -> Self {
        Self { layout: Layout::Pinyin, ..Self::default() }
    }
}

/// Document state at one pass boundary, snapshot or not.
#[derive(Debug, Clone, PartialEq)]
pub struct PassTruth {
    pub pass_id: u64,
    pub t: Timestamp,
    pub text: String,
}

/// One confirmed candidate, as the session actually performed it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfirmationTruth {
    /// Keydown id of the confirming SPACEBAR or digit.
    pub key_event_id: u64,
    pub text: String,
    pub pinyin: String,
    pub start: usize,
    pub end: usize,
    /// Keydown ids of the letters surviving in the committed buffer.
    pub letter_ids: Vec<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    pub pass_states: Vec<PassTruth>,
    pub confirmations: Vec<ConfirmationTruth>,
    pub final_text: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SessionOutput {
    pub key_log: Vec<KeyEvent>,
    pub text_log: Vec<TextSnapshot>,
    pub truth: GroundTruth,
}

struct RawEvent {
    seq: usize,
    kind: KeyKind,
    key: Key,
    position: usize,
    t: u64,
}

struct Composition {
    start: usize,
    ime: ImeState,
    /// Emission sequence numbers of the keydowns behind the buffer letters.
    letter_seqs: Vec<usize>,
}

struct Session {
    doc: Document,
    caret: usize,
    anchor: usize,
    composition: Option<Composition>,
    layout: Layout,
    lexicon: Arc<Lexicon>,
    punctuation: PunctuationMap,

    dsw: Dsw,
    back_counter: u64,
    canc_counter: u64,
    prev_doc_len: usize,
    pass_counter: u64,

    events: Vec<RawEvent>,
    next_seq: usize,
    last_down_t: u64,
    last_up_t: u64,
    last_dwell: u64,
    last_text_t: u64,
    any_key_yet: bool,

    text_log: Vec<TextSnapshot>,
    truth: GroundTruth,
    raw_confirmations: Vec<(usize, String, String, usize, usize, Vec<usize>)>,
    edited_since_pass: bool,
    moved_since_pass: bool,
}

/// Replay a script against a fresh editor, producing the paired logs and
/// exact ground truth.
pub fn run_session(
    actions: &[EditorAction],
    lexicon: &Lexicon,
    config: &SessionConfig,
) -> Result<SessionOutput, ScriptError> {
    let doc = Document::from_text(&config.initial_text);
    let caret = match config.caret {
        Some(c) if c <= doc.len() => c,
        Some(c) => {
            return Err(ScriptError::InvalidAction {
                index: 0,
                msg: format!("initial caret {c} beyond document length {}", doc.len()),
            })
        }
        None => doc.len(),
    };

    let mut s = Session {
        caret,
        anchor: caret,
        composition: None,
        layout: config.layout,
        lexicon: Arc::new(lexicon.clone()),
        punctuation: config.punctuation.clone(),
        dsw: Dsw::new(caret, caret),
        back_counter: 0,
        canc_counter: 0,
        prev_doc_len: doc.len(),
        pass_counter: 0,
        events: Vec::new(),
        next_seq: 0,
        last_down_t: config.start_ms,
        last_up_t: config.start_ms,
        last_dwell: 0,
        last_text_t: config.start_ms,
        any_key_yet: false,
        text_log: vec![initial_snapshot(
            &config.initial_text,
            Timestamp(config.start_ms),
            SnapshotSource::Editor,
        )],
        truth: GroundTruth::default(),
        raw_confirmations: Vec::new(),
        edited_since_pass: false,
        moved_since_pass: false,
        doc,
    };
    s.truth.pass_states.push(PassTruth {
        pass_id: 0,
        t: Timestamp(config.start_ms),
        text: s.doc.to_string(),
    });

    for (index, action) in actions.iter().enumerate() {
        s.apply(index, action)?;
    }
    s.finish()
}

impl Session {
    fn apply(&mut self, index: usize, action: &EditorAction) -> Result<(), ScriptError> {
        match action {
            EditorAction::TypeKey { key, dwell_ms, gap_ms } => {
                self.type_key(index, key, *dwell_ms, *gap_ms)
            }
            EditorAction::ImeConfirm { choice, dwell_ms, gap_ms } => {
                self.type_key(index, &choice.as_key(), *dwell_ms, *gap_ms)
            }
            EditorAction::MoveCursor { index: to } => {
                self.structural_action_allowed(index)?;
                if self.composition.is_some() {
                    return Err(ScriptError::InvalidAction {
                        index,
                        msg: "cursor move during an active composition".into(),
                    });
                }
                if *to > self.doc.len() {
                    return Err(ScriptError::InvalidAction {
                        index,
                        msg: format!("cursor {to} beyond document length {}", self.doc.len()),
                    });
                }
                self.caret = *to;
                self.anchor = *to;
                self.moved_since_pass = true;
                Ok(())
            }
            EditorAction::Select { start, end } => {
                self.structural_action_allowed(index)?;
                if self.composition.is_some() {
                    return Err(ScriptError::InvalidAction {
                        index,
                        msg: "selection during an active composition".into(),
                    });
                }
                if start > end || *end > self.doc.len() {
                    return Err(ScriptError::InvalidAction {
                        index,
                        msg: format!(
                            "selection [{start}, {end}) invalid for document length {}",
                            self.doc.len()
                        ),
                    });
                }
                self.anchor = *start;
                self.caret = *end;
                self.moved_since_pass = true;
                Ok(())
            }
            EditorAction::Pass => self.pass(index),
        }
    }

    /// Cursor moves and selections trigger a logging pass in the real
    /// text-logger plug-in; a script interleaving them with keystrokes
    /// inside one pass would produce windows that miss edits, so the
    /// combination is rejected rather than silently logged incompletely.
    fn structural_action_allowed(&self, index: usize) -> Result<(), ScriptError> {
        if self.edited_since_pass {
            return Err(ScriptError::InvalidAction {
                index,
                msg: "cursor move or selection after unsnapshotted edits; insert a pass first"
                    .into(),
            });
        }
        Ok(())
    }

    fn type_key(
        &mut self,
        index: usize,
        key: &Key,
        dwell_ms: u64,
        gap_ms: i64,
    ) -> Result<(), ScriptError> {
        if dwell_ms == 0 {
            return Err(ScriptError::InvalidAction { index, msg: "dwell must be positive".into() });
        }
        if self.moved_since_pass {
            return Err(ScriptError::InvalidAction {
                index,
                msg: "keystroke after an unsnapshotted cursor move or selection; insert a pass first"
                    .into(),
            });
        }
        let down_t = if self.any_key_yet {
            if gap_ms < -(self.last_dwell as i64) {
                return Err(ScriptError::InvalidAction {
                    index,
                    msg: format!("gap {gap_ms} exceeds previous dwell {}", self.last_dwell),
                });
            }
            (self.last_up_t as i64 + gap_ms) as u64
        } else {
            if gap_ms < 0 {
                return Err(ScriptError::InvalidAction {
                    index,
                    msg: "first key cannot roll over".into(),
                });
            }
            // The first key has no previous release; its gap counts from
            // the session start, bumped past any leading pass.
            let floor = if self.pass_counter > 0 { self.last_text_t + 1 } else { self.last_up_t };
            (self.last_up_t + gap_ms as u64).max(floor)
        };
        if self.any_key_yet && down_t < self.last_down_t {
            return Err(ScriptError::InvalidAction {
                index,
                msg: "keydown would precede the previous keydown".into(),
            });
        }
        if down_t <= self.last_text_t && self.pass_counter > 0 {
            return Err(ScriptError::InvalidAction {
                index,
                msg: format!(
                    "keydown at {down_t} ms not after the preceding pass at {} ms",
                    self.last_text_t
                ),
            });
        }
        let up_t = down_t + dwell_ms;

        // The keylogger reports the caret (or selection start) at keydown.
        let position = self.anchor.min(self.caret);
        let down_seq = self.next_seq;
        self.events.push(RawEvent {
            seq: down_seq,
            kind: KeyKind::Down,
            key: key.clone(),
            position,
            t: down_t,
        });
        self.next_seq += 1;
        self.events.push(RawEvent {
            seq: self.next_seq,
            kind: KeyKind::Up,
            key: key.clone(),
            position,
            t: up_t,
        });
        self.next_seq += 1;
        self.any_key_yet = true;
        self.last_down_t = down_t;
        self.last_up_t = up_t;
        self.last_dwell = dwell_ms;
        self.edited_since_pass = true;

        self.edit_document(index, key, down_seq)
    }

    fn edit_document(&mut self, index: usize, key: &Key, down_seq: usize) -> Result<(), ScriptError> {
        match self.layout {
            Layout::Latin => self.edit_latin(key),
            Layout::Pinyin => self.edit_pinyin(index, key, down_seq),
        }
    }

    fn clear_selection_for_replacement(&mut self) {
        let (lo, hi) = (self.anchor.min(self.caret), self.anchor.max(self.caret));
        if lo != hi {
            self.doc.delete(lo, hi).expect("selection in bounds");
            self.caret = lo;
            self.anchor = lo;
        }
    }

    fn insert_at_caret(&mut self, text: &str) {
        self.clear_selection_for_replacement();
        self.doc.insert(self.caret, text).expect("caret in bounds");
        self.caret += text.chars().count();
        self.anchor = self.caret;
    }

    fn document_backspace(&mut self) {
        self.back_counter += 1;
        let (lo, hi) = (self.anchor.min(self.caret), self.anchor.max(self.caret));
        if lo != hi {
            self.doc.delete(lo, hi).expect("selection in bounds");
            self.caret = lo;
        } else if self.caret > 0 {
            self.doc.delete(self.caret - 1, self.caret).expect("in bounds");
            self.caret -= 1;
        }
        self.anchor = self.caret;
    }

    fn document_canc(&mut self) {
        self.canc_counter += 1;
        let (lo, hi) = (self.anchor.min(self.caret), self.anchor.max(self.caret));
        if lo != hi {
            self.doc.delete(lo, hi).expect("selection in bounds");
            self.caret = lo;
        } else if self.caret < self.doc.len() {
            self.doc.delete(self.caret, self.caret + 1).expect("in bounds");
        }
        self.anchor = self.caret;
    }

    fn edit_latin(&mut self, key: &Key) -> Result<(), ScriptError> {
        match key {
            Key::Backspace => self.document_backspace(),
            Key::Canc => self.document_canc(),
            Key::Other(_) => {}
            _ => {
                let symbol = key.typed_symbol().expect("printable");
                self.insert_at_caret(&symbol.to_string());
            }
        }
        Ok(())
    }

    fn edit_pinyin(&mut self, index: usize, key: &Key, down_seq: usize) -> Result<(), ScriptError> {
        if self.composition.is_none() {
            match key {
                Key::Backspace => {
                    self.document_backspace();
                    return Ok(());
                }
                Key::Canc => {
                    self.document_canc();
                    return Ok(());
                }
                Key::Other(_) => return Ok(()),
                Key::Char(c) if c.is_ascii_alphabetic() => {
                    // A letter starts a composition, replacing any selection.
                    self.clear_selection_for_replacement();
                    self.composition = Some(Composition {
                        start: self.caret,
                        ime: ImeState::with_punctuation(
                            Arc::clone(&self.lexicon),
                            self.punctuation.clone(),
                        ),
                        letter_seqs: Vec::new(),
                    });
                }
                _ => {}
            }
        }

        match &mut self.composition {
            None => {
                // Plain key with no composition: route through the ime for
                // punctuation conversion and direct inserts.
                let mut ime = ImeState::with_punctuation(
                    Arc::clone(&self.lexicon),
                    self.punctuation.clone(),
                );
                match ime.feed(key) {
                    ImeEdit::Insert { text } => self.insert_at_caret(&text),
                    ImeEdit::Rejected { reason } => self.truth.warnings.push(format!(
                        "action {index}: {reason}"
                    )),
                    ImeEdit::DeleteBackward => self.document_backspace(),
                    other => {
                        unreachable!("composition edit {other:?} from empty state")
                    }
                }
                Ok(())
            }
            Some(comp) => {
                let start = comp.start;
                match comp.ime.feed(key) {
                    ImeEdit::Compose { prev_len, rendered } => {
                        self.doc
                            .replace(start, start + prev_len, &rendered)
                            .expect("composition region in bounds");
                        match key {
                            Key::Char(c) if c.is_ascii_alphabetic() => {
                                comp.letter_seqs.push(down_seq)
                            }
                            Key::Backspace => {
                                comp.letter_seqs.pop();
                            }
                            _ => {}
                        }
                        let rendered_len = rendered.chars().count();
                        self.caret = start + rendered_len;
                        self.anchor = self.caret;
                        if rendered_len == 0 {
                            self.composition = None;
                        }
                        Ok(())
                    }
                    ImeEdit::Commit { prev_len, text, pinyin } => {
                        self.doc
                            .replace(start, start + prev_len, &text)
                            .expect("composition region in bounds");
                        let end = start + text.chars().count();
                        self.caret = end;
                        self.anchor = end;
                        let letter_seqs = std::mem::take(&mut comp.letter_seqs);
                        self.raw_confirmations.push((down_seq, text, pinyin, start, end, letter_seqs));
                        self.composition = None;
                        Ok(())
                    }
                    ImeEdit::Rejected { reason } => {
                        self.truth.warnings.push(format!("action {index}: {reason}"));
                        Ok(())
                    }
                    ImeEdit::Insert { .. } | ImeEdit::DeleteBackward => {
                        unreachable!("document edit while composing")
                    }
                }
            }
        }
    }

    /// The selection the text logger sees: an active composition is
    /// presented as a selection spanning it, the way an editor exposes its
    /// input-method region.
    fn reported_selection_start(&self) -> usize {
        match &self.composition {
            Some(comp) => comp.start,
            None => self.anchor.min(self.caret),
        }
    }

    fn pass(&mut self, index: usize) -> Result<(), ScriptError> {
        self.pass_counter += 1;
        let t = self.last_down_t.max(self.last_text_t) + 1;
        let input = DswStepInput {
            dsw: self.dsw,
            c_pos: self.caret,
            selection_start: self.reported_selection_start(),
            back_counter: self.back_counter,
            canc_counter: self.canc_counter,
            doc_length: self.doc.len(),
        };
        let ctx = StepContext {
            pass_id: self.pass_counter,
            t: Timestamp(t),
            prev_doc_length: self.prev_doc_len,
        };
        let (snapshot, next) = dsw_step(&input, &self.doc, &ctx).map_err(|e| {
            ScriptError::InvalidAction { index, msg: format!("snapshot step failed: {e}") }
        })?;
        if let Some(snap) = snapshot {
            self.text_log.push(snap);
            self.prev_doc_len = self.doc.len();
        }
        self.dsw = next;
        self.back_counter = 0;
        self.canc_counter = 0;
        self.last_text_t = t;
        self.edited_since_pass = false;
        self.moved_since_pass = false;
        self.truth.pass_states.push(PassTruth {
            pass_id: self.pass_counter,
            t: Timestamp(t),
            text: self.doc.to_string(),
        });
        Ok(())
    }

    fn finish(mut self) -> Result<SessionOutput, ScriptError> {
        // Chronological order with dense ids; rollover interleaves a keyup
        // after the next keydown. Ties keep emission order.
        self.events.sort_by_key(|e| (e.t, e.seq));
        let mut seq_to_id = vec![0u64; self.events.len()];
        let key_log: Vec<KeyEvent> = self
            .events
            .iter()
            .enumerate()
            .map(|(id, raw)| {
                seq_to_id[raw.seq] = id as u64;
                KeyEvent {
                    id: id as u64,
                    kind: raw.kind,
                    key: raw.key.clone(),
                    position: raw.position,
                    t: Timestamp(raw.t),
                }
            })
            .collect();

        self.truth.confirmations = self
            .raw_confirmations
            .iter()
            .map(|(seq, text, pinyin, start, end, letter_seqs)| ConfirmationTruth {
                key_event_id: seq_to_id[*seq],
                text: text.clone(),
                pinyin: pinyin.clone(),
                start: *start,
                end: *end,
                letter_ids: letter_seqs.iter().map(|s| seq_to_id[*s]).collect(),
            })
            .collect();
        self.truth.final_text = self.doc.to_string();

        Ok(SessionOutput { key_log, text_log: self.text_log, truth: self.truth })
    }
}
