//! Shared data types and the on-disk log schemas.
//!
//! All three logs are line-delimited JSON, one record per line, so they can
//! be parsed as streams. Positions and lengths count Unicode scalar values.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::LogError;
use crate::snapshot::DiffDelta;

/// Milliseconds on a monotonic session clock, rebased to a UNIX-epoch style
/// base at export. Non-negative and non-decreasing within a log stream.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub fn millis(self) -> u64 {
        self.0
    }

    /// Signed difference `self - earlier` in milliseconds.
    pub fn delta(self, earlier: Timestamp) -> i64 {
        self.0 as i64 - earlier.0 as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyKind {
    Down,
    Up,
}

/// Symbolic key identity. `Char` covers Latin letters, digits and
/// punctuation; multi-character labels (grouped events, modifier names)
/// round-trip through `Other`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Key {
    Char(char),
    Spacebar,
    Backspace,
    Canc,
    Other(String),
}

impl Key {
    pub fn as_wire(&self) -> String {
        match self {
            Key::Char(c) => c.to_string(),
            Key::Spacebar => "SPACEBAR".to_string(),
            Key::Backspace => "BACKSPACE".to_string(),
            Key::Canc => "CANC".to_string(),
            Key::Other(label) => label.clone(),
        }
    }

    pub fn from_wire(s: &str) -> Key {
        match s {
            "SPACEBAR" => Key::Spacebar,
            "BACKSPACE" => Key::Backspace,
            "CANC" => Key::Canc,
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Key::Char(c),
                    _ => Key::Other(s.to_string()),
                }
            }
        }
    }

    pub fn is_latin_letter(&self) -> bool {
        matches!(self, Key::Char(c) if c.is_ascii_alphabetic())
    }

    pub fn is_digit(&self) -> bool {
        matches!(self, Key::Char(c) if c.is_ascii_digit())
    }

    /// The symbol this key types directly, if any. Edit keys and labelled
    /// events have none.
    pub fn typed_symbol(&self) -> Option<char> {
        match self {
            Key::Char(c) => Some(*c),
            Key::Spacebar => Some(' '),
            _ => None,
        }
    }

    /// True for keys that delete rather than type.
    pub fn is_edit_key(&self) -> bool {
        matches!(self, Key::Backspace | Key::Canc)
    }

    /// True for keys that contribute visible symbols (including grouped
    /// multi-letter events).
    pub fn is_printable(&self) -> bool {
        match self {
            Key::Char(_) | Key::Spacebar => true,
            Key::Other(_) => true,
            Key::Backspace | Key::Canc => false,
        }
    }
}

impl Serialize for Key {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.as_wire())
    }
}

impl<'de> Deserialize<'de> for Key {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Key::from_wire(&s))
    }
}

/// One keylogger record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyEvent {
    pub id: u64,
    pub kind: KeyKind,
    pub key: Key,
    /// Document character index at which the keylogger believes the symbol
    /// lands (the caret position reported at keydown).
    pub position: usize,
    #[serde(rename = "t_ms")]
    pub t: Timestamp,
}

/// Dynamic snapshot window bounds, `left <= right`, right-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dsw {
    pub left: usize,
    pub right: usize,
}

impl Dsw {
    pub fn new(left: usize, right: usize) -> Self {
        debug_assert!(left <= right);
        Self { left, right }
    }

    pub fn width(&self) -> usize {
        self.right - self.left
    }

    pub fn is_empty(&self) -> bool {
        self.left == self.right
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotSource {
    /// Window-based capture from the text-editor logger.
    Editor,
    /// Whole-text diff capture from the browser logger.
    Browser,
}

/// One text-logger record. Editor-source records carry the window text;
/// browser-source records past pass 0 carry an edit script instead.
#[derive(Debug, Clone, PartialEq)]
pub struct TextSnapshot {
    pub pass_id: u64,
    pub text: String,
    pub dsw: Dsw,
    /// Net signed document length change since the previous snapshot.
    pub offset: i64,
    pub t: Timestamp,
    pub source: SnapshotSource,
    pub delta: Option<DiffDelta>,
}

#[derive(Serialize, Deserialize)]
struct TextSnapshotWire {
    pass: u64,
    text: String,
    dsw: [usize; 2],
    offset: i64,
    t_ms: Timestamp,
    source: SnapshotSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<DiffDelta>,
}

impl From<&TextSnapshot> for TextSnapshotWire {
    fn from(s: &TextSnapshot) -> Self {
        TextSnapshotWire {
            pass: s.pass_id,
            text: s.text.clone(),
            dsw: [s.dsw.left, s.dsw.right],
            offset: s.offset,
            t_ms: s.t,
            source: s.source,
            delta: s.delta.clone(),
        }
    }
}

/// Names of the incoherence-resolution rules, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    SyllabicDivision,
    SeparatorDeletion,
    ChinesePunctuation,
    ImeConfirmation,
}

impl RuleName {
    pub const ALL: [RuleName; 4] = [
        RuleName::SyllabicDivision,
        RuleName::SeparatorDeletion,
        RuleName::ChinesePunctuation,
        RuleName::ImeConfirmation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleName::SyllabicDivision => "syllabic_division",
            RuleName::SeparatorDeletion => "separator_deletion",
            RuleName::ChinesePunctuation => "chinese_punctuation",
            RuleName::ImeConfirmation => "ime_confirmation",
        }
    }
}

impl std::fmt::Display for RuleName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentStatus {
    Coherent,
    Resolved(RuleName),
    Unresolved,
}

/// Confirmed Chinese text with its pinyin transcription and the index range
/// it occupies in the reconstructed document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImeAnnotation {
    pub text: String,
    /// Latin transcription with syllable separators, e.g. "dian're'tan".
    pub pinyin: String,
    pub start: usize,
    pub end: usize,
}

/// A keystroke event enriched with its alignment outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct DualTraceEvent {
    pub base: KeyEvent,
    pub status: AlignmentStatus,
    /// Present iff `status == Resolved(ImeConfirmation)`.
    pub ime: Option<ImeAnnotation>,
    /// Chinese mark a punctuation resolution rendered, if any.
    pub rendered: Option<char>,
}

impl DualTraceEvent {
    pub fn coherent(base: KeyEvent) -> Self {
        Self { base, status: AlignmentStatus::Coherent, ime: None, rendered: None }
    }

    pub fn unresolved(base: KeyEvent) -> Self {
        Self { base, status: AlignmentStatus::Unresolved, ime: None, rendered: None }
    }

    pub fn is_confirmation(&self) -> bool {
        self.status == AlignmentStatus::Resolved(RuleName::ImeConfirmation)
    }
}

#[derive(Serialize, Deserialize)]
struct DualTraceWire {
    #[serde(flatten)]
    base: KeyEvent,
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<RuleName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ime: Option<ImeAnnotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rendered: Option<char>,
}

impl From<&DualTraceEvent> for DualTraceWire {
    fn from(e: &DualTraceEvent) -> Self {
        let (status, rule) = match e.status {
            AlignmentStatus::Coherent => ("coherent", None),
            AlignmentStatus::Resolved(r) => ("resolved", Some(r)),
            AlignmentStatus::Unresolved => ("unresolved", None),
        };
        DualTraceWire {
            base: e.base.clone(),
            status: status.to_string(),
            rule,
            ime: e.ime.clone(),
            rendered: e.rendered,
        }
    }
}

fn dual_event_from_wire(w: DualTraceWire, line: usize) -> Result<DualTraceEvent, LogError> {
    let status = match (w.status.as_str(), w.rule) {
        ("coherent", None) => AlignmentStatus::Coherent,
        ("unresolved", None) => AlignmentStatus::Unresolved,
        ("resolved", Some(r)) => AlignmentStatus::Resolved(r),
        ("resolved", None) => {
            return Err(LogError::Schema { line, msg: "resolved record without rule".into() })
        }
        (other, _) => {
            return Err(LogError::Schema { line, msg: format!("unknown status \"{other}\"") })
        }
    };
    let is_confirmation = status == AlignmentStatus::Resolved(RuleName::ImeConfirmation);
    if w.ime.is_some() != is_confirmation {
        return Err(LogError::Schema {
            line,
            msg: "ime annotation present iff rule is ime_confirmation".into(),
        });
    }
    if let Some(ime) = &w.ime {
        let chars = ime.text.chars().count();
        if ime.start >= ime.end || ime.end - ime.start != chars {
            return Err(LogError::Schema {
                line,
                msg: format!(
                    "ime index range [{}, {}) does not span {} characters",
                    ime.start, ime.end, chars
                ),
            });
        }
    }
    Ok(DualTraceEvent { base: w.base, status, ime: w.ime, rendered: w.rendered })
}

fn read_records<T, R, F>(reader: R, mut build: F) -> Result<Vec<T>, LogError>
where
    R: BufRead,
    F: FnMut(&str, usize) -> Result<T, LogError>,
{
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        out.push(build(trimmed, line_no)?);
    }
    Ok(out)
}

/// Parse a keystroke log, validating id density, timestamp monotonicity and
/// keydown/keyup pairing.
pub fn parse_keystroke_log<R: BufRead>(reader: R) -> Result<Vec<KeyEvent>, LogError> {
    let events = read_records(reader, |text, line| {
        serde_json::from_str::<KeyEvent>(text)
            .map_err(|e| LogError::Malformed { line, msg: e.to_string() })
    })?;
    validate_key_events(&events)?;
    Ok(events)
}

fn validate_key_events(events: &[KeyEvent]) -> Result<(), LogError> {
    let mut open: std::collections::HashMap<&Key, usize> = std::collections::HashMap::new();
    for pair in events.windows(2) {
        if pair[1].id != pair[0].id + 1 {
            return Err(LogError::Integrity {
                msg: format!("ids {} and {} are not dense ascending", pair[0].id, pair[1].id),
            });
        }
        if pair[1].t < pair[0].t {
            return Err(LogError::Integrity {
                msg: format!(
                    "timestamps decrease between events {} and {}",
                    pair[0].id, pair[1].id
                ),
            });
        }
    }
    for ev in events {
        match ev.kind {
            KeyKind::Down => *open.entry(&ev.key).or_insert(0) += 1,
            KeyKind::Up => {
                let outstanding = open.get_mut(&ev.key);
                match outstanding {
                    Some(n) if *n > 0 => *n -= 1,
                    _ => {
                        return Err(LogError::Integrity {
                            msg: format!(
                                "event {}: keyup for {} with no outstanding keydown",
                                ev.id,
                                ev.key.as_wire()
                            ),
                        })
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parse a text-snapshot log, validating pass ordering and window bounds.
pub fn parse_text_log<R: BufRead>(reader: R) -> Result<Vec<TextSnapshot>, LogError> {
    let snapshots = read_records(reader, |text, line| {
        let wire: TextSnapshotWire = serde_json::from_str(text)
            .map_err(|e| LogError::Malformed { line, msg: e.to_string() })?;
        let [left, right] = wire.dsw;
        if left > right {
            return Err(LogError::Schema {
                line,
                msg: format!("dsw [{left}, {right}) has left > right"),
            });
        }
        let snap = TextSnapshot {
            pass_id: wire.pass,
            text: wire.text,
            dsw: Dsw { left, right },
            offset: wire.offset,
            t: wire.t_ms,
            source: wire.source,
            delta: wire.delta,
        };
        if snap.source == SnapshotSource::Editor {
            if snap.delta.is_some() {
                return Err(LogError::Schema {
                    line,
                    msg: "editor snapshot must not carry a delta".into(),
                });
            }
            let chars = snap.text.chars().count();
            if chars != snap.dsw.width() {
                return Err(LogError::Schema {
                    line,
                    msg: format!(
                        "editor snapshot text length {} does not match window width {}",
                        chars,
                        snap.dsw.width()
                    ),
                });
            }
        }
        Ok(snap)
    })?;
    validate_snapshots(&snapshots)?;
    Ok(snapshots)
}

fn validate_snapshots(snapshots: &[TextSnapshot]) -> Result<(), LogError> {
    match snapshots.first() {
        None => {
            return Err(LogError::Integrity { msg: "empty text log: no pass 0 snapshot".into() })
        }
        Some(first) if first.pass_id != 0 => {
            return Err(LogError::Integrity {
                msg: format!("text log starts at pass {}, not pass 0", first.pass_id),
            });
        }
        Some(first) => {
            let len = first.text.chars().count();
            if first.dsw.left != 0 || first.dsw.right != len {
                return Err(LogError::Integrity {
                    msg: format!(
                        "pass 0 must carry the full initial text with dsw [0, {len}), got [{}, {})",
                        first.dsw.left, first.dsw.right
                    ),
                });
            }
        }
    }
    for pair in snapshots.windows(2) {
        if pair[1].pass_id <= pair[0].pass_id {
            return Err(LogError::Integrity {
                msg: format!(
                    "passes {} and {} are not strictly ascending",
                    pair[0].pass_id, pair[1].pass_id
                ),
            });
        }
        if pair[1].t < pair[0].t {
            return Err(LogError::Integrity {
                msg: format!(
                    "timestamps decrease between passes {} and {}",
                    pair[0].pass_id, pair[1].pass_id
                ),
            });
        }
        if pair[1].source == SnapshotSource::Browser && pair[1].delta.is_none() {
            return Err(LogError::Integrity {
                msg: format!("browser snapshot at pass {} carries no delta", pair[1].pass_id),
            });
        }
    }
    Ok(())
}

/// Parse a dual trace, enforcing the annotation invariants.
pub fn parse_dual_trace<R: BufRead>(reader: R) -> Result<Vec<DualTraceEvent>, LogError> {
    let events = read_records(reader, |text, line| {
        let wire: DualTraceWire = serde_json::from_str(text)
            .map_err(|e| LogError::Malformed { line, msg: e.to_string() })?;
        dual_event_from_wire(wire, line)
    })?;
    validate_key_events(&events.iter().map(|e| e.base.clone()).collect::<Vec<_>>())?;
    Ok(events)
}

pub fn write_keystroke_log<W: Write>(writer: &mut W, events: &[KeyEvent]) -> std::io::Result<()> {
    for ev in events {
        serde_json::to_writer(&mut *writer, ev)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_text_log<W: Write>(writer: &mut W, snapshots: &[TextSnapshot]) -> std::io::Result<()> {
    for snap in snapshots {
        serde_json::to_writer(&mut *writer, &TextSnapshotWire::from(snap))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_dual_trace<W: Write>(writer: &mut W, events: &[DualTraceEvent]) -> std::io::Result<()> {
    for ev in events {
        serde_json::to_writer(&mut *writer, &DualTraceWire::from(ev))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn keystroke_log_to_string(events: &[KeyEvent]) -> String {
    let mut buf = Vec::new();
    write_keystroke_log(&mut buf, events).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf-8")
}

pub fn text_log_to_string(snapshots: &[TextSnapshot]) -> String {
    let mut buf = Vec::new();
    write_text_log(&mut buf, snapshots).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf-8")
}

pub fn dual_trace_to_string(events: &[DualTraceEvent]) -> String {
    let mut buf = Vec::new();
    write_dual_trace(&mut buf, events).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf-8")
}
