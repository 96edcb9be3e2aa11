//! Scripted editing sessions: the action vocabulary and its file format.
//!
//! One action per line: `type <key> <dwell_ms> <gap_ms>`, `move <index>`,
//! `select <start> <end>`, `pass`, `confirm <SPACEBAR|1-9> <dwell_ms>
//! <gap_ms>`. `#` starts a comment.

use crate::error::ScriptError;
use crate::trace::Key;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImeChoice {
    Spacebar,
    Digit(u8),
}

impl ImeChoice {
    pub fn as_key(self) -> Key {
        match self {
            ImeChoice::Spacebar => Key::Spacebar,
            ImeChoice::Digit(d) => Key::Char(char::from_digit(d as u32, 10).expect("digit")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditorAction {
    /// Press and release one key with the scripted hold time and the gap
    /// from the previous key's release (negative gaps are rollover).
    TypeKey { key: Key, dwell_ms: u64, gap_ms: i64 },
    MoveCursor { index: usize },
    Select { start: usize, end: usize },
    /// Snapshot boundary: the text logger samples the editor.
    Pass,
    ImeConfirm { choice: ImeChoice, dwell_ms: u64, gap_ms: i64 },
}

pub fn parse_script(text: &str) -> Result<Vec<EditorAction>, ScriptError> {
    let mut actions = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let verb = parts.next().expect("nonempty line");
        let rest: Vec<&str> = parts.collect();
        let err = |msg: String| ScriptError::Parse { line: line_no, msg };
        let action = match verb {
            "type" => {
                let [key, dwell, gap] = rest[..] else {
                    return Err(err("expected: type <key> <dwell_ms> <gap_ms>".into()));
                };
                EditorAction::TypeKey {
                    key: Key::from_wire(key),
                    dwell_ms: dwell.parse().map_err(|_| err(format!("bad dwell \"{dwell}\"")))?,
                    gap_ms: gap.parse().map_err(|_| err(format!("bad gap \"{gap}\"")))?,
                }
            }
            "move" => {
                let [index] = rest[..] else {
                    return Err(err("expected: move <index>".into()));
                };
                EditorAction::MoveCursor {
                    index: index.parse().map_err(|_| err(format!("bad index \"{index}\"")))?,
                }
            }
            "select" => {
                let [start, end] = rest[..] else {
                    return Err(err("expected: select <start> <end>".into()));
                };
                EditorAction::Select {
                    start: start.parse().map_err(|_| err(format!("bad start \"{start}\"")))?,
                    end: end.parse().map_err(|_| err(format!("bad end \"{end}\"")))?,
                }
            }
            "pass" => {
                if !rest.is_empty() {
                    return Err(err("pass takes no arguments".into()));
                }
                EditorAction::Pass
            }
            "confirm" => {
                let [choice, dwell, gap] = rest[..] else {
                    return Err(err("expected: confirm <SPACEBAR|1-9> <dwell_ms> <gap_ms>".into()));
                };
                let choice = match choice {
                    "SPACEBAR" => ImeChoice::Spacebar,
                    d if d.len() == 1 && d.as_bytes()[0].is_ascii_digit() && d != "0" => {
                        ImeChoice::Digit(d.as_bytes()[0] - b'0')
                    }
                    other => return Err(err(format!("bad confirm choice \"{other}\""))),
                };
                EditorAction::ImeConfirm {
                    choice,
                    dwell_ms: dwell.parse().map_err(|_| err(format!("bad dwell \"{dwell}\"")))?,
                    gap_ms: gap.parse().map_err(|_| err(format!("bad gap \"{gap}\"")))?,
                }
            }
            other => return Err(err(format!("unknown action \"{other}\""))),
        };
        actions.push(action);
    }
    Ok(actions)
}

pub fn script_to_string(actions: &[EditorAction]) -> String {
    let mut out = String::new();
    for action in actions {
        match action {
            EditorAction::TypeKey { key, dwell_ms, gap_ms } => {
                out.push_str(&format!("type {} {} {}\n", key.as_wire(), dwell_ms, gap_ms));
            }
            EditorAction::MoveCursor { index } => out.push_str(&format!("move {index}\n")),
            EditorAction::Select { start, end } => {
                out.push_str(&format!("select {start} {end}\n"));
            }
            EditorAction::Pass => out.push_str("pass\n"),
            EditorAction::ImeConfirm { choice, dwell_ms, gap_ms } => {
                let c = match choice {
                    ImeChoice::Spacebar => "SPACEBAR".to_string(),
                    ImeChoice::Digit(d) => d.to_string(),
                };
                out.push_str(&format!("confirm {c} {dwell_ms} {gap_ms}\n"));
            }
        }
    }
    out
}

/// Helper for building typed-text scripts in tests and generators.
pub fn type_keys(text: &str, dwell_ms: u64, gap_ms: i64) -> Vec<EditorAction> {
    text.chars()
        .map(|c| EditorAction::TypeKey {
            key: if c == ' ' { Key::Spacebar } else { Key::Char(c) },
            dwell_ms,
            gap_ms,
        })
        .collect()
}
