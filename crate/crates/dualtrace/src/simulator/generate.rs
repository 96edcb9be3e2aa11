//! Seeded random script generators for property tests.

use crate::rng::SplitMix64;
use crate::simulator::lexicon::Lexicon;
use crate::simulator::script::{EditorAction, ImeChoice};
use crate::simulator::SessionConfig;
use crate::trace::Key;

const LETTERS: &[char] = &['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', '电', '热', '字'];

/// A random Latin-layout editing session: inserts, backspaces, CANCs,
/// cursor moves, selections, selection replacements and pass boundaries,
/// valid against the evolving document by construction. Cursor moves and
/// selections are flanked by passes, the way the logger's event-triggered
/// snapshots bracket them in a live session.
pub fn random_edit_script(seed: u64) -> (Vec<EditorAction>, SessionConfig) {
    let mut rng = SplitMix64::new(seed);
    let initial_len = rng.below(12);
    let initial_text: String = (0..initial_len).map(|_| *rng.pick(LETTERS)).collect();

    let mut actions: Vec<EditorAction> = Vec::new();
    let mut len = initial_len;
    let mut caret = initial_len;
    let mut anchor = initial_len;
    let mut edited = false;
    let action_count = 10 + rng.below(40);

    for _ in 0..action_count {
        match rng.below(10) {
            0..=3 => {
                // Type a printable; replaces any selection.
                let (lo, hi) = (anchor.min(caret), anchor.max(caret));
                len = len - (hi - lo) + 1;
                caret = lo + 1;
                anchor = caret;
                let c = *rng.pick(LETTERS);
                let key = if rng.chance(1, 8) { Key::Spacebar } else { Key::Char(c) };
                actions.push(EditorAction::TypeKey {
                    key,
                    dwell_ms: 30 + rng.below(120) as u64,
                    gap_ms: 1 + rng.below(300) as i64,
                });
                edited = true;
            }
            4 => {
                let (lo, hi) = (anchor.min(caret), anchor.max(caret));
                if lo != hi {
                    len -= hi - lo;
                    caret = lo;
                } else if caret > 0 {
                    len -= 1;
                    caret -= 1;
                }
                anchor = caret;
                actions.push(EditorAction::TypeKey {
                    key: Key::Backspace,
                    dwell_ms: 30 + rng.below(120) as u64,
                    gap_ms: 1 + rng.below(300) as i64,
                });
                edited = true;
            }
            5 => {
                let (lo, hi) = (anchor.min(caret), anchor.max(caret));
                if lo != hi {
                    len -= hi - lo;
                    caret = lo;
                } else if caret < len {
                    len -= 1;
                }
                anchor = caret;
                actions.push(EditorAction::TypeKey {
                    key: Key::Canc,
                    dwell_ms: 30 + rng.below(120) as u64,
                    gap_ms: 1 + rng.below(300) as i64,
                });
                edited = true;
            }
            6 => {
                if edited {
                    actions.push(EditorAction::Pass);
                }
                caret = rng.below(len + 1);
                anchor = caret;
                actions.push(EditorAction::MoveCursor { index: caret });
                actions.push(EditorAction::Pass);
                edited = false;
            }
            7 => {
                if edited {
                    actions.push(EditorAction::Pass);
                }
                let start = rng.below(len + 1);
                let end = start + rng.below(len - start + 1);
                anchor = start;
                caret = end;
                actions.push(EditorAction::Select { start, end });
                actions.push(EditorAction::Pass);
                edited = false;
            }
            _ => {
                actions.push(EditorAction::Pass);
                edited = false;
            }
        }
    }
    actions.push(EditorAction::Pass);
    (
        actions,
        SessionConfig { initial_text, start_ms: 1_000 + rng.below(10_000) as u64, ..SessionConfig::default() },
    )
}

/// A random pinyin session exercising all four incoherence causes: syllable
/// separators, separator-crossing backspaces, Chinese punctuation, and
/// confirmations via SPACEBAR or digits. Every keystroke is followed by a
/// pass so each effect is snapshotted before the next edit.
pub fn random_ime_script(seed: u64, lexicon: &Lexicon) -> Vec<EditorAction> {
    fn push_key(actions: &mut Vec<EditorAction>, rng: &mut SplitMix64, key: Key) {
        actions.push(EditorAction::TypeKey {
            key,
            dwell_ms: 30 + rng.below(100) as u64,
            gap_ms: 2 + rng.below(300) as i64,
        });
        actions.push(EditorAction::Pass);
    }

    let mut rng = SplitMix64::new(seed);
    let entries: Vec<(String, usize)> =
        lexicon.entries().map(|(p, c)| (p.clone(), c.len())).collect();
    let punctuation = [',', '.', '!', '?', ':', ';'];

    let mut actions = Vec::new();
    let segments = 2 + rng.below(6);
    for _ in 0..segments {
        match rng.below(8) {
            0 => {
                // Chinese punctuation with an empty buffer.
                let mark = *rng.pick(&punctuation);
                push_key(&mut actions, &mut rng, Key::Char(mark));
            }
            1 => {
                // Plain digit or space outside composition.
                let key = if rng.chance(1, 2) {
                    Key::Spacebar
                } else {
                    Key::Char(char::from_digit(1 + rng.below(9) as u32, 10).unwrap())
                };
                push_key(&mut actions, &mut rng, key);
            }
            _ => {
                let (pinyin, direct_candidates) = rng.pick(&entries).clone();
                for c in pinyin.chars() {
                    push_key(&mut actions, &mut rng, Key::Char(c));
                }
                // Sometimes revise: backspace into the word (possibly across
                // a separator) and retype the tail.
                if rng.chance(1, 3) && pinyin.len() >= 3 {
                    let back = 1 + rng.below(pinyin.len() - 1);
                    for _ in 0..back {
                        push_key(&mut actions, &mut rng, Key::Backspace);
                    }
                    for c in pinyin[pinyin.len() - back..].chars() {
                        push_key(&mut actions, &mut rng, Key::Char(c));
                    }
                }
                if rng.chance(5, 6) {
                    let choice = if rng.chance(1, 2) && direct_candidates > 1 {
                        ImeChoice::Digit(1 + rng.below(direct_candidates.min(9)) as u8)
                    } else if rng.chance(1, 2) {
                        ImeChoice::Digit(1)
                    } else {
                        ImeChoice::Spacebar
                    };
                    actions.push(EditorAction::ImeConfirm {
                        choice,
                        dwell_ms: 40 + rng.below(80) as u64,
                        gap_ms: 2 + rng.below(600) as i64,
                    });
                    actions.push(EditorAction::Pass);
                } else {
                    // Abandon: erase the whole buffer.
                    for _ in 0..pinyin.len() {
                        push_key(&mut actions, &mut rng, Key::Backspace);
                    }
                }
            }
        }
    }
    actions
}

/// A random keystroke burst with known timing, for checking the
/// dwell/gap/rollover decomposition against its own script.
pub struct TimingScript {
    pub actions: Vec<EditorAction>,
    pub dwells: Vec<u64>,
    pub gaps: Vec<i64>,
}

pub fn random_timing_script(seed: u64) -> TimingScript {
    let mut rng = SplitMix64::new(seed);
    let n = 2 + rng.below(30);
    let alphabet = ['a', 'b', 'c', 'd', 'e', 'f', 'g'];

    let mut actions = Vec::new();
    let mut dwells = Vec::new();
    let mut gaps = Vec::new();
    let mut prev_dwell = 0i64;
    let mut up_t = 0i64;
    // Release time per key: a key cannot be pressed again while held.
    let mut held_until: std::collections::HashMap<char, i64> = std::collections::HashMap::new();

    for i in 0..n {
        let dwell = 30 + rng.below(170) as u64;
        let gap = if i == 0 {
            rng.below(200) as i64
        } else if rng.chance(1, 3) {
            // Rollover: press before the previous key is released, but not
            // before it was pressed.
            rng.range_i64(-prev_dwell, -1)
        } else {
            rng.below(400) as i64
        };
        let down_t = up_t + gap;
        let c = loop {
            let c = *rng.pick(&alphabet);
            if held_until.get(&c).copied().unwrap_or(i64::MIN) <= down_t {
                break c;
            }
        };
        actions.push(EditorAction::TypeKey { key: Key::Char(c), dwell_ms: dwell, gap_ms: gap });
        dwells.push(dwell);
        if i > 0 {
            gaps.push(gap);
        }
        prev_dwell = dwell as i64;
        up_t = down_t + dwell as i64;
        held_until.insert(c, up_t);
    }
    TimingScript { actions, dwells, gaps }
}
