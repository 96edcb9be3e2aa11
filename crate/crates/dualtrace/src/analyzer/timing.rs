//! Tripartite timing decomposition: dwell times, positive interkeystroke
//! intervals, and rollovers.

use std::collections::HashMap;

use crate::trace::{Key, KeyEvent, KeyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DwellSample {
    pub value_ms: i64,
    pub down_id: u64,
    pub up_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapSample {
    /// `next keydown - previous keyup`: positive flight time, or negative
    /// overlap when the next key is pressed before the previous is released.
    pub value_ms: i64,
    pub from_up_id: u64,
    pub to_down_id: u64,
}

#[derive(Debug, Clone, Default)]
pub struct TimingDecomposition {
    pub dwell: Vec<DwellSample>,
    pub positive_iki: Vec<GapSample>,
    pub rollover: Vec<GapSample>,
    pub diagnostics: Vec<String>,
}

impl TimingDecomposition {
    /// All gaps in press order, the positive and rollover lists merged back.
    pub fn gaps_in_order(&self) -> Vec<i64> {
        let mut all: Vec<&GapSample> = self.positive_iki.iter().chain(&self.rollover).collect();
        all.sort_by_key(|g| g.to_down_id);
        all.iter().map(|g| g.value_ms).collect()
    }
}

/// Pair keydowns with their keyups and split adjacent-press intervals into
/// positive flight times and rollovers. A zero gap counts as positive.
pub fn decompose_timing(keys: &[KeyEvent]) -> TimingDecomposition {
    let mut out = TimingDecomposition::default();

    // Pair each keyup with the oldest outstanding keydown of the same key.
    let mut pending: HashMap<&Key, Vec<usize>> = HashMap::new();
    let mut up_of: Vec<Option<usize>> = vec![None; keys.len()];
    for (idx, ev) in keys.iter().enumerate() {
        match ev.kind {
            KeyKind::Down => pending.entry(&ev.key).or_default().push(idx),
            KeyKind::Up => {
                if let Some(stack) = pending.get_mut(&ev.key) {
                    if !stack.is_empty() {
                        let down_idx = stack.remove(0);
                        up_of[down_idx] = Some(idx);
                    }
                }
            }
        }
    }

    let downs: Vec<usize> = keys
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == KeyKind::Down)
        .map(|(i, _)| i)
        .collect();

    for &down_idx in &downs {
        match up_of[down_idx] {
            Some(up_idx) => out.dwell.push(DwellSample {
                value_ms: keys[up_idx].t.delta(keys[down_idx].t),
                down_id: keys[down_idx].id,
                up_id: keys[up_idx].id,
            }),
            None => out.diagnostics.push(format!(
                "keydown {} ({}) has no matching keyup; dwell omitted",
                keys[down_idx].id,
                keys[down_idx].key.as_wire()
            )),
        }
    }

    for pair in downs.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        let Some(prev_up) = up_of[prev] else {
            out.diagnostics.push(format!(
                "gap after keydown {} skipped: no keyup to measure from",
                keys[prev].id
            ));
            continue;
        };
        let gap = GapSample {
            value_ms: keys[next].t.delta(keys[prev_up].t),
            from_up_id: keys[prev_up].id,
            to_down_id: keys[next].id,
        };
        if gap.value_ms < 0 {
            out.rollover.push(gap);
        } else {
            out.positive_iki.push(gap);
        }
    }
    out
}
