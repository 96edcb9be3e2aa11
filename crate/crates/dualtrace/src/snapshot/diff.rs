//! Minimal edit scripts between two text versions.
//!
//! `diff(new, old)` is the change a whole-text logging pass records, and
//! `apply_delta(old, delta)` is the reconstruction function that plays it
//! back. Scripts are minimal in total edit length (deleted symbols plus
//! inserted symbols) and are normalized so that at every change point the
//! deletion precedes the insertion.

use serde::{Deserialize, Serialize};

use crate::error::SnapshotError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffOp {
    /// Copy the next `n` symbols of the old text.
    Keep(usize),
    /// Drop the next `n` symbols of the old text.
    Delete(usize),
    /// Emit new symbols.
    Insert(String),
}

/// An ordered edit script transforming an old text into a new one.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiffDelta {
    pub ops: Vec<DiffOp>,
}

impl DiffDelta {
    /// Deleted symbols plus inserted symbols.
    pub fn total_edit_length(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                DiffOp::Keep(_) => 0,
                DiffOp::Delete(n) => *n,
                DiffOp::Insert(s) => s.chars().count(),
            })
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|op| matches!(op, DiffOp::Keep(_)))
    }
}

/// Myers' greedy shortest-edit-script search over scalar values.
pub fn diff(new_text: &str, old_text: &str) -> DiffDelta {
    let old: Vec<char> = old_text.chars().collect();
    let new: Vec<char> = new_text.chars().collect();
    let raw = myers(&old, &new);
    normalize(raw, &new)
}

/// Reconstruct the target text from a source text and an edit script.
pub fn apply_delta(old_text: &str, delta: &DiffDelta) -> Result<String, SnapshotError> {
    let old: Vec<char> = old_text.chars().collect();
    let mut out = String::new();
    let mut idx = 0usize;
    for op in &delta.ops {
        match op {
            DiffOp::Keep(n) => {
                let end = idx.checked_add(*n).filter(|e| *e <= old.len()).ok_or(
                    SnapshotError::DeltaSpanMismatch { consumed: idx + n, available: old.len() },
                )?;
                out.extend(&old[idx..end]);
                idx = end;
            }
            DiffOp::Delete(n) => {
                let end = idx.checked_add(*n).filter(|e| *e <= old.len()).ok_or(
                    SnapshotError::DeltaSpanMismatch { consumed: idx + n, available: old.len() },
                )?;
                idx = end;
            }
            DiffOp::Insert(s) => out.push_str(s),
        }
    }
    if idx != old.len() {
        return Err(SnapshotError::DeltaSpanMismatch { consumed: idx, available: old.len() });
    }
    Ok(out)
}

/// Edit-graph moves, reversed during backtracking.
enum RawOp {
    Keep,
    Delete,
    Insert(char),
}

/// Furthest-reaching x per diagonal k, stored with an offset so negative k
/// indexes work.
struct Diagonals {
    offset: isize,
    v: Vec<usize>,
}

impl Diagonals {
    fn new(max: usize) -> Self {
        Self { offset: max as isize, v: vec![0; 2 * max + 2] }
    }

    fn get(&self, k: isize) -> usize {
        self.v[(k + self.offset) as usize]
    }

    fn set(&mut self, k: isize, x: usize) {
        self.v[(k + self.offset) as usize] = x;
    }
}

fn myers(old: &[char], new: &[char]) -> Vec<RawOp> {
    let n = old.len();
    let m = new.len();
    let max = n + m;
    if max == 0 {
        return Vec::new();
    }

    let mut v = Diagonals::new(max);
    let mut trace: Vec<Vec<usize>> = Vec::new();
    let mut found_d = None;

    'outer: for d in 0..=(max as isize) {
        trace.push(v.v.clone());
        let mut k = -d;
        while k <= d {
            let mut x = if k == -d || (k != d && v.get(k - 1) < v.get(k + 1)) {
                v.get(k + 1)
            } else {
                v.get(k - 1) + 1
            };
            let mut y = (x as isize - k) as usize;
            while x < n && y < m && old[x] == new[y] {
                x += 1;
                y += 1;
            }
            v.set(k, x);
            if x >= n && y >= m {
                found_d = Some(d);
                break 'outer;
            }
            k += 2;
        }
    }

    let d_final = found_d.expect("edit distance is bounded by n + m");
    let offset = max as isize;
    let mut ops: Vec<RawOp> = Vec::new();
    let mut x = n;
    let mut y = m;

    for d in (0..=d_final).rev() {
        let vd = &trace[d as usize];
        let at = |k: isize| vd[(k + offset) as usize];
        let k = x as isize - y as isize;

        if d == 0 {
            while x > 0 && y > 0 {
                ops.push(RawOp::Keep);
                x -= 1;
                y -= 1;
            }
            break;
        }

        let prev_k = if k == -d || (k != d && at(k - 1) < at(k + 1)) { k + 1 } else { k - 1 };
        let prev_x = at(prev_k);
        let prev_y = (prev_x as isize - prev_k) as usize;

        while x > prev_x && y > prev_y {
            ops.push(RawOp::Keep);
            x -= 1;
            y -= 1;
        }
        if x == prev_x {
            // vertical move: a symbol of the new text was inserted
            ops.push(RawOp::Insert(new[y - 1]));
            y -= 1;
        } else {
            ops.push(RawOp::Delete);
            x -= 1;
        }
        debug_assert_eq!((x, y), (prev_x, prev_y));
    }

    ops.reverse();
    ops
}

/// Coalesce runs and order each change point as delete-then-insert.
fn normalize(raw: Vec<RawOp>, _new: &[char]) -> DiffDelta {
    let mut ops: Vec<DiffOp> = Vec::new();
    let mut pending_del = 0usize;
    let mut pending_ins = String::new();

    let flush_changes = |ops: &mut Vec<DiffOp>, del: &mut usize, ins: &mut String| {
        if *del > 0 {
            ops.push(DiffOp::Delete(*del));
            *del = 0;
        }
        if !ins.is_empty() {
            ops.push(DiffOp::Insert(std::mem::take(ins)));
        }
    };

    for op in raw {
        match op {
            RawOp::Keep => {
                flush_changes(&mut ops, &mut pending_del, &mut pending_ins);
                if let Some(DiffOp::Keep(n)) = ops.last_mut() {
                    *n += 1;
                } else {
                    ops.push(DiffOp::Keep(1));
                }
            }
            RawOp::Delete => pending_del += 1,
            RawOp::Insert(c) => pending_ins.push(c),
        }
    }
    flush_changes(&mut ops, &mut pending_del, &mut pending_ins);
    DiffDelta { ops }
}
