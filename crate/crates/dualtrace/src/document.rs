//! A plain text buffer indexed by Unicode scalar values.
//!
//! Every position and length in the pipeline counts scalar values, so one
//! Chinese character contributes exactly 1 wherever a Latin letter would.

use crate::error::DocError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    chars: Vec<char>,
}

impl Document {
    pub fn new() -> Self {
        Self { chars: Vec::new() }
    }

    pub fn from_text(text: &str) -> Self {
        Self { chars: text.chars().collect() }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn char_at(&self, idx: usize) -> Option<char> {
        self.chars.get(idx).copied()
    }

    /// Text in `[left, right)`. `right` may exceed the length; the slice is
    /// clamped at the end of the document, mirroring an editor text query.
    pub fn slice_clamped(&self, left: usize, right: usize) -> Result<String, DocError> {
        if left > self.chars.len() || left > right {
            return Err(DocError::OutOfBounds { left, right, len: self.chars.len() });
        }
        let right = right.min(self.chars.len());
        Ok(self.chars[left..right].iter().collect())
    }

    pub fn slice(&self, left: usize, right: usize) -> Result<String, DocError> {
        if left > right || right > self.chars.len() {
            return Err(DocError::OutOfBounds { left, right, len: self.chars.len() });
        }
        Ok(self.chars[left..right].iter().collect())
    }

    pub fn insert(&mut self, idx: usize, text: &str) -> Result<(), DocError> {
        if idx > self.chars.len() {
            return Err(DocError::OutOfBounds { left: idx, right: idx, len: self.chars.len() });
        }
        self.chars.splice(idx..idx, text.chars());
        Ok(())
    }

    pub fn delete(&mut self, left: usize, right: usize) -> Result<(), DocError> {
        if left > right || right > self.chars.len() {
            return Err(DocError::OutOfBounds { left, right, len: self.chars.len() });
        }
        self.chars.drain(left..right);
        Ok(())
    }

    pub fn replace(&mut self, left: usize, right: usize, text: &str) -> Result<(), DocError> {
        if left > right || right > self.chars.len() {
            return Err(DocError::OutOfBounds { left, right, len: self.chars.len() });
        }
        self.chars.splice(left..right, text.chars());
        Ok(())
    }
}

impl std::fmt::Display for Document {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.chars {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<&str> for Document {
    fn from(s: &str) -> Self {
        Document::from_text(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_indexing_counts_chinese_chars_as_one() {
        let doc = Document::from_text("电热毯");
        assert_eq!(doc.len(), 3);
        assert_eq!(doc.char_at(1), Some('热'));
        assert_eq!(doc.slice(0, 2).unwrap(), "电热");
    }

    #[test]
    fn replace_shifts_length() {
        let mut doc = Document::from_text("A journey of a t");
        doc.replace(2, 9, "travel").unwrap();
        assert_eq!(doc.to_string(), "A travel of a t");
        assert_eq!(doc.len(), 15);
    }

    #[test]
    fn clamped_slice_stops_at_end() {
        let doc = Document::from_text("abc");
        assert_eq!(doc.slice_clamped(1, 10).unwrap(), "bc");
        assert!(doc.slice_clamped(4, 10).is_err());
        assert!(doc.slice(1, 10).is_err());
    }
}
