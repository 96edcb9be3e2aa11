//! The pinyin-to-candidates map shared by the input-method simulation and
//! the word segmenter.
//!
//! One entry per line: the separator-free pinyin of a word, then its
//! candidate strings in rank order, whitespace-separated. `#` starts a
//! comment.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::ScriptError;

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let pinyin = parts.next().expect("nonempty line").to_string();
            if !pinyin.chars().all(|c| c.is_ascii_lowercase()) {
                return Err(ScriptError::Parse {
                    line: idx + 1,
                    msg: format!("pinyin key \"{pinyin}\" must be lowercase ascii"),
                });
            }
            let candidates: Vec<String> = parts.map(str::to_string).collect();
            if candidates.is_empty() {
                return Err(ScriptError::Parse {
                    line: idx + 1,
                    msg: format!("entry \"{pinyin}\" lists no candidates"),
                });
            }
            entries.insert(pinyin, candidates);
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, std::io::Error> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, pinyin: &str) -> Option<&[String]> {
        self.entries.get(pinyin).map(Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Vec<String>)> {
        self.entries.iter()
    }

    /// Candidate list for a buffer. A direct entry wins; otherwise the
    /// buffer is chunked greedily on the longest known pinyin prefix and the
    /// per-chunk first candidates concatenate into a single composed
    /// candidate, the way an IME assembles multi-word input.
    pub fn candidates(&self, buffer: &str) -> Option<Vec<String>> {
        if let Some(direct) = self.entries.get(buffer) {
            return Some(direct.clone());
        }
        let mut rest = buffer;
        let mut composed = String::new();
        while !rest.is_empty() {
            let chunk = (1..=rest.len())
                .rev()
                .map(|n| &rest[..n])
                .find(|prefix| self.entries.contains_key(*prefix))?;
            composed.push_str(&self.entries[chunk][0]);
            rest = &rest[chunk.len()..];
        }
        if composed.is_empty() {
            None
        } else {
            Some(vec![composed])
        }
    }

    /// Every candidate string, the dictionary for forward maximum matching.
    pub fn words(&self) -> BTreeSet<String> {
        self.entries.values().flatten().cloned().collect()
    }
}

/// The lexicon used by the worked examples and tests.
pub const FIXTURE_LEXICON: &str = "\
# pinyin  candidates (rank order)
qianli 千里
zhi 之 知
xing 行
shi 始
yu 于
zuxia 足下
zhe 这
chanpin 产品
dianretan 电热毯
dian 电 店
re 热
tan 毯 谈
ma 马 妈 吗
xuesheng 学生
xue 学 雪
sheng 生 声
xiong 兄
nihao 你好
hao 好 号
ni 你 泥
men 们 门
women 我们
shuo 说
hua 话 花
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_entry_returns_full_candidate_list() {
        let lex = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        assert_eq!(lex.candidates("ma").unwrap(), ["马", "妈", "吗"]);
    }

    #[test]
    fn composed_lookup_concatenates_first_candidates() {
        let lex = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        assert_eq!(lex.candidates("qianlizhixing").unwrap(), ["千里之行"]);
        assert_eq!(lex.candidates("shiyuzuxia").unwrap(), ["始于足下"]);
    }

    #[test]
    fn unknown_buffer_has_no_candidates() {
        let lex = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        assert!(lex.candidates("qqq").is_none());
    }

    #[test]
    fn word_set_contains_all_candidates() {
        let lex = Lexicon::parse(FIXTURE_LEXICON).unwrap();
        let words = lex.words();
        assert!(words.contains("千里"));
        assert!(words.contains("妈"));
        assert!(!words.contains("千里之行"));
    }

    #[test]
    fn malformed_entry_names_line() {
        let err = Lexicon::parse("ma 马\nnocandidates\n").unwrap_err();
        assert!(matches!(err, ScriptError::Parse { line: 2, .. }));
    }
}
