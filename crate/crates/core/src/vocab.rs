//! Subtoken vocabulary: identifier splitting, frequency-ranked index, and
//! serialization.
//!
//! Node texts are split into lowercase subtokens (camelCase, SCREAMING_CASE,
//! and digit boundaries all split). The vocabulary reserves index 0 for
//! unknown subtokens and 1 for padding; real subtokens start at index 2,
//! ordered by descending count then lexicographically, so the mapping is a
//! pure function of the input multiset.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};

pub const UNKNOWN_INDEX: usize = 0;
pub const PAD_INDEX: usize = 1;
pub const RESERVED: usize = 2;

/// Splits one node text into lowercase subtokens.
///
/// Alphanumeric runs split at case boundaries (`camelCase`, `HTTPServer`)
/// and at letter/digit transitions; anything non-alphanumeric separates
/// runs. Text with no alphanumeric content at all (operator and punctuation
/// tokens) maps to itself lowercased, so every non-empty text has at least
/// one subtoken.
pub fn split_subtokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if !cur.is_empty() {
            let prev = chars[i - 1];
            let boundary =
                // aB
                (prev.is_lowercase() && c.is_uppercase())
                // 9a / a9
                || (prev.is_ascii_digit() != c.is_ascii_digit())
                // ABc: the last capital of a run starts the next word
                || (prev.is_uppercase()
                    && c.is_uppercase()
                    && chars.get(i + 1).is_some_and(|n| n.is_lowercase()));
            if boundary {
                out.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    if out.is_empty() {
        if text.is_empty() {
            return Vec::new();
        }
        return vec![text.to_lowercase()];
    }
    out.into_iter().map(|s| s.to_lowercase()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    min_count: u32,
    /// Subtokens from index 2 upward.
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabWire {
    min_count: u32,
    tokens: Vec<String>,
}

impl Vocabulary {
    /// Builds from a stream of node texts. Subtokens below `min_count` are
    /// dropped (they map to the unknown index later).
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>, min_count: u32) -> Vocabulary {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for text in texts {
            for sub in split_subtokens(text) {
                *counts.entry(sub).or_insert(0) += 1;
            }
        }
        let mut ranked: Vec<(String, u64)> =
            counts.into_iter().filter(|(_, c)| *c >= u64::from(min_count)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let tokens: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
        Vocabulary::from_tokens(min_count, tokens)
    }

    fn from_tokens(min_count: u32, tokens: Vec<String>) -> Vocabulary {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i + RESERVED))
            .collect();
        Vocabulary { min_count, tokens, index }
    }

    /// Total number of embedding rows, reserved indices included.
    pub fn len(&self) -> usize {
        self.tokens.len() + RESERVED
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn min_count(&self) -> u32 {
        self.min_count
    }

    /// Index for one subtoken; unknown subtokens map to [`UNKNOWN_INDEX`].
    pub fn subtoken_index(&self, subtoken: &str) -> usize {
        self.index.get(subtoken).copied().unwrap_or(UNKNOWN_INDEX)
    }

    /// Indices for a whole node text, one per subtoken.
    pub fn text_indices(&self, text: &str) -> Vec<usize> {
        split_subtokens(text).iter().map(|s| self.subtoken_index(s)).collect()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = VocabWire { min_count: self.min_count, tokens: self.tokens.clone() };
        serde_json::to_string(&wire)
            .map_err(|e| CoreError::Data(format!("vocabulary serialization: {e}")))
    }

    pub fn from_json(json: &str) -> Result<Vocabulary> {
        let wire: VocabWire = serde_json::from_str(json)
            .map_err(|e| CoreError::Data(format!("vocabulary parse: {e}")))?;
        Ok(Vocabulary::from_tokens(wire.min_count, wire.tokens))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| CoreError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Vocabulary> {
        let json = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
        Vocabulary::from_json(&json)
    }

    /// Content hash of the serialized form; checkpoints embed it so a model
    /// is never run against a different vocabulary than it was trained with.
    pub fn content_hash(&self) -> Result<String> {
        let json = self.to_json()?;
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        Ok(format!("{:x}", hasher.finalize()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_camel_case() {
        assert_eq!(split_subtokens("getCumulativeCpuTime"), vec![
            "get",
            "cumulative",
            "cpu",
            "time"
        ]);
    }

    #[test]
    fn splits_acronym_runs() {
        assert_eq!(split_subtokens("HTTPServer"), vec!["http", "server"]);
        assert_eq!(split_subtokens("LOG"), vec!["log"]);
    }

    #[test]
    fn splits_underscores_and_digits() {
        assert_eq!(split_subtokens("MAX_RETRY_COUNT"), vec!["max", "retry", "count"]);
        assert_eq!(split_subtokens("utf8str"), vec!["utf", "8", "str"]);
        assert_eq!(split_subtokens("arg0"), vec!["arg", "0"]);
    }

    #[test]
    fn punctuation_maps_to_itself() {
        assert_eq!(split_subtokens(";"), vec![";"]);
        assert_eq!(split_subtokens("++"), vec!["++"]);
        assert!(split_subtokens("").is_empty());
    }

    #[test]
    fn string_literals_split_on_quotes() {
        assert_eq!(split_subtokens("\"CPU usage\""), vec!["cpu", "usage"]);
    }

    /// Hand-counted oracle: counts from a tiny corpus, ranked by count then
    /// lexicographically, with min_count applied.
    #[test]
    fn build_matches_hand_counted_ranking() {
        // Subtoken counts: log 3 (logValue, LOG, logValue), value 2,
        // get 1, set 1.
        let texts = ["logValue", "LOG", "getX", "setX", "logValue"];
        // x appears twice (getX, setX).
        let v = Vocabulary::build(texts.iter().copied(), 2);
        assert_eq!(v.tokens(), &["log", "value", "x"]);
        assert_eq!(v.subtoken_index("log"), 2);
        assert_eq!(v.subtoken_index("value"), 3);
        assert_eq!(v.subtoken_index("x"), 4);
        assert_eq!(v.subtoken_index("get"), UNKNOWN_INDEX);
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn ties_break_lexicographically() {
        let texts = ["bb aa", "aa bb"]; // both count 2
        let v = Vocabulary::build(texts.iter().copied(), 1);
        assert_eq!(v.tokens(), &["aa", "bb"]);
    }

    #[test]
    fn min_count_default_drops_singletons() {
        let v = Vocabulary::build(["once", "twice", "twice"], 2);
        assert_eq!(v.tokens(), &["twice"]);
    }

    #[test]
    fn json_round_trip_preserves_order_and_hash() {
        let v = Vocabulary::build(["alpha beta", "beta"], 1);
        let json = v.to_json().unwrap();
        let back = Vocabulary::from_json(&json).unwrap();
        assert_eq!(v, back);
        assert_eq!(v.content_hash().unwrap(), back.content_hash().unwrap());
    }

    #[test]
    fn hash_differs_for_different_vocabularies() {
        let a = Vocabulary::build(["alpha"], 1);
        let b = Vocabulary::build(["beta"], 1);
        assert_ne!(a.content_hash().unwrap(), b.content_hash().unwrap());
    }

    #[test]
    fn text_indices_cover_unknowns() {
        let v = Vocabulary::build(["known known"], 1);
        assert_eq!(v.text_indices("knownMystery"), vec![2, UNKNOWN_INDEX]);
    }
}
