//! Vocabulary fitting, sequence encoding, padding, and label encoding.
//!
//! Tokenization is the classic word-level scheme: lowercase, treat a fixed
//! set of punctuation characters as separators, split on whitespace. Word
//! indices are assigned by descending corpus frequency (ties broken by
//! first occurrence), starting at 1; index 0 is reserved for padding and
//! never assigned to a word.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// Characters treated as token separators, alongside whitespace.
/// The apostrophe is deliberately not included.
const PUNCTUATION: &str = "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~";

/// Splits a text into lowercase word tokens.
pub fn word_tokens(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| c.is_whitespace() || PUNCTUATION.contains(c))
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Frequency-ranked word → index map with index 0 reserved for padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    index_of: BTreeMap<String, u32>,
    /// Indexed words in index order (`words[0]` has index 1).
    words: Vec<String>,
    /// Corpus frequency of every seen word, indexed or not.
    frequencies: BTreeMap<String, u64>,
    max_words: usize,
}

impl Vocabulary {
    /// Number of indexed words (indices run 1..=len).
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_words(&self) -> usize {
        self.max_words
    }

    /// Index of a word, if it received one.
    pub fn index(&self, word: &str) -> Option<u32> {
        self.index_of.get(word).copied()
    }

    /// Corpus frequency of a word (0 if never seen).
    pub fn frequency(&self, word: &str) -> u64 {
        self.frequencies.get(word).copied().unwrap_or(0)
    }

    /// Indexed words in index order, starting at index 1.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Serializes as `word<TAB>index<TAB>count` lines sorted by index.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (pos, word) in self.words.iter().enumerate() {
            let count = self.frequency(word);
            out.push_str(word);
            out.push('\t');
            out.push_str(&(pos as u32 + 1).to_string());
            out.push('\t');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the TSV form written by [`Vocabulary::to_tsv`].
    pub fn from_tsv(text: &str) -> Result<Self, Error> {
        let mut index_of = BTreeMap::new();
        let mut words = Vec::new();
        let mut frequencies = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let mut parts = line.split('\t');
            let (word, idx, count) = match (parts.next(), parts.next(), parts.next(), parts.next())
            {
                (Some(w), Some(i), Some(c), None) => (w, i, c),
                _ => {
                    return Err(Error::MalformedArtifact {
                        what: "vocabulary",
                        detail: format!("line {}: expected word<TAB>index<TAB>count", lineno + 1),
                    })
                }
            };
            let idx: u32 = idx.parse().map_err(|_| Error::MalformedArtifact {
                what: "vocabulary",
                detail: format!("line {}: bad index {idx:?}", lineno + 1),
            })?;
            let count: u64 = count.parse().map_err(|_| Error::MalformedArtifact {
                what: "vocabulary",
                detail: format!("line {}: bad count {count:?}", lineno + 1),
            })?;
            if idx as usize != words.len() + 1 {
                return Err(Error::MalformedArtifact {
                    what: "vocabulary",
                    detail: format!("line {}: index {idx} not contiguous", lineno + 1),
                });
            }
            if index_of.insert(word.to_string(), idx).is_some() {
                return Err(Error::MalformedArtifact {
                    what: "vocabulary",
                    detail: format!("line {}: duplicate word {word:?}", lineno + 1),
                });
            }
            words.push(word.to_string());
            frequencies.insert(word.to_string(), count);
        }
        let max_words = words.len();
        Ok(Vocabulary {
            index_of,
            words,
            frequencies,
            max_words,
        })
    }

    /// FNV-1a hash of the serialized vocabulary; stored in checkpoints to
    /// detect mismatched vocabulary files.
    pub fn fingerprint(&self) -> u64 {
        fnv1a64(self.to_tsv().as_bytes())
    }
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Fits a vocabulary on a corpus.
///
/// Words are ranked by descending frequency, ties broken by first
/// occurrence in the corpus; only the top `max_words` receive indices
/// (1-based). Errors if no token survives tokenization.
pub fn fit_vocabulary<S: AsRef<str>>(texts: &[S], max_words: usize) -> Result<Vocabulary, Error> {
    let mut frequencies: BTreeMap<String, u64> = BTreeMap::new();
    let mut first_seen: BTreeMap<String, u64> = BTreeMap::new();
    let mut position: u64 = 0;
    for text in texts {
        for token in word_tokens(text.as_ref()) {
            *frequencies.entry(token.clone()).or_insert(0) += 1;
            first_seen.entry(token).or_insert(position);
            position += 1;
        }
    }
    if frequencies.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut ranked: Vec<&String> = frequencies.keys().collect();
    ranked.sort_by_key(|w| (core::cmp::Reverse(frequencies[*w]), first_seen[*w]));
    ranked.truncate(max_words);

    let mut index_of = BTreeMap::new();
    let mut words = Vec::with_capacity(ranked.len());
    for (pos, word) in ranked.into_iter().enumerate() {
        index_of.insert(word.clone(), pos as u32 + 1);
        words.push(word.clone());
    }
    Ok(Vocabulary {
        index_of,
        words,
        frequencies,
        max_words,
    })
}

/// Encodes texts as index sequences. Words without an index are dropped;
/// an all-unknown (or empty) text yields an empty sequence.
pub fn texts_to_sequences<S: AsRef<str>>(vocab: &Vocabulary, texts: &[S]) -> Vec<Vec<u32>> {
    texts
        .iter()
        .map(|text| {
            word_tokens(text.as_ref())
                .iter()
                .filter_map(|t| vocab.index(t))
                .collect()
        })
        .collect()
}

/// A batch of padded sequences: `n × max_len` ids, row-major.
///
/// Rows are post-padded with 0, so the non-zero entries of each row form a
/// contiguous prefix; sequences longer than `max_len` keep their first
/// `max_len` tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceBatch {
    ids: Vec<u32>,
    rows: usize,
    max_len: usize,
}

impl SequenceBatch {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.ids[i * self.max_len..(i + 1) * self.max_len]
    }

    /// New batch holding the given rows, in the given order.
    pub fn gather(&self, indices: &[usize]) -> SequenceBatch {
        let mut ids = Vec::with_capacity(indices.len() * self.max_len);
        for &i in indices {
            ids.extend_from_slice(self.row(i));
        }
        SequenceBatch {
            ids,
            rows: indices.len(),
            max_len: self.max_len,
        }
    }

    /// Largest id in the batch (0 for an all-padding batch).
    pub fn max_id(&self) -> u32 {
        self.ids.iter().copied().max().unwrap_or(0)
    }
}

/// Pads (with trailing zeros) or head-truncates every sequence to
/// `max_len`.
pub fn pad_sequences(seqs: &[Vec<u32>], max_len: usize) -> SequenceBatch {
    assert!(max_len >= 1, "max_len must be at least 1");
    let mut ids = vec![0u32; seqs.len() * max_len];
    for (i, seq) in seqs.iter().enumerate() {
        let take = seq.len().min(max_len);
        ids[i * max_len..i * max_len + take].copy_from_slice(&seq[..take]);
    }
    SequenceBatch {
        ids,
        rows: seqs.len(),
        max_len,
    }
}

/// Ordered class list of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSchema {
    pub name: String,
    pub classes: Vec<String>,
}

impl LabelSchema {
    pub fn new(name: &str, classes: &[&str]) -> Self {
        LabelSchema {
            name: String::from(name),
            classes: classes.iter().map(|&c| String::from(c)).collect(),
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}

/// One-hot encoded labels: `n × k` with exactly one 1 per row, stored as
/// reals for direct use in the loss.
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotLabels {
    data: Vec<f64>,
    rows: usize,
    classes: usize,
}

impl OneHotLabels {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.classes..(i + 1) * self.classes]
    }

    /// Class index of row `i`.
    pub fn class_of(&self, i: usize) -> usize {
        self.row(i)
            .iter()
            .position(|&v| v == 1.0)
            .expect("one-hot row has a 1")
    }

    pub fn gather(&self, indices: &[usize]) -> OneHotLabels {
        let mut data = Vec::with_capacity(indices.len() * self.classes);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        OneHotLabels {
            data,
            rows: indices.len(),
            classes: self.classes,
        }
    }

    /// Builds directly from class indices (used by tests and tooling).
    pub fn from_class_indices(indices: &[usize], k: usize) -> Result<Self, Error> {
        let mut data = vec![0.0; indices.len() * k];
        for (i, &c) in indices.iter().enumerate() {
            if c >= k {
                return Err(Error::ClassOutOfRange {
                    index: c,
                    classes: k,
                });
            }
            data[i * k + c] = 1.0;
        }
        Ok(OneHotLabels {
            data,
            rows: indices.len(),
            classes: k,
        })
    }
}

/// One-hot encodes labels in schema order. Unknown labels error with the
/// offending row and label.
pub fn one_hot<S: AsRef<str>>(labels: &[S], schema: &LabelSchema) -> Result<OneHotLabels, Error> {
    let k = schema.num_classes();
    let mut data = vec![0.0; labels.len() * k];
    for (row, label) in labels.iter().enumerate() {
        let label = label.as_ref();
        match schema.class_index(label) {
            Some(c) => data[row * k + c] = 1.0,
            None => {
                return Err(Error::UnknownLabel {
                    row,
                    label: String::from(label),
                    schema: schema.name.clone(),
                })
            }
        }
    }
    Ok(OneHotLabels {
        data,
        rows: labels.len(),
        classes: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fit_ranks_by_frequency_then_first_occurrence() {
        let v = fit_vocabulary(&["a b b", "b c"], 10).unwrap();
        assert_eq!(v.index("b"), Some(1));
        assert_eq!(v.index("a"), Some(2));
        assert_eq!(v.index("c"), Some(3));
        assert_eq!(v.len(), 3);
        assert_eq!(v.frequency("b"), 3);
        assert_eq!(v.frequency("a"), 1);
    }

    #[test]
    fn fit_singleton() {
        let v = fit_vocabulary(&["x"], 10).unwrap();
        assert_eq!(v.index("x"), Some(1));
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn fit_applies_cap_after_ordering() {
        let v = fit_vocabulary(&["a b c d"], 2).unwrap();
        assert_eq!(v.index("a"), Some(1));
        assert_eq!(v.index("b"), Some(2));
        assert_eq!(v.index("c"), None);
        assert_eq!(v.index("d"), None);
        assert_eq!(v.len(), 2);
        // Unindexed words still have recorded frequencies.
        assert_eq!(v.frequency("c"), 1);
    }

    #[test]
    fn fit_rejects_empty_corpus() {
        assert_eq!(fit_vocabulary(&[""], 10), Err(Error::EmptyCorpus));
        assert_eq!(fit_vocabulary(&["!!! ..."], 10), Err(Error::EmptyCorpus));
        let empty: &[&str] = &[];
        assert_eq!(fit_vocabulary(empty, 10), Err(Error::EmptyCorpus));
    }

    #[test]
    fn tokenizer_lowercases_and_splits_punctuation() {
        assert_eq!(word_tokens("Hello, WORLD!"), vec!["hello", "world"]);
        assert_eq!(word_tokens("don't stop"), vec!["don't", "stop"]);
        assert_eq!(word_tokens("a,b.c"), vec!["a", "b", "c"]);
    }

    #[test]
    fn sequences_drop_unknown_words() {
        let v = fit_vocabulary(&["a b b", "b c"], 10).unwrap();
        assert_eq!(texts_to_sequences(&v, &["a b z"]), vec![vec![2, 1]]);
    }

    #[test]
    fn sequences_empty_text() {
        let v = fit_vocabulary(&["a b b", "b c"], 10).unwrap();
        assert_eq!(texts_to_sequences(&v, &[""]), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn sequences_repeated_lookup() {
        let v = fit_vocabulary(&["a b b", "b c"], 10).unwrap();
        assert_eq!(texts_to_sequences(&v, &["b b b"]), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn pad_post_pads() {
        let batch = pad_sequences(&[vec![1, 2, 3]], 5);
        assert_eq!(batch.row(0), &[1, 2, 3, 0, 0]);
    }

    #[test]
    fn pad_truncates_keeping_head() {
        let batch = pad_sequences(&[vec![1, 2, 3, 4, 5, 6]], 4);
        assert_eq!(batch.row(0), &[1, 2, 3, 4]);
    }

    #[test]
    fn pad_all_padding_row() {
        let batch = pad_sequences(&[vec![]], 3);
        assert_eq!(batch.row(0), &[0, 0, 0]);
    }

    #[test]
    fn one_hot_binary() {
        let schema = LabelSchema::new("t", &["non-hate", "hate"]);
        let oh = one_hot(&["hate"], &schema).unwrap();
        assert_eq!(oh.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn one_hot_positional() {
        let schema = LabelSchema::new("t", &["none", "racism", "sexism"]);
        let oh = one_hot(&["racism", "none"], &schema).unwrap();
        assert_eq!(oh.row(0), &[0.0, 1.0, 0.0]);
        assert_eq!(oh.row(1), &[1.0, 0.0, 0.0]);
        assert_eq!(oh.class_of(0), 1);
        assert_eq!(oh.class_of(1), 0);
    }

    #[test]
    fn one_hot_unknown_label_errors() {
        let schema = LabelSchema::new("t", &["none", "racism", "sexism"]);
        let err = one_hot(&["bad"], &schema).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownLabel {
                row: 0,
                label: String::from("bad"),
                schema: String::from("t"),
            }
        );
    }

    #[test]
    fn tsv_round_trip_is_byte_exact() {
        let v = fit_vocabulary(&["a b b", "b c"], 10).unwrap();
        let tsv = v.to_tsv();
        let loaded = Vocabulary::from_tsv(&tsv).unwrap();
        assert_eq!(loaded.to_tsv(), tsv);
        assert_eq!(loaded.index("b"), Some(1));
        assert_eq!(loaded.fingerprint(), v.fingerprint());
    }

    #[test]
    fn tsv_rejects_gaps_and_junk() {
        assert!(Vocabulary::from_tsv("a\t2\t1\n").is_err());
        assert!(Vocabulary::from_tsv("a\t1\n").is_err());
        assert!(Vocabulary::from_tsv("a\tx\t1\n").is_err());
    }

    fn corpus_strategy() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec("[a-e ]{0,20}", 1..12)
    }

    proptest! {
        #[test]
        fn indices_are_a_contiguous_bijection(texts in corpus_strategy(), cap in 1usize..8) {
            if let Ok(v) = fit_vocabulary(&texts, cap) {
                prop_assert!(v.len() <= cap);
                let mut seen = alloc::collections::BTreeSet::new();
                for word in v.words() {
                    let idx = v.index(word).unwrap();
                    prop_assert!(idx >= 1 && idx as usize <= v.len());
                    prop_assert!(seen.insert(idx), "duplicate index {idx}");
                }
                prop_assert_eq!(seen.len(), v.len());
            }
        }

        #[test]
        fn fitting_corpus_sequences_stay_in_range(texts in corpus_strategy()) {
            if let Ok(v) = fit_vocabulary(&texts, 50_000) {
                for seq in texts_to_sequences(&v, &texts) {
                    for id in seq {
                        prop_assert!(id >= 1 && id as usize <= v.len());
                    }
                }
            }
        }

        #[test]
        fn padded_shape_is_exact(seqs in proptest::collection::vec(
            proptest::collection::vec(1u32..100, 0..40), 0..10), max_len in 1usize..60)
        {
            let batch = pad_sequences(&seqs, max_len);
            prop_assert_eq!(batch.rows(), seqs.len());
            prop_assert_eq!(batch.ids().len(), seqs.len() * max_len);
            // Non-zero entries form a contiguous prefix.
            for i in 0..batch.rows() {
                let row = batch.row(i);
                let first_zero = row.iter().position(|&v| v == 0).unwrap_or(max_len);
                prop_assert!(row[first_zero..].iter().all(|&v| v == 0));
            }
        }

        #[test]
        fn frequency_rank_property(texts in corpus_strategy()) {
            if let Ok(v) = fit_vocabulary(&texts, 50_000) {
                let words = v.words();
                for a in 0..words.len() {
                    for b in 0..words.len() {
                        if v.frequency(&words[a]) > v.frequency(&words[b]) {
                            prop_assert!(v.index(&words[a]) < v.index(&words[b]));
                        }
                    }
                }
            }
        }

        #[test]
        fn one_hot_rows_sum_to_one_and_columns_count_supports(
            labels in proptest::collection::vec(0usize..3, 1..30))
        {
            let schema = LabelSchema::new("t", &["a", "b", "c"]);
            let names: Vec<&str> = labels.iter().map(|&i| ["a", "b", "c"][i]).collect();
            let oh = one_hot(&names, &schema).unwrap();
            for i in 0..oh.rows() {
                let sum: f64 = oh.row(i).iter().sum();
                prop_assert_eq!(sum, 1.0);
            }
            for c in 0..3 {
                let col: f64 = (0..oh.rows()).map(|i| oh.row(i)[c]).sum();
                let support = labels.iter().filter(|&&l| l == c).count();
                prop_assert_eq!(col, support as f64);
            }
        }
    }
}
