//! Pretrained word-vector ingestion and embedding-matrix construction.
//!
//! Only the textual `.vec` format is supported: an optional `count dim`
//! header line, then one `word v1 v2 … v_dim` line per word. The binary
//! format of the embedding tools is out of scope; convert to `.vec` first.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::tensor::Tensor;
use crate::tokenize::Vocabulary;

/// Parsed word vectors: every vector has the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectors {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
    /// Duplicate words encountered while parsing (last occurrence wins).
    pub duplicates: usize,
}

impl WordVectors {
    pub fn new(dim: usize) -> Self {
        WordVectors {
            dim,
            vectors: BTreeMap::new(),
            duplicates: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Inserts a vector, panicking on a dimension mismatch (callers parse
    /// through [`parse_vec_text`], which validates).
    pub fn insert(&mut self, word: &str, vector: Vec<f64>) {
        assert_eq!(vector.len(), self.dim, "vector dimension mismatch");
        if self.vectors.insert(String::from(word), vector).is_some() {
            self.duplicates += 1;
        }
    }

    /// Writes the textual format with a `count dim` header. Values carry
    /// 17 significant digits so re-parsing restores them exactly.
    pub fn to_vec_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vectors.len(), self.dim);
        for (word, vector) in &self.vectors {
            out.push_str(word);
            for v in vector {
                out.push(' ');
                out.push_str(&format!("{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the textual `.vec` format.
///
/// The header line is optional; without it the dimension is inferred from
/// the first data row. Lines with the wrong value count or unparseable
/// numbers error with their 1-based line number. Duplicate words keep the
/// last occurrence and are counted in [`WordVectors::duplicates`].
pub fn parse_vec_text(text: &str) -> Result<WordVectors, Error> {
    let mut lines = text.lines().enumerate().peekable();

    // Header detection: exactly two fields, both integers.
    let mut declared_dim = None;
    if let Some(&(_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split(' ').filter(|f| !f.is_empty()).collect();
        if fields.len() == 2 {
            if let (Ok(_count), Ok(dim)) = (fields[0].parse::<u64>(), fields[1].parse::<usize>()) {
                declared_dim = Some(dim);
                lines.next();
            }
        }
    }

    let mut dim = declared_dim;
    let mut out: Option<WordVectors> = None;
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let word = fields.next().ok_or(Error::DimensionMismatch {
            line: lineno,
            expected: dim.unwrap_or(1) + 1,
            found: 0,
        })?;
        let mut vector = Vec::new();
        for field in fields {
            let v: f64 = field.parse().map_err(|_| Error::MalformedNumber {
                line: lineno,
                value: String::from(field),
            })?;
            vector.push(v);
        }
        let expected = *dim.get_or_insert(vector.len());
        if vector.len() != expected {
            return Err(Error::DimensionMismatch {
                line: lineno,
                expected,
                found: vector.len(),
            });
        }
        if expected == 0 {
            return Err(Error::DimensionMismatch {
                line: lineno,
                expected: 1,
                found: 0,
            });
        }
        out.get_or_insert_with(|| WordVectors::new(expected))
            .insert(word, vector);
    }
    match out {
        Some(vectors) => Ok(vectors),
        None => match declared_dim {
            Some(dim) if dim > 0 => Ok(WordVectors::new(dim)),
            _ => Err(Error::MalformedArtifact {
                what: "word vectors",
                detail: "file contains no vectors".to_string(),
            }),
        },
    }
}

/// A `(V+1) × dim` embedding table aligned to a vocabulary.
///
/// Row 0 is the all-zero padding row. Vocabulary words missing from the
/// pretrained vectors keep an all-zero row and are listed (in index order)
/// in `words_not_found`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub rows: Tensor,
    pub words_not_found: Vec<String>,
    /// Fraction of vocabulary words that had a pretrained vector.
    pub coverage: f64,
}

impl EmbeddingMatrix {
    pub fn vocab_size(&self) -> usize {
        self.rows.shape()[0] - 1
    }

    pub fn dim(&self) -> usize {
        self.rows.shape()[1]
    }

    pub fn row(&self, index: usize) -> &[f64] {
        let dim = self.dim();
        &self.rows.data()[index * dim..(index + 1) * dim]
    }
}

/// Builds the embedding matrix for a vocabulary from pretrained vectors.
pub fn build_matrix(vocab: &Vocabulary, vectors: &WordVectors) -> EmbeddingMatrix {
    let v = vocab.len();
    let dim = vectors.dim();
    let mut rows = Tensor::zeros(&[v + 1, dim]);
    let mut words_not_found = Vec::new();
    for (pos, word) in vocab.words().iter().enumerate() {
        match vectors.get(word) {
            Some(vector) => {
                let start = (pos + 1) * dim;
                rows.data_mut()[start..start + dim].copy_from_slice(vector);
            }
            None => words_not_found.push(word.clone()),
        }
    }
    let coverage = if v == 0 {
        0.0
    } else {
        (v - words_not_found.len()) as f64 / v as f64
    };
    EmbeddingMatrix {
        rows,
        words_not_found,
        coverage,
    }
}

/// Builds a randomly initialized embedding matrix: rows 1..=V i.i.d.
/// uniform on [-0.05, 0.05] from the seeded generator, row 0 zero.
pub fn random_matrix(vocab: &Vocabulary, dim: usize, seed: u64) -> EmbeddingMatrix {
    assert!(dim >= 1, "embedding dimension must be at least 1");
    let v = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Tensor::zeros(&[v + 1, dim]);
    for value in rows.data_mut()[dim..].iter_mut() {
        *value = rng.random_range(-0.05..0.05);
    }
    EmbeddingMatrix {
        rows,
        words_not_found: Vec::new(),
        coverage: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::fit_vocabulary;
    use proptest::prelude::*;

    #[test]
    fn parses_header_fixture() {
        let wv = parse_vec_text("2 3\ncat 1.0 0.5 -0.5\ndog 0 0 1\n").unwrap();
        assert_eq!(wv.dim(), 3);
        assert_eq!(wv.len(), 2);
        assert_eq!(wv.get("cat").unwrap(), &[1.0, 0.5, -0.5]);
        assert_eq!(wv.get("dog").unwrap(), &[0.0, 0.0, 1.0]);
        assert_eq!(wv.duplicates, 0);
    }

    #[test]
    fn infers_dim_without_header() {
        let wv = parse_vec_text("cat 1.0 2.0\n").unwrap();
        assert_eq!(wv.dim(), 2);
        assert_eq!(wv.get("cat").unwrap(), &[1.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch_reports_line() {
        let err = parse_vec_text("cat 1.0\ndog 1.0 2.0\n").unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                line: 2,
                expected: 1,
                found: 2,
            }
        );
    }

    #[test]
    fn malformed_number_reports_line_and_value() {
        let err = parse_vec_text("cat 1.0 x\n").unwrap_err();
        assert_eq!(
            err,
            Error::MalformedNumber {
                line: 1,
                value: String::from("x"),
            }
        );
    }

    #[test]
    fn duplicates_keep_last_and_count() {
        let wv = parse_vec_text("cat 1.0\ncat 2.0\n").unwrap();
        assert_eq!(wv.get("cat").unwrap(), &[2.0]);
        assert_eq!(wv.duplicates, 1);
    }

    #[test]
    fn build_matrix_full_coverage() {
        let vocab = fit_vocabulary(&["cat"], 10).unwrap();
        let mut wv = WordVectors::new(3);
        wv.insert("cat", alloc::vec![1.0, 2.0, 3.0]);
        let m = build_matrix(&vocab, &wv);
        assert_eq!(m.rows.shape(), &[2, 3]);
        assert_eq!(m.row(0), &[0.0, 0.0, 0.0]);
        assert_eq!(m.row(1), &[1.0, 2.0, 3.0]);
        assert!(m.words_not_found.is_empty());
        assert_eq!(m.coverage, 1.0);
    }

    #[test]
    fn build_matrix_missing_word_is_zero_row() {
        let vocab = fit_vocabulary(&["cat cat zzz"], 10).unwrap();
        assert_eq!(vocab.index("cat"), Some(1));
        assert_eq!(vocab.index("zzz"), Some(2));
        let mut wv = WordVectors::new(3);
        wv.insert("cat", alloc::vec![1.0, 2.0, 3.0]);
        let m = build_matrix(&vocab, &wv);
        assert_eq!(m.row(2), &[0.0, 0.0, 0.0]);
        assert_eq!(m.words_not_found, alloc::vec![String::from("zzz")]);
        assert_eq!(m.coverage, 0.5);
    }

    #[test]
    fn random_matrix_is_deterministic_and_bounded() {
        let vocab = fit_vocabulary(&["a b c"], 10).unwrap();
        let m1 = random_matrix(&vocab, 100, 42);
        let m2 = random_matrix(&vocab, 100, 42);
        assert_eq!(m1.rows, m2.rows);
        assert_eq!(m1.rows.shape(), &[4, 100]);
        assert!(m1.row(0).iter().all(|&v| v == 0.0));
        assert!(m1.rows.data().iter().all(|&v| (-0.05..0.05).contains(&v)));
        assert!(m1.words_not_found.is_empty());
        assert_eq!(m1.coverage, 1.0);

        let m3 = random_matrix(&vocab, 100, 43);
        assert_ne!(m1.rows, m3.rows);
    }

    proptest! {
        #[test]
        fn vec_text_round_trip_is_exact(values in proptest::collection::vec(
            proptest::num::f64::NORMAL | proptest::num::f64::ZERO, 1..6))
        {
            let mut wv = WordVectors::new(values.len());
            wv.insert("w", values.clone());
            wv.insert("x", values.iter().map(|v| v * 0.5).collect());
            let text = wv.to_vec_text();
            let reparsed = parse_vec_text(&text).unwrap();
            prop_assert_eq!(reparsed, wv);
        }

        #[test]
        fn not_found_rows_are_all_zero(present in proptest::collection::btree_set("[a-d]", 0..4)) {
            let vocab = fit_vocabulary(&["a b c d"], 10).unwrap();
            let mut wv = WordVectors::new(2);
            for w in &present {
                wv.insert(w, alloc::vec![1.0, -1.0]);
            }
            let m = build_matrix(&vocab, &wv);
            for nf in &m.words_not_found {
                let idx = vocab.index(nf).unwrap() as usize;
                prop_assert!(m.row(idx).iter().all(|&v| v == 0.0));
            }
            prop_assert!((0.0..=1.0).contains(&m.coverage));
            prop_assert_eq!(m.coverage == 1.0, m.words_not_found.is_empty());
            prop_assert_eq!(m.words_not_found.len(), 4 - present.len());
        }
    }
}
