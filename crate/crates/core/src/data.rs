//! Dataset manifests and the train/validation/test split protocol.
//!
//! Splits are 60/20/20: 60% (rounded) of the shuffled rows train, the
//! remaining 40% is halved into validation (floor) and test (remainder).
//! Shuffling is driven entirely by the caller's seed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::preprocess::CleanTweet;
use crate::tokenize::LabelSchema;

/// A dataset's schema plus optional expected row counts.
///
/// When expected counts are present, loaders compare them against the data
/// and report mismatches as warnings (not errors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub name: String,
    pub schema: LabelSchema,
    pub expected_total: Option<usize>,
    pub expected_per_class: BTreeMap<String, usize>,
}

impl DatasetManifest {
    /// Compares labelled rows against the expected counts; one warning per
    /// discrepancy, with the delta.
    pub fn check_counts<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        let mut warnings = Vec::new();
        if let Some(expected) = self.expected_total {
            if labels.len() != expected {
                warnings.push(format!(
                    "dataset {}: expected {expected} rows, found {} (delta {})",
                    self.name,
                    labels.len(),
                    labels.len() as i64 - expected as i64
                ));
            }
        }
        for (class, &expected) in &self.expected_per_class {
            let found = labels.iter().filter(|l| l.as_ref() == class).count();
            if found != expected {
                warnings.push(format!(
                    "dataset {}: class {class:?} expected {expected} rows, found {found} (delta {})",
                    self.name,
                    found as i64 - expected as i64
                ));
            }
        }
        warnings
    }
}

fn manifest(
    name: &str,
    classes: &[&str],
    total: usize,
    per_class: &[(&str, usize)],
) -> DatasetManifest {
    DatasetManifest {
        name: String::from(name),
        schema: LabelSchema::new(name, classes),
        expected_total: Some(total),
        expected_per_class: per_class
            .iter()
            .map(|&(c, n)| (String::from(c), n))
            .collect(),
    }
}

/// The four built-in benchmark manifests (english, italian, german,
/// bengali) with their published class distributions.
pub fn builtin_manifests() -> Vec<DatasetManifest> {
    alloc::vec![
        manifest(
            "english",
            &["none", "racism", "sexism"],
            15_777,
            &[("none", 10_841), ("racism", 3_017), ("sexism", 1_919)],
        ),
        manifest(
            "italian",
            &["non-hate", "hate"],
            3_000,
            &[("non-hate", 972), ("hate", 2_028)],
        ),
        manifest(
            "german",
            &["non-hate", "hate"],
            3_031,
            &[("non-hate", 2_061), ("hate", 970)],
        ),
        manifest(
            "bengali",
            &[
                "geopolitical",
                "personal",
                "political",
                "religious",
                "abusive"
            ],
            3_419,
            &[
                ("geopolitical", 1_379),
                ("personal", 629),
                ("political", 592),
                ("religious", 502),
                ("abusive", 316),
            ],
        ),
    ]
}

/// Built-in manifest by name.
pub fn find_builtin(name: &str) -> Option<DatasetManifest> {
    builtin_manifests().into_iter().find(|m| m.name == name)
}

/// Parses a manifest file: `key=value` lines with keys `name`, `classes`
/// (comma-separated), optional `total` and `count.<class>`.
pub fn parse_manifest(text: &str) -> Result<DatasetManifest, Error> {
    let mut name = None;
    let mut classes: Option<Vec<String>> = None;
    let mut total = None;
    let mut per_class = BTreeMap::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidManifest(format!("line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "name" => name = Some(String::from(value)),
            "classes" => {
                let list: Vec<String> = value
                    .split(',')
                    .map(|c| c.trim().to_string())
                    .filter(|c| !c.is_empty())
                    .collect();
                if list.is_empty() {
                    return Err(Error::InvalidManifest("classes list is empty".to_string()));
                }
                classes = Some(list);
            }
            "total" => {
                total = Some(
                    value
                        .parse()
                        .map_err(|_| Error::InvalidManifest(format!("bad total {value:?}")))?,
                )
            }
            _ => {
                if let Some(class) = key.strip_prefix("count.") {
                    let n = value.parse().map_err(|_| {
                        Error::InvalidManifest(format!("bad count for class {class:?}"))
                    })?;
                    per_class.insert(String::from(class), n);
                } else {
                    return Err(Error::InvalidManifest(format!("unknown key {key:?}")));
                }
            }
        }
    }
    let name = name.ok_or_else(|| Error::InvalidManifest("missing name".to_string()))?;
    let classes = classes.ok_or_else(|| Error::InvalidManifest("missing classes".to_string()))?;
    {
        let mut unique = classes.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != classes.len() {
            return Err(Error::InvalidManifest("duplicate class names".to_string()));
        }
    }
    for class in per_class.keys() {
        if !classes.contains(class) {
            return Err(Error::InvalidManifest(format!(
                "count for unknown class {class:?}"
            )));
        }
    }
    Ok(DatasetManifest {
        schema: LabelSchema {
            name: name.clone(),
            classes,
        },
        name,
        expected_total: total,
        expected_per_class: per_class,
    })
}

/// Disjoint train/validation/test partitions of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<CleanTweet>,
    pub val: Vec<CleanTweet>,
    pub test: Vec<CleanTweet>,
    pub seed: u64,
}

/// Split sizes for `n` rows: train = round(0.6·n), the remainder halved
/// into validation (floor) and test. Integer arithmetic; 6n is even so
/// rounding never ties.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = (6 * n + 5) / 10;
    let rest = n - train;
    let val = rest / 2;
    (train, val, rest - val)
}

/// Shuffles rows with the seeded generator and partitions them 60/20/20.
pub fn split_dataset(rows: Vec<CleanTweet>, seed: u64) -> Result<DatasetSplit, Error> {
    let n = rows.len();
    if n < 5 {
        return Err(Error::TooFewRows { n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    Ok(partition(rows, &order, seed))
}

/// Stratified variant: the 60/20/20 protocol applied within each class,
/// preserving the shuffled order inside each part.
pub fn split_dataset_stratified(
    rows: Vec<CleanTweet>,
    seed: u64,
    schema: &LabelSchema,
) -> Result<DatasetSplit, Error> {
    let n = rows.len();
    if n < 5 {
        return Err(Error::TooFewRows { n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut train_idx = Vec::new();
    let mut val_idx = Vec::new();
    let mut test_idx = Vec::new();
    for class in &schema.classes {
        let class_rows: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| &rows[i].label == class)
            .collect();
        let (tr, va, _te) = split_sizes(class_rows.len());
        train_idx.extend_from_slice(&class_rows[..tr]);
        val_idx.extend_from_slice(&class_rows[tr..tr + va]);
        test_idx.extend_from_slice(&class_rows[tr + va..]);
    }
    // Rows with labels outside the schema would be dropped silently;
    // callers validate labels at load time.
    let take =
        |idx: &[usize]| -> Vec<CleanTweet> { idx.iter().map(|&i| rows[i].clone()).collect() };
    Ok(DatasetSplit {
        train: take(&train_idx),
        val: take(&val_idx),
        test: take(&test_idx),
        seed,
    })
}

fn partition(rows: Vec<CleanTweet>, order: &[usize], seed: u64) -> DatasetSplit {
    let n = rows.len();
    let (n_train, n_val, _) = split_sizes(n);
    let mut rows: Vec<Option<CleanTweet>> = rows.into_iter().map(Some).collect();
    let mut take = |indices: &[usize]| -> Vec<CleanTweet> {
        indices
            .iter()
            .map(|&i| rows[i].take().expect("index used once"))
            .collect()
    };
    DatasetSplit {
        train: take(&order[..n_train]),
        val: take(&order[n_train..n_train + n_val]),
        test: take(&order[n_train + n_val..]),
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(n: usize) -> Vec<CleanTweet> {
        (0..n)
            .map(|i| CleanTweet {
                text: format!("tweet {i}"),
                label: if i % 2 == 0 { "a".into() } else { "b".into() },
            })
            .collect()
    }

    #[test]
    fn benchmark_size_splits_1800_600_600() {
        assert_eq!(split_sizes(3000), (1800, 600, 600));
        let split = split_dataset(rows(3000), 7).unwrap();
        assert_eq!(split.train.len(), 1800);
        assert_eq!(split.val.len(), 600);
        assert_eq!(split.test.len(), 600);
    }

    #[test]
    fn ten_rows_split_6_2_2() {
        assert_eq!(split_sizes(10), (6, 2, 2));
    }

    #[test]
    fn same_seed_gives_identical_partitions() {
        let a = split_dataset(rows(53), 99).unwrap();
        let b = split_dataset(rows(53), 99).unwrap();
        assert_eq!(a, b);
        let c = split_dataset(rows(53), 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn too_few_rows_errors() {
        assert_eq!(split_dataset(rows(4), 0), Err(Error::TooFewRows { n: 4 }));
    }

    #[test]
    fn builtin_manifest_counts() {
        let english = find_builtin("english").unwrap();
        assert_eq!(english.expected_total, Some(15_777));
        assert_eq!(english.expected_per_class["none"], 10_841);
        assert_eq!(english.expected_per_class["racism"], 3_017);
        assert_eq!(english.expected_per_class["sexism"], 1_919);
        assert_eq!(english.schema.classes, ["none", "racism", "sexism"]);

        let italian = find_builtin("italian").unwrap();
        assert_eq!(italian.expected_total, Some(3_000));
        assert_eq!(italian.expected_per_class["hate"], 2_028);
        assert_eq!(italian.expected_per_class["non-hate"], 972);

        let german = find_builtin("german").unwrap();
        assert_eq!(german.expected_total, Some(3_031));
        assert_eq!(german.expected_per_class["hate"], 970);
        assert_eq!(german.expected_per_class["non-hate"], 2_061);

        let bengali = find_builtin("bengali").unwrap();
        assert_eq!(bengali.expected_total, Some(3_419));
        assert_eq!(bengali.expected_per_class["geopolitical"], 1_379);
        assert_eq!(bengali.expected_per_class["personal"], 629);
        assert_eq!(bengali.expected_per_class["political"], 592);
        assert_eq!(bengali.expected_per_class["religious"], 502);
        assert_eq!(bengali.expected_per_class["abusive"], 316);
        assert_eq!(bengali.schema.num_classes(), 5);

        assert_eq!(find_builtin("french"), None);
    }

    #[test]
    fn count_checks_warn_on_mismatch_only() {
        let italian = find_builtin("italian").unwrap();
        let mut labels: Vec<String> = Vec::new();
        labels.extend(core::iter::repeat_n(String::from("hate"), 2_028));
        labels.extend(core::iter::repeat_n(String::from("non-hate"), 972));
        assert!(italian.check_counts(&labels).is_empty());

        labels.pop();
        let warnings = italian.check_counts(&labels);
        assert_eq!(warnings.len(), 2); // total and non-hate both off by one
        assert!(warnings[0].contains("delta -1"));
    }

    #[test]
    fn manifest_file_round_trip() {
        let text = "name=custom\nclasses=x,y,z\ntotal=9\ncount.x=3\n";
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.name, "custom");
        assert_eq!(m.schema.classes, ["x", "y", "z"]);
        assert_eq!(m.expected_total, Some(9));
        assert_eq!(m.expected_per_class["x"], 3);
    }

    #[test]
    fn manifest_rejects_bad_input() {
        assert!(parse_manifest("classes=a,b\n").is_err());
        assert!(parse_manifest("name=x\n").is_err());
        assert!(parse_manifest("name=x\nclasses=a,a\n").is_err());
        assert!(parse_manifest("name=x\nclasses=a\ncount.b=1\n").is_err());
        assert!(parse_manifest("name=x\nclasses=a\njunk\n").is_err());
    }

    #[test]
    fn stratified_split_keeps_class_balance() {
        let schema = LabelSchema::new("t", &["a", "b"]);
        let split = split_dataset_stratified(rows(100), 3, &schema).unwrap();
        let count =
            |part: &[CleanTweet], label: &str| part.iter().filter(|r| r.label == label).count();
        // 50 of each class → 30/10/10 per class.
        assert_eq!(count(&split.train, "a"), 30);
        assert_eq!(count(&split.train, "b"), 30);
        assert_eq!(count(&split.val, "a"), 10);
        assert_eq!(count(&split.test, "b"), 10);
    }

    proptest! {
        #[test]
        fn split_is_disjoint_exhaustive_and_sized(n in 5usize..300, seed in 0u64..1000) {
            let input = rows(n);
            let split = split_dataset(input.clone(), seed).unwrap();
            let (tr, va, te) = split_sizes(n);
            prop_assert_eq!(split.train.len(), tr);
            prop_assert_eq!(split.val.len(), va);
            prop_assert_eq!(split.test.len(), te);
            prop_assert_eq!(tr + va + te, n);
            // Union equals the input as a multiset.
            let mut union: Vec<&CleanTweet> = split
                .train
                .iter()
                .chain(&split.val)
                .chain(&split.test)
                .collect();
            union.sort_by(|a, b| a.text.cmp(&b.text));
            let mut expected: Vec<&CleanTweet> = input.iter().collect();
            expected.sort_by(|a, b| a.text.cmp(&b.text));
            prop_assert_eq!(union, expected);
        }

        #[test]
        fn val_and_test_differ_by_at_most_one(n in 5usize..5000) {
            let (_, va, te) = split_sizes(n);
            prop_assert!(te >= va);
            prop_assert!(te - va <= 1);
        }
    }
}
