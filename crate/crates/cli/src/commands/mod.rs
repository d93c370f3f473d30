//! The six pipeline commands.

mod evaluate;
mod fit_vocab;
mod predict;
mod preprocess;
mod report;
mod train;

pub use evaluate::{cmd_evaluate, EvaluateArgs};
pub use fit_vocab::cmd_fit_vocab;
pub use predict::cmd_predict;
pub use preprocess::cmd_preprocess;
pub use report::{cmd_report, ReportArgs};
pub use train::{cmd_train, TrainArtifacts};

use std::collections::BTreeMap;

use anyhow::{Context, Result};

use hsd_core::preprocess::{CleanMode, CleanTweet};
use hsd_core::tokenize::{
    one_hot, pad_sequences, texts_to_sequences, LabelSchema, OneHotLabels, SequenceBatch,
    Vocabulary,
};

/// Pipeline state recorded in a checkpoint alongside the model config,
/// so evaluation and prediction can reproduce the training-time pipeline
/// without the original run configuration.
pub struct CheckpointMeta {
    pub clean_mode: CleanMode,
    pub schema: LabelSchema,
    pub vocab_hash: String,
    /// Whether the training split was stratified; the reconstructed test
    /// split must use the same protocol.
    pub stratify: bool,
}

impl CheckpointMeta {
    pub fn to_extras(&self) -> BTreeMap<String, String> {
        let mut extras = BTreeMap::new();
        extras.insert("clean_mode".into(), self.clean_mode.as_str().into());
        extras.insert("schema_name".into(), self.schema.name.clone());
        extras.insert("classes".into(), self.schema.classes.join(","));
        extras.insert("vocab_hash".into(), self.vocab_hash.clone());
        extras.insert("stratify".into(), self.stratify.to_string());
        extras
    }

    pub fn from_extras(extras: &BTreeMap<String, String>) -> Result<Self> {
        let get = |key: &str| {
            extras
                .get(key)
                .cloned()
                .with_context(|| format!("checkpoint is missing pipeline field {key:?}"))
        };
        let clean_mode = CleanMode::parse(&get("clean_mode")?)
            .context("checkpoint has an unknown clean_mode")?;
        let name = get("schema_name")?;
        let classes: Vec<String> = get("classes")?.split(',').map(str::to_owned).collect();
        Ok(CheckpointMeta {
            clean_mode,
            schema: LabelSchema { name, classes },
            vocab_hash: get("vocab_hash")?,
            stratify: get("stratify")? == "true",
        })
    }
}

pub(crate) fn vocab_hash_hex(vocab: &Vocabulary) -> String {
    format!("{:016x}", vocab.fingerprint())
}

/// Encodes cleaned rows into padded sequences.
pub(crate) fn seqs_of(rows: &[CleanTweet], vocab: &Vocabulary, max_len: usize) -> SequenceBatch {
    let texts: Vec<&str> = rows.iter().map(|r| r.text.as_str()).collect();
    pad_sequences(&texts_to_sequences(vocab, &texts), max_len)
}

pub(crate) fn labels_of(rows: &[CleanTweet], schema: &LabelSchema) -> Result<OneHotLabels> {
    let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    Ok(one_hot(&labels, schema)?)
}

/// Flags an error as a command-line usage problem (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub(crate) fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}
