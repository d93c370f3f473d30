//! `hsd predict`: label new texts with a trained checkpoint, applying the
//! recorded clean mode and vocabulary.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

use hsd_core::nn::predict;
use hsd_core::preprocess::clean_text;
use hsd_core::tokenize::{pad_sequences, texts_to_sequences};

use super::{vocab_hash_hex, CheckpointMeta};
use crate::io;

pub fn cmd_predict(
    checkpoint: &Path,
    vocab_path: &Path,
    input: &Path,
    output: &Path,
) -> Result<PathBuf> {
    let (config, extras, params) = io::read_checkpoint(checkpoint)?;
    let meta = CheckpointMeta::from_extras(&extras)?;
    let vocab = io::read_vocab(vocab_path)?;
    if vocab_hash_hex(&vocab) != meta.vocab_hash {
        bail!(
            "vocabulary {} does not match the checkpoint (hash {} != {})",
            vocab_path.display(),
            vocab_hash_hex(&vocab),
            meta.vocab_hash
        );
    }

    let texts = io::read_texts(input)?;
    let cleaned: Vec<String> = texts
        .iter()
        .map(|t| clean_text(t, meta.clean_mode))
        .collect();
    let seqs = pad_sequences(&texts_to_sequences(&vocab, &cleaned), config.max_len);
    let prediction = predict(&params, &config, &seqs)?;

    io::write_predictions(
        output,
        &texts,
        &prediction.labels,
        &prediction.probs,
        &meta.schema.classes,
    )?;
    println!("predicted {} rows -> {}", texts.len(), output.display());
    Ok(output.to_path_buf())
}
