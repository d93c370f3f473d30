//! `hsd train`: the full pipeline from raw CSV to checkpoint, vocabulary,
//! and history files.

use std::path::PathBuf;

use anyhow::{Context, Result};

use hsd_core::data::{split_dataset, split_dataset_stratified};
use hsd_core::embed::{build_matrix, random_matrix};
use hsd_core::nn::{train, LabeledBatch, LossKind, ModelConfig, OutputActivation};
use hsd_core::preprocess::clean_dataset;
use hsd_core::tokenize::fit_vocabulary;

use super::{labels_of, seqs_of, usage, vocab_hash_hex, CheckpointMeta};
use crate::config::RunConfig;
use crate::io;

/// Files written by a training run.
pub struct TrainArtifacts {
    pub checkpoint: PathBuf,
    pub vocab: PathBuf,
    pub history: PathBuf,
}

pub fn cmd_train(run: &RunConfig) -> Result<TrainArtifacts> {
    let data_path = run
        .data
        .as_ref()
        .ok_or_else(|| usage("train requires --data (or data= in the config file)"))?;
    let manifest_ref = run
        .manifest
        .as_ref()
        .ok_or_else(|| usage("train requires --manifest (or manifest= in the config file)"))?;
    let manifest = io::resolve_manifest(manifest_ref)?;
    let schema = manifest.schema.clone();

    let (rows, warnings) = io::load_csv(data_path, &manifest)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let (cleaned, summary) = clean_dataset(&rows, run.clean_mode);
    println!(
        "cleaned {} rows ({} emptied), mode {}",
        summary.total,
        summary.emptied,
        run.clean_mode.as_str()
    );

    let split = if run.stratify {
        split_dataset_stratified(cleaned.clone(), run.seed, &schema)?
    } else {
        split_dataset(cleaned.clone(), run.seed)?
    };
    println!(
        "split: {} train / {} val / {} test (seed {})",
        split.train.len(),
        split.val.len(),
        split.test.len(),
        run.seed
    );

    // The tokenizer is fitted on the full cleaned corpus, matching the
    // reference pipeline in which feature extraction precedes the split.
    let all_texts: Vec<&str> = cleaned.iter().map(|r| r.text.as_str()).collect();
    let vocab = fit_vocabulary(&all_texts, run.max_words)?;
    println!(
        "vocabulary: {} words indexed (cap {})",
        vocab.len(),
        run.max_words
    );

    let (embedding, embedding_dim, trainable) = match &run.embeddings {
        Some(path) => {
            let vectors = io::load_vec_file(path)?;
            let matrix = build_matrix(&vocab, &vectors);
            println!(
                "embeddings: {} dims, coverage {:.4} ({} vocabulary words missing)",
                vectors.dim(),
                matrix.coverage,
                matrix.words_not_found.len()
            );
            let dim = vectors.dim();
            (matrix, dim, false)
        }
        None => {
            println!(
                "embeddings: random trainable, {} dims, seed {}",
                run.embedding_dim, run.seed
            );
            (
                random_matrix(&vocab, run.embedding_dim, run.seed),
                run.embedding_dim,
                true,
            )
        }
    };

    let mut config = ModelConfig::new(run.arch, vocab.len(), embedding_dim, schema.num_classes());
    config.hidden_units = run.hidden_units;
    config.dropout_rate = run.dropout_rate;
    config.recurrent_dropout_rate = run.recurrent_dropout_rate;
    config.max_len = run.max_len;
    config.embedding_trainable = trainable;
    config.output_activation = OutputActivation::Softmax;
    config.loss = LossKind::CategoricalCrossEntropy;
    config.epochs = run.epochs;
    config.batch_size = run.batch_size;
    config.learning_rate = run.learning_rate;
    config.seed = run.seed;
    config.validate()?;

    let train_seqs = seqs_of(&split.train, &vocab, run.max_len);
    let train_labels = labels_of(&split.train, &schema)?;
    let val_seqs = seqs_of(&split.val, &vocab, run.max_len);
    let val_labels = labels_of(&split.val, &schema)?;

    let out_dir = run.resolve_out_dir();
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let artifacts = TrainArtifacts {
        checkpoint: out_dir.join("model.ckpt"),
        vocab: out_dir.join("vocab.tsv"),
        history: out_dir.join("history.csv"),
    };

    let outcome = train(
        &config,
        &embedding,
        LabeledBatch::new(&train_seqs, &train_labels)?,
        LabeledBatch::new(&val_seqs, &val_labels)?,
    );
    let (params, history) = match outcome {
        Ok(output) => (output.params, output.history),
        Err(failure) => {
            // Keep the partial history on disk for diagnosis.
            let _ = io::write_history_csv(&artifacts.history, &failure.history);
            return Err(anyhow::Error::new(failure.error).context("training aborted"));
        }
    };
    for (i, epoch) in history.iter().enumerate() {
        println!(
            "epoch {}/{}: train_loss={:.6} train_acc={:.4} val_loss={:.6} val_acc={:.4}",
            i + 1,
            config.epochs,
            epoch.train_loss,
            epoch.train_accuracy,
            epoch.val_loss,
            epoch.val_accuracy
        );
    }

    let meta = CheckpointMeta {
        clean_mode: run.clean_mode,
        schema,
        vocab_hash: vocab_hash_hex(&vocab),
        stratify: run.stratify,
    };
    io::write_vocab(&artifacts.vocab, &vocab)?;
    io::write_checkpoint(&artifacts.checkpoint, &config, &meta.to_extras(), &params)?;
    io::write_history_csv(&artifacts.history, &history)?;
    println!(
        "artifacts: {} {} {}",
        artifacts.checkpoint.display(),
        artifacts.vocab.display(),
        artifacts.history.display()
    );
    Ok(artifacts)
}
