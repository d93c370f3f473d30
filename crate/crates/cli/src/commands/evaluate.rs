//! `hsd evaluate`: score a trained checkpoint on test data and emit
//! report plus baseline-delta files.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use hsd_core::data::{split_dataset, split_dataset_stratified};
use hsd_core::eval::{
    compare_to_baseline, confusion, metrics, render_baseline, render_report, ReportFormat,
};
use hsd_core::nn::predict;
use hsd_core::preprocess::{clean_dataset, CleanTweet};

use super::{labels_of, seqs_of, usage, vocab_hash_hex, CheckpointMeta};
use crate::config::resolve_out_dir;
use crate::io;

pub struct EvaluateArgs {
    pub checkpoint: PathBuf,
    pub vocab: PathBuf,
    /// Original dataset; the test split is reconstructed from the
    /// checkpoint's seed.
    pub data: Option<PathBuf>,
    pub manifest: Option<String>,
    /// Explicit test CSV; bypasses split reconstruction.
    pub test_csv: Option<PathBuf>,
    pub format: ReportFormat,
    pub out_dir: Option<PathBuf>,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<(PathBuf, PathBuf)> {
    let (config, extras, params) = io::read_checkpoint(&args.checkpoint)?;
    let meta = CheckpointMeta::from_extras(&extras)?;
    let vocab = io::read_vocab(&args.vocab)?;
    if vocab_hash_hex(&vocab) != meta.vocab_hash {
        bail!(
            "vocabulary {} does not match the checkpoint (hash {} != {})",
            args.vocab.display(),
            vocab_hash_hex(&vocab),
            meta.vocab_hash
        );
    }

    let test_rows: Vec<CleanTweet> = match (&args.test_csv, &args.data) {
        (Some(test_csv), _) => {
            let rows = io::read_tweets(test_csv)?;
            for (i, row) in rows.iter().enumerate() {
                if meta.schema.class_index(&row.label).is_none() {
                    bail!(
                        "{}: unknown label {:?} at data row {} (checkpoint schema {})",
                        test_csv.display(),
                        row.label,
                        i + 1,
                        meta.schema.name
                    );
                }
            }
            clean_dataset(&rows, meta.clean_mode).0
        }
        (None, Some(data)) => {
            let manifest_ref = args
                .manifest
                .as_ref()
                .ok_or_else(|| usage("evaluate with --data also requires --manifest"))?;
            let manifest = io::resolve_manifest(manifest_ref)?;
            if manifest.schema.classes != meta.schema.classes {
                bail!(
                    "manifest {} classes {:?} do not match the checkpoint's {:?}",
                    manifest.name,
                    manifest.schema.classes,
                    meta.schema.classes
                );
            }
            let (rows, warnings) = io::load_csv(data, &manifest)?;
            for warning in &warnings {
                eprintln!("warning: {warning}");
            }
            let cleaned = clean_dataset(&rows, meta.clean_mode).0;
            if meta.stratify {
                split_dataset_stratified(cleaned, config.seed, &meta.schema)?.test
            } else {
                split_dataset(cleaned, config.seed)?.test
            }
        }
        (None, None) => {
            return Err(usage(
                "evaluate requires either --test-csv or --data with --manifest",
            ))
        }
    };
    println!("evaluating {} rows", test_rows.len());

    let seqs = seqs_of(&test_rows, &vocab, config.max_len);
    let onehot = labels_of(&test_rows, &meta.schema)?;
    let prediction = predict(&params, &config, &seqs)?;
    let truth: Vec<usize> = (0..onehot.rows()).map(|i| onehot.class_of(i)).collect();
    let cm = confusion(&truth, &prediction.labels, meta.schema.num_classes())?;
    let report = metrics(cm)?;

    let rendered = render_report(&report, &meta.schema, args.format);
    let comparison = compare_to_baseline(&report, &meta.schema.name);
    let baseline_text = render_baseline(&comparison);

    let out_dir = resolve_out_dir(args.out_dir.clone());
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let report_path = out_dir.join(format!("report.{}", args.format.extension()));
    let baseline_path = out_dir.join("baseline_delta.txt");
    std::fs::write(&report_path, &rendered)
        .with_context(|| format!("cannot write {}", report_path.display()))?;
    std::fs::write(&baseline_path, &baseline_text)
        .with_context(|| format!("cannot write {}", baseline_path.display()))?;

    print!("{rendered}");
    print!("{baseline_text}");
    Ok((report_path, baseline_path))
}
