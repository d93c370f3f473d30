//! File IO: dataset CSVs, word-vector files, vocabularies, checkpoints,
//! history, and prediction files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use hsd_core::data::DatasetManifest;
use hsd_core::embed::{parse_vec_text, WordVectors};
use hsd_core::nn::{decode_checkpoint, encode_checkpoint, ModelConfig, ModelParams, TrainHistory};
use hsd_core::preprocess::{CleanTweet, RawTweet};
use hsd_core::tensor::Tensor;
use hsd_core::tokenize::Vocabulary;

/// Reads a `text,label` CSV (RFC 4180, UTF-8). Column order is free;
/// both columns must exist.
pub fn read_tweets(path: &Path) -> Result<Vec<RawTweet>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open dataset {}", path.display()))?;
    let (text_col, label_col) = locate_columns(&mut reader, path, true)?;
    let label_col = label_col.expect("required label column");
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.with_context(|| format!("{}: bad CSV record {}", path.display(), i + 1))?;
        rows.push(RawTweet {
            text: field(&record, text_col, path, i)?,
            label: field(&record, label_col, path, i)?,
        });
    }
    Ok(rows)
}

/// Reads the `text` column of a CSV; a label column is optional and
/// ignored.
pub fn read_texts(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open input {}", path.display()))?;
    let (text_col, _) = locate_columns(&mut reader, path, false)?;
    let mut texts = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.with_context(|| format!("{}: bad CSV record {}", path.display(), i + 1))?;
        texts.push(field(&record, text_col, path, i)?);
    }
    Ok(texts)
}

fn locate_columns(
    reader: &mut csv::Reader<fs::File>,
    path: &Path,
    require_label: bool,
) -> Result<(usize, Option<usize>)> {
    let headers = reader
        .headers()
        .with_context(|| format!("{}: cannot read header", path.display()))?;
    let text_col = headers.iter().position(|h| h == "text");
    let label_col = headers.iter().position(|h| h == "label");
    let Some(text_col) = text_col else {
        bail!("{}: missing required column \"text\"", path.display());
    };
    if require_label && label_col.is_none() {
        bail!("{}: missing required column \"label\"", path.display());
    }
    Ok((text_col, label_col))
}

fn field(record: &csv::StringRecord, col: usize, path: &Path, row: usize) -> Result<String> {
    record.get(col).map(str::to_owned).with_context(|| {
        format!(
            "{}: row {} is missing column {}",
            path.display(),
            row + 1,
            col
        )
    })
}

/// Loads a labelled dataset and validates it against a manifest: unknown
/// labels are errors (with the data row number), count mismatches come
/// back as warnings.
pub fn load_csv(path: &Path, manifest: &DatasetManifest) -> Result<(Vec<RawTweet>, Vec<String>)> {
    let rows = read_tweets(path)?;
    for (i, row) in rows.iter().enumerate() {
        if manifest.schema.class_index(&row.label).is_none() {
            bail!(
                "{}: unknown label {:?} at data row {} (schema {}: {})",
                path.display(),
                row.label,
                i + 1,
                manifest.name,
                manifest.schema.classes.join(", ")
            );
        }
    }
    let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    let warnings = manifest.check_counts(&labels);
    Ok((rows, warnings))
}

/// Writes cleaned rows back out as `text,label`.
pub fn write_clean_csv(path: &Path, rows: &[CleanTweet]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(["text", "label"])?;
    for row in rows {
        writer.write_record([&row.text, &row.label])?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads a textual `.vec` word-vector file.
pub fn load_vec_file(path: &Path) -> Result<WordVectors> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read word vectors {}", path.display()))?;
    let vectors = parse_vec_text(&text)
        .with_context(|| format!("cannot parse word vectors {}", path.display()))?;
    if vectors.duplicates > 0 {
        eprintln!(
            "warning: {} duplicate words in {} (last occurrence kept)",
            vectors.duplicates,
            path.display()
        );
    }
    Ok(vectors)
}

pub fn write_vocab(path: &Path, vocab: &Vocabulary) -> Result<()> {
    fs::write(path, vocab.to_tsv())
        .with_context(|| format!("cannot write vocabulary {}", path.display()))
}

pub fn read_vocab(path: &Path) -> Result<Vocabulary> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read vocabulary {}", path.display()))?;
    Ok(Vocabulary::from_tsv(&text)?)
}

pub fn write_checkpoint(
    path: &Path,
    config: &ModelConfig,
    extras: &BTreeMap<String, String>,
    params: &ModelParams,
) -> Result<()> {
    fs::write(path, encode_checkpoint(config, extras, params))
        .with_context(|| format!("cannot write checkpoint {}", path.display()))
}

pub fn read_checkpoint(
    path: &Path,
) -> Result<(ModelConfig, BTreeMap<String, String>, ModelParams)> {
    let bytes =
        fs::read(path).with_context(|| format!("cannot read checkpoint {}", path.display()))?;
    Ok(decode_checkpoint(&bytes)?)
}

/// History CSV: epoch (1-based), then losses and accuracies at full f64
/// precision. Identical histories produce identical bytes.
pub fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("epoch,train_loss,train_accuracy,val_loss,val_accuracy\n");
    for (i, epoch) in history.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            epoch.train_loss,
            epoch.train_accuracy,
            epoch.val_loss,
            epoch.val_accuracy
        ));
    }
    out
}

pub fn write_history_csv(path: &Path, history: &TrainHistory) -> Result<()> {
    fs::write(path, history_csv(history))
        .with_context(|| format!("cannot write history {}", path.display()))
}

/// Predictions CSV: `text,pred_label,p_class0,...` with probabilities at
/// full precision.
pub fn write_predictions(
    path: &Path,
    texts: &[String],
    labels: &[usize],
    probs: &Tensor,
    classes: &[String],
) -> Result<()> {
    let k = classes.len();
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut header = vec!["text".to_string(), "pred_label".to_string()];
    for c in 0..k {
        header.push(format!("p_class{c}"));
    }
    writer.write_record(&header)?;
    for (i, text) in texts.iter().enumerate() {
        let mut record = vec![text.clone(), classes[labels[i]].clone()];
        for c in 0..k {
            record.push(probs.at2(i, c).to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads the prediction-interchange format: `id,true_label,pred_label`.
pub fn read_prediction_pairs(path: &Path) -> Result<Vec<(String, String, String)>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open predictions {}", path.display()))?;
    let headers = reader.headers()?;
    let find = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id_col), Some(true_col), Some(pred_col)) =
        (find("id"), find("true_label"), find("pred_label"))
    else {
        bail!(
            "{}: expected columns id,true_label,pred_label",
            path.display()
        );
    };
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        out.push((
            field(&record, id_col, path, i)?,
            field(&record, true_col, path, i)?,
            field(&record, pred_col, path, i)?,
        ));
    }
    Ok(out)
}

/// Resolves a manifest reference: one of the built-in names, or a path to
/// a manifest file.
pub fn resolve_manifest(reference: &str) -> Result<DatasetManifest> {
    if let Some(manifest) = hsd_core::data::find_builtin(reference) {
        return Ok(manifest);
    }
    let path = Path::new(reference);
    if path.exists() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        return Ok(hsd_core::data::parse_manifest(&text)?);
    }
    bail!(
        "manifest {reference:?} is neither a built-in name (english, italian, german, bengali) \
         nor an existing file"
    );
}
