//! `hsd report`: metrics from a prediction-interchange file
//! (`id,true_label,pred_label`), for comparing external classifiers.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use hsd_core::eval::{
    compare_to_baseline, confusion, metrics, render_baseline, render_report, ReportFormat,
};

use crate::io;

pub struct ReportArgs {
    pub predictions: PathBuf,
    pub manifest: String,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
}

pub fn cmd_report(args: &ReportArgs) -> Result<String> {
    let manifest = io::resolve_manifest(&args.manifest)?;
    let schema = manifest.schema;
    let pairs = io::read_prediction_pairs(&args.predictions)?;
    let mut truth = Vec::with_capacity(pairs.len());
    let mut pred = Vec::with_capacity(pairs.len());
    for (i, (id, true_label, pred_label)) in pairs.iter().enumerate() {
        let Some(t) = schema.class_index(true_label) else {
            bail!(
                "{}: unknown true_label {true_label:?} at row {} (id {id})",
                args.predictions.display(),
                i + 1
            );
        };
        let Some(p) = schema.class_index(pred_label) else {
            bail!(
                "{}: unknown pred_label {pred_label:?} at row {} (id {id})",
                args.predictions.display(),
                i + 1
            );
        };
        truth.push(t);
        pred.push(p);
    }

    let cm = confusion(&truth, &pred, schema.num_classes())?;
    let report = metrics(cm)?;
    let mut rendered = render_report(&report, &schema, args.format);
    rendered.push_str(&render_baseline(&compare_to_baseline(
        &report,
        &schema.name,
    )));

    if let Some(out) = &args.out {
        std::fs::write(out, &rendered)
            .with_context(|| format!("cannot write {}", out.display()))?;
    }
    print!("{rendered}");
    Ok(rendered)
}
