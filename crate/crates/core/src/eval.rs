//! Confusion matrix, per-class metrics, report rendering, and baseline
//! comparison.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::tokenize::LabelSchema;

/// `k × k` true-class × predicted-class counts, in schema order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<usize>,
    k: usize,
}

impl ConfusionMatrix {
    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn count(&self, truth: usize, pred: usize) -> usize {
        self.counts[truth * self.k + pred]
    }

    pub fn row(&self, truth: usize) -> &[usize] {
        &self.counts[truth * self.k..(truth + 1) * self.k]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// True instances of a class (row sum).
    pub fn support(&self, class: usize) -> usize {
        self.row(class).iter().sum()
    }

    /// Predictions of a class (column sum).
    pub fn predicted(&self, class: usize) -> usize {
        (0..self.k).map(|t| self.count(t, class)).sum()
    }
}

/// Tallies a confusion matrix from aligned truth/prediction class indices.
pub fn confusion(truth: &[usize], pred: &[usize], k: usize) -> Result<ConfusionMatrix, Error> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    let mut counts = vec![0usize; k * k];
    for (&t, &p) in truth.iter().zip(pred.iter()) {
        if t >= k {
            return Err(Error::ClassOutOfRange {
                index: t,
                classes: k,
            });
        }
        if p >= k {
            return Err(Error::ClassOutOfRange {
                index: p,
                classes: k,
            });
        }
        counts[t * k + p] += 1;
    }
    Ok(ConfusionMatrix { counts, k })
}

/// Precision, recall, F1, and support for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Per-class and aggregate metrics for one evaluation run.
///
/// Macro averages are unweighted class means. Zero-denominator precision
/// or recall is reported as 0 and flagged in `warnings`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
    pub warnings: Vec<String>,
}

/// Computes the metric suite from a confusion matrix.
pub fn metrics(cm: ConfusionMatrix) -> Result<EvaluationReport, Error> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let k = cm.num_classes();
    let mut per_class = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    for c in 0..k {
        let tp = cm.count(c, c);
        let predicted = cm.predicted(c);
        let support = cm.support(c);
        let precision = if predicted == 0 {
            warnings.push(format!("class {c}: no predictions, precision set to 0"));
            0.0
        } else {
            tp as f64 / predicted as f64
        };
        let recall = if support == 0 {
            warnings.push(format!("class {c}: no true instances, recall set to 0"));
            0.0
        } else {
            tp as f64 / support as f64
        };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1,
            support,
        });
    }
    let trace: usize = (0..k).map(|c| cm.count(c, c)).sum();
    let accuracy = trace as f64 / total as f64;
    let kf = k as f64;
    let macro_precision = per_class.iter().map(|m| m.precision).sum::<f64>() / kf;
    let macro_recall = per_class.iter().map(|m| m.recall).sum::<f64>() / kf;
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / kf;
    Ok(EvaluationReport {
        per_class,
        accuracy,
        macro_precision,
        macro_recall,
        macro_f1,
        confusion: cm,
        warnings,
    })
}

/// Output format for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Plain,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plain" => Some(ReportFormat::Plain),
            "csv" => Some(ReportFormat::Csv),
            "markdown" => Some(ReportFormat::Markdown),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Plain => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

/// Renders a report deterministically.
///
/// Plain and markdown round metrics to two decimals; CSV keeps full
/// precision (values re-parse to the source exactly).
pub fn render_report(
    report: &EvaluationReport,
    schema: &LabelSchema,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::Plain => render_plain(report, schema),
        ReportFormat::Csv => render_csv(report, schema),
        ReportFormat::Markdown => render_markdown(report, schema),
    }
}

fn class_width(schema: &LabelSchema) -> usize {
    schema
        .classes
        .iter()
        .map(|c| c.len())
        .chain(core::iter::once("class".len()))
        .max()
        .unwrap_or(5)
}

fn render_plain(report: &EvaluationReport, schema: &LabelSchema) -> String {
    let w = class_width(schema);
    let mut out = format!("Evaluation: {}\n\n", schema.name);
    out.push_str(&format!(
        "{:<w$}  {:>9}  {:>6}  {:>6}  {:>7}\n",
        "class", "precision", "recall", "f1", "support"
    ));
    for (c, m) in report.per_class.iter().enumerate() {
        out.push_str(&format!(
            "{:<w$}  {:>9.2}  {:>6.2}  {:>6.2}  {:>7}\n",
            schema.classes[c], m.precision, m.recall, m.f1, m.support
        ));
    }
    out.push('\n');
    out.push_str(&format!(
        "accuracy        {:.2}\nmacro precision {:.2}\nmacro recall    {:.2}\nmacro f1        {:.2}\n",
        report.accuracy, report.macro_precision, report.macro_recall, report.macro_f1
    ));
    out.push_str("\nconfusion matrix (rows: truth, columns: predicted)\n");
    for (t, class) in schema.classes.iter().enumerate() {
        out.push_str(&format!("{class:<w$}"));
        for p in 0..report.confusion.num_classes() {
            out.push_str(&format!("  {:>7}", report.confusion.count(t, p)));
        }
        out.push('\n');
    }
    for warning in &report.warnings {
        out.push_str(&format!("warning: {warning}\n"));
    }
    out
}

fn render_csv(report: &EvaluationReport, schema: &LabelSchema) -> String {
    let mut out = String::from("metric,class,value\n");
    for (c, m) in report.per_class.iter().enumerate() {
        let class = &schema.classes[c];
        out.push_str(&format!("precision,{class},{}\n", m.precision));
        out.push_str(&format!("recall,{class},{}\n", m.recall));
        out.push_str(&format!("f1,{class},{}\n", m.f1));
        out.push_str(&format!("support,{class},{}\n", m.support));
    }
    out.push_str(&format!("accuracy,,{}\n", report.accuracy));
    out.push_str(&format!("macro_precision,,{}\n", report.macro_precision));
    out.push_str(&format!("macro_recall,,{}\n", report.macro_recall));
    out.push_str(&format!("macro_f1,,{}\n", report.macro_f1));
    for (t, truth) in schema.classes.iter().enumerate() {
        for (p, pred) in schema.classes.iter().enumerate() {
            out.push_str(&format!(
                "confusion,{truth}->{pred},{}\n",
                report.confusion.count(t, p)
            ));
        }
    }
    out
}

fn render_markdown(report: &EvaluationReport, schema: &LabelSchema) -> String {
    let mut out = format!("## Evaluation: {}\n\n", schema.name);
    out.push_str("| class | precision | recall | f1 | support |\n");
    out.push_str("|---|---|---|---|---|\n");
    for (c, m) in report.per_class.iter().enumerate() {
        out.push_str(&format!(
            "| {} | {:.2} | {:.2} | {:.2} | {} |\n",
            schema.classes[c], m.precision, m.recall, m.f1, m.support
        ));
    }
    out.push_str(&format!(
        "\n| accuracy | macro precision | macro recall | macro f1 |\n|---|---|---|---|\n| {:.2} | {:.2} | {:.2} | {:.2} |\n",
        report.accuracy, report.macro_precision, report.macro_recall, report.macro_f1
    ));
    out.push_str("\n**Confusion matrix** (rows: truth, columns: predicted)\n\n");
    out.push_str("| truth \\ pred |");
    for class in &schema.classes {
        out.push_str(&format!(" {class} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &schema.classes {
        out.push_str("---|");
    }
    out.push('\n');
    for (t, class) in schema.classes.iter().enumerate() {
        out.push_str(&format!("| {class} |"));
        for p in 0..report.confusion.num_classes() {
            out.push_str(&format!(" {} |", report.confusion.count(t, p)));
        }
        out.push('\n');
    }
    out
}

/// Published baseline macro-averaged metrics for the multilingual
/// benchmark datasets. There is no Bengali baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineEntry {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Baseline macro precision/recall/F1 for a language, if published.
pub fn baseline(language: &str) -> Option<BaselineEntry> {
    match language {
        "english" => Some(BaselineEntry {
            precision: 0.820,
            recall: 0.825,
            f1: 0.823,
        }),
        "italian" => Some(BaselineEntry {
            precision: 0.803,
            recall: 0.806,
            f1: 0.805,
        }),
        "german" => Some(BaselineEntry {
            precision: 0.754,
            recall: 0.762,
            f1: 0.758,
        }),
        _ => None,
    }
}

/// One row of a baseline-delta table.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineDelta {
    pub metric: &'static str,
    pub ours: f64,
    pub baseline: Option<f64>,
    pub delta: Option<f64>,
}

/// Delta table of our macro metrics against the language baseline.
///
/// Languages without a baseline (Bengali, custom schemas) yield rows with
/// `baseline`/`delta` absent and `available == false`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineComparison {
    pub language: String,
    pub available: bool,
    pub rows: Vec<BaselineDelta>,
}

pub fn compare_to_baseline(report: &EvaluationReport, language: &str) -> BaselineComparison {
    let entry = baseline(language);
    let ours = [
        ("macro_precision", report.macro_precision),
        ("macro_recall", report.macro_recall),
        ("macro_f1", report.macro_f1),
    ];
    let rows = ours
        .iter()
        .map(|&(metric, value)| {
            let base = entry.map(|e| match metric {
                "macro_precision" => e.precision,
                "macro_recall" => e.recall,
                _ => e.f1,
            });
            BaselineDelta {
                metric,
                ours: value,
                baseline: base,
                delta: base.map(|b| value - b),
            }
        })
        .collect();
    BaselineComparison {
        language: String::from(language),
        available: entry.is_some(),
        rows,
    }
}

/// Renders a baseline comparison as plain text.
pub fn render_baseline(comparison: &BaselineComparison) -> String {
    let mut out = format!("Baseline comparison: {}\n", comparison.language);
    if !comparison.available {
        out.push_str("baseline unavailable\n");
    }
    out.push_str(&format!(
        "{:<16} {:>8} {:>9} {:>8}\n",
        "metric", "ours", "baseline", "delta"
    ));
    for row in &comparison.rows {
        match (row.baseline, row.delta) {
            (Some(b), Some(d)) => out.push_str(&format!(
                "{:<16} {:>8.3} {:>9.3} {:>+8.3}\n",
                row.metric, row.ours, b, d
            )),
            _ => out.push_str(&format!(
                "{:<16} {:>8.3} {:>9} {:>8}\n",
                row.metric, row.ours, "-", "-"
            )),
        }
    }
    out
}
