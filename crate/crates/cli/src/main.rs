use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use hsd_cli::commands::{
    cmd_evaluate, cmd_fit_vocab, cmd_predict, cmd_preprocess, cmd_report, cmd_train, EvaluateArgs,
    ReportArgs, UsageError,
};
use hsd_cli::config::RunConfig;
use hsd_cli::exit_code;
use hsd_core::eval::ReportFormat;
use hsd_core::preprocess::CleanMode;

#[derive(Parser)]
#[command(
    name = "hsd",
    version,
    about = "Multilingual hate-speech classification: clean, tokenize, train LSTM/BiLSTM models, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean a raw text,label CSV.
    Preprocess {
        /// Input CSV with columns text,label.
        #[arg(long = "in")]
        input: PathBuf,
        /// basic (delete mentions/URLs) or rich (replace them and emoji).
        #[arg(long, default_value = "basic")]
        clean_mode: String,
        /// Cleaned CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a frequency-ranked vocabulary on a cleaned CSV.
    FitVocab {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 50_000)]
        max_words: usize,
        /// Vocabulary TSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a classifier end to end; writes model.ckpt, vocab.tsv, and
    /// history.csv into the output directory.
    Train {
        /// key=value config file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Built-in dataset name (english, italian, german, bengali) or
        /// a manifest file path.
        #[arg(long)]
        manifest: Option<String>,
        #[arg(long)]
        clean_mode: Option<String>,
        /// lstm or bilstm.
        #[arg(long)]
        arch: Option<String>,
        /// Pretrained .vec file; omit for a trainable random embedding.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        embedding_dim: Option<usize>,
        #[arg(long)]
        hidden_units: Option<usize>,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        max_words: Option<usize>,
        #[arg(long)]
        dropout_rate: Option<f64>,
        #[arg(long)]
        recurrent_dropout_rate: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Split 60/20/20 within each class instead of globally.
        #[arg(long)]
        stratify: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on the reconstructed test split or an
    /// explicit test CSV.
    Evaluate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        /// Original dataset CSV (test split is rebuilt from the stored
        /// seed); requires --manifest.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<String>,
        /// Explicit test CSV (text,label).
        #[arg(long)]
        test_csv: Option<PathBuf>,
        /// plain, csv, or markdown.
        #[arg(long, default_value = "plain")]
        format: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Predict labels for a CSV with a text column.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Predictions CSV to write (text,pred_label,p_class0,...).
        #[arg(long)]
        out: PathBuf,
    },
    /// Metrics report from an id,true_label,pred_label CSV.
    Report {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        manifest: String,
        #[arg(long, default_value = "plain")]
        format: String,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_clean_mode(value: &str) -> Result<CleanMode> {
    CleanMode::parse(value).ok_or_else(|| {
        UsageError(format!("clean mode must be basic or rich, got {value:?}")).into()
    })
}

fn parse_format(value: &str) -> Result<ReportFormat> {
    ReportFormat::parse(value).ok_or_else(|| {
        UsageError(format!(
            "format must be plain, csv, or markdown, got {value:?}"
        ))
        .into()
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Preprocess {
            input,
            clean_mode,
            out,
        } => {
            cmd_preprocess(&input, parse_clean_mode(&clean_mode)?, &out)?;
        }
        Command::FitVocab {
            input,
            max_words,
            out,
        } => {
            cmd_fit_vocab(&input, max_words, &out)?;
        }
        Command::Train {
            config,
            data,
            manifest,
            clean_mode,
            arch,
            embeddings,
            embedding_dim,
            hidden_units,
            max_len,
            max_words,
            dropout_rate,
            recurrent_dropout_rate,
            epochs,
            batch_size,
            learning_rate,
            seed,
            stratify,
            out_dir,
        } => {
            let mut run_config = RunConfig::default();
            if let Some(path) = config {
                run_config.apply_file(&path)?;
            }
            let apply_usage = |run_config: &mut RunConfig, key: &str, value: String| {
                run_config
                    .apply(key, &value)
                    .map_err(|e| anyhow::Error::new(UsageError(format!("{e:#}"))))
            };
            if let Some(v) = data {
                run_config.data = Some(v);
            }
            if let Some(v) = manifest {
                run_config.manifest = Some(v);
            }
            if let Some(v) = clean_mode {
                apply_usage(&mut run_config, "clean_mode", v)?;
            }
            if let Some(v) = arch {
                apply_usage(&mut run_config, "arch", v)?;
            }
            if let Some(v) = embeddings {
                run_config.embeddings = Some(v);
            }
            if let Some(v) = embedding_dim {
                run_config.embedding_dim = v;
            }
            if let Some(v) = hidden_units {
                run_config.hidden_units = v;
            }
            if let Some(v) = max_len {
                run_config.max_len = v;
            }
            if let Some(v) = max_words {
                run_config.max_words = v;
            }
            if let Some(v) = dropout_rate {
                run_config.dropout_rate = v;
            }
            if let Some(v) = recurrent_dropout_rate {
                run_config.recurrent_dropout_rate = v;
            }
            if let Some(v) = epochs {
                run_config.epochs = v;
            }
            if let Some(v) = batch_size {
                run_config.batch_size = v;
            }
            if let Some(v) = learning_rate {
                run_config.learning_rate = v;
            }
            if let Some(v) = seed {
                run_config.seed = v;
            }
            if stratify {
                run_config.stratify = true;
            }
            if let Some(v) = out_dir {
                run_config.out_dir = Some(v);
            }
            cmd_train(&run_config)?;
        }
        Command::Evaluate {
            checkpoint,
            vocab,
            data,
            manifest,
            test_csv,
            format,
            out_dir,
        } => {
            cmd_evaluate(&EvaluateArgs {
                checkpoint,
                vocab,
                data,
                manifest,
                test_csv,
                format: parse_format(&format)?,
                out_dir,
            })?;
        }
        Command::Predict {
            checkpoint,
            vocab,
            input,
            out,
        } => {
            cmd_predict(&checkpoint, &vocab, &input, &out)?;
        }
        Command::Report {
            pred,
            manifest,
            format,
            out,
        } => {
            cmd_report(&ReportArgs {
                predictions: pred,
                manifest,
                format: parse_format(&format)?,
                out,
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
