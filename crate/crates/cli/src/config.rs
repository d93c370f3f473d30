//! Run configuration: defaults, config file, then CLI flag overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use hsd_core::nn::Arch;
use hsd_core::preprocess::CleanMode;

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "HSD_OUT_DIR";

/// Everything a training run needs. All randomness flows from `seed`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub manifest: Option<String>,
    pub clean_mode: CleanMode,
    pub max_words: usize,
    pub max_len: usize,
    pub arch: Arch,
    pub hidden_units: usize,
    pub dropout_rate: f64,
    pub recurrent_dropout_rate: f64,
    /// Pretrained `.vec` file; absent means a trainable random embedding.
    pub embeddings: Option<PathBuf>,
    /// Dimension of the random embedding (ignored with pretrained
    /// vectors, whose file declares the dimension).
    pub embedding_dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub stratify: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            manifest: None,
            clean_mode: CleanMode::Basic,
            max_words: 50_000,
            max_len: 250,
            arch: Arch::Lstm,
            hidden_units: 100,
            dropout_rate: 0.2,
            recurrent_dropout_rate: 0.2,
            embeddings: None,
            embedding_dim: 100,
            epochs: 10,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
            stratify: false,
            out_dir: None,
        }
    }
}

impl RunConfig {
    /// Applies `key=value` lines from a config file. Unknown keys are
    /// errors; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                );
            };
            self.apply(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "data" => self.data = Some(PathBuf::from(value)),
            "manifest" => self.manifest = Some(value.to_string()),
            "clean_mode" => {
                self.clean_mode = CleanMode::parse(value)
                    .with_context(|| format!("clean_mode must be basic or rich, got {value:?}"))?
            }
            "max_words" => self.max_words = parse(key, value)?,
            "max_len" => self.max_len = parse(key, value)?,
            "arch" => {
                self.arch = Arch::parse(value)
                    .with_context(|| format!("arch must be lstm or bilstm, got {value:?}"))?
            }
            "hidden_units" => self.hidden_units = parse(key, value)?,
            "dropout_rate" => self.dropout_rate = parse(key, value)?,
            "recurrent_dropout_rate" => self.recurrent_dropout_rate = parse(key, value)?,
            "embeddings" => self.embeddings = Some(PathBuf::from(value)),
            "embedding_dim" => self.embedding_dim = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "stratify" => self.stratify = parse(key, value)?,
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    /// Output directory: explicit setting, else `HSD_OUT_DIR`, else the
    /// working directory.
    pub fn resolve_out_dir(&self) -> PathBuf {
        resolve_out_dir(self.out_dir.clone())
    }
}

/// Shared out-dir resolution for commands that take `--out-dir`.
pub fn resolve_out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var(OUT_DIR_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow::anyhow!("bad value {value:?} for {key}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn file_then_overrides() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "# run\narch=bilstm\nepochs=3\nlearning_rate=0.01\nclean_mode=rich\nseed=7"
        )
        .unwrap();
        let mut config = RunConfig::default();
        config.apply_file(file.path()).unwrap();
        assert_eq!(config.arch, Arch::Bilstm);
        assert_eq!(config.epochs, 3);
        assert_eq!(config.learning_rate, 0.01);
        assert_eq!(config.clean_mode, CleanMode::Rich);
        assert_eq!(config.seed, 7);
        // Flag-style override wins.
        config.apply("epochs", "9").unwrap();
        assert_eq!(config.epochs, 9);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut config = RunConfig::default();
        assert!(config.apply("no_such_key", "1").is_err());
        assert!(config.apply("epochs", "x").is_err());
        assert!(config.apply("clean_mode", "fancy").is_err());
        assert!(config.apply("arch", "gru").is_err());
    }

    #[test]
    fn out_dir_falls_back_to_cwd() {
        let config = RunConfig::default();
        std::env::remove_var(OUT_DIR_ENV);
        assert_eq!(config.resolve_out_dir(), PathBuf::from("."));
    }
}
