//! From-scratch trainable sequence classifier.
//!
//! Architecture: embedding lookup → dropout → LSTM or BiLSTM (final
//! hidden state only) → dense softmax/sigmoid, trained with
//! cross-entropy, full backpropagation through time, and Adam. All
//! arithmetic is 64-bit; a finite-difference gradient check doubles as
//! the correctness oracle.

mod adam;
mod checkpoint;
mod gradcheck;
mod layers;
mod linalg;
mod lstm;
mod model;
mod train;

pub use adam::{adam_step, adam_update_tensor, AdamState};
pub use checkpoint::{decode_checkpoint, encode_checkpoint};
pub use gradcheck::{check_against, gradient_check, GradCheckReport, TensorCheck};
pub use layers::{cross_entropy, dense_forward, dropout_forward, embedding_forward};
pub use lstm::{bilstm_forward, lstm_forward, LstmCache};
pub use model::{backward, model_forward, model_loss, predict, ForwardCache, Prediction};
pub use train::{train, EpochMetrics, LabeledBatch, TrainFailure, TrainHistory, TrainOutput};

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::embed::EmbeddingMatrix;
use crate::error::Error;
use crate::num;
use crate::tensor::Tensor;

/// Recurrent architecture of the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arch {
    Lstm,
    Bilstm,
}

impl Arch {
    pub fn as_str(self) -> &'static str {
        match self {
            Arch::Lstm => "lstm",
            Arch::Bilstm => "bilstm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lstm" => Some(Arch::Lstm),
            "bilstm" => Some(Arch::Bilstm),
            _ => None,
        }
    }
}

/// Output-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Softmax,
    Sigmoid,
}

impl OutputActivation {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputActivation::Softmax => "softmax",
            OutputActivation::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "softmax" => Some(OutputActivation::Softmax),
            "sigmoid" => Some(OutputActivation::Sigmoid),
            _ => None,
        }
    }
}

/// Training loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    CategoricalCrossEntropy,
    BinaryCrossEntropy,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::CategoricalCrossEntropy => "categorical-ce",
            LossKind::BinaryCrossEntropy => "binary-ce",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "categorical-ce" => Some(LossKind::CategoricalCrossEntropy),
            "binary-ce" => Some(LossKind::BinaryCrossEntropy),
            _ => None,
        }
    }
}

/// Hyperparameters and shapes of one classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub arch: Arch,
    pub hidden_units: usize,
    pub dropout_rate: f64,
    pub recurrent_dropout_rate: f64,
    pub max_len: usize,
    pub vocab_size: usize,
    pub embedding_dim: usize,
    pub embedding_trainable: bool,
    pub num_classes: usize,
    pub output_activation: OutputActivation,
    pub loss: LossKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl ModelConfig {
    /// Config with the stock hyperparameters: 100 hidden units, dropout
    /// and recurrent dropout 0.2, sequence length 250, softmax with
    /// categorical cross-entropy, 10 epochs of batch 32 at learning rate
    /// 1e-3.
    pub fn new(arch: Arch, vocab_size: usize, embedding_dim: usize, num_classes: usize) -> Self {
        ModelConfig {
            arch,
            hidden_units: 100,
            dropout_rate: 0.2,
            recurrent_dropout_rate: 0.2,
            max_len: 250,
            vocab_size,
            embedding_dim,
            embedding_trainable: true,
            num_classes,
            output_activation: OutputActivation::Softmax,
            loss: LossKind::CategoricalCrossEntropy,
            epochs: 10,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
        }
    }

    /// Width of the dense layer's input: H for LSTM, 2H for BiLSTM.
    pub fn dense_input_width(&self) -> usize {
        match self.arch {
            Arch::Lstm => self.hidden_units,
            Arch::Bilstm => 2 * self.hidden_units,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.num_classes < 2 {
            return Err(Error::InvalidConfig(format!(
                "num_classes must be at least 2, got {}",
                self.num_classes
            )));
        }
        let pairing_ok = match (self.output_activation, self.loss) {
            (OutputActivation::Softmax, LossKind::CategoricalCrossEntropy) => true,
            (OutputActivation::Sigmoid, LossKind::BinaryCrossEntropy) => self.num_classes == 2,
            _ => false,
        };
        if !pairing_ok {
            return Err(Error::InvalidConfig(format!(
                "activation {} with loss {} is not a valid pairing for {} classes",
                self.output_activation.as_str(),
                self.loss.as_str(),
                self.num_classes
            )));
        }
        for (name, rate) in [
            ("dropout_rate", self.dropout_rate),
            ("recurrent_dropout_rate", self.recurrent_dropout_rate),
        ] {
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be in [0, 1), got {rate}"
                )));
            }
        }
        if self.hidden_units == 0
            || self.max_len == 0
            || self.embedding_dim == 0
            || self.batch_size == 0
        {
            return Err(Error::InvalidConfig(
                "hidden_units, max_len, embedding_dim, and batch_size must be positive".into(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Packed weights of one LSTM direction.
///
/// Gate order in the 4H axis is `[input, forget, candidate, output]`:
/// `w` is `dim × 4H`, `u` is `H × 4H`, `b` is `4H` with the forget slice
/// initialized to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights {
    pub w: Tensor,
    pub u: Tensor,
    pub b: Tensor,
}

impl LstmWeights {
    pub fn zeros(dim: usize, hidden: usize) -> Self {
        LstmWeights {
            w: Tensor::zeros(&[dim, 4 * hidden]),
            u: Tensor::zeros(&[hidden, 4 * hidden]),
            b: Tensor::zeros(&[4 * hidden]),
        }
    }

    fn init(dim: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut weights = LstmWeights::zeros(dim, hidden);
        glorot_fill(&mut weights.w, dim, 4 * hidden, rng);
        glorot_fill(&mut weights.u, hidden, 4 * hidden, rng);
        // Forget-gate bias starts at 1 so early training does not erase
        // the cell state.
        for value in &mut weights.b.data_mut()[hidden..2 * hidden] {
            *value = 1.0;
        }
        weights
    }
}

fn glorot_fill(t: &mut Tensor, fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) {
    let limit = num::sqrt(6.0 / (fan_in + fan_out) as f64);
    for value in t.data_mut() {
        *value = rng.random_range(-limit..limit);
    }
}

/// All weight tensors of one classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// `(V+1) × dim`; row 0 is the padding row and is never updated.
    pub embedding: Tensor,
    pub fwd: LstmWeights,
    /// Present only for the BiLSTM architecture.
    pub bwd: Option<LstmWeights>,
    pub dense_w: Tensor,
    pub dense_b: Tensor,
}

impl ModelParams {
    /// Initializes trainable weights from the seeded generator: Glorot
    /// uniform kernels, zero biases except the forget gate. The embedding
    /// rows are copied from `embedding`.
    pub fn init(
        config: &ModelConfig,
        embedding: &EmbeddingMatrix,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, Error> {
        config.validate()?;
        if embedding.rows.shape() != [config.vocab_size + 1, config.embedding_dim] {
            return Err(Error::InvalidConfig(format!(
                "embedding matrix shape {:?} does not match config ({} words, dim {})",
                embedding.rows.shape(),
                config.vocab_size,
                config.embedding_dim
            )));
        }
        let dim = config.embedding_dim;
        let h = config.hidden_units;
        let fwd = LstmWeights::init(dim, h, rng);
        let bwd = match config.arch {
            Arch::Lstm => None,
            Arch::Bilstm => Some(LstmWeights::init(dim, h, rng)),
        };
        let d = config.dense_input_width();
        let k = config.num_classes;
        let mut dense_w = Tensor::zeros(&[d, k]);
        glorot_fill(&mut dense_w, d, k, rng);
        Ok(ModelParams {
            embedding: embedding.rows.clone(),
            fwd,
            bwd,
            dense_w,
            dense_b: Tensor::zeros(&[k]),
        })
    }

    /// Tensors with stable names, embedding first, in checkpoint order.
    pub fn named_tensors(&self) -> Vec<(&'static str, &Tensor)> {
        let mut out = alloc::vec![
            ("embedding", &self.embedding),
            ("lstm_w", &self.fwd.w),
            ("lstm_u", &self.fwd.u),
            ("lstm_b", &self.fwd.b),
        ];
        if let Some(bwd) = &self.bwd {
            out.push(("lstm_bwd_w", &bwd.w));
            out.push(("lstm_bwd_u", &bwd.u));
            out.push(("lstm_bwd_b", &bwd.b));
        }
        out.push(("dense_w", &self.dense_w));
        out.push(("dense_b", &self.dense_b));
        out
    }

    /// Total trainable parameter count (embedding counted without its
    /// frozen padding row, and only when trainable).
    pub fn trainable_count(&self, config: &ModelConfig) -> usize {
        let mut count = self.fwd.w.len() + self.fwd.u.len() + self.fwd.b.len();
        if let Some(bwd) = &self.bwd {
            count += bwd.w.len() + bwd.u.len() + bwd.b.len();
        }
        count += self.dense_w.len() + self.dense_b.len();
        if config.embedding_trainable {
            count += config.vocab_size * config.embedding_dim;
        }
        count
    }
}

/// Gradients mirroring [`ModelParams`]. `embedding` is absent when the
/// embedding is frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrads {
    pub embedding: Option<Tensor>,
    pub fwd: LstmWeights,
    pub bwd: Option<LstmWeights>,
    pub dense_w: Tensor,
    pub dense_b: Tensor,
}

impl ModelGrads {
    pub fn named_tensors(&self) -> Vec<(&'static str, &Tensor)> {
        let mut out: Vec<(&'static str, &Tensor)> = Vec::new();
        if let Some(e) = &self.embedding {
            out.push(("embedding", e));
        }
        out.push(("lstm_w", &self.fwd.w));
        out.push(("lstm_u", &self.fwd.u));
        out.push(("lstm_b", &self.fwd.b));
        if let Some(bwd) = &self.bwd {
            out.push(("lstm_bwd_w", &bwd.w));
            out.push(("lstm_bwd_u", &bwd.u));
            out.push(("lstm_bwd_b", &bwd.b));
        }
        out.push(("dense_w", &self.dense_w));
        out.push(("dense_b", &self.dense_b));
        out
    }

    pub fn check_finite(&self) -> Result<(), Error> {
        for (name, tensor) in self.named_tensors() {
            tensor.check_finite(name)?;
        }
        Ok(())
    }

    /// Test hook: replaces one gradient tensor (fault injection for the
    /// gradient check).
    pub fn replace(&mut self, name: &str, tensor: Tensor) {
        match name {
            "embedding" => self.embedding = Some(tensor),
            "lstm_w" => self.fwd.w = tensor,
            "lstm_u" => self.fwd.u = tensor,
            "lstm_b" => self.fwd.b = tensor,
            "lstm_bwd_w" => self.bwd.as_mut().expect("bwd").w = tensor,
            "lstm_bwd_u" => self.bwd.as_mut().expect("bwd").u = tensor,
            "lstm_bwd_b" => self.bwd.as_mut().expect("bwd").b = tensor,
            "dense_w" => self.dense_w = tensor,
            "dense_b" => self.dense_b = tensor,
            other => panic!("unknown tensor {other}"),
        }
    }
}

/// Samples an inverted-dropout mask: entries are 0 with probability
/// `rate`, otherwise `1/(1-rate)`.
pub(crate) fn sample_mask(len: usize, rate: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let scale = 1.0 / (1.0 - rate);
    (0..len)
        .map(|_| {
            if rng.random::<f64>() < rate {
                0.0
            } else {
                scale
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::random_matrix;
    use crate::tokenize::fit_vocabulary;
    use rand::SeedableRng;

    fn config() -> ModelConfig {
        let mut cfg = ModelConfig::new(Arch::Lstm, 3, 4, 2);
        cfg.hidden_units = 5;
        cfg
    }

    #[test]
    fn validate_accepts_stock_pairings() {
        assert!(config().validate().is_ok());
        let mut sigmoid = config();
        sigmoid.output_activation = OutputActivation::Sigmoid;
        sigmoid.loss = LossKind::BinaryCrossEntropy;
        assert!(sigmoid.validate().is_ok());
    }

    #[test]
    fn validate_rejects_bad_pairings() {
        let mut cfg = config();
        cfg.loss = LossKind::BinaryCrossEntropy;
        assert!(cfg.validate().is_err());

        let mut cfg = config();
        cfg.output_activation = OutputActivation::Sigmoid;
        assert!(cfg.validate().is_err());

        let mut cfg = config();
        cfg.num_classes = 3;
        cfg.output_activation = OutputActivation::Sigmoid;
        cfg.loss = LossKind::BinaryCrossEntropy;
        assert!(cfg.validate().is_err());

        let mut cfg = config();
        cfg.dropout_rate = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn init_shapes_and_forget_bias() {
        let vocab = fit_vocabulary(&["a b c"], 10).unwrap();
        let embedding = random_matrix(&vocab, 4, 1);
        let cfg = config();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let params = ModelParams::init(&cfg, &embedding, &mut rng).unwrap();
        assert_eq!(params.embedding.shape(), &[4, 4]);
        assert_eq!(params.fwd.w.shape(), &[4, 20]);
        assert_eq!(params.fwd.u.shape(), &[5, 20]);
        assert_eq!(params.fwd.b.shape(), &[20]);
        assert!(params.bwd.is_none());
        assert_eq!(params.dense_w.shape(), &[5, 2]);
        assert_eq!(params.dense_b.shape(), &[2]);
        // Forget slice is 1, the rest 0.
        let b = params.fwd.b.data();
        assert!(b[..5].iter().all(|&v| v == 0.0));
        assert!(b[5..10].iter().all(|&v| v == 1.0));
        assert!(b[10..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bilstm_doubles_dense_input() {
        let vocab = fit_vocabulary(&["a b c"], 10).unwrap();
        let embedding = random_matrix(&vocab, 4, 1);
        let mut cfg = config();
        cfg.arch = Arch::Bilstm;
        assert_eq!(cfg.dense_input_width(), 10);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let params = ModelParams::init(&cfg, &embedding, &mut rng).unwrap();
        assert!(params.bwd.is_some());
        assert_eq!(params.dense_w.shape(), &[10, 2]);
        assert_eq!(params.named_tensors().len(), 9);
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let vocab = fit_vocabulary(&["a b c"], 10).unwrap();
        let embedding = random_matrix(&vocab, 4, 1);
        let cfg = config();
        let mut rng1 = ChaCha8Rng::seed_from_u64(7);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let p1 = ModelParams::init(&cfg, &embedding, &mut rng1).unwrap();
        let p2 = ModelParams::init(&cfg, &embedding, &mut rng2).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn init_rejects_mismatched_embedding() {
        let vocab = fit_vocabulary(&["a b c d e"], 10).unwrap();
        let embedding = random_matrix(&vocab, 4, 1);
        let cfg = config(); // expects vocab_size 3
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(ModelParams::init(&cfg, &embedding, &mut rng).is_err());
    }
}
