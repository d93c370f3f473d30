//! The training loop: shuffled minibatches, forward/backward, Adam, and
//! per-epoch metrics on train and validation data.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
use super::layers::{argmax, cross_entropy};
use super::model::{backward, model_forward};
use super::{ModelConfig, ModelParams};
use crate::embed::EmbeddingMatrix;
use crate::error::Error;
use crate::tokenize::{OneHotLabels, SequenceBatch};

/// Sequences with aligned one-hot labels.
#[derive(Clone, Copy)]
pub struct LabeledBatch<'a> {
    pub seqs: &'a SequenceBatch,
    pub labels: &'a OneHotLabels,
}

impl<'a> LabeledBatch<'a> {
    pub fn new(seqs: &'a SequenceBatch, labels: &'a OneHotLabels) -> Result<Self, Error> {
        if seqs.rows() != labels.rows() {
            return Err(Error::LengthMismatch {
                left: seqs.rows(),
                right: labels.rows(),
            });
        }
        Ok(LabeledBatch { seqs, labels })
    }

    pub fn rows(&self) -> usize {
        self.seqs.rows()
    }
}

/// Metrics of one completed epoch. Train metrics are accumulated from the
/// training-mode forward passes (dropout active); validation metrics come
/// from a clean inference pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

/// One entry per completed epoch.
pub type TrainHistory = Vec<EpochMetrics>;

/// Trained parameters plus the epoch history.
pub struct TrainOutput {
    pub params: ModelParams,
    pub history: TrainHistory,
}

/// A training abort: the error plus the history up to the failure.
#[derive(Debug)]
pub struct TrainFailure {
    pub error: Error,
    pub history: TrainHistory,
}

/// Trains a model from scratch.
///
/// Every stochastic choice (weight init, epoch shuffles, dropout masks)
/// flows from one generator seeded with `config.seed`, so identical
/// inputs reproduce identical history and parameters bit for bit.
pub fn train(
    config: &ModelConfig,
    embedding: &EmbeddingMatrix,
    train_data: LabeledBatch<'_>,
    val_data: LabeledBatch<'_>,
) -> Result<TrainOutput, TrainFailure> {
    let fail = |error: Error, history: &TrainHistory| TrainFailure {
        error,
        history: history.clone(),
    };

    let mut history: TrainHistory = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params =
        ModelParams::init(config, embedding, &mut rng).map_err(|e| fail(e, &Vec::new()))?;
    let mut adam = AdamState::new(&params, config.embedding_trainable);

    let n = train_data.rows();
    let mut order: Vec<usize> = (0..n).collect();

    for _epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let seqs = train_data.seqs.gather(chunk);
            let labels = train_data.labels.gather(chunk);
            let cache = model_forward(&params, config, &seqs, true, &mut rng)
                .map_err(|e| fail(e, &history))?;
            let loss = cross_entropy(&cache.probs, &labels, config.loss);
            let grads =
                backward(&params, config, &cache, &seqs, &labels).map_err(|e| fail(e, &history))?;
            adam_step(
                &mut params,
                &grads,
                &mut adam,
                config.learning_rate,
                BETA1,
                BETA2,
                EPSILON,
            );
            loss_sum += loss * chunk.len() as f64;
            let k = labels.num_classes();
            for (i, row) in cache.probs.data().chunks(k).enumerate() {
                if argmax(row) == labels.class_of(i) {
                    correct += 1;
                }
            }
        }
        let (val_loss, val_accuracy) =
            evaluate_metrics(&params, config, val_data).map_err(|e| fail(e, &history))?;
        history.push(EpochMetrics {
            train_loss: loss_sum / n as f64,
            train_accuracy: correct as f64 / n as f64,
            val_loss,
            val_accuracy,
        });
    }
    Ok(TrainOutput { params, history })
}

/// Loss and accuracy of a dataset in inference mode, processed in chunks
/// of `config.batch_size`. Empty data yields zeros.
pub fn evaluate_metrics(
    params: &ModelParams,
    config: &ModelConfig,
    data: LabeledBatch<'_>,
) -> Result<(f64, f64), Error> {
    let n = data.rows();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    let k = data.labels.num_classes();
    let mut start = 0;
    while start < n {
        let end = (start + config.batch_size).min(n);
        let indices: Vec<usize> = (start..end).collect();
        let seqs = data.seqs.gather(&indices);
        let labels = data.labels.gather(&indices);
        let cache = model_forward(params, config, &seqs, false, &mut rng)?;
        loss_sum += cross_entropy(&cache.probs, &labels, config.loss) * (end - start) as f64;
        for (i, row) in cache.probs.data().chunks(k).enumerate() {
            if argmax(row) == labels.class_of(i) {
                correct += 1;
            }
        }
        start = end;
    }
    Ok((loss_sum / n as f64, correct as f64 / n as f64))
}
