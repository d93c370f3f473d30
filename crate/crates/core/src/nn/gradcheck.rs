//! Finite-difference gradient oracle.
//!
//! Central differences with h = 1e-5 on the deterministic (dropout-free)
//! loss, compared coordinate-wise against the analytic gradients from
//! [`backward`](super::backward). Intended for small models only; the
//! trainable parameter count is capped at 10,000.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{backward, model_forward, model_loss};
use super::{ModelConfig, ModelGrads, ModelParams};
use crate::embed::EmbeddingMatrix;
use crate::error::Error;
use crate::num;
use crate::tokenize::{OneHotLabels, SequenceBatch};

const FD_STEP: f64 = 1e-5;
const COORDS_PER_TENSOR: usize = 50;

/// Worst relative error seen in one tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub name: String,
    pub max_rel_error: f64,
    pub coords_checked: usize,
}

/// Per-tensor maximum relative errors from one gradient check.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub tensors: Vec<TensorCheck>,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn worst(&self) -> f64 {
        self.tensors
            .iter()
            .map(|t| t.max_rel_error)
            .fold(0.0, f64::max)
    }
}

/// Initializes a model from the config's seed and checks its analytic
/// gradients against central finite differences.
///
/// Dropout rates are forced to zero (masks would otherwise differ between
/// probes). At least `min(50, len)` coordinates are sampled per trainable
/// tensor; embedding coordinates are drawn from rows ≥ 1 because the
/// padding row is not trainable. Errors with `CheckFailed` naming the
/// offending tensors if any exceeds the tolerance.
pub fn gradient_check(
    config: &ModelConfig,
    embedding: &EmbeddingMatrix,
    batch: &SequenceBatch,
    onehot: &OneHotLabels,
    tolerance: f64,
) -> Result<GradCheckReport, Error> {
    let mut config = config.clone();
    config.dropout_rate = 0.0;
    config.recurrent_dropout_rate = 0.0;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ModelParams::init(&config, embedding, &mut rng)?;
    let count = params.trainable_count(&config);
    if count > 10_000 {
        return Err(Error::InvalidConfig(alloc::format!(
            "gradient check is limited to 10,000 trainable parameters, model has {count}"
        )));
    }

    let cache = model_forward(&params, &config, batch, false, &mut rng)?;
    let grads = backward(&params, &config, &cache, batch, onehot)?;
    check_against(&config, &mut params, batch, onehot, &grads, tolerance)
}

/// Compares the supplied analytic gradients against finite differences of
/// the loss at `params`. Exposed separately so fault-injection tests can
/// hand in corrupted gradients.
pub fn check_against(
    config: &ModelConfig,
    params: &mut ModelParams,
    batch: &SequenceBatch,
    onehot: &OneHotLabels,
    grads: &ModelGrads,
    tolerance: f64,
) -> Result<GradCheckReport, Error> {
    let mut coord_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6772_6463_686b);
    let mut report = GradCheckReport {
        tensors: Vec::new(),
        tolerance,
    };
    let dim = config.embedding_dim;

    let names: Vec<String> = grads
        .named_tensors()
        .iter()
        .map(|(n, _)| n.to_string())
        .collect();
    for name in names {
        let grad_len = tensor_len(params, &name);
        // Trainable coordinate range: the embedding's padding row is
        // excluded.
        let low = if name == "embedding" { dim } else { 0 };
        let coords = sample_coords(low, grad_len, &mut coord_rng);

        let mut max_rel = 0.0f64;
        for &coord in &coords {
            let analytic = grad_value(grads, &name, coord);
            let original = tensor_value(params, &name, coord);

            set_tensor_value(params, &name, coord, original + FD_STEP);
            let loss_plus = model_loss(params, config, batch, onehot)?;
            set_tensor_value(params, &name, coord, original - FD_STEP);
            let loss_minus = model_loss(params, config, batch, onehot)?;
            set_tensor_value(params, &name, coord, original);

            let numeric = (loss_plus - loss_minus) / (2.0 * FD_STEP);
            let denom = num::abs(analytic).max(num::abs(numeric)).max(1e-8);
            let rel = num::abs(analytic - numeric) / denom;
            max_rel = max_rel.max(rel);
        }
        report.tensors.push(TensorCheck {
            name,
            max_rel_error: max_rel,
            coords_checked: coords.len(),
        });
    }

    let failing: Vec<String> = report
        .tensors
        .iter()
        .filter(|t| t.max_rel_error >= tolerance)
        .map(|t| t.name.clone())
        .collect();
    if failing.is_empty() {
        Ok(report)
    } else {
        Err(Error::CheckFailed { tensors: failing })
    }
}

fn sample_coords(low: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let available = len - low;
    if available <= COORDS_PER_TENSOR {
        return (low..len).collect();
    }
    let mut set = BTreeSet::new();
    while set.len() < COORDS_PER_TENSOR {
        set.insert(rng.random_range(low..len));
    }
    set.into_iter().collect()
}

fn tensor_len(params: &ModelParams, name: &str) -> usize {
    params
        .named_tensors()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.len())
        .expect("known tensor name")
}

fn tensor_value(params: &ModelParams, name: &str, coord: usize) -> f64 {
    params
        .named_tensors()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.data()[coord])
        .expect("known tensor name")
}

fn set_tensor_value(params: &mut ModelParams, name: &str, coord: usize, value: f64) {
    let tensor = match name {
        "embedding" => &mut params.embedding,
        "lstm_w" => &mut params.fwd.w,
        "lstm_u" => &mut params.fwd.u,
        "lstm_b" => &mut params.fwd.b,
        "lstm_bwd_w" => &mut params.bwd.as_mut().expect("bwd").w,
        "lstm_bwd_u" => &mut params.bwd.as_mut().expect("bwd").u,
        "lstm_bwd_b" => &mut params.bwd.as_mut().expect("bwd").b,
        "dense_w" => &mut params.dense_w,
        "dense_b" => &mut params.dense_b,
        other => panic!("unknown tensor {other}"),
    };
    tensor.data_mut()[coord] = value;
}

fn grad_value(grads: &ModelGrads, name: &str, coord: usize) -> f64 {
    grads
        .named_tensors()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.data()[coord])
        .expect("known tensor name")
}
