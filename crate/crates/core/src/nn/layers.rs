//! Embedding lookup, dropout, dense layer, and cross-entropy loss.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use super::linalg::matmul_acc;
use super::{sample_mask, LossKind, OutputActivation};
use crate::embed::EmbeddingMatrix;
use crate::error::Error;
use crate::num;
use crate::tensor::Tensor;
use crate::tokenize::{OneHotLabels, SequenceBatch};

/// Clipping bound applied to probabilities before logs.
pub(crate) const PROB_CLIP: f64 = 1e-7;

/// Looks up embedding rows for a batch: `[n, max_len, dim]`, with id 0
/// (padding) yielding the zero row.
pub fn embedding_forward(matrix: &EmbeddingMatrix, batch: &SequenceBatch) -> Result<Tensor, Error> {
    embed_ids(&matrix.rows, batch)
}

/// Lookup against a raw `(V+1) × dim` table (used with trained weights).
pub(crate) fn embed_ids(table: &Tensor, batch: &SequenceBatch) -> Result<Tensor, Error> {
    let rows = table.shape()[0];
    let dim = table.shape()[1];
    let n = batch.rows();
    let t_len = batch.max_len();
    let mut out = Tensor::zeros(&[n, t_len, dim]);
    let data = out.data_mut();
    for i in 0..n {
        for (t, &id) in batch.row(i).iter().enumerate() {
            let id = id as usize;
            if id >= rows {
                return Err(Error::IndexOutOfRange {
                    id,
                    vocab_size: rows - 1,
                });
            }
            let src = &table.data()[id * dim..(id + 1) * dim];
            let dst_start = (i * t_len + t) * dim;
            data[dst_start..dst_start + dim].copy_from_slice(src);
        }
    }
    Ok(out)
}

/// Inverted dropout over a whole tensor.
///
/// Training: each element is kept with probability `1-rate` and scaled by
/// `1/(1-rate)`; the returned mask holds those factors. Inference (or
/// rate 0): identity, no mask.
pub fn dropout_forward(
    x: &Tensor,
    rate: f64,
    training: bool,
    rng: &mut ChaCha8Rng,
) -> (Tensor, Option<Tensor>) {
    if !training || rate == 0.0 {
        return (x.clone(), None);
    }
    let mask = sample_mask(x.len(), rate, rng);
    let data = x
        .data()
        .iter()
        .zip(&mask)
        .map(|(&v, &m)| v * m)
        .collect::<Vec<f64>>();
    (
        Tensor::from_vec(x.shape(), data),
        Some(Tensor::from_vec(x.shape(), mask)),
    )
}

/// Dense layer `x·W + b` with softmax (row-wise, max-subtracted) or
/// elementwise sigmoid.
pub fn dense_forward(w: &Tensor, b: &Tensor, x: &Tensor, activation: OutputActivation) -> Tensor {
    let n = x.shape()[0];
    let d = x.shape()[1];
    let k = w.shape()[1];
    debug_assert_eq!(w.shape()[0], d);
    debug_assert_eq!(b.len(), k);

    let mut logits = Tensor::zeros(&[n, k]);
    for i in 0..n {
        logits.data_mut()[i * k..(i + 1) * k].copy_from_slice(b.data());
    }
    matmul_acc(x.data(), w.data(), logits.data_mut(), n, d, k);

    match activation {
        OutputActivation::Softmax => {
            for row in logits.data_mut().chunks_mut(k) {
                let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for v in row.iter_mut() {
                    *v = num::exp(*v - max);
                    sum += *v;
                }
                for v in row.iter_mut() {
                    *v /= sum;
                }
            }
        }
        OutputActivation::Sigmoid => {
            for v in logits.data_mut() {
                *v = num::sigmoid(*v);
            }
        }
    }
    logits
}

/// Mean cross-entropy over a batch, with probabilities clipped to
/// `[1e-7, 1-1e-7]` before logs.
///
/// Categorical: mean over rows of `-log p_true`. Binary: mean over rows
/// and classes of `-[y log p + (1-y) log(1-p)]`.
pub fn cross_entropy(probs: &Tensor, onehot: &OneHotLabels, kind: LossKind) -> f64 {
    let n = probs.shape()[0];
    let k = probs.shape()[1];
    debug_assert_eq!(onehot.rows(), n);
    debug_assert_eq!(onehot.num_classes(), k);
    if n == 0 {
        return 0.0;
    }
    let clip = |p: f64| p.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
    match kind {
        LossKind::CategoricalCrossEntropy => {
            let mut sum = 0.0;
            for i in 0..n {
                let p_true = probs.at2(i, onehot.class_of(i));
                sum -= num::ln(clip(p_true));
            }
            sum / n as f64
        }
        LossKind::BinaryCrossEntropy => {
            let mut sum = 0.0;
            for i in 0..n {
                for c in 0..k {
                    let p = clip(probs.at2(i, c));
                    let y = onehot.row(i)[c];
                    sum -= y * num::ln(p) + (1.0 - y) * num::ln(1.0 - p);
                }
            }
            sum / (n * k) as f64
        }
    }
}

/// Gradient of the mean loss w.r.t. the dense pre-activations.
///
/// For softmax + categorical CE this is `(p - y)/n`; for sigmoid + binary
/// CE it is `(p - y)/(n·k)`.
pub(crate) fn loss_logit_grad(probs: &Tensor, onehot: &OneHotLabels, kind: LossKind) -> Tensor {
    let n = probs.shape()[0];
    let k = probs.shape()[1];
    let scale = match kind {
        LossKind::CategoricalCrossEntropy => 1.0 / n as f64,
        LossKind::BinaryCrossEntropy => 1.0 / (n * k) as f64,
    };
    let data = probs
        .data()
        .iter()
        .zip(onehot.data())
        .map(|(&p, &y)| (p - y) * scale)
        .collect();
    Tensor::from_vec(&[n, k], data)
}

/// Argmax with ties broken by the lowest class index.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    let mut best_value = row[0];
    for (c, &v) in row.iter().enumerate().skip(1) {
        if v > best_value {
            best = c;
            best_value = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::random_matrix;
    use crate::tokenize::{fit_vocabulary, pad_sequences, OneHotLabels};
    use rand::SeedableRng;

    fn matrix_from_rows(rows: &[&[f64]]) -> EmbeddingMatrix {
        let dim = rows[0].len();
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingMatrix {
            rows: Tensor::from_vec(&[rows.len(), dim], data),
            words_not_found: alloc::vec::Vec::new(),
            coverage: 1.0,
        }
    }

    #[test]
    fn embedding_padding_id_yields_zero() {
        let m = matrix_from_rows(&[&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]]);
        let batch = pad_sequences(&[alloc::vec![]], 1);
        let out = embedding_forward(&m, &batch).unwrap();
        assert_eq!(out.shape(), &[1, 1, 3]);
        assert_eq!(out.data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn embedding_looks_up_row() {
        let m = matrix_from_rows(&[&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]]);
        let batch = pad_sequences(&[alloc::vec![1]], 1);
        let out = embedding_forward(&m, &batch).unwrap();
        assert_eq!(out.data(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn embedding_repeats_row_per_timestep() {
        let m = matrix_from_rows(&[&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]]);
        let batch = pad_sequences(&[alloc::vec![1, 1]], 2);
        let out = embedding_forward(&m, &batch).unwrap();
        assert_eq!(out.data(), &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn embedding_rejects_out_of_range_id() {
        let m = matrix_from_rows(&[&[0.0], &[1.0]]);
        let batch = pad_sequences(&[alloc::vec![2]], 1);
        assert!(matches!(
            embedding_forward(&m, &batch),
            Err(Error::IndexOutOfRange { id: 2, .. })
        ));
    }

    #[test]
    fn dropout_rate_zero_is_identity() {
        let x = Tensor::from_vec(&[2, 2], alloc::vec![1.0, 2.0, 3.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, mask) = dropout_forward(&x, 0.0, true, &mut rng);
        assert_eq!(out, x);
        assert!(mask.is_none());
    }

    #[test]
    fn dropout_inference_is_identity() {
        let x = Tensor::from_vec(&[2, 2], alloc::vec![1.0, 2.0, 3.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, mask) = dropout_forward(&x, 0.9, false, &mut rng);
        assert_eq!(out, x);
        assert!(mask.is_none());
    }

    #[test]
    fn dropout_preserves_expectation() {
        let x = Tensor::from_vec(&[10_000], alloc::vec![1.0; 10_000]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (out, mask) = dropout_forward(&x, 0.5, true, &mut rng);
        let mean = out.data().iter().sum::<f64>() / out.len() as f64;
        assert!((0.94..=1.06).contains(&mean), "mean {mean}");
        let mask = mask.unwrap();
        assert!(mask.data().iter().all(|&m| m == 0.0 || m == 2.0));
    }

    #[test]
    fn dense_zero_weights_softmax_is_uniform() {
        let w = Tensor::zeros(&[4, 3]);
        let b = Tensor::zeros(&[3]);
        let x = Tensor::from_vec(
            &[2, 4],
            alloc::vec![1.0, -2.0, 3.0, 0.5, 0.0, 0.0, 1.0, 9.0],
        );
        let out = dense_forward(&w, &b, &x, OutputActivation::Softmax);
        for i in 0..2 {
            for c in 0..3 {
                assert!((out.at2(i, c) - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dense_softmax_analytic_case() {
        // Logits [0, ln 3] → probabilities [0.25, 0.75].
        let w = Tensor::zeros(&[1, 2]);
        let b = Tensor::from_vec(&[2], alloc::vec![0.0, num::ln(3.0)]);
        let x = Tensor::zeros(&[1, 1]);
        let out = dense_forward(&w, &b, &x, OutputActivation::Softmax);
        assert!((out.at2(0, 0) - 0.25).abs() < 1e-12);
        assert!((out.at2(0, 1) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn dense_sigmoid_of_zero_is_half() {
        let w = Tensor::zeros(&[1, 2]);
        let b = Tensor::zeros(&[2]);
        let x = Tensor::zeros(&[1, 1]);
        let out = dense_forward(&w, &b, &x, OutputActivation::Sigmoid);
        assert_eq!(out.data(), &[0.5, 0.5]);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let vocab = fit_vocabulary(&["a b c d e"], 10).unwrap();
        let m = random_matrix(&vocab, 6, 3);
        let w = Tensor::from_vec(&[6, 4], (0..24).map(|i| (i as f64) * 0.1 - 1.0).collect());
        let b = Tensor::from_vec(&[4], alloc::vec![0.1, -0.2, 0.3, 0.0]);
        let x = Tensor::from_vec(&[3, 6], m.rows.data()[6..24].to_vec());
        let out = dense_forward(&w, &b, &x, OutputActivation::Softmax);
        for i in 0..3 {
            let sum: f64 = (0..4).map(|c| out.at2(i, c)).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cross_entropy_confident_correct_is_near_zero() {
        let probs = Tensor::from_vec(&[1, 2], alloc::vec![1.0, 0.0]);
        let onehot = OneHotLabels::from_class_indices(&[0], 2).unwrap();
        let loss = cross_entropy(&probs, &onehot, LossKind::CategoricalCrossEntropy);
        // -ln(1 - 1e-7) ≈ 1.00000005e-7 after clipping.
        assert!(loss > 0.0 && loss <= 1.01e-7, "loss {loss}");
    }

    #[test]
    #[allow(clippy::approx_constant)] // the decimal ln 2 is the independent expected value
    fn cross_entropy_uniform_binary_case() {
        let probs = Tensor::from_vec(&[1, 2], alloc::vec![0.5, 0.5]);
        let onehot = OneHotLabels::from_class_indices(&[0], 2).unwrap();
        let loss = cross_entropy(&probs, &onehot, LossKind::CategoricalCrossEntropy);
        assert!((loss - num::ln(2.0)).abs() < 1e-12);
        assert!((loss - 0.693147).abs() < 1e-6);
    }

    #[test]
    fn cross_entropy_quarter_probability() {
        let probs = Tensor::from_vec(&[1, 2], alloc::vec![0.75, 0.25]);
        let onehot = OneHotLabels::from_class_indices(&[1], 2).unwrap();
        let loss = cross_entropy(&probs, &onehot, LossKind::CategoricalCrossEntropy);
        assert!((loss - (-num::ln(0.25))).abs() < 1e-12);
        assert!((loss - 1.386294).abs() < 1e-6);
    }

    #[test]
    fn binary_cross_entropy_hand_case() {
        // p = [0.8, 0.3], y = [1, 0]:
        // loss = -(ln 0.8 + ln 0.7) / 2
        let probs = Tensor::from_vec(&[1, 2], alloc::vec![0.8, 0.3]);
        let onehot = OneHotLabels::from_class_indices(&[0], 2).unwrap();
        let loss = cross_entropy(&probs, &onehot, LossKind::BinaryCrossEntropy);
        let expected = -(num::ln(0.8) + num::ln(0.7)) / 2.0;
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.2, 0.5, 0.3]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.1]), 0);
    }
}
