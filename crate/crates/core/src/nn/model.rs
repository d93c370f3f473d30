//! Whole-model forward pass, backpropagation, loss, and prediction.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::layers::{
    argmax, cross_entropy, dense_forward, dropout_forward, embed_ids, loss_logit_grad,
};
use super::linalg::{matmul_a_bt_acc, matmul_at_b_acc};
use super::lstm::{lstm_backward, lstm_forward_dir, LstmCache};
use super::{Arch, ModelConfig, ModelGrads, ModelParams};
use crate::error::Error;
use crate::tensor::Tensor;
use crate::tokenize::{OneHotLabels, SequenceBatch};

/// Activations retained from one forward pass for backpropagation.
pub struct ForwardCache {
    /// LSTM input after the dropout layer, `n × T × dim`.
    x_dropped: Tensor,
    /// Dropout-layer mask (training only).
    drop_mask: Option<Tensor>,
    fwd: LstmCache,
    bwd: Option<LstmCache>,
    /// Dense input: final hidden state(s), `n × D`.
    dense_in: Tensor,
    /// Output probabilities, `n × k`.
    pub probs: Tensor,
}

/// Embedding → dropout → (Bi)LSTM → dense, with dropout masks drawn from
/// `rng` when `training` is set.
pub fn model_forward(
    params: &ModelParams,
    config: &ModelConfig,
    batch: &SequenceBatch,
    training: bool,
    rng: &mut ChaCha8Rng,
) -> Result<ForwardCache, Error> {
    let embedded = embed_ids(&params.embedding, batch)?;
    let (x_dropped, drop_mask) = dropout_forward(&embedded, config.dropout_rate, training, rng);

    let h = config.hidden_units;
    let (dense_in, fwd, bwd) = match config.arch {
        Arch::Lstm => {
            let cache = lstm_forward_dir(
                &params.fwd,
                &x_dropped,
                h,
                config.dropout_rate,
                config.recurrent_dropout_rate,
                training,
                false,
                rng,
            )?;
            (cache.final_hidden(), cache, None)
        }
        Arch::Bilstm => {
            let bwd_params = params.bwd.as_ref().expect("bilstm params have bwd weights");
            let fwd_cache = lstm_forward_dir(
                &params.fwd,
                &x_dropped,
                h,
                config.dropout_rate,
                config.recurrent_dropout_rate,
                training,
                false,
                rng,
            )?;
            let bwd_cache = lstm_forward_dir(
                bwd_params,
                &x_dropped,
                h,
                config.dropout_rate,
                config.recurrent_dropout_rate,
                training,
                true,
                rng,
            )?;
            let n = batch.rows();
            let fwd_final = fwd_cache.final_hidden();
            let bwd_final = bwd_cache.final_hidden();
            let mut concat = Tensor::zeros(&[n, 2 * h]);
            for i in 0..n {
                concat.data_mut()[i * 2 * h..i * 2 * h + h]
                    .copy_from_slice(&fwd_final.data()[i * h..(i + 1) * h]);
                concat.data_mut()[i * 2 * h + h..(i + 1) * 2 * h]
                    .copy_from_slice(&bwd_final.data()[i * h..(i + 1) * h]);
            }
            (concat, fwd_cache, Some(bwd_cache))
        }
    };

    let probs = dense_forward(
        &params.dense_w,
        &params.dense_b,
        &dense_in,
        config.output_activation,
    );
    probs.check_finite("dense output")?;
    Ok(ForwardCache {
        x_dropped,
        drop_mask,
        fwd,
        bwd,
        dense_in,
        probs,
    })
}

/// Analytic gradients of the batch loss for every trainable tensor, via
/// backpropagation through time. The embedding gradient is `None` when
/// the embedding is frozen; the padding row (id 0) never accumulates
/// gradient.
pub fn backward(
    params: &ModelParams,
    config: &ModelConfig,
    cache: &ForwardCache,
    batch: &SequenceBatch,
    onehot: &OneHotLabels,
) -> Result<ModelGrads, Error> {
    let n = batch.rows();
    let k = config.num_classes;
    let d = config.dense_input_width();
    let h = config.hidden_units;
    let dim = config.embedding_dim;
    let t_len = batch.max_len();

    // Dense layer. For both supported pairings the pre-activation
    // gradient is (p - y) scaled by the loss normalization.
    let dlogits = loss_logit_grad(&cache.probs, onehot, config.loss);
    let mut dense_w_grad = Tensor::zeros(&[d, k]);
    matmul_at_b_acc(
        cache.dense_in.data(),
        dlogits.data(),
        dense_w_grad.data_mut(),
        n,
        d,
        k,
    );
    let mut dense_b_grad = Tensor::zeros(&[k]);
    for row in dlogits.data().chunks(k) {
        for (acc, &v) in dense_b_grad.data_mut().iter_mut().zip(row) {
            *acc += v;
        }
    }
    let mut d_dense_in = vec![0.0; n * d];
    matmul_a_bt_acc(
        dlogits.data(),
        params.dense_w.data(),
        &mut d_dense_in,
        n,
        d,
        k,
    );

    // Through the recurrent layer(s).
    let mut d_x = vec![0.0; n * t_len * dim];
    let (fwd_grads, bwd_grads) = match config.arch {
        Arch::Lstm => {
            let grads = lstm_backward(
                &params.fwd,
                &cache.fwd,
                &cache.x_dropped,
                &d_dense_in,
                &mut d_x,
            );
            (grads, None)
        }
        Arch::Bilstm => {
            let mut dh_fwd = vec![0.0; n * h];
            let mut dh_bwd = vec![0.0; n * h];
            for i in 0..n {
                dh_fwd[i * h..(i + 1) * h].copy_from_slice(&d_dense_in[i * 2 * h..i * 2 * h + h]);
                dh_bwd[i * h..(i + 1) * h]
                    .copy_from_slice(&d_dense_in[i * 2 * h + h..(i + 1) * 2 * h]);
            }
            let fwd = lstm_backward(&params.fwd, &cache.fwd, &cache.x_dropped, &dh_fwd, &mut d_x);
            let bwd_cache = cache.bwd.as_ref().expect("bilstm cache has bwd direction");
            let bwd_params = params.bwd.as_ref().expect("bilstm params have bwd weights");
            let bwd = lstm_backward(bwd_params, bwd_cache, &cache.x_dropped, &dh_bwd, &mut d_x);
            (fwd, Some(bwd))
        }
    };

    // Through the dropout layer into the embedding rows.
    let embedding = if config.embedding_trainable {
        if let Some(mask) = &cache.drop_mask {
            for (v, &m) in d_x.iter_mut().zip(mask.data()) {
                *v *= m;
            }
        }
        let mut d_emb = Tensor::zeros(&[config.vocab_size + 1, dim]);
        for i in 0..n {
            for (t, &id) in batch.row(i).iter().enumerate() {
                if id == 0 {
                    continue; // padding row stays zero
                }
                let src = &d_x[(i * t_len + t) * dim..(i * t_len + t) * dim + dim];
                let dst = &mut d_emb.data_mut()[id as usize * dim..(id as usize + 1) * dim];
                for (acc, &v) in dst.iter_mut().zip(src) {
                    *acc += v;
                }
            }
        }
        Some(d_emb)
    } else {
        None
    };

    let grads = ModelGrads {
        embedding,
        fwd: fwd_grads,
        bwd: bwd_grads,
        dense_w: dense_w_grad,
        dense_b: dense_b_grad,
    };
    grads.check_finite()?;
    Ok(grads)
}

/// Loss of a batch in deterministic (no-dropout) mode; the function the
/// finite-difference oracle probes.
pub fn model_loss(
    params: &ModelParams,
    config: &ModelConfig,
    batch: &SequenceBatch,
    onehot: &OneHotLabels,
) -> Result<f64, Error> {
    // Inference mode draws nothing from the generator.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cache = model_forward(params, config, batch, false, &mut rng)?;
    Ok(cross_entropy(&cache.probs, onehot, config.loss))
}

/// Class probabilities and argmax labels (ties to the lowest index).
pub struct Prediction {
    pub probs: Tensor,
    pub labels: Vec<usize>,
}

/// Inference over a batch, processed in chunks of `config.batch_size`.
pub fn predict(
    params: &ModelParams,
    config: &ModelConfig,
    batch: &SequenceBatch,
) -> Result<Prediction, Error> {
    let n = batch.rows();
    let k = config.num_classes;
    let mut probs = Tensor::zeros(&[n, k]);
    let mut labels = Vec::with_capacity(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut start = 0;
    while start < n {
        let end = (start + config.batch_size).min(n);
        let indices: Vec<usize> = (start..end).collect();
        let sub = batch.gather(&indices);
        let cache = model_forward(params, config, &sub, false, &mut rng)?;
        probs.data_mut()[start * k..end * k].copy_from_slice(cache.probs.data());
        for row in cache.probs.data().chunks(k) {
            labels.push(argmax(row));
        }
        start = end;
    }
    Ok(Prediction { probs, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{random_matrix, EmbeddingMatrix};
    use crate::tokenize::{fit_vocabulary, pad_sequences};

    fn setup(arch: Arch) -> (ModelConfig, ModelParams, SequenceBatch, OneHotLabels) {
        let vocab = fit_vocabulary(&["aa bb cc dd ee"], 10).unwrap();
        let embedding = random_matrix(&vocab, 3, 5);
        let mut config = ModelConfig::new(arch, vocab.len(), 3, 3);
        config.hidden_units = 4;
        config.max_len = 4;
        config.dropout_rate = 0.0;
        config.recurrent_dropout_rate = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let params = ModelParams::init(&config, &embedding, &mut rng).unwrap();
        let batch = pad_sequences(&[vec![1, 2, 3], vec![4, 5], vec![2]], 4);
        let onehot = OneHotLabels::from_class_indices(&[0, 2, 1], 3).unwrap();
        (config, params, batch, onehot)
    }

    #[test]
    fn zero_weight_model_is_uniform() {
        for arch in [Arch::Lstm, Arch::Bilstm] {
            let (config, mut params, batch, _) = setup(arch);
            for t in [&mut params.fwd.w, &mut params.fwd.u, &mut params.fwd.b] {
                t.data_mut().iter_mut().for_each(|v| *v = 0.0);
            }
            if let Some(bwd) = &mut params.bwd {
                for t in [&mut bwd.w, &mut bwd.u, &mut bwd.b] {
                    t.data_mut().iter_mut().for_each(|v| *v = 0.0);
                }
            }
            params.dense_w.data_mut().iter_mut().for_each(|v| *v = 0.0);
            params.dense_b.data_mut().iter_mut().for_each(|v| *v = 0.0);

            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let cache = model_forward(&params, &config, &batch, false, &mut rng).unwrap();
            assert!(cache.dense_in.data().iter().all(|&v| v == 0.0));
            for &p in cache.probs.data() {
                assert!((p - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_bias_gradient_is_mean_residual() {
        let (config, params, batch, onehot) = setup(Arch::Lstm);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cache = model_forward(&params, &config, &batch, true, &mut rng).unwrap();
        let grads = backward(&params, &config, &cache, &batch, &onehot).unwrap();
        let n = batch.rows() as f64;
        for c in 0..config.num_classes {
            let mean: f64 = (0..batch.rows())
                .map(|i| cache.probs.at2(i, c) - onehot.row(i)[c])
                .sum::<f64>()
                / n;
            assert!((grads.dense_b.data()[c] - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn frozen_embedding_has_no_gradient() {
        let (mut config, params, batch, onehot) = setup(Arch::Lstm);
        config.embedding_trainable = false;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cache = model_forward(&params, &config, &batch, true, &mut rng).unwrap();
        let grads = backward(&params, &config, &cache, &batch, &onehot).unwrap();
        assert!(grads.embedding.is_none());
    }

    #[test]
    fn trainable_embedding_padding_row_stays_zero() {
        let (config, params, batch, onehot) = setup(Arch::Lstm);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cache = model_forward(&params, &config, &batch, true, &mut rng).unwrap();
        let grads = backward(&params, &config, &cache, &batch, &onehot).unwrap();
        let emb = grads.embedding.unwrap();
        assert!(emb.data()[..config.embedding_dim].iter().all(|&v| v == 0.0));
        // Some used row accumulated gradient.
        assert!(emb.data()[config.embedding_dim..].iter().any(|&v| v != 0.0));
    }

    #[test]
    fn predict_labels_follow_argmax_with_low_tie() {
        let (config, params, batch, _) = setup(Arch::Bilstm);
        let pred = predict(&params, &config, &batch).unwrap();
        assert_eq!(pred.labels.len(), 3);
        for i in 0..3 {
            let row: Vec<f64> = (0..3).map(|c| pred.probs.at2(i, c)).collect();
            assert_eq!(pred.labels[i], argmax(&row));
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn predict_chunks_match_single_pass() {
        let (mut config, params, batch, _) = setup(Arch::Lstm);
        let full = predict(&params, &config, &batch).unwrap();
        config.batch_size = 1;
        let chunked = predict(&params, &config, &batch).unwrap();
        assert_eq!(full.probs, chunked.probs);
        assert_eq!(full.labels, chunked.labels);
    }

    #[test]
    fn forward_is_deterministic_in_training_mode_per_rng() {
        let (mut config, params, batch, _) = setup(Arch::Lstm);
        config.dropout_rate = 0.3;
        config.recurrent_dropout_rate = 0.25;
        let mut rng1 = ChaCha8Rng::seed_from_u64(9);
        let mut rng2 = ChaCha8Rng::seed_from_u64(9);
        let a = model_forward(&params, &config, &batch, true, &mut rng1).unwrap();
        let b = model_forward(&params, &config, &batch, true, &mut rng2).unwrap();
        assert_eq!(a.probs, b.probs);
    }

    #[test]
    fn all_padding_batch_predicts_like_zero_input() {
        let (config, params, _, _) = setup(Arch::Lstm);
        let empty = pad_sequences(&[vec![]], 4);
        let pred = predict(&params, &config, &empty).unwrap();
        let sum: f64 = pred.probs.data().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn embedding_matrix_shape_contract() {
        let vocab = fit_vocabulary(&["a b c"], 10).unwrap();
        let m: EmbeddingMatrix = random_matrix(&vocab, 100, 0);
        assert_eq!(m.rows.shape(), &[4, 100]);
    }
}
