//! LSTM cell: forward recurrence and backpropagation through time.
//!
//! The recurrence per step, with packed gate order `[i, f, g, o]`:
//!
//! ```text
//! z_t = x̃_t·W + h̃_{t-1}·U + b
//! i,f,o = σ(z_i), σ(z_f), σ(z_o)      g = tanh(z_g)
//! c_t = f ⊙ c_{t-1} + i ⊙ g          h_t = o ⊙ tanh(c_t)
//! ```
//!
//! Only the final hidden state is returned. During training an input
//! mask (over `x`) and a recurrent mask (over `h`) are each sampled once
//! per sequence and reused at every timestep (variational dropout);
//! `x̃`/`h̃` above are the masked values.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use super::linalg::{matmul_a_bt_acc, matmul_acc, matmul_at_b_acc};
use super::{sample_mask, LstmWeights};
use crate::error::Error;
use crate::num;
use crate::tensor::Tensor;

/// Per-step activations retained for backpropagation through one
/// direction.
#[derive(Debug, Clone)]
pub struct LstmCache {
    pub(crate) n: usize,
    pub(crate) t_len: usize,
    pub(crate) dim: usize,
    pub(crate) hidden: usize,
    /// Input consumed in reverse order (BiLSTM backward direction).
    pub(crate) reverse: bool,
    /// Variational input mask, `n × dim` (training only).
    pub(crate) in_mask: Option<Vec<f64>>,
    /// Variational recurrent mask, `n × H` (training only).
    pub(crate) rec_mask: Option<Vec<f64>>,
    // Step-major buffers, each `T × n × H`, post-activation.
    pub(crate) gate_i: Vec<f64>,
    pub(crate) gate_f: Vec<f64>,
    pub(crate) gate_g: Vec<f64>,
    pub(crate) gate_o: Vec<f64>,
    pub(crate) cell: Vec<f64>,
    pub(crate) tanh_cell: Vec<f64>,
    pub(crate) hidden_states: Vec<f64>,
    /// Final hidden state, `n × H`.
    pub(crate) h_final: Vec<f64>,
}

impl LstmCache {
    /// Final hidden state as an `n × H` tensor.
    pub fn final_hidden(&self) -> Tensor {
        Tensor::from_vec(&[self.n, self.hidden], self.h_final.clone())
    }

    /// Input timestep consumed at processing step `s`.
    #[inline]
    fn input_step(&self, s: usize) -> usize {
        if self.reverse {
            self.t_len - 1 - s
        } else {
            s
        }
    }
}

/// Runs the recurrence over `inputs` (`n × T × dim`) and returns the
/// final hidden state with the cache for backprop.
///
/// Errors with the offending timestep if activations go non-finite.
pub fn lstm_forward(
    weights: &LstmWeights,
    inputs: &Tensor,
    hidden_units: usize,
    input_dropout: f64,
    recurrent_dropout: f64,
    training: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(Tensor, LstmCache), Error> {
    let cache = lstm_forward_dir(
        weights,
        inputs,
        hidden_units,
        input_dropout,
        recurrent_dropout,
        training,
        false,
        rng,
    )?;
    Ok((cache.final_hidden(), cache))
}

/// Forward and reversed passes concatenated: `[h_fwd ; h_bwd]`, `n × 2H`.
#[allow(clippy::too_many_arguments)]
pub fn bilstm_forward(
    fwd: &LstmWeights,
    bwd: &LstmWeights,
    inputs: &Tensor,
    hidden_units: usize,
    input_dropout: f64,
    recurrent_dropout: f64,
    training: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(Tensor, LstmCache, LstmCache), Error> {
    let fwd_cache = lstm_forward_dir(
        fwd,
        inputs,
        hidden_units,
        input_dropout,
        recurrent_dropout,
        training,
        false,
        rng,
    )?;
    let bwd_cache = lstm_forward_dir(
        bwd,
        inputs,
        hidden_units,
        input_dropout,
        recurrent_dropout,
        training,
        true,
        rng,
    )?;
    let n = fwd_cache.n;
    let h = hidden_units;
    let mut out = Tensor::zeros(&[n, 2 * h]);
    for i in 0..n {
        out.data_mut()[i * 2 * h..i * 2 * h + h]
            .copy_from_slice(&fwd_cache.h_final[i * h..(i + 1) * h]);
        out.data_mut()[i * 2 * h + h..(i + 1) * 2 * h]
            .copy_from_slice(&bwd_cache.h_final[i * h..(i + 1) * h]);
    }
    Ok((out, fwd_cache, bwd_cache))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn lstm_forward_dir(
    weights: &LstmWeights,
    inputs: &Tensor,
    hidden_units: usize,
    input_dropout: f64,
    recurrent_dropout: f64,
    training: bool,
    reverse: bool,
    rng: &mut ChaCha8Rng,
) -> Result<LstmCache, Error> {
    let shape = inputs.shape();
    debug_assert_eq!(shape.len(), 3);
    let (n, t_len, dim) = (shape[0], shape[1], shape[2]);
    let h = hidden_units;
    debug_assert_eq!(weights.w.shape(), &[dim, 4 * h]);
    debug_assert_eq!(weights.u.shape(), &[h, 4 * h]);
    debug_assert_eq!(weights.b.len(), 4 * h);

    let in_mask =
        (training && input_dropout > 0.0).then(|| sample_mask(n * dim, input_dropout, rng));
    let rec_mask =
        (training && recurrent_dropout > 0.0).then(|| sample_mask(n * h, recurrent_dropout, rng));

    let step = n * h;
    let mut cache = LstmCache {
        n,
        t_len,
        dim,
        hidden: h,
        reverse,
        in_mask,
        rec_mask,
        gate_i: vec![0.0; t_len * step],
        gate_f: vec![0.0; t_len * step],
        gate_g: vec![0.0; t_len * step],
        gate_o: vec![0.0; t_len * step],
        cell: vec![0.0; t_len * step],
        tanh_cell: vec![0.0; t_len * step],
        hidden_states: vec![0.0; t_len * step],
        h_final: vec![0.0; step],
    };

    let mut x_tilde = vec![0.0; n * dim];
    let mut h_tilde = vec![0.0; step];
    let mut h_prev = vec![0.0; step];
    let mut c_prev = vec![0.0; step];
    let mut z = vec![0.0; n * 4 * h];

    for s in 0..t_len {
        let t = cache.input_step(s);
        gather_masked_input(
            inputs.data(),
            &mut x_tilde,
            cache.in_mask.as_deref(),
            n,
            t_len,
            dim,
            t,
        );
        apply_mask(&h_prev, &mut h_tilde, cache.rec_mask.as_deref());

        // z = b (broadcast) + x̃·W + h̃·U
        for row in z.chunks_mut(4 * h) {
            row.copy_from_slice(weights.b.data());
        }
        matmul_acc(&x_tilde, weights.w.data(), &mut z, n, dim, 4 * h);
        matmul_acc(&h_tilde, weights.u.data(), &mut z, n, h, 4 * h);

        let base = s * step;
        for i in 0..n {
            let zi = &z[i * 4 * h..(i + 1) * 4 * h];
            for j in 0..h {
                let idx = base + i * h + j;
                let gate_i = num::sigmoid(zi[j]);
                let gate_f = num::sigmoid(zi[h + j]);
                let gate_g = num::tanh(zi[2 * h + j]);
                let gate_o = num::sigmoid(zi[3 * h + j]);
                let c = gate_f * c_prev[i * h + j] + gate_i * gate_g;
                let tc = num::tanh(c);
                let h_val = gate_o * tc;
                cache.gate_i[idx] = gate_i;
                cache.gate_f[idx] = gate_f;
                cache.gate_g[idx] = gate_g;
                cache.gate_o[idx] = gate_o;
                cache.cell[idx] = c;
                cache.tanh_cell[idx] = tc;
                cache.hidden_states[idx] = h_val;
            }
        }
        h_prev.copy_from_slice(&cache.hidden_states[base..base + step]);
        c_prev.copy_from_slice(&cache.cell[base..base + step]);
        if !h_prev.iter().all(|v| v.is_finite()) || !c_prev.iter().all(|v| v.is_finite()) {
            return Err(Error::NumericFailure {
                context: format!("lstm forward at timestep {t}"),
            });
        }
    }
    cache.h_final.copy_from_slice(&h_prev);
    Ok(cache)
}

/// BPTT for one direction.
///
/// `inputs` is the same `n × T × dim` tensor the forward pass consumed;
/// `d_h_final` is `n × H`. Returns the weight gradients and the gradient
/// w.r.t. `inputs` (accumulated into `d_inputs`).
pub(crate) fn lstm_backward(
    weights: &LstmWeights,
    cache: &LstmCache,
    inputs: &Tensor,
    d_h_final: &[f64],
    d_inputs: &mut [f64],
) -> LstmWeights {
    let (n, t_len, dim, h) = (cache.n, cache.t_len, cache.dim, cache.hidden);
    let step = n * h;
    debug_assert_eq!(d_h_final.len(), step);
    debug_assert_eq!(d_inputs.len(), n * t_len * dim);

    let mut grads = LstmWeights::zeros(dim, h);
    let mut dh_next = d_h_final.to_vec();
    let mut dc_next = vec![0.0; step];
    let mut dz = vec![0.0; n * 4 * h];
    let mut x_tilde = vec![0.0; n * dim];
    let mut h_tilde = vec![0.0; step];
    let mut dx_tilde = vec![0.0; n * dim];
    let mut dh_tilde = vec![0.0; step];

    for s in (0..t_len).rev() {
        let t = cache.input_step(s);
        let base = s * step;
        for i in 0..n {
            for j in 0..h {
                let idx = base + i * h + j;
                let dh = dh_next[i * h + j];
                let gate_i = cache.gate_i[idx];
                let gate_f = cache.gate_f[idx];
                let gate_g = cache.gate_g[idx];
                let gate_o = cache.gate_o[idx];
                let tc = cache.tanh_cell[idx];
                let c_prev = if s == 0 { 0.0 } else { cache.cell[idx - step] };

                let d_o = dh * tc;
                let dc = dc_next[i * h + j] + dh * gate_o * (1.0 - tc * tc);
                let d_i = dc * gate_g;
                let d_g = dc * gate_i;
                let d_f = dc * c_prev;
                dc_next[i * h + j] = dc * gate_f;

                let zi = &mut dz[i * 4 * h..(i + 1) * 4 * h];
                zi[j] = d_i * gate_i * (1.0 - gate_i);
                zi[h + j] = d_f * gate_f * (1.0 - gate_f);
                zi[2 * h + j] = d_g * (1.0 - gate_g * gate_g);
                zi[3 * h + j] = d_o * gate_o * (1.0 - gate_o);
            }
        }

        gather_masked_input(
            inputs.data(),
            &mut x_tilde,
            cache.in_mask.as_deref(),
            n,
            t_len,
            dim,
            t,
        );
        if s == 0 {
            h_tilde.iter_mut().for_each(|v| *v = 0.0);
        } else {
            apply_mask(
                &cache.hidden_states[base - step..base],
                &mut h_tilde,
                cache.rec_mask.as_deref(),
            );
        }

        matmul_at_b_acc(&x_tilde, &dz, grads.w.data_mut(), n, dim, 4 * h);
        matmul_at_b_acc(&h_tilde, &dz, grads.u.data_mut(), n, h, 4 * h);
        for row in dz.chunks(4 * h) {
            for (acc, &v) in grads.b.data_mut().iter_mut().zip(row) {
                *acc += v;
            }
        }

        dx_tilde.iter_mut().for_each(|v| *v = 0.0);
        matmul_a_bt_acc(&dz, weights.w.data(), &mut dx_tilde, n, dim, 4 * h);
        // Through the input mask, scattered back to input position t.
        for i in 0..n {
            for d in 0..dim {
                let m = cache.in_mask.as_ref().map_or(1.0, |mask| mask[i * dim + d]);
                d_inputs[(i * t_len + t) * dim + d] += dx_tilde[i * dim + d] * m;
            }
        }

        if s > 0 {
            dh_tilde.iter_mut().for_each(|v| *v = 0.0);
            matmul_a_bt_acc(&dz, weights.u.data(), &mut dh_tilde, n, h, 4 * h);
            for (dst, (idx, &v)) in dh_next.iter_mut().zip(dh_tilde.iter().enumerate()) {
                let m = cache.rec_mask.as_ref().map_or(1.0, |mask| mask[idx]);
                *dst = v * m;
            }
        }
    }
    grads
}

/// Copies timestep `t` of the inputs into an `n × dim` buffer, applying
/// the variational input mask if present.
fn gather_masked_input(
    inputs: &[f64],
    out: &mut [f64],
    mask: Option<&[f64]>,
    n: usize,
    t_len: usize,
    dim: usize,
    t: usize,
) {
    for i in 0..n {
        let src = &inputs[(i * t_len + t) * dim..(i * t_len + t) * dim + dim];
        let dst = &mut out[i * dim..(i + 1) * dim];
        dst.copy_from_slice(src);
        if let Some(mask) = mask {
            for (v, &m) in dst.iter_mut().zip(&mask[i * dim..(i + 1) * dim]) {
                *v *= m;
            }
        }
    }
}

fn apply_mask(src: &[f64], out: &mut [f64], mask: Option<&[f64]>) {
    out.copy_from_slice(src);
    if let Some(mask) = mask {
        for (v, &m) in out.iter_mut().zip(mask) {
            *v *= m;
        }
    }
}
