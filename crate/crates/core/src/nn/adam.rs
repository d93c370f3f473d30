//! Adam optimizer with bias correction.

use alloc::vec;
use alloc::vec::Vec;

use super::{ModelGrads, ModelParams};
use crate::num;

/// Stock Adam hyperparameters.
pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

/// First/second moment estimates per trainable tensor plus the step
/// counter. Moments for a frozen embedding are never allocated.
pub struct AdamState {
    embedding: Option<Moments>,
    fwd_w: Moments,
    fwd_u: Moments,
    fwd_b: Moments,
    bwd_w: Option<Moments>,
    bwd_u: Option<Moments>,
    bwd_b: Option<Moments>,
    dense_w: Moments,
    dense_b: Moments,
    t: u64,
}

impl AdamState {
    pub fn new(params: &ModelParams, embedding_trainable: bool) -> Self {
        AdamState {
            embedding: embedding_trainable.then(|| Moments::new(params.embedding.len())),
            fwd_w: Moments::new(params.fwd.w.len()),
            fwd_u: Moments::new(params.fwd.u.len()),
            fwd_b: Moments::new(params.fwd.b.len()),
            bwd_w: params.bwd.as_ref().map(|b| Moments::new(b.w.len())),
            bwd_u: params.bwd.as_ref().map(|b| Moments::new(b.u.len())),
            bwd_b: params.bwd.as_ref().map(|b| Moments::new(b.b.len())),
            dense_w: Moments::new(params.dense_w.len()),
            dense_b: Moments::new(params.dense_b.len()),
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update of a single tensor:
/// `m ← β1·m + (1-β1)·g`, `v ← β2·v + (1-β2)·g²`, bias-corrected, then
/// `θ ← θ − lr·m̂/(√v̂ + ε)`. `t` is the post-increment step (1-based).
#[allow(clippy::too_many_arguments)]
pub fn adam_update_tensor(
    param: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    debug_assert_eq!(param.len(), grad.len());
    let m_correction = 1.0 - num::powi(beta1, t as i32);
    let v_correction = 1.0 - num::powi(beta2, t as i32);
    for i in 0..param.len() {
        let g = grad[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / m_correction;
        let v_hat = v[i] / v_correction;
        param[i] -= lr * m_hat / (num::sqrt(v_hat) + epsilon);
    }
}

/// Applies one Adam step to every trainable tensor. Tensors are updated
/// independently; a frozen embedding (grads.embedding == None) is left
/// untouched.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &ModelGrads,
    state: &mut AdamState,
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    state.t += 1;
    let t = state.t;
    if let (Some(moments), Some(grad)) = (&mut state.embedding, &grads.embedding) {
        adam_update_tensor(
            params.embedding.data_mut(),
            grad.data(),
            &mut moments.m,
            &mut moments.v,
            t,
            lr,
            beta1,
            beta2,
            epsilon,
        );
    }
    for (param, grad, moments) in [
        (&mut params.fwd.w, &grads.fwd.w, &mut state.fwd_w),
        (&mut params.fwd.u, &grads.fwd.u, &mut state.fwd_u),
        (&mut params.fwd.b, &grads.fwd.b, &mut state.fwd_b),
    ] {
        adam_update_tensor(
            param.data_mut(),
            grad.data(),
            &mut moments.m,
            &mut moments.v,
            t,
            lr,
            beta1,
            beta2,
            epsilon,
        );
    }
    if let (Some(bwd), Some(bwd_grads)) = (&mut params.bwd, &grads.bwd) {
        for (param, grad, moments) in [
            (&mut bwd.w, &bwd_grads.w, state.bwd_w.as_mut().unwrap()),
            (&mut bwd.u, &bwd_grads.u, state.bwd_u.as_mut().unwrap()),
            (&mut bwd.b, &bwd_grads.b, state.bwd_b.as_mut().unwrap()),
        ] {
            adam_update_tensor(
                param.data_mut(),
                grad.data(),
                &mut moments.m,
                &mut moments.v,
                t,
                lr,
                beta1,
                beta2,
                epsilon,
            );
        }
    }
    adam_update_tensor(
        params.dense_w.data_mut(),
        grads.dense_w.data(),
        &mut state.dense_w.m,
        &mut state.dense_w.v,
        t,
        lr,
        beta1,
        beta2,
        epsilon,
    );
    adam_update_tensor(
        params.dense_b.data_mut(),
        grads.dense_b.data(),
        &mut state.dense_b.m,
        &mut state.dense_b.v,
        t,
        lr,
        beta1,
        beta2,
        epsilon,
    );
}
