//! Multilingual hate-speech classification toolkit.
//!
//! Everything here is pure computation over owned data: tweet cleaning,
//! vocabulary fitting and sequence encoding, pretrained word-vector
//! ingestion, from-scratch LSTM/BiLSTM training with Adam and
//! backpropagation through time, and per-class evaluation with baseline
//! comparison. File and terminal IO live in the companion `hsd-cli` crate.
//!
//! The crate is `no_std` (with `alloc`); float transcendentals go through
//! [`libm`]. All randomness flows from caller-supplied seeds, so every
//! result is reproducible bit for bit on a given platform.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod data;
pub mod embed;
pub mod error;
pub mod eval;
pub mod nn;
pub mod preprocess;
pub mod tensor;
pub mod tokenize;

mod emoji;
mod num;

pub use error::Error;
pub use tensor::Tensor;
