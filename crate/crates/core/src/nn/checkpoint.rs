//! Model checkpoint serialization.
//!
//! Layout: a little-endian u64 header length, the UTF-8 header
//! (`key=value` lines: the config fields, then caller extras prefixed
//! with `x.`), then each tensor in declaration order as a u64 rank, u64
//! dims, and little-endian f64 values. Save/load round-trips bit for bit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Arch, LossKind, LstmWeights, ModelConfig, ModelParams, OutputActivation};
use crate::error::Error;
use crate::tensor::Tensor;

pub fn encode_checkpoint(
    config: &ModelConfig,
    extras: &BTreeMap<String, String>,
    params: &ModelParams,
) -> Vec<u8> {
    let mut header = String::new();
    let mut push = |key: &str, value: String| {
        header.push_str(key);
        header.push('=');
        header.push_str(&value);
        header.push('\n');
    };
    push("arch", config.arch.as_str().to_string());
    push("hidden_units", config.hidden_units.to_string());
    push("dropout_rate", config.dropout_rate.to_string());
    push(
        "recurrent_dropout_rate",
        config.recurrent_dropout_rate.to_string(),
    );
    push("max_len", config.max_len.to_string());
    push("vocab_size", config.vocab_size.to_string());
    push("embedding_dim", config.embedding_dim.to_string());
    push(
        "embedding_trainable",
        config.embedding_trainable.to_string(),
    );
    push("num_classes", config.num_classes.to_string());
    push(
        "output_activation",
        config.output_activation.as_str().to_string(),
    );
    push("loss", config.loss.as_str().to_string());
    push("epochs", config.epochs.to_string());
    push("batch_size", config.batch_size.to_string());
    push("learning_rate", config.learning_rate.to_string());
    push("seed", config.seed.to_string());
    for (key, value) in extras {
        push(&format!("x.{key}"), value.clone());
    }

    let mut out = Vec::new();
    out.extend_from_slice(&(header.len() as u64).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for (_, tensor) in params.named_tensors() {
        out.extend_from_slice(&(tensor.shape().len() as u64).to_le_bytes());
        for &dim in tensor.shape() {
            out.extend_from_slice(&(dim as u64).to_le_bytes());
        }
        for &value in tensor.data() {
            out.extend_from_slice(&value.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], Error> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| malformed("truncated file"))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64, Error> {
        let bytes = self.take(8)?;
        Ok(u64::from_le_bytes(bytes.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64, Error> {
        let bytes = self.take(8)?;
        Ok(f64::from_le_bytes(bytes.try_into().expect("8 bytes")))
    }
}

fn malformed(detail: &str) -> Error {
    Error::MalformedArtifact {
        what: "checkpoint",
        detail: detail.to_string(),
    }
}

pub fn decode_checkpoint(
    bytes: &[u8],
) -> Result<(ModelConfig, BTreeMap<String, String>, ModelParams), Error> {
    let mut reader = Reader { bytes, pos: 0 };
    let header_len = reader.u64()? as usize;
    let header = core::str::from_utf8(reader.take(header_len)?)
        .map_err(|_| malformed("header is not UTF-8"))?;

    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    let mut extras = BTreeMap::new();
    for line in header.lines() {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| malformed("header line without '='"))?;
        if let Some(extra_key) = key.strip_prefix("x.") {
            extras.insert(extra_key.to_string(), value.to_string());
        } else {
            fields.insert(key, value);
        }
    }

    let get = |key: &str| -> Result<&str, Error> {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| malformed(&format!("missing header field {key}")))
    };
    let parse_usize = |key: &str| -> Result<usize, Error> {
        get(key)?
            .parse()
            .map_err(|_| malformed(&format!("bad value for {key}")))
    };
    let parse_f64 = |key: &str| -> Result<f64, Error> {
        get(key)?
            .parse()
            .map_err(|_| malformed(&format!("bad value for {key}")))
    };

    let config = ModelConfig {
        arch: Arch::parse(get("arch")?).ok_or_else(|| malformed("bad arch"))?,
        hidden_units: parse_usize("hidden_units")?,
        dropout_rate: parse_f64("dropout_rate")?,
        recurrent_dropout_rate: parse_f64("recurrent_dropout_rate")?,
        max_len: parse_usize("max_len")?,
        vocab_size: parse_usize("vocab_size")?,
        embedding_dim: parse_usize("embedding_dim")?,
        embedding_trainable: get("embedding_trainable")? == "true",
        num_classes: parse_usize("num_classes")?,
        output_activation: OutputActivation::parse(get("output_activation")?)
            .ok_or_else(|| malformed("bad output_activation"))?,
        loss: LossKind::parse(get("loss")?).ok_or_else(|| malformed("bad loss"))?,
        epochs: parse_usize("epochs")?,
        batch_size: parse_usize("batch_size")?,
        learning_rate: parse_f64("learning_rate")?,
        seed: get("seed")?
            .parse()
            .map_err(|_| malformed("bad value for seed"))?,
    };

    let mut read_tensor = |expected: &[usize]| -> Result<Tensor, Error> {
        let rank = reader.u64()? as usize;
        if rank != expected.len() {
            return Err(malformed(&format!(
                "tensor rank {rank} does not match expected {}",
                expected.len()
            )));
        }
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(reader.u64()? as usize);
        }
        if shape != expected {
            return Err(malformed(&format!(
                "tensor shape {shape:?} does not match expected {expected:?}"
            )));
        }
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(reader.f64()?);
        }
        Ok(Tensor::from_vec(&shape, data))
    };

    let dim = config.embedding_dim;
    let h = config.hidden_units;
    let embedding = read_tensor(&[config.vocab_size + 1, dim])?;
    let fwd = LstmWeights {
        w: read_tensor(&[dim, 4 * h])?,
        u: read_tensor(&[h, 4 * h])?,
        b: read_tensor(&[4 * h])?,
    };
    let bwd = match config.arch {
        Arch::Lstm => None,
        Arch::Bilstm => Some(LstmWeights {
            w: read_tensor(&[dim, 4 * h])?,
            u: read_tensor(&[h, 4 * h])?,
            b: read_tensor(&[4 * h])?,
        }),
    };
    let dense_w = read_tensor(&[config.dense_input_width(), config.num_classes])?;
    let dense_b = read_tensor(&[config.num_classes])?;
    if reader.pos != bytes.len() {
        return Err(malformed("trailing bytes after tensors"));
    }

    Ok((
        config,
        extras,
        ModelParams {
            embedding,
            fwd,
            bwd,
            dense_w,
            dense_b,
        },
    ))
}
