//! Learnable tensors, their initialization, and checkpoint files.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::Mat;
use super::ModelConfig;
use crate::error::{CoreError, Result};
use crate::graph::{EdgeType, NodeType};

/// Message channels: one per edge type plus one per reversed edge type.
pub const NUM_CHANNELS: usize = EdgeType::CHANNELS;

/// Channel carrying `etype` messages from edge source to destination.
pub fn forward_channel(etype: EdgeType) -> usize {
    etype.index()
}

/// Channel carrying `etype` messages from edge destination back to source.
pub fn reverse_channel(etype: EdgeType) -> usize {
    EdgeType::COUNT + etype.index()
}

/// One gated recurrent unit: update gate `z`, reset gate `r`, candidate `h~`.
/// `w_*` act on the aggregated message, `u_*` on the previous state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruParams {
    pub wz: Mat,
    pub uz: Mat,
    pub bz: Vec<f64>,
    pub wr: Mat,
    pub ur: Mat,
    pub br: Vec<f64>,
    pub wh: Mat,
    pub uh: Mat,
    pub bh: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpLayer {
    /// `out × in`.
    pub w: Mat,
    pub b: Vec<f64>,
}

/// Every learnable tensor in the model, plus the shape-defining config and
/// the hash of the vocabulary the embeddings were built against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub vocab_hash: String,
    /// One row per vocabulary entry (reserved rows included).
    pub embeddings: Mat,
    /// One row per node type, used when a node has no subtokens.
    pub fallback: Mat,
    /// Per-channel message transform, `hidden × hidden`.
    pub msg_w: Vec<Mat>,
    pub msg_b: Vec<Vec<f64>>,
    pub gru: GruParams,
    pub mlp: Vec<MlpLayer>,
}

fn init_mat(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
    // Uniform in ±1/√fan_in, fan_in being the input width.
    let bound = 1.0 / (cols as f64).sqrt();
    let mut m = Mat::zeros(rows, cols);
    for v in m.data.iter_mut() {
        *v = rng.gen_range(-bound..bound);
    }
    m
}

impl ModelParams {
    /// Random initialization. Weights are uniform in ±1/√fan_in, biases
    /// zero. The fill order is fixed so a seed always yields the same
    /// parameters.
    pub fn init(config: ModelConfig, vocab_len: usize, vocab_hash: String, seed: u64) -> Self {
        let d = config.hidden;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let embeddings = init_mat(vocab_len, d, &mut rng);
        let fallback = init_mat(NodeType::ALL.len(), d, &mut rng);
        let mut msg_w = Vec::with_capacity(NUM_CHANNELS);
        let mut msg_b = Vec::with_capacity(NUM_CHANNELS);
        for _ in 0..NUM_CHANNELS {
            msg_w.push(init_mat(d, d, &mut rng));
            msg_b.push(vec![0.0; d]);
        }
        let gru = GruParams {
            wz: init_mat(d, d, &mut rng),
            uz: init_mat(d, d, &mut rng),
            bz: vec![0.0; d],
            wr: init_mat(d, d, &mut rng),
            ur: init_mat(d, d, &mut rng),
            br: vec![0.0; d],
            wh: init_mat(d, d, &mut rng),
            uh: init_mat(d, d, &mut rng),
            bh: vec![0.0; d],
        };
        let sizes = config.mlp_sizes();
        let mlp = sizes
            .windows(2)
            .map(|pair| MlpLayer {
                w: init_mat(pair[1], pair[0], &mut rng),
                b: vec![0.0; pair[1]],
            })
            .collect();
        ModelParams { config, vocab_hash, embeddings, fallback, msg_w, msg_b, gru, mlp }
    }

    /// Same shapes, all values zero. Used for gradient accumulators.
    pub fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        for t in out.tensors_mut() {
            for v in t.iter_mut() {
                *v = 0.0;
            }
        }
        out
    }

    /// All tensors as flat slices in a fixed order. The optimizer walks
    /// params, gradients, and moment estimates in lockstep, so the order
    /// must be identical across `zeros_like` copies.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = vec![&self.embeddings.data, &self.fallback.data];
        for m in &self.msg_w {
            out.push(&m.data);
        }
        for b in &self.msg_b {
            out.push(b);
        }
        let g = &self.gru;
        out.extend([
            g.wz.data.as_slice(),
            g.uz.data.as_slice(),
            g.bz.as_slice(),
            g.wr.data.as_slice(),
            g.ur.data.as_slice(),
            g.br.as_slice(),
            g.wh.data.as_slice(),
            g.uh.data.as_slice(),
            g.bh.as_slice(),
        ]);
        for layer in &self.mlp {
            out.push(&layer.w.data);
            out.push(&layer.b);
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> =
            vec![&mut self.embeddings.data, &mut self.fallback.data];
        for m in &mut self.msg_w {
            out.push(&mut m.data);
        }
        for b in &mut self.msg_b {
            out.push(b);
        }
        let g = &mut self.gru;
        out.extend([
            g.wz.data.as_mut_slice(),
            g.uz.data.as_mut_slice(),
            g.bz.as_mut_slice(),
            g.wr.data.as_mut_slice(),
            g.ur.data.as_mut_slice(),
            g.br.as_mut_slice(),
            g.wh.data.as_mut_slice(),
            g.uh.data.as_mut_slice(),
            g.bh.as_mut_slice(),
        ]);
        for layer in &mut self.mlp {
            out.push(&mut layer.w.data);
            out.push(&mut layer.b);
        }
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn validate_shapes(&self) -> Result<()> {
        let d = self.config.hidden;
        self.config.validate()?;
        let check = |name: &str, m: &Mat, rows: usize, cols: usize| -> Result<()> {
            if m.rows != rows || m.cols != cols || m.data.len() != rows * cols {
                return Err(CoreError::Data(format!(
                    "checkpoint tensor {name} has shape {}x{}, expected {rows}x{cols}",
                    m.rows, m.cols
                )));
            }
            Ok(())
        };
        check("embeddings", &self.embeddings, self.embeddings.rows, d)?;
        check("fallback", &self.fallback, NodeType::ALL.len(), d)?;
        if self.msg_w.len() != NUM_CHANNELS || self.msg_b.len() != NUM_CHANNELS {
            return Err(CoreError::Data(format!(
                "checkpoint has {} message channels, expected {NUM_CHANNELS}",
                self.msg_w.len()
            )));
        }
        for (i, m) in self.msg_w.iter().enumerate() {
            check(&format!("msg_w[{i}]"), m, d, d)?;
            if self.msg_b[i].len() != d {
                return Err(CoreError::Data(format!("checkpoint msg_b[{i}] has wrong length")));
            }
        }
        let g = &self.gru;
        for (name, m) in
            [("wz", &g.wz), ("uz", &g.uz), ("wr", &g.wr), ("ur", &g.ur), ("wh", &g.wh), ("uh", &g.uh)]
        {
            check(name, m, d, d)?;
        }
        for (name, b) in [("bz", &g.bz), ("br", &g.br), ("bh", &g.bh)] {
            if b.len() != d {
                return Err(CoreError::Data(format!("checkpoint gru bias {name} has wrong length")));
            }
        }
        let sizes = self.config.mlp_sizes();
        if self.mlp.len() + 1 != sizes.len() {
            return Err(CoreError::Data(format!(
                "checkpoint has {} readout layers, expected {}",
                self.mlp.len(),
                sizes.len() - 1
            )));
        }
        for (i, layer) in self.mlp.iter().enumerate() {
            check(&format!("mlp[{i}].w"), &layer.w, sizes[i + 1], sizes[i])?;
            if layer.b.len() != sizes[i + 1] {
                return Err(CoreError::Data(format!("checkpoint mlp[{i}].b has wrong length")));
            }
        }
        Ok(())
    }
}

/// On-disk checkpoint envelope. Shape fields are redundant with the params
/// but let a load fail with a clear message instead of an index panic.
#[derive(Debug, Serialize, Deserialize)]
struct CheckpointWire {
    version: u32,
    channels: usize,
    mlp_sizes: Vec<usize>,
    vocab_len: usize,
    params: ModelParams,
}

const CHECKPOINT_VERSION: u32 = 1;

pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<()> {
    let wire = CheckpointWire {
        version: CHECKPOINT_VERSION,
        channels: NUM_CHANNELS,
        mlp_sizes: params.config.mlp_sizes(),
        vocab_len: params.embeddings.rows,
        params: params.clone(),
    };
    let json = serde_json::to_string(&wire)
        .map_err(|e| CoreError::Data(format!("checkpoint serialization failed: {e}")))?;
    fs::write(path, json).map_err(|e| CoreError::io(path, e))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let wire: CheckpointWire = serde_json::from_str(&text)
        .map_err(|e| CoreError::Data(format!("checkpoint parse failed: {e}")))?;
    if wire.version != CHECKPOINT_VERSION {
        return Err(CoreError::Data(format!(
            "checkpoint version {} unsupported, expected {CHECKPOINT_VERSION}",
            wire.version
        )));
    }
    if wire.channels != NUM_CHANNELS {
        return Err(CoreError::Data(format!(
            "checkpoint declares {} channels, expected {NUM_CHANNELS}",
            wire.channels
        )));
    }
    if wire.mlp_sizes != wire.params.config.mlp_sizes() {
        return Err(CoreError::Data("checkpoint readout sizes disagree with its config".into()));
    }
    if wire.vocab_len != wire.params.embeddings.rows {
        return Err(CoreError::Data("checkpoint vocab length disagrees with embeddings".into()));
    }
    wire.params.validate_shapes()?;
    Ok(wire.params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ModelParams {
        let config = ModelConfig { hidden: 4, steps: 2, ..ModelConfig::default() };
        ModelParams::init(config, 10, "hash".into(), 7)
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let config = ModelConfig { hidden: 4, steps: 2, ..ModelConfig::default() };
        let a = ModelParams::init(config, 10, "hash".into(), 7);
        let b = ModelParams::init(config, 10, "hash".into(), 7);
        let c = ModelParams::init(config, 10, "hash".into(), 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn init_respects_fan_in_bound_and_zero_biases() {
        let p = tiny();
        let bound = 1.0 / 2.0 + 1e-12; // hidden 4, fan_in 4
        for m in [&p.gru.wz, &p.gru.uh, &p.msg_w[0], &p.embeddings] {
            assert!(m.data.iter().all(|v| v.abs() <= bound));
            assert!(m.data.iter().any(|v| *v != 0.0));
        }
        assert!(p.gru.bz.iter().all(|v| *v == 0.0));
        assert!(p.msg_b.iter().all(|b| b.iter().all(|v| *v == 0.0)));
        assert!(p.mlp.iter().all(|l| l.b.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn tensor_walk_covers_every_parameter_once() {
        let p = tiny();
        let d = 4usize;
        let count = p.num_parameters();
        let expected = 10 * d            // embeddings
            + 7 * d                      // fallback
            + NUM_CHANNELS * (d * d + d) // messages
            + 6 * d * d + 3 * d          // gru
            + (d * 32 + 32) + (32 * 16 + 16) + (16 * 6 + 6);
        assert_eq!(count, expected);
        // Mutable and shared walks agree on order and length.
        let mut q = p.clone();
        let lens: Vec<usize> = p.tensors().iter().map(|t| t.len()).collect();
        let lens_mut: Vec<usize> = q.tensors_mut().iter().map(|t| t.len()).collect();
        assert_eq!(lens, lens_mut);
    }

    #[test]
    fn zeros_like_preserves_shape() {
        let p = tiny();
        let z = p.zeros_like();
        assert_eq!(p.num_parameters(), z.num_parameters());
        assert!(z.tensors().iter().all(|t| t.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let p = tiny();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_checkpoint(&p, &path).unwrap();
        let q = load_checkpoint(&path).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn checkpoint_shape_tampering_is_rejected() {
        let p = tiny();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_checkpoint(&p, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["channels"] = serde_json::json!(11);
        std::fs::write(&path, v.to_string()).unwrap();
        let err = load_checkpoint(&path).unwrap_err().to_string();
        assert!(err.contains("channels"), "unexpected error: {err}");
    }

    #[test]
    fn channel_layout_splits_forward_and_reverse() {
        assert_eq!(NUM_CHANNELS, 26);
        let first = EdgeType::ALL[0];
        let last = EdgeType::ALL[EdgeType::COUNT - 1];
        assert_eq!(forward_channel(first), 0);
        assert_eq!(reverse_channel(first), 13);
        assert_eq!(forward_channel(last), 12);
        assert_eq!(reverse_channel(last), 25);
    }
}
