//! Gated graph network over extracted subgraphs with an MLP readout.
//!
//! Each node starts from its text embedding. For a fixed number of steps,
//! every edge sends a per-edge-type linear message in both directions, each
//! node aggregates what it received, and a gated recurrent unit folds the
//! aggregate into the node state. The center node's final state feeds a
//! three-layer readout ending in a six-way softmax over log levels.

pub mod encode;
pub mod linalg;
pub mod net;
pub mod params;
pub mod train;

pub use encode::{encode_sample, EncodedSample};
pub use net::{backward, forward, numeric_gradient, predict, Forward};
pub use params::{
    forward_channel, load_checkpoint, reverse_channel, save_checkpoint, GruParams, MlpLayer,
    ModelParams, NUM_CHANNELS,
};
pub use train::{train, EpochLog, TrainOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extract::LogLevel;

/// Output classes, one per log level.
pub const NUM_CLASSES: usize = LogLevel::COUNT;

/// Readout widths between the node state and the class logits.
pub const MLP_HIDDEN: [usize; 2] = [32, 16];

/// Per-node probability distribution over the six levels, level-ordinal
/// indexed.
pub type PredictionArray = [f64; NUM_CLASSES];

/// How received messages combine into one vector per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Elementwise mean over all received messages.
    Mean,
    /// Elementwise maximum over all received messages.
    Max,
}

/// Activation for the GRU candidate state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Node state width.
    pub hidden: usize,
    /// Propagation steps.
    pub steps: usize,
    pub aggregation: Aggregation,
    pub candidate_activation: Activation,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            hidden: 64,
            steps: 8,
            aggregation: Aggregation::Mean,
            candidate_activation: Activation::Tanh,
        }
    }
}

impl ModelConfig {
    /// Layer sizes of the readout, input and output included.
    pub fn mlp_sizes(&self) -> Vec<usize> {
        vec![self.hidden, MLP_HIDDEN[0], MLP_HIDDEN[1], NUM_CLASSES]
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(CoreError::Config("hidden size must be positive".into()));
        }
        if self.steps == 0 {
            return Err(CoreError::Config("step count must be positive".into()));
        }
        Ok(())
    }
}

/// Optimizer and loop settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub seed: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    /// Epochs without validation improvement before stopping. Zero stops
    /// after the first epoch.
    pub patience: usize,
    pub max_epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 42,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            patience: 10,
            max_epochs: 200,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(CoreError::Config("batch size must be positive".into()));
        }
        if self.max_epochs == 0 {
            return Err(CoreError::Config("max epochs must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(CoreError::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Pointwise blend of two prediction sets: `w·a + (1−w)·b`, renormalized
/// per sample.
pub fn ensemble(
    a: &[PredictionArray],
    b: &[PredictionArray],
    weight: f64,
) -> Result<Vec<PredictionArray>> {
    if a.len() != b.len() {
        return Err(CoreError::Config(format!(
            "ensemble inputs differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(CoreError::Config(format!("ensemble weight {weight} outside [0, 1]")));
    }
    let mut out = Vec::with_capacity(a.len());
    for (pa, pb) in a.iter().zip(b.iter()) {
        let mut blended = [0.0; NUM_CLASSES];
        for i in 0..NUM_CLASSES {
            blended[i] = weight * pa[i] + (1.0 - weight) * pb[i];
        }
        let sum: f64 = blended.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(CoreError::Numeric("ensemble blend does not normalize".into()));
        }
        for v in blended.iter_mut() {
            *v /= sum;
        }
        out.push(blended);
    }
    Ok(out)
}

/// Highest-probability class; ties resolve to the lowest ordinal.
pub fn argmax_level(p: &PredictionArray) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = i;
        }
    }
    best
}
