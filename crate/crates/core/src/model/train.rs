//! Mini-batch Adam training with early stopping.
//!
//! Runs are reproducible: parameter init, batch order, and every update
//! derive from the configured seed, and nothing time-dependent is recorded.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::net::{backward, forward};
use super::{encode_sample, EncodedSample, ModelConfig, ModelParams, TrainConfig};
use crate::error::{CoreError, Result};
use crate::eval::{accuracy, macro_auc};
use crate::extract::{LabeledSample, LogLevel};
use crate::vocab::Vocabulary;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 1-based.
    pub epoch: usize,
    /// Mean cross-entropy over the epoch's forward passes, measured as
    /// batches run (before that batch's update).
    pub train_loss: f64,
    /// Accuracy of the epoch-end parameters on the training set.
    pub train_accuracy: f64,
    pub val_accuracy: Option<f64>,
    pub val_macro_auc: Option<f64>,
    /// The early-stopping criterion: validation macro area under the ROC
    /// curve, falling back to validation accuracy, falling back to train
    /// accuracy when there is no validation set.
    pub metric: f64,
    pub improved: bool,
}

#[derive(Debug)]
pub struct TrainOutcome {
    /// Parameters from the best epoch, not the last one.
    pub params: ModelParams,
    pub best_epoch: usize,
    pub best_metric: f64,
    pub epochs_run: usize,
    pub log: Vec<EpochLog>,
}

/// First-moment/second-moment state for one Adam run.
struct Adam {
    m: ModelParams,
    v: ModelParams,
    step: u64,
}

impl Adam {
    fn new(params: &ModelParams) -> Adam {
        Adam { m: params.zeros_like(), v: params.zeros_like(), step: 0 }
    }

    fn update(&mut self, params: &mut ModelParams, grads: &ModelParams, c: &TrainConfig) {
        self.step += 1;
        let bc1 = 1.0 - c.beta1.powi(self.step as i32);
        let bc2 = 1.0 - c.beta2.powi(self.step as i32);
        let mut p = params.tensors_mut();
        let g = grads.tensors();
        let mut m = self.m.tensors_mut();
        let mut v = self.v.tensors_mut();
        for t in 0..p.len() {
            let (pt, gt, mt, vt) = (&mut p[t], g[t], &mut m[t], &mut v[t]);
            for i in 0..gt.len() {
                mt[i] = c.beta1 * mt[i] + (1.0 - c.beta1) * gt[i];
                vt[i] = c.beta2 * vt[i] + (1.0 - c.beta2) * gt[i] * gt[i];
                let mhat = mt[i] / bc1;
                let vhat = vt[i] / bc2;
                pt[i] -= c.learning_rate * mhat / (vhat.sqrt() + c.epsilon);
            }
        }
    }
}

fn encode_labeled(
    samples: &[LabeledSample],
    vocab: &Vocabulary,
    role: &str,
) -> Result<(Vec<EncodedSample>, Vec<LogLevel>)> {
    let mut encoded = Vec::with_capacity(samples.len());
    let mut labels = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let enc = encode_sample(s, vocab)?;
        let label = enc.label.ok_or_else(|| {
            CoreError::Data(format!("{role} sample {i} ({}) has no label", s.file))
        })?;
        labels.push(label);
        encoded.push(enc);
    }
    Ok((encoded, labels))
}

fn predictions(
    params: &ModelParams,
    set: &[EncodedSample],
) -> Result<Vec<super::PredictionArray>> {
    set.iter().map(|enc| forward(params, enc).map(|f| f.probs)).collect()
}

/// Trains a fresh model and returns the best-validation-epoch parameters.
///
/// `on_epoch` fires after each epoch with the log line just produced.
pub fn train(
    model_config: ModelConfig,
    train_config: &TrainConfig,
    vocab: &Vocabulary,
    train_set: &[LabeledSample],
    val_set: &[LabeledSample],
    mut on_epoch: Option<&mut dyn FnMut(&EpochLog)>,
) -> Result<TrainOutcome> {
    model_config.validate()?;
    train_config.validate()?;
    if train_set.is_empty() {
        return Err(CoreError::Data("training set is empty".into()));
    }
    let (train_enc, train_labels) = encode_labeled(train_set, vocab, "training")?;
    let (val_enc, val_labels) = encode_labeled(val_set, vocab, "validation")?;

    let mut params = ModelParams::init(
        model_config,
        vocab.len(),
        vocab.content_hash()?,
        train_config.seed,
    );
    let mut adam = Adam::new(&params);
    let mut grads = params.zeros_like();
    let mut rng = ChaCha8Rng::seed_from_u64(train_config.seed);

    let mut best_params = params.clone();
    let mut best_metric = f64::NEG_INFINITY;
    let mut best_epoch = 0;
    let mut stale = 0usize;
    let mut log = Vec::new();
    let mut order: Vec<usize> = (0..train_enc.len()).collect();

    for epoch in 1..=train_config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(train_config.batch_size) {
            for t in grads.tensors_mut() {
                t.fill(0.0);
            }
            for &i in batch {
                let fwd = forward(&params, &train_enc[i])?;
                loss_sum += fwd.loss.expect("labeled sample");
                backward(&params, &train_enc[i], &fwd, &mut grads)?;
            }
            let inv = 1.0 / batch.len() as f64;
            for t in grads.tensors_mut() {
                for g in t.iter_mut() {
                    *g *= inv;
                }
            }
            adam.update(&mut params, &grads, train_config);
        }

        let train_preds = predictions(&params, &train_enc)?;
        let train_accuracy = accuracy(&train_preds, &train_labels)?;
        let (val_accuracy, val_auc, metric) = if val_enc.is_empty() {
            (None, None, train_accuracy)
        } else {
            let val_preds = predictions(&params, &val_enc)?;
            let acc = accuracy(&val_preds, &val_labels)?;
            let auc = macro_auc(&val_preds, &val_labels)?;
            (Some(acc), auc, auc.unwrap_or(acc))
        };

        let improved = metric > best_metric;
        if improved {
            best_metric = metric;
            best_epoch = epoch;
            best_params = params.clone();
            stale = 0;
        } else {
            stale += 1;
        }
        let entry = EpochLog {
            epoch,
            train_loss: loss_sum / train_enc.len() as f64,
            train_accuracy,
            val_accuracy,
            val_macro_auc: val_auc,
            metric,
            improved,
        };
        if let Some(cb) = on_epoch.as_deref_mut() {
            cb(&entry);
        }
        log.push(entry);
        if stale >= train_config.patience {
            break;
        }
    }

    let epochs_run = log.len();
    Ok(TrainOutcome { params: best_params, best_epoch, best_metric, epochs_run, log })
}
