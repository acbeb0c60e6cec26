//! Forward and backward passes of the gated graph network.
//!
//! Everything is single-threaded f64 arithmetic with a fixed evaluation
//! order, so a given (params, sample) pair always produces bit-identical
//! results. Backward is a hand-derived reverse pass over the caches the
//! forward pass records.

use super::linalg::{dot, sigmoid, softmax, vadd, vaxpy};
use super::params::GruParams;
use super::{Activation, Aggregation, EncodedSample, ModelParams, PredictionArray, NUM_CLASSES};
use crate::error::{CoreError, Result};

/// Winner marker for nodes that received no message on a dimension.
pub const NO_WINNER: u32 = u32::MAX;

/// Everything the backward pass needs, recorded step by step.
pub struct Forward {
    /// Node states; entry `t` is the state entering step `t`, the last
    /// entry is the final state. Flat `n_nodes x hidden`.
    pub h: Vec<Vec<f64>>,
    /// Aggregated incoming message per node per step.
    pub x: Vec<Vec<f64>>,
    /// Update gate per step.
    pub z: Vec<Vec<f64>>,
    /// Reset gate per step.
    pub r: Vec<Vec<f64>>,
    /// Candidate state per step.
    pub cand: Vec<Vec<f64>>,
    /// For max aggregation: per step, the message index that won each
    /// node/dimension slot (`NO_WINNER` when none arrived). Empty for mean.
    pub winners: Vec<Vec<u32>>,
    /// Messages received per node; fixed across steps.
    pub counts: Vec<usize>,
    /// Readout layer inputs: final center state, then each post-ReLU
    /// hidden activation.
    pub acts: Vec<Vec<f64>>,
    pub logits: Vec<f64>,
    pub probs: PredictionArray,
    /// Cross-entropy against the label; `None` for unlabeled samples.
    pub loss: Option<f64>,
}

/// One gated-unit update for a single node.
///
/// Returns `(z, r, candidate, new_state)` with
/// `new_state = (1-z)*h + z*candidate`.
pub fn gru_cell(
    gru: &GruParams,
    activation: Activation,
    x: &[f64],
    h: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = x.len();
    let mut z = vec![0.0; d];
    let mut r = vec![0.0; d];
    for i in 0..d {
        z[i] = sigmoid(dot(gru.wz.row(i), x) + dot(gru.uz.row(i), h) + gru.bz[i]);
        r[i] = sigmoid(dot(gru.wr.row(i), x) + dot(gru.ur.row(i), h) + gru.br[i]);
    }
    let rh: Vec<f64> = r.iter().zip(h.iter()).map(|(a, b)| a * b).collect();
    let mut cand = vec![0.0; d];
    for i in 0..d {
        let a = dot(gru.wh.row(i), x) + dot(gru.uh.row(i), &rh) + gru.bh[i];
        cand[i] = match activation {
            Activation::Tanh => a.tanh(),
            Activation::Relu => a.max(0.0),
        };
    }
    let hnew: Vec<f64> =
        (0..d).map(|i| (1.0 - z[i]) * h[i] + z[i] * cand[i]).collect();
    (z, r, cand, hnew)
}

/// Initial state per node: mean of its subtoken embedding rows, or the
/// node-type fallback row when it has none.
fn initial_states(params: &ModelParams, enc: &EncodedSample) -> Result<Vec<f64>> {
    let d = params.config.hidden;
    let mut h = vec![0.0; enc.n_nodes * d];
    for node in 0..enc.n_nodes {
        let out = &mut h[node * d..(node + 1) * d];
        let subs = &enc.subtokens[node];
        if subs.is_empty() {
            out.copy_from_slice(params.fallback.row(enc.fallback_row[node]));
        } else {
            for &idx in subs {
                if idx >= params.embeddings.rows {
                    return Err(CoreError::Data(format!(
                        "subtoken index {idx} outside embedding table ({} rows); \
                         vocabulary and checkpoint disagree",
                        params.embeddings.rows
                    )));
                }
                vadd(out, params.embeddings.row(idx));
            }
            let inv = 1.0 / subs.len() as f64;
            for v in out.iter_mut() {
                *v *= inv;
            }
        }
    }
    Ok(h)
}

/// Computes each message and folds it into the per-node aggregate,
/// iterating the message list in order.
fn aggregate(
    params: &ModelParams,
    enc: &EncodedSample,
    h: &[f64],
    counts: &[usize],
) -> (Vec<f64>, Vec<u32>) {
    let d = params.config.hidden;
    let n = enc.n_nodes;
    let mut x = vec![0.0; n * d];
    match params.config.aggregation {
        Aggregation::Mean => {
            for m in &enc.messages {
                let sender = &h[m.sender * d..(m.sender + 1) * d];
                let out = &mut x[m.receiver * d..(m.receiver + 1) * d];
                params.msg_w[m.channel].matvec_acc(sender, out);
                vadd(out, &params.msg_b[m.channel]);
            }
            for node in 0..n {
                if counts[node] > 1 {
                    let inv = 1.0 / counts[node] as f64;
                    for v in &mut x[node * d..(node + 1) * d] {
                        *v *= inv;
                    }
                }
            }
            (x, Vec::new())
        }
        Aggregation::Max => {
            let mut winners = vec![NO_WINNER; n * d];
            let mut msg = vec![0.0; d];
            for (j, m) in enc.messages.iter().enumerate() {
                let sender = &h[m.sender * d..(m.sender + 1) * d];
                msg.copy_from_slice(&params.msg_b[m.channel]);
                params.msg_w[m.channel].matvec_acc(sender, &mut msg);
                for dim in 0..d {
                    let slot = m.receiver * d + dim;
                    // First message wins ties, so order still matters.
                    if winners[slot] == NO_WINNER || msg[dim] > x[slot] {
                        x[slot] = msg[dim];
                        winners[slot] = j as u32;
                    }
                }
            }
            (x, winners)
        }
    }
}

pub fn forward(params: &ModelParams, enc: &EncodedSample) -> Result<Forward> {
    let config = &params.config;
    let d = config.hidden;
    let n = enc.n_nodes;
    let mut counts = vec![0usize; n];
    for m in &enc.messages {
        counts[m.receiver] += 1;
    }

    let mut h_steps = Vec::with_capacity(config.steps + 1);
    h_steps.push(initial_states(params, enc)?);
    let mut xs = Vec::with_capacity(config.steps);
    let mut zs = Vec::with_capacity(config.steps);
    let mut rs = Vec::with_capacity(config.steps);
    let mut cands = Vec::with_capacity(config.steps);
    let mut winners_steps = Vec::new();

    for _ in 0..config.steps {
        let h = h_steps.last().unwrap();
        let (x, winners) = aggregate(params, enc, h, &counts);
        let mut z = vec![0.0; n * d];
        let mut r = vec![0.0; n * d];
        let mut cand = vec![0.0; n * d];
        let mut hnew = vec![0.0; n * d];
        for node in 0..n {
            let span = node * d..(node + 1) * d;
            let (nz, nr, nc, nh) =
                gru_cell(&params.gru, config.candidate_activation, &x[span.clone()], &h[span.clone()]);
            z[span.clone()].copy_from_slice(&nz);
            r[span.clone()].copy_from_slice(&nr);
            cand[span.clone()].copy_from_slice(&nc);
            hnew[span].copy_from_slice(&nh);
        }
        xs.push(x);
        zs.push(z);
        rs.push(r);
        cands.push(cand);
        if !winners.is_empty() {
            winners_steps.push(winners);
        }
        h_steps.push(hnew);
    }

    let final_h = h_steps.last().unwrap();
    let center = &final_h[enc.center * d..(enc.center + 1) * d];
    let mut acts: Vec<Vec<f64>> = vec![center.to_vec()];
    let layers = params.mlp.len();
    let mut logits = Vec::new();
    for (i, layer) in params.mlp.iter().enumerate() {
        let mut out = layer.b.clone();
        layer.w.matvec_acc(acts.last().unwrap(), &mut out);
        if i + 1 < layers {
            for v in out.iter_mut() {
                *v = v.max(0.0);
            }
            acts.push(out);
        } else {
            logits = out;
        }
    }
    let probs_vec = softmax(&logits);
    let mut probs = [0.0; NUM_CLASSES];
    probs.copy_from_slice(&probs_vec);
    let loss = enc.label.map(|lvl| -probs[lvl.ordinal()].max(1e-300).ln());

    Ok(Forward {
        h: h_steps,
        x: xs,
        z: zs,
        r: rs,
        cand: cands,
        winners: winners_steps,
        counts,
        acts,
        logits,
        probs,
        loss,
    })
}

pub fn predict(params: &ModelParams, enc: &EncodedSample) -> Result<PredictionArray> {
    forward(params, enc).map(|f| f.probs)
}

/// Accumulates the loss gradient of one sample into `grads`, which must be
/// shaped like `params` (see `ModelParams::zeros_like`).
pub fn backward(
    params: &ModelParams,
    enc: &EncodedSample,
    fwd: &Forward,
    grads: &mut ModelParams,
) -> Result<()> {
    let label = enc
        .label
        .ok_or_else(|| CoreError::Data("cannot backpropagate an unlabeled sample".into()))?;
    let d = params.config.hidden;
    let n = enc.n_nodes;
    let steps = params.config.steps;

    // Readout: softmax + cross-entropy collapse to probs - onehot.
    let mut delta: Vec<f64> = fwd.probs.to_vec();
    delta[label.ordinal()] -= 1.0;
    let layers = params.mlp.len();
    let mut dcenter = vec![0.0; d];
    for i in (0..layers).rev() {
        let input = &fwd.acts[i];
        grads.mlp[i].w.add_outer(&delta, input);
        vadd(&mut grads.mlp[i].b, &delta);
        if i > 0 {
            let mut dinput = vec![0.0; input.len()];
            params.mlp[i].w.matvec_t_acc(&delta, &mut dinput);
            // ReLU mask: the cached input is post-activation, positive
            // exactly where the pre-activation was.
            for (dv, &a) in dinput.iter_mut().zip(input.iter()) {
                if a <= 0.0 {
                    *dv = 0.0;
                }
            }
            delta = dinput;
        } else {
            params.mlp[i].w.matvec_t_acc(&delta, &mut dcenter);
        }
    }

    let mut dh = vec![0.0; n * d];
    dh[enc.center * d..(enc.center + 1) * d].copy_from_slice(&dcenter);

    let mut dmsg_buf = match params.config.aggregation {
        Aggregation::Max => vec![0.0; enc.messages.len() * d],
        Aggregation::Mean => Vec::new(),
    };

    for t in (0..steps).rev() {
        let hprev = &fwd.h[t];
        let (xs, zs, rs, cs) = (&fwd.x[t], &fwd.z[t], &fwd.r[t], &fwd.cand[t]);
        let mut dx_all = vec![0.0; n * d];
        let mut dh_prev = vec![0.0; n * d];

        for node in 0..n {
            let span = node * d..(node + 1) * d;
            let dhn = &dh[span.clone()];
            if dhn.iter().all(|v| *v == 0.0) {
                continue;
            }
            let h = &hprev[span.clone()];
            let x = &xs[span.clone()];
            let z = &zs[span.clone()];
            let r = &rs[span.clone()];
            let c = &cs[span.clone()];

            let mut dac = vec![0.0; d];
            let mut daz = vec![0.0; d];
            let mut dhp = vec![0.0; d];
            for i in 0..d {
                let dz = dhn[i] * (c[i] - h[i]);
                let dc = dhn[i] * z[i];
                dhp[i] = dhn[i] * (1.0 - z[i]);
                dac[i] = dc
                    * match params.config.candidate_activation {
                        Activation::Tanh => 1.0 - c[i] * c[i],
                        Activation::Relu => {
                            if c[i] > 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        }
                    };
                daz[i] = dz * z[i] * (1.0 - z[i]);
            }
            let rh: Vec<f64> = r.iter().zip(h.iter()).map(|(a, b)| a * b).collect();
            grads.gru.wh.add_outer(&dac, x);
            grads.gru.uh.add_outer(&dac, &rh);
            vadd(&mut grads.gru.bh, &dac);
            let mut dx = vec![0.0; d];
            params.gru.wh.matvec_t_acc(&dac, &mut dx);
            let mut drh = vec![0.0; d];
            params.gru.uh.matvec_t_acc(&dac, &mut drh);
            let mut dar = vec![0.0; d];
            for i in 0..d {
                let dr = drh[i] * h[i];
                dhp[i] += drh[i] * r[i];
                dar[i] = dr * r[i] * (1.0 - r[i]);
            }
            grads.gru.wr.add_outer(&dar, x);
            grads.gru.ur.add_outer(&dar, h);
            vadd(&mut grads.gru.br, &dar);
            params.gru.wr.matvec_t_acc(&dar, &mut dx);
            params.gru.ur.matvec_t_acc(&dar, &mut dhp);
            grads.gru.wz.add_outer(&daz, x);
            grads.gru.uz.add_outer(&daz, h);
            vadd(&mut grads.gru.bz, &daz);
            params.gru.wz.matvec_t_acc(&daz, &mut dx);
            params.gru.uz.matvec_t_acc(&daz, &mut dhp);

            dx_all[span.clone()].copy_from_slice(&dx);
            dh_prev[span].copy_from_slice(&dhp);
        }

        match params.config.aggregation {
            Aggregation::Mean => {
                let mut dmsg = vec![0.0; d];
                for m in &enc.messages {
                    let recv = &dx_all[m.receiver * d..(m.receiver + 1) * d];
                    if recv.iter().all(|v| *v == 0.0) {
                        continue;
                    }
                    let inv = 1.0 / fwd.counts[m.receiver] as f64;
                    for i in 0..d {
                        dmsg[i] = recv[i] * inv;
                    }
                    let sender = &hprev[m.sender * d..(m.sender + 1) * d];
                    grads.msg_w[m.channel].add_outer(&dmsg, sender);
                    vadd(&mut grads.msg_b[m.channel], &dmsg);
                    params.msg_w[m.channel]
                        .matvec_t_acc(&dmsg, &mut dh_prev[m.sender * d..(m.sender + 1) * d]);
                }
            }
            Aggregation::Max => {
                // Route each slot's gradient to the message that won it.
                for v in dmsg_buf.iter_mut() {
                    *v = 0.0;
                }
                let winners = &fwd.winners[t];
                for slot in 0..n * d {
                    let w = winners[slot];
                    if w != NO_WINNER && dx_all[slot] != 0.0 {
                        dmsg_buf[w as usize * d + slot % d] += dx_all[slot];
                    }
                }
                for (j, m) in enc.messages.iter().enumerate() {
                    let dmsg = &dmsg_buf[j * d..(j + 1) * d];
                    if dmsg.iter().all(|v| *v == 0.0) {
                        continue;
                    }
                    let sender = &hprev[m.sender * d..(m.sender + 1) * d];
                    grads.msg_w[m.channel].add_outer(dmsg, sender);
                    vadd(&mut grads.msg_b[m.channel], dmsg);
                    params.msg_w[m.channel]
                        .matvec_t_acc(dmsg, &mut dh_prev[m.sender * d..(m.sender + 1) * d]);
                }
            }
        }

        dh = dh_prev;
    }

    // Initial states: split the gradient across the embedding rows that
    // were averaged, or give it whole to the fallback row.
    for node in 0..n {
        let dhn = &dh[node * d..(node + 1) * d];
        if dhn.iter().all(|v| *v == 0.0) {
            continue;
        }
        let subs = &enc.subtokens[node];
        if subs.is_empty() {
            vadd(grads.fallback.row_mut(enc.fallback_row[node]), dhn);
        } else {
            let inv = 1.0 / subs.len() as f64;
            for &idx in subs {
                vaxpy(grads.embeddings.row_mut(idx), inv, dhn);
            }
        }
    }
    Ok(())
}

/// Central-difference loss gradient for one flat parameter slot, used by
/// the gradient tests.
pub fn numeric_gradient(
    params: &ModelParams,
    enc: &EncodedSample,
    tensor: usize,
    slot: usize,
    step: f64,
) -> Result<f64> {
    let mut p = params.clone();
    let orig = p.tensors()[tensor][slot];
    p.tensors_mut()[tensor][slot] = orig + step;
    let up = forward(&p, enc)?.loss.ok_or_else(|| CoreError::Data("unlabeled sample".into()))?;
    p.tensors_mut()[tensor][slot] = orig - step;
    let down = forward(&p, enc)?.loss.unwrap();
    Ok((up - down) / (2.0 * step))
}
