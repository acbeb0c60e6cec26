//! Turns a labeled subgraph into the index form the network consumes.

use super::params::{forward_channel, reverse_channel};
use crate::error::{CoreError, Result};
use crate::extract::{LabeledSample, LogLevel};
use crate::vocab::Vocabulary;

/// One directed message: `receiver` aggregates a transformed copy of
/// `sender`'s state through `channel`'s weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub receiver: usize,
    pub sender: usize,
    pub channel: usize,
}

/// A sample with node text resolved to vocabulary indices and edges
/// unrolled into per-direction messages.
///
/// `messages` preserves the sample's edge order: each edge contributes its
/// forward message followed by its reversed one. Aggregation iterates this
/// list, so the order is part of the reproducibility contract.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedSample {
    pub n_nodes: usize,
    /// Per node, vocabulary rows to average for the initial state. Empty
    /// means the node has no text and uses the type fallback row.
    pub subtokens: Vec<Vec<usize>>,
    /// Per node, the fallback embedding row (the node type's index).
    pub fallback_row: Vec<usize>,
    pub messages: Vec<Message>,
    pub center: usize,
    pub label: Option<LogLevel>,
}

pub fn encode_sample(sample: &LabeledSample, vocab: &Vocabulary) -> Result<EncodedSample> {
    let g = &sample.graph;
    let n_nodes = g.nodes.len();
    if n_nodes == 0 {
        return Err(CoreError::Data(format!("sample {} has an empty graph", sample.file)));
    }
    if sample.center as usize >= n_nodes {
        return Err(CoreError::Data(format!(
            "sample {} center {} out of range ({} nodes)",
            sample.file, sample.center, n_nodes
        )));
    }
    let mut subtokens = Vec::with_capacity(n_nodes);
    let mut fallback_row = Vec::with_capacity(n_nodes);
    for node in &g.nodes {
        subtokens.push(vocab.text_indices(&node.text));
        fallback_row.push(node.node_type.index());
    }
    let mut messages = Vec::with_capacity(2 * g.edges.len());
    for e in &g.edges {
        let (src, dst) = (e.src as usize, e.dst as usize);
        if src >= n_nodes || dst >= n_nodes {
            return Err(CoreError::Data(format!(
                "sample {} has an edge endpoint out of range",
                sample.file
            )));
        }
        messages.push(Message { receiver: dst, sender: src, channel: forward_channel(e.etype) });
        messages.push(Message { receiver: src, sender: dst, channel: reverse_channel(e.etype) });
    }
    Ok(EncodedSample {
        n_nodes,
        subtokens,
        fallback_row,
        messages,
        center: sample.center as usize,
        label: sample.label,
    })
}
