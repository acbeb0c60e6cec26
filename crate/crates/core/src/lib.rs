//! Predicts the verbosity level of Java log statements from program graphs.
//!
//! The pipeline has five stages, each its own module:
//!
//! 1. [`java`] lexes and parses a Java subset and converts each file to a
//!    typed [`graph::ProgramGraph`].
//! 2. [`extract`] locates log statements, redacts them to a bare semicolon,
//!    and cuts a hop-bounded subgraph around each redaction site.
//! 3. [`vocab`] splits identifiers into subtokens and builds the embedding
//!    vocabulary from the training split.
//! 4. [`model`] runs gated message passing over the subgraph and reads the
//!    center node out through an MLP into six level probabilities.
//! 5. [`eval`] splits corpora by project, scores predictions (accuracy,
//!    one-vs-rest AUC, confusion), and writes reports.

pub mod error;
pub mod extract;
pub mod eval;
pub mod graph;
pub mod java;
pub mod model;
pub mod synth;
pub mod vocab;

pub use error::{CoreError, Result};
pub use extract::{ExtractOptions, ExtractionStats, LabeledSample, LogLevel, SampleOrigin};
pub use graph::{Direction, Edge, EdgeType, Node, NodeId, NodeType, ProgramGraph};
pub use model::{ModelConfig, ModelParams, PredictionArray, TrainConfig};
pub use vocab::Vocabulary;
