//! `vocab`: build the subtoken vocabulary from the training split.
//!
//! The split is recomputed here from the same seed `train` uses, so the
//! vocabulary never sees validation or test text.

use std::path::PathBuf;

use clap::Args;

use loglevel_core::eval::make_splits;
use loglevel_core::Result;

use crate::config::RunConfig;

use super::{load_samples, partition_unseen, vocab_from_train};

#[derive(Debug, Args)]
pub struct VocabArgs {
    /// Sample JSONL file or a directory of them.
    #[arg(long, value_name = "PATH")]
    pub samples: Option<PathBuf>,
    /// Where to write the vocabulary JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Minimum training-split occurrences for a subtoken to get its own row.
    #[arg(long, value_name = "N")]
    pub min_count: Option<u32>,
    /// Seed for the stratified split; must match the one used for training.
    #[arg(long, value_name = "SEED")]
    pub split_seed: Option<u64>,
    /// Project held out of the split entirely; repeatable.
    #[arg(long = "unseen", value_name = "PROJECT")]
    pub unseen: Vec<String>,
}

pub fn run(cfg: &RunConfig, args: &VocabArgs) -> Result<()> {
    let samples_path =
        args.samples.clone().unwrap_or_else(|| cfg.output_dir.join("samples"));
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.join("vocab.json"));
    let min_count = args.min_count.unwrap_or(cfg.vocab.min_count);
    let split_seed = args.split_seed.unwrap_or(cfg.split.seed);
    let unseen =
        if args.unseen.is_empty() { cfg.unseen_projects.clone() } else { args.unseen.clone() };

    let samples = load_samples(&samples_path)?;
    let (seen, held_out) = partition_unseen(samples, &unseen);
    if !held_out.is_empty() {
        eprintln!("holding out {} samples from unseen projects", held_out.len());
    }
    let splits = make_splits(&seen, split_seed)?;
    let vocab = vocab_from_train(&seen, &splits, min_count);

    super::create_parent_dirs(&out)?;
    vocab.save(&out)?;
    println!(
        "vocabulary: {} entries (min count {}) from {} training samples",
        vocab.len(),
        min_count,
        splits.train.len()
    );
    println!("hash {}", vocab.content_hash()?);
    println!("wrote {}", out.display());
    Ok(())
}
