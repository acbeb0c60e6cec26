//! `train`: fit a model on the training split, keep the best-validation
//! epoch, and write the checkpoint plus a JSONL epoch log.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use loglevel_core::eval::make_splits;
use loglevel_core::model::{save_checkpoint, train, Activation, Aggregation, EpochLog};
use loglevel_core::{CoreError, Result, Vocabulary};

use crate::config::RunConfig;

use super::{load_samples, partition_unseen, pick, vocab_from_train, write_text};

/// Flag mirror of the serialized aggregation names.
#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregationArg {
    Mean,
    Max,
}

impl From<AggregationArg> for Aggregation {
    fn from(a: AggregationArg) -> Aggregation {
        match a {
            AggregationArg::Mean => Aggregation::Mean,
            AggregationArg::Max => Aggregation::Max,
        }
    }
}

/// Flag mirror of the serialized activation names.
#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ActivationArg {
    Tanh,
    Relu,
}

impl From<ActivationArg> for Activation {
    fn from(a: ActivationArg) -> Activation {
        match a {
            ActivationArg::Tanh => Activation::Tanh,
            ActivationArg::Relu => Activation::Relu,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Sample JSONL file or a directory of them.
    #[arg(long, value_name = "PATH")]
    pub samples: Option<PathBuf>,
    /// Vocabulary JSON; built from the training split if the file is absent.
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// Where to write the best checkpoint.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Where to write the per-epoch JSONL log.
    #[arg(long, value_name = "FILE")]
    pub log: Option<PathBuf>,
    /// Seed for the stratified split.
    #[arg(long, value_name = "SEED")]
    pub split_seed: Option<u64>,
    /// Project held out of the split entirely; repeatable.
    #[arg(long = "unseen", value_name = "PROJECT")]
    pub unseen: Vec<String>,
    /// Seed for parameter init, shuffling, and the tie-breaking stream.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Node state width.
    #[arg(long, value_name = "D")]
    pub hidden: Option<usize>,
    /// Propagation steps.
    #[arg(long, value_name = "T")]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    /// GRU candidate activation.
    #[arg(long, value_enum)]
    pub activation: Option<ActivationArg>,
    #[arg(long, value_name = "F")]
    pub learning_rate: Option<f64>,
    #[arg(long, value_name = "N")]
    pub batch_size: Option<usize>,
    /// Epochs without validation improvement before stopping.
    #[arg(long, value_name = "N")]
    pub patience: Option<usize>,
    #[arg(long, value_name = "N")]
    pub max_epochs: Option<usize>,
    /// Subtoken cutoff used when the vocabulary has to be built here.
    #[arg(long, value_name = "N")]
    pub min_count: Option<u32>,
}

pub fn run(cfg: &RunConfig, args: &TrainArgs) -> Result<()> {
    let samples_path =
        args.samples.clone().unwrap_or_else(|| cfg.output_dir.join("samples"));
    let vocab_path = args.vocab.clone().unwrap_or_else(|| cfg.output_dir.join("vocab.json"));
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.join("model.json"));
    let log_path = args.log.clone().unwrap_or_else(|| cfg.output_dir.join("train_log.jsonl"));
    let split_seed = args.split_seed.unwrap_or(cfg.split.seed);
    let unseen =
        if args.unseen.is_empty() { cfg.unseen_projects.clone() } else { args.unseen.clone() };

    let mut model_config = cfg.model;
    if let Some(h) = args.hidden {
        model_config.hidden = h;
    }
    if let Some(t) = args.steps {
        model_config.steps = t;
    }
    if let Some(a) = args.aggregation {
        model_config.aggregation = a.into();
    }
    if let Some(a) = args.activation {
        model_config.candidate_activation = a.into();
    }
    let mut train_config = cfg.train.clone();
    if let Some(s) = args.seed {
        train_config.seed = s;
    }
    if let Some(lr) = args.learning_rate {
        train_config.learning_rate = lr;
    }
    if let Some(b) = args.batch_size {
        train_config.batch_size = b;
    }
    if let Some(p) = args.patience {
        train_config.patience = p;
    }
    if let Some(m) = args.max_epochs {
        train_config.max_epochs = m;
    }

    let samples = load_samples(&samples_path)?;
    let (seen, held_out) = partition_unseen(samples, &unseen);
    if !held_out.is_empty() {
        eprintln!("holding out {} samples from unseen projects", held_out.len());
    }
    let splits = make_splits(&seen, split_seed)?;

    let vocab = if vocab_path.is_file() {
        Vocabulary::load(&vocab_path)?
    } else {
        eprintln!(
            "vocabulary {} not found; building it from the training split",
            vocab_path.display()
        );
        let min_count = args.min_count.unwrap_or(cfg.vocab.min_count);
        let vocab = vocab_from_train(&seen, &splits, min_count);
        super::create_parent_dirs(&vocab_path)?;
        vocab.save(&vocab_path)?;
        eprintln!("wrote {} ({} entries)", vocab_path.display(), vocab.len());
        vocab
    };

    println!(
        "training on {} samples, validating on {} (split seed {}, model seed {})",
        splits.train.len(),
        splits.val.len(),
        split_seed,
        train_config.seed
    );
    let mut on_epoch = |log: &EpochLog| {
        let val = match (log.val_macro_auc, log.val_accuracy) {
            (Some(auc), Some(acc)) => format!(" val_auc {auc:.4} val_acc {acc:.4}"),
            (None, Some(acc)) => format!(" val_acc {acc:.4}"),
            _ => String::new(),
        };
        eprintln!(
            "epoch {:>3}  loss {:.4}  train_acc {:.4}{}{}",
            log.epoch,
            log.train_loss,
            log.train_accuracy,
            val,
            if log.improved { "  *" } else { "" }
        );
    };
    let outcome = train(
        model_config,
        &train_config,
        &vocab,
        &pick(&seen, &splits.train),
        &pick(&seen, &splits.val),
        Some(&mut on_epoch),
    )?;

    let mut log_lines = String::new();
    for entry in &outcome.log {
        let line = serde_json::to_string(entry)
            .map_err(|e| CoreError::Data(format!("epoch log serialization: {e}")))?;
        log_lines.push_str(&line);
        log_lines.push('\n');
    }
    write_text(&log_path, &log_lines)?;
    super::create_parent_dirs(&out)?;
    save_checkpoint(&outcome.params, &out)?;

    println!(
        "stopped after {} epochs; best epoch {} with metric {:.6}",
        outcome.epochs_run, outcome.best_epoch, outcome.best_metric
    );
    println!("wrote {} and {}", out.display(), log_path.display());
    Ok(())
}
