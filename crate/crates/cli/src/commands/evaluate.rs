//! `evaluate`: score a checkpoint on the held-out test split, and on whole
//! held-out projects when some are marked unseen.
//!
//! The printed table mirrors the reporting shape used throughout: one row
//! per scored model, seen and unseen columns for AUC and accuracy.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use loglevel_core::eval::{evaluate, make_splits, random_baseline, EvalReport};
use loglevel_core::model::{encode_sample, ensemble, load_checkpoint, predict, ModelParams};
use loglevel_core::{
    CoreError, LabeledSample, LogLevel, PredictionArray, Result, Vocabulary,
};

use crate::config::RunConfig;

use super::{check_vocab_match, load_samples, partition_unseen, pick, write_text};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Sample JSONL file or a directory of them.
    #[arg(long, value_name = "PATH")]
    pub samples: Option<PathBuf>,
    /// Vocabulary the checkpoint was trained with.
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// Model checkpoint to score.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Seed for the stratified split; must match the one used for training.
    #[arg(long, value_name = "SEED")]
    pub split_seed: Option<u64>,
    /// Project held out of the split entirely; repeatable.
    #[arg(long = "unseen", value_name = "PROJECT")]
    pub unseen: Vec<String>,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Where to write the confusion matrix CSV.
    #[arg(long, value_name = "FILE")]
    pub confusion: Option<PathBuf>,
    /// Also score a label-agnostic random guesser for comparison.
    #[arg(long)]
    pub with_baseline: bool,
    /// Second checkpoint to blend with the first.
    #[arg(long, value_name = "FILE")]
    pub ensemble: Option<PathBuf>,
    /// Weight of the first model in the blend; the second gets 1-w.
    #[arg(long, value_name = "W", default_value_t = 0.5)]
    pub ensemble_weight: f64,
}

/// Everything the run produced, serialized as the report file.
#[derive(Debug, Serialize)]
struct EvalOutput {
    split_seed: u64,
    unseen_projects: Vec<String>,
    model: SectionPair,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<SectionPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ensemble: Option<EnsembleOutput>,
}

#[derive(Debug, Serialize)]
struct SectionPair {
    seen: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    unseen: Option<EvalReport>,
}

#[derive(Debug, Serialize)]
struct EnsembleOutput {
    weight: f64,
    seen: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    unseen: Option<EvalReport>,
}

pub fn run(cfg: &RunConfig, args: &EvaluateArgs) -> Result<()> {
    let samples_path =
        args.samples.clone().unwrap_or_else(|| cfg.output_dir.join("samples"));
    let vocab_path = args.vocab.clone().unwrap_or_else(|| cfg.output_dir.join("vocab.json"));
    let model_path = args.model.clone().unwrap_or_else(|| cfg.output_dir.join("model.json"));
    let report_path = args.report.clone().unwrap_or_else(|| cfg.output_dir.join("report.json"));
    let confusion_path =
        args.confusion.clone().unwrap_or_else(|| cfg.output_dir.join("confusion.csv"));
    let split_seed = args.split_seed.unwrap_or(cfg.split.seed);
    let unseen_projects =
        if args.unseen.is_empty() { cfg.unseen_projects.clone() } else { args.unseen.clone() };

    let vocab = Vocabulary::load(&vocab_path)?;
    let params = load_checkpoint(&model_path)?;
    check_vocab_match(&params, &vocab)?;

    let samples = load_samples(&samples_path)?;
    let (seen, unseen) = partition_unseen(samples, &unseen_projects);
    let splits = make_splits(&seen, split_seed)?;
    let seen_test = pick(&seen, &splits.test);
    if seen_test.is_empty() {
        return Err(CoreError::Data(format!(
            "test split is empty ({} seen samples)",
            seen.len()
        )));
    }

    let (seen_preds, seen_labels) = predict_set(&params, &vocab, &seen_test)?;
    let unseen_scored = if unseen.is_empty() {
        None
    } else {
        Some(predict_set(&params, &vocab, &unseen)?)
    };
    let model_pair = SectionPair {
        seen: evaluate(&seen_preds, &seen_labels)?,
        unseen: match &unseen_scored {
            Some((p, l)) => Some(evaluate(p, l)?),
            None => None,
        },
    };

    let baseline = if args.with_baseline {
        let score = |labels: &[LogLevel]| -> Result<EvalReport> {
            evaluate(&random_baseline(labels.len(), split_seed), labels)
        };
        Some(SectionPair {
            seen: score(&seen_labels)?,
            unseen: match &unseen_scored {
                Some((_, l)) => Some(score(l)?),
                None => None,
            },
        })
    } else {
        None
    };

    let ensemble_out = match &args.ensemble {
        None => None,
        Some(second_path) => {
            let second = load_checkpoint(second_path)?;
            check_vocab_match(&second, &vocab)?;
            let blend = |set: &[LabeledSample],
                         first: &[PredictionArray],
                         labels: &[LogLevel]|
             -> Result<EvalReport> {
                let (other, _) = predict_set(&second, &vocab, set)?;
                evaluate(&ensemble(first, &other, args.ensemble_weight)?, labels)
            };
            Some(EnsembleOutput {
                weight: args.ensemble_weight,
                seen: blend(&seen_test, &seen_preds, &seen_labels)?,
                unseen: match &unseen_scored {
                    Some((p, l)) => Some(blend(&unseen, p, l)?),
                    None => None,
                },
            })
        }
    };

    let output = EvalOutput {
        split_seed,
        unseen_projects,
        model: model_pair,
        baseline,
        ensemble: ensemble_out,
    };
    print_summary(&output);

    let json = serde_json::to_string_pretty(&output)
        .map_err(|e| CoreError::Data(format!("report serialization: {e}")))?;
    write_text(&report_path, &json)?;
    write_text(&confusion_path, &output.model.seen.confusion_csv())?;
    println!("\nwrote {} and {}", report_path.display(), confusion_path.display());
    if let Some(unseen_report) = &output.model.unseen {
        let sibling = sibling_path(&confusion_path, "_unseen");
        write_text(&sibling, &unseen_report.confusion_csv())?;
        println!("wrote {}", sibling.display());
    }
    Ok(())
}

fn predict_set(
    params: &ModelParams,
    vocab: &Vocabulary,
    set: &[LabeledSample],
) -> Result<(Vec<PredictionArray>, Vec<LogLevel>)> {
    let mut preds = Vec::with_capacity(set.len());
    let mut labels = Vec::with_capacity(set.len());
    for s in set {
        preds.push(predict(params, &encode_sample(s, vocab)?)?);
        labels.push(s.label.ok_or_else(|| {
            CoreError::Data(format!("{}: unlabeled sample cannot be scored", s.file))
        })?);
    }
    Ok((preds, labels))
}

/// `confusion.csv` -> `confusion_unseen.csv`.
fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn print_summary(output: &EvalOutput) {
    let has_unseen = output.model.unseen.is_some();
    let fmt_auc = |r: &EvalReport| match r.macro_auc {
        Some(v) => format!("{v:.4}"),
        None => "-".to_string(),
    };
    let mut rows: Vec<(String, String, String, String, String)> = Vec::new();
    let mut push = |name: &str, seen: &EvalReport, unseen: Option<&EvalReport>| {
        rows.push((
            name.to_string(),
            fmt_auc(seen),
            format!("{:.4}", seen.accuracy),
            unseen.map_or("-".into(), fmt_auc),
            unseen.map_or("-".into(), |r| format!("{:.4}", r.accuracy)),
        ));
    };
    push("model", &output.model.seen, output.model.unseen.as_ref());
    if let Some(b) = &output.baseline {
        push("random guess", &b.seen, b.unseen.as_ref());
    }
    if let Some(e) = &output.ensemble {
        push(&format!("ensemble (w={:.2})", e.weight), &e.seen, e.unseen.as_ref());
    }

    let name_width = rows.iter().map(|r| r.0.len()).max().unwrap_or(5).max(5);
    println!(
        "{:<name_width$}  {:>8}  {:>8}  {:>10}  {:>10}",
        "", "seen auc", "seen acc", "unseen auc", "unseen acc"
    );
    for (name, sa, sc, ua, uc) in &rows {
        println!("{name:<name_width$}  {sa:>8}  {sc:>8}  {ua:>10}  {uc:>10}");
    }

    println!("\nseen test split:");
    print!("{}", output.model.seen.render_text());
    if has_unseen {
        println!("\nunseen projects:");
        if let Some(r) = &output.model.unseen {
            print!("{}", r.render_text());
        }
    }
}
