//! Whole-pipeline wiring test: synthesize a corpus on disk, extract,
//! split, build a vocabulary, train briefly, and score. Then do it all
//! again and demand bit-identical results.

use loglevel_core::eval::{evaluate, make_splits};
use loglevel_core::extract::{extract_corpus, ExtractOptions};
use loglevel_core::model::{
    encode_sample, load_checkpoint, predict, save_checkpoint, train,
};
use loglevel_core::synth::{write_corpus, SynthOptions};
use loglevel_core::vocab::Vocabulary;
use loglevel_core::{LabeledSample, LogLevel, ModelConfig, PredictionArray, TrainConfig};

fn vocab_from(samples: &[LabeledSample], indices: &[usize]) -> Vocabulary {
    let texts: Vec<&str> = indices
        .iter()
        .flat_map(|&i| samples[i].graph.nodes.iter().map(|n| n.text.as_str()))
        .collect();
    Vocabulary::build(texts, 2)
}

fn run_once(root: &std::path::Path) -> (Vec<PredictionArray>, Vec<LogLevel>, f64) {
    let (samples, stats) = extract_corpus(root, ExtractOptions { min_hops: 0, max_hops: 5 }).unwrap();
    assert_eq!(stats.parse_failures, 0);
    assert_eq!(samples.len(), 18);

    let splits = make_splits(&samples, 13).unwrap();
    assert!(!splits.train.is_empty());
    assert!(!splits.test.is_empty());
    let vocab = vocab_from(&samples, &splits.train);
    assert!(vocab.len() > 10);

    let pick = |ids: &[usize]| -> Vec<LabeledSample> {
        ids.iter().map(|&i| samples[i].clone()).collect()
    };
    let model_config = ModelConfig { hidden: 12, steps: 3, ..ModelConfig::default() };
    let train_config = TrainConfig {
        seed: 3,
        max_epochs: 4,
        patience: 10,
        batch_size: 4,
        ..TrainConfig::default()
    };
    let outcome = train(
        model_config,
        &train_config,
        &vocab,
        &pick(&splits.train),
        &pick(&splits.val),
        None,
    )
    .unwrap();
    assert_eq!(outcome.epochs_run, 4);

    let test_set = pick(&splits.test);
    let preds: Vec<PredictionArray> = test_set
        .iter()
        .map(|s| predict(&outcome.params, &encode_sample(s, &vocab).unwrap()).unwrap())
        .collect();
    let labels: Vec<LogLevel> = test_set.iter().map(|s| s.label.unwrap()).collect();
    let report = evaluate(&preds, &labels).unwrap();
    assert_eq!(report.n, preds.len());

    // Checkpoint reload must preserve behavior exactly.
    let ckpt = root.join("model.json");
    save_checkpoint(&outcome.params, &ckpt).unwrap();
    let reloaded = load_checkpoint(&ckpt).unwrap();
    assert_eq!(reloaded, outcome.params);
    let re_preds: Vec<PredictionArray> = test_set
        .iter()
        .map(|s| predict(&reloaded, &encode_sample(s, &vocab).unwrap()).unwrap())
        .collect();
    assert_eq!(preds, re_preds);
    std::fs::remove_file(&ckpt).unwrap();

    (preds, labels, report.accuracy)
}

#[test]
fn pipeline_reruns_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let opts = SynthOptions { files: 18, projects: 3, seed: 21 };
    write_corpus(dir.path(), &opts).unwrap();

    let (preds_a, labels_a, acc_a) = run_once(dir.path());
    let (preds_b, labels_b, acc_b) = run_once(dir.path());
    assert_eq!(preds_a, preds_b, "predictions must be bitwise reproducible");
    assert_eq!(labels_a, labels_b);
    assert_eq!(acc_a, acc_b);
}
