//! Subcommand implementations and the plumbing they share.

pub mod evaluate;
pub mod extract;
pub mod inspect;
pub mod predict;
pub mod train;
pub mod vocab;

use std::path::{Path, PathBuf};

use loglevel_core::eval::SplitIndices;
use loglevel_core::extract::read_samples_jsonl;
use loglevel_core::model::{argmax_level, ModelParams};
use loglevel_core::{CoreError, LabeledSample, LogLevel, PredictionArray, Result, Vocabulary};

/// Reads samples from a JSONL file, or from every `*.jsonl` in a directory
/// in file-name order (the layout `extract` writes).
pub fn load_samples(path: &Path) -> Result<Vec<LabeledSample>> {
    if path.is_file() {
        return read_samples_jsonl(path);
    }
    if !path.is_dir() {
        return Err(CoreError::Config(format!(
            "sample path {} is neither a file nor a directory",
            path.display()
        )));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| CoreError::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CoreError::Config(format!(
            "no .jsonl sample files under {}",
            path.display()
        )));
    }
    let mut samples = Vec::new();
    for file in files {
        samples.append(&mut read_samples_jsonl(&file)?);
    }
    Ok(samples)
}

/// Splits samples into (seen, unseen) by project membership, keeping order.
pub fn partition_unseen(
    samples: Vec<LabeledSample>,
    unseen_projects: &[String],
) -> (Vec<LabeledSample>, Vec<LabeledSample>) {
    if unseen_projects.is_empty() {
        return (samples, Vec::new());
    }
    samples
        .into_iter()
        .partition(|s| !unseen_projects.iter().any(|p| p == &s.project))
}

/// The vocabulary is always built from the training split only, so held-out
/// text cannot leak into the embedding table.
pub fn vocab_from_train(
    seen: &[LabeledSample],
    splits: &SplitIndices,
    min_count: u32,
) -> Vocabulary {
    let texts = splits
        .train
        .iter()
        .flat_map(|&i| seen[i].graph.nodes.iter().map(|n| n.text.as_str()));
    Vocabulary::build(texts, min_count)
}

/// A checkpoint only makes sense with the vocabulary it was trained against.
pub fn check_vocab_match(params: &ModelParams, vocab: &Vocabulary) -> Result<()> {
    let hash = vocab.content_hash()?;
    if params.vocab_hash != hash {
        return Err(CoreError::Config(format!(
            "vocabulary does not match the model: checkpoint was trained with \
             vocabulary hash {}, this file hashes to {hash}",
            params.vocab_hash
        )));
    }
    Ok(())
}

pub fn pick(samples: &[LabeledSample], indices: &[usize]) -> Vec<LabeledSample> {
    indices.iter().map(|&i| samples[i].clone()).collect()
}

pub fn create_parent_dirs(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| CoreError::io(dir, e))?;
        }
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent_dirs(path)?;
    std::fs::write(path, text).map_err(|e| CoreError::io(path, e))
}

/// Six probabilities in [trace..fatal] order, fixed width for scanning.
pub fn format_probs(p: &PredictionArray) -> String {
    let cells: Vec<String> = p.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", cells.join(", "))
}

pub fn predicted_level(p: &PredictionArray) -> LogLevel {
    LogLevel::from_ordinal(argmax_level(p)).expect("argmax of a 6-entry array is in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use loglevel_core::extract::write_samples_jsonl;
    use loglevel_core::{Node, NodeType, ProgramGraph};

    fn sample(project: &str) -> LabeledSample {
        let mut g = ProgramGraph::new("F.java", project);
        g.nodes.push(Node {
            id: 0,
            node_type: NodeType::AstElement,
            text: String::new(),
            span: None,
        });
        LabeledSample {
            graph: g,
            center: 0,
            label: Some(LogLevel::Info),
            project: project.to_string(),
            file: "F.java".to_string(),
            span: (0, 1),
        }
    }

    #[test]
    fn directory_loading_concatenates_in_name_order() {
        let dir = tempfile::tempdir().unwrap();
        write_samples_jsonl(&dir.path().join("b.jsonl"), &[sample("beta")]).unwrap();
        write_samples_jsonl(&dir.path().join("a.jsonl"), &[sample("alpha")]).unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let loaded = load_samples(dir.path()).unwrap();
        let projects: Vec<&str> = loaded.iter().map(|s| s.project.as_str()).collect();
        assert_eq!(projects, vec!["alpha", "beta"]);
    }

    #[test]
    fn empty_directory_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_samples(dir.path()), Err(CoreError::Config(_))));
    }

    #[test]
    fn unseen_projects_are_separated() {
        let all = vec![sample("a"), sample("b"), sample("a"), sample("c")];
        let (seen, unseen) = partition_unseen(all, &["b".to_string(), "c".to_string()]);
        assert_eq!(seen.len(), 2);
        assert_eq!(unseen.len(), 2);
        assert!(seen.iter().all(|s| s.project == "a"));
    }

    #[test]
    fn probs_format_is_fixed_width() {
        let p = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.03125];
        assert_eq!(
            format_probs(&p),
            "[0.5000, 0.2500, 0.1250, 0.0625, 0.0312, 0.0312]"
        );
    }
}
