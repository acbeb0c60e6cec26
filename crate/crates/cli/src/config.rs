//! Run configuration: a TOML file of defaults that command flags override.
//!
//! Every field has a default, so an absent file and an empty file mean the
//! same thing. Section names are checked; a typo in `[modle]` fails loudly
//! instead of silently training with defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use loglevel_core::{CoreError, ModelConfig, Result, TrainConfig};

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus root for `extract` when the flag is absent.
    pub corpus: Option<PathBuf>,
    /// Directory that default output paths are placed under.
    pub output_dir: PathBuf,
    /// Projects excluded from every split and scored as their own section.
    pub unseen_projects: Vec<String>,
    pub extract: ExtractSection,
    pub vocab: VocabSection,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub split: SplitSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            output_dir: PathBuf::from("out"),
            unseen_projects: Vec::new(),
            extract: ExtractSection::default(),
            vocab: VocabSection::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            split: SplitSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractSection {
    /// Hop window around the redaction site; the center is always kept.
    pub min_hops: usize,
    pub max_hops: usize,
}

impl Default for ExtractSection {
    fn default() -> Self {
        ExtractSection { min_hops: 0, max_hops: 8 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VocabSection {
    /// Subtokens seen fewer times than this in the training split are
    /// folded into the unknown token.
    pub min_count: u32,
}

impl Default for VocabSection {
    fn default() -> Self {
        VocabSection { min_count: 2 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    /// Drives the stratified 70/10/20 shuffle. Commands that need the same
    /// split (vocab, train, evaluate) must agree on this value.
    pub seed: u64,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection { seed: 42 }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CoreError::Config(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert_eq!(cfg.extract.max_hops, 8);
        assert_eq!(cfg.vocab.min_count, 2);
        assert_eq!(cfg.split.seed, 42);
        assert_eq!(cfg.model.hidden, 64);
        assert_eq!(cfg.model.steps, 8);
    }

    #[test]
    fn partial_file_keeps_other_defaults() {
        let cfg: RunConfig = toml::from_str(
            "output_dir = \"runs/a\"\n[model]\nhidden = 16\n[split]\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("runs/a"));
        assert_eq!(cfg.model.hidden, 16);
        assert_eq!(cfg.model.steps, 8);
        assert_eq!(cfg.split.seed, 7);
        assert_eq!(cfg.vocab.min_count, 2);
    }

    #[test]
    fn unknown_section_is_rejected() {
        assert!(toml::from_str::<RunConfig>("[modle]\nhidden = 4\n").is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = RunConfig::load(Some(Path::new("/no/such/config.toml")));
        assert!(matches!(err, Err(CoreError::Io { .. })));
    }
}
