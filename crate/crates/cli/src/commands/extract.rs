//! `extract`: corpus directory in, per-project sample files plus stats out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;

use loglevel_core::extract::{extract_corpus, write_samples_jsonl, ExtractOptions};
use loglevel_core::{CoreError, LabeledSample, Result};

use crate::config::RunConfig;

use super::write_text;

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Corpus root containing .java sources and .json graph files.
    #[arg(long, value_name = "DIR")]
    pub corpus: Option<PathBuf>,
    /// Output directory for per-project .jsonl files and stats.json.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Inner edge of the hop window around each redaction site.
    #[arg(long, value_name = "N")]
    pub min_hops: Option<usize>,
    /// Outer edge of the hop window around each redaction site.
    #[arg(long, value_name = "N")]
    pub max_hops: Option<usize>,
}

pub fn run(cfg: &RunConfig, args: &ExtractArgs) -> Result<()> {
    let corpus = args
        .corpus
        .clone()
        .or_else(|| cfg.corpus.clone())
        .ok_or_else(|| {
            CoreError::Config("no corpus: pass --corpus or set `corpus` in the config".into())
        })?;
    let out_dir = args.out.clone().unwrap_or_else(|| cfg.output_dir.join("samples"));
    let options = ExtractOptions {
        min_hops: args.min_hops.unwrap_or(cfg.extract.min_hops),
        max_hops: args.max_hops.unwrap_or(cfg.extract.max_hops),
    };
    if options.min_hops > options.max_hops {
        return Err(CoreError::Config(format!(
            "hop window is empty: min {} exceeds max {}",
            options.min_hops, options.max_hops
        )));
    }

    let (samples, stats) = extract_corpus(&corpus, options)?;
    if stats.files_scanned == 0 {
        eprintln!("warning: no extractable files under {}", corpus.display());
    }

    let mut per_project: BTreeMap<&str, Vec<LabeledSample>> = BTreeMap::new();
    for s in &samples {
        per_project.entry(s.project.as_str()).or_default().push(s.clone());
    }
    std::fs::create_dir_all(&out_dir).map_err(|e| CoreError::io(&out_dir, e))?;
    for (project, group) in &per_project {
        write_samples_jsonl(&out_dir.join(format!("{project}.jsonl")), group)?;
    }
    let stats_json = serde_json::to_string_pretty(&stats)
        .map_err(|e| CoreError::Data(format!("stats serialization: {e}")))?;
    write_text(&out_dir.join("stats.json"), &stats_json)?;

    print_summary(&corpus, &out_dir, &stats, per_project.len());
    Ok(())
}

fn print_summary(
    corpus: &Path,
    out_dir: &Path,
    stats: &loglevel_core::ExtractionStats,
    projects: usize,
) {
    println!(
        "scanned {} files under {} ({} java, {} graph), {} parse failures",
        stats.files_scanned,
        corpus.display(),
        stats.java_files,
        stats.graph_files,
        stats.parse_failures
    );
    println!(
        "{} log statements -> {} samples across {} projects ({} redaction failures)",
        stats.log_statements, stats.samples, projects, stats.redaction_failures
    );
    let per_level: Vec<String> = stats
        .samples_per_level
        .iter()
        .map(|(level, n)| format!("{level}={n}"))
        .collect();
    if !per_level.is_empty() {
        println!("samples per level: {}", per_level.join(" "));
    }
    println!("wrote {}", out_dir.display());
}
