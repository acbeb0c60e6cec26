//! `predict`: score log sites in Java sources, graph files, or extracted
//! sample files, printing one line per site.
//!
//! Java and graph inputs yield two kinds of site: existing log statements
//! (redacted before scoring, their real level reported as `actual`) and bare
//! `;` markers left by the caller as insertion points.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use loglevel_core::extract::{
    extract_from_graph, extract_from_source, marker_samples_from_graph, markers_from_source,
    read_samples_jsonl, ExtractOptions, ExtractionStats,
};
use loglevel_core::graph::read_graph;
use loglevel_core::model::{encode_sample, load_checkpoint, predict};
use loglevel_core::{CoreError, LabeledSample, LogLevel, PredictionArray, Result, Vocabulary};

use crate::config::RunConfig;

use super::{check_vocab_match, format_probs, predicted_level};

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model checkpoint to score with.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Vocabulary the checkpoint was trained with.
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// Emit one JSON object per site instead of text lines.
    #[arg(long)]
    pub json: bool,
    /// Inner edge of the hop window cut around each site.
    #[arg(long, value_name = "N")]
    pub min_hops: Option<usize>,
    /// Outer edge of the hop window cut around each site.
    #[arg(long, value_name = "N")]
    pub max_hops: Option<usize>,
    /// Java sources (.java), graph files (.json), or sample files (.jsonl).
    #[arg(required = true, value_name = "PATH")]
    pub inputs: Vec<PathBuf>,
}

/// One scored site, in input order.
#[derive(Debug, Serialize)]
struct SiteRecord {
    file: String,
    project: String,
    span: (u32, u32),
    kind: SiteKind,
    /// The level the original statement carried, when one existed.
    actual: Option<LogLevel>,
    predicted: LogLevel,
    probs: PredictionArray,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum SiteKind {
    /// A redacted existing log statement.
    Log,
    /// A bare `;` insertion marker.
    Marker,
    /// A pre-extracted sample taken as-is.
    Sample,
}

impl SiteKind {
    fn name(self) -> &'static str {
        match self {
            SiteKind::Log => "log",
            SiteKind::Marker => "marker",
            SiteKind::Sample => "sample",
        }
    }
}

pub fn run(cfg: &RunConfig, args: &PredictArgs) -> Result<()> {
    let model_path = args.model.clone().unwrap_or_else(|| cfg.output_dir.join("model.json"));
    let vocab_path = args.vocab.clone().unwrap_or_else(|| cfg.output_dir.join("vocab.json"));
    let options = ExtractOptions {
        min_hops: args.min_hops.unwrap_or(cfg.extract.min_hops),
        max_hops: args.max_hops.unwrap_or(cfg.extract.max_hops),
    };
    let params = load_checkpoint(&model_path)?;
    let vocab = Vocabulary::load(&vocab_path)?;
    check_vocab_match(&params, &vocab)?;

    for input in &args.inputs {
        for (sample, kind) in gather_sites(input, options)? {
            let enc = encode_sample(&sample, &vocab)?;
            let probs = predict(&params, &enc)?;
            let record = SiteRecord {
                file: sample.file,
                project: sample.project,
                span: sample.span,
                kind,
                actual: sample.label,
                predicted: predicted_level(&probs),
                probs,
            };
            if args.json {
                let line = serde_json::to_string(&record)
                    .map_err(|e| CoreError::Data(format!("record serialization: {e}")))?;
                println!("{line}");
            } else {
                println!("{}", render_text(&record));
            }
        }
    }
    Ok(())
}

/// Collects scorable sites from one input, ordered by source position.
fn gather_sites(
    input: &Path,
    options: ExtractOptions,
) -> Result<Vec<(LabeledSample, SiteKind)>> {
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "java" => {
            let source =
                std::fs::read_to_string(input).map_err(|e| CoreError::io(input, e))?;
            let file = input.display().to_string();
            let project = input
                .parent()
                .and_then(|p| p.file_name())
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".to_string());
            let mut stats = ExtractionStats::default();
            let logs = extract_from_source(&file, &project, &source, options, &mut stats)?;
            let markers = markers_from_source(&file, &project, &source, options)?;
            Ok(merge_by_span(logs, markers))
        }
        "json" => {
            let graph = read_graph(input)?;
            let mut stats = ExtractionStats::default();
            let logs = extract_from_graph(&graph, options, &mut stats)?;
            let markers = marker_samples_from_graph(&graph, options)?;
            Ok(merge_by_span(logs, markers))
        }
        "jsonl" => Ok(read_samples_jsonl(input)?
            .into_iter()
            .map(|s| (s, SiteKind::Sample))
            .collect()),
        _ => Err(CoreError::Config(format!(
            "{}: expected a .java, .json, or .jsonl input",
            input.display()
        ))),
    }
}

fn merge_by_span(
    logs: Vec<LabeledSample>,
    markers: Vec<LabeledSample>,
) -> Vec<(LabeledSample, SiteKind)> {
    let mut sites: Vec<(LabeledSample, SiteKind)> = logs
        .into_iter()
        .map(|s| (s, SiteKind::Log))
        .chain(markers.into_iter().map(|s| (s, SiteKind::Marker)))
        .collect();
    sites.sort_by_key(|(s, _)| s.span);
    sites
}

fn render_text(r: &SiteRecord) -> String {
    let actual = match r.actual {
        Some(level) => format!(" actual={level}"),
        None => String::new(),
    };
    format!(
        "{}:{}-{} {}{} -> {} {}",
        r.file,
        r.span.0,
        r.span.1,
        r.kind.name(),
        actual,
        r.predicted,
        format_probs(&r.probs)
    )
}
