//! Log statement discovery, redaction, and subgraph sample extraction.
//!
//! A log statement is an expression statement calling a level-named method
//! (`trace` through `fatal`, case-insensitive) on a receiver whose name
//! contains `log`. Extraction replaces the whole statement with a lone
//! semicolon, re-parses, and cuts the hop-bounded neighborhood around the
//! empty statement left at the site. The level becomes the sample label;
//! the model never sees the original call.

mod corpus;
mod surgery;

pub use corpus::{extract_corpus, CorpusFile};
pub use surgery::{extract_from_graph, find_marker_sites, marker_samples_from_graph};

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::graph::{induced_subgraph, k_hop_nodes, NodeId, ProgramGraph};
use crate::java::{self, AstChild, AstId, AstKind, ParsedFile, TokenKind};

/// The six verbosity levels, ordered from most to least verbose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogLevel {
    Trace,
    Debug,
    Info,
    Warn,
    Error,
    Fatal,
}

impl LogLevel {
    pub const COUNT: usize = 6;

    pub const ALL: [LogLevel; LogLevel::COUNT] = [
        LogLevel::Trace,
        LogLevel::Debug,
        LogLevel::Info,
        LogLevel::Warn,
        LogLevel::Error,
        LogLevel::Fatal,
    ];

    /// Position on the verbosity scale; adjacent ordinals are adjacent levels.
    pub fn ordinal(self) -> usize {
        match self {
            LogLevel::Trace => 0,
            LogLevel::Debug => 1,
            LogLevel::Info => 2,
            LogLevel::Warn => 3,
            LogLevel::Error => 4,
            LogLevel::Fatal => 5,
        }
    }

    pub fn from_ordinal(i: usize) -> Option<LogLevel> {
        LogLevel::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            LogLevel::Trace => "trace",
            LogLevel::Debug => "debug",
            LogLevel::Info => "info",
            LogLevel::Warn => "warn",
            LogLevel::Error => "error",
            LogLevel::Fatal => "fatal",
        }
    }

    /// Matches a called method name, case-insensitively. Only exact level
    /// names match: `isDebugEnabled` and friends are not log calls.
    pub fn from_method_name(name: &str) -> Option<LogLevel> {
        let lower = name.to_lowercase();
        LogLevel::ALL.into_iter().find(|l| l.name() == lower)
    }
}

impl fmt::Display for LogLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogLevel {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<LogLevel> {
        LogLevel::from_method_name(s)
            .ok_or_else(|| CoreError::Config(format!("unknown log level `{s}`")))
    }
}

/// Where a sample came from: parsed Java source or an imported graph file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOrigin {
    JavaSource,
    GraphFile,
}

/// One discovered log statement, pre-redaction.
#[derive(Debug, Clone)]
pub struct LogSite {
    /// The expression statement node in the original AST.
    pub stmt: AstId,
    pub level: LogLevel,
    /// Byte span of the whole statement, trailing semicolon included.
    pub span: (u32, u32),
    pub receiver: String,
    pub method: String,
}

/// A training or prediction unit: one redacted subgraph with its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub graph: ProgramGraph,
    /// Node id of the empty statement at the redaction site, in subgraph ids.
    pub center: NodeId,
    pub label: Option<LogLevel>,
    pub project: String,
    pub file: String,
    /// Redacted span in the original source.
    pub span: (u32, u32),
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions {
    /// Inner edge of the hop window. The center node is always kept, even
    /// when it falls inside the excluded ring.
    pub min_hops: usize,
    /// Outer edge of the hop window around the redaction site.
    pub max_hops: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { min_hops: 0, max_hops: 8 }
    }
}

/// Aggregate counters for one extraction run. All maps are ordered so the
/// serialized form is stable.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExtractionStats {
    pub files_scanned: usize,
    pub java_files: usize,
    pub graph_files: usize,
    pub parse_failures: usize,
    pub log_statements: usize,
    pub samples: usize,
    pub redaction_failures: usize,
    pub unresolved_call_sites: usize,
    pub samples_per_level: std::collections::BTreeMap<String, usize>,
    pub samples_per_project: std::collections::BTreeMap<String, usize>,
}

impl ExtractionStats {
    pub fn record_sample(&mut self, sample: &LabeledSample) {
        self.samples += 1;
        if let Some(level) = sample.label {
            *self.samples_per_level.entry(level.name().to_string()).or_insert(0) += 1;
        }
        *self.samples_per_project.entry(sample.project.clone()).or_insert(0) += 1;
    }
}

/// Finds every log statement in a parsed file, in source order.
pub fn find_log_statements(parsed: &ParsedFile) -> Vec<LogSite> {
    let ast = &parsed.ast;
    let tokens = &parsed.tokens;
    let mut sites = Vec::new();
    let mut stack = vec![ast.root];
    let mut order = Vec::new();
    while let Some(n) = stack.pop() {
        order.push(n);
        for c in ast.node(n).children.iter().rev() {
            if let AstChild::Node(child) = c {
                stack.push(*child);
            }
        }
    }
    for n in order {
        if ast.node(n).kind != AstKind::ExprStmt {
            continue;
        }
        let Some(call) = ast.child_nodes(n).find(|&c| ast.node(c).kind == AstKind::Call)
        else {
            continue;
        };
        let Some(name_tok) = java::analysis::call_name_token(ast, tokens, call) else {
            continue;
        };
        let method = tokens[name_tok as usize].text.clone();
        let Some(level) = LogLevel::from_method_name(&method) else { continue };
        let Some(receiver) = receiver_name(parsed, call, name_tok) else { continue };
        if !receiver.to_lowercase().contains("log") {
            continue;
        }
        let Some(span) = ast.cover_span(n, tokens) else { continue };
        sites.push(LogSite { stmt: n, level, span, receiver, method });
    }
    sites
}

/// Name of the call's receiver: the identifier the method is invoked on.
/// For chained accesses this is the last link before the method name.
fn receiver_name(parsed: &ParsedFile, call: AstId, name_tok: u32) -> Option<String> {
    let ast = &parsed.ast;
    let first = ast.node(call).children.first()?;
    if *first == AstChild::Token(name_tok) {
        return None; // bare call, no receiver
    }
    fn name_of(parsed: &ParsedFile, child: AstChild) -> Option<String> {
        let ast = &parsed.ast;
        let tokens = &parsed.tokens;
        match child {
            AstChild::Token(t) => {
                let tok = &tokens[t as usize];
                (tok.kind == TokenKind::Identifier || tok.text == "this")
                    .then(|| tok.text.clone())
            }
            AstChild::Node(n) => match ast.node(n).kind {
                AstKind::FieldAccess => {
                    // Member name: last identifier token child.
                    ast.node(n).children.iter().rev().find_map(|c| match c {
                        AstChild::Token(t)
                            if tokens[*t as usize].kind == TokenKind::Identifier =>
                        {
                            Some(tokens[*t as usize].text.clone())
                        }
                        _ => None,
                    })
                }
                AstKind::Call => {
                    let nt = java::analysis::call_name_token(ast, tokens, n)?;
                    Some(tokens[nt as usize].text.clone())
                }
                AstKind::Paren | AstKind::ArrayAccess => ast
                    .node(n)
                    .children
                    .first()
                    .copied()
                    .and_then(|c| name_of(parsed, c)),
                _ => None,
            },
        }
    }
    name_of(parsed, *first)
}

/// Replaces the byte span with a single semicolon.
pub fn redact(source: &str, span: (u32, u32)) -> Result<String> {
    let (start, end) = (span.0 as usize, span.1 as usize);
    if start > end || end > source.len() {
        return Err(CoreError::Data(format!(
            "redaction span {:?} outside source of {} bytes",
            span,
            source.len()
        )));
    }
    if !source.is_char_boundary(start) || !source.is_char_boundary(end) {
        return Err(CoreError::Data(format!("redaction span {span:?} splits a character")));
    }
    let mut out = String::with_capacity(source.len());
    out.push_str(&source[..start]);
    out.push(';');
    out.push_str(&source[end..]);
    Ok(out)
}

/// Redacts one site and cuts the labeled subgraph around it.
pub fn make_sample(
    file_path: &str,
    project: &str,
    source: &str,
    site: &LogSite,
    options: ExtractOptions,
) -> Result<LabeledSample> {
    let redacted = redact(source, site.span)?;
    let reparsed = java::parse_source(&redacted).map_err(|e| {
        CoreError::Data(format!("{file_path}: redacted source failed to parse: {e}"))
    })?;
    let built = java::build_graph(file_path, project, &reparsed.tokens, &reparsed.ast, &reparsed.analysis);

    // The inserted semicolon occupies exactly one byte at the site start.
    let marker_span = (site.span.0, site.span.0 + 1);
    let center_ast = (0..reparsed.ast.nodes.len() as AstId)
        .find(|&id| {
            reparsed.ast.node(id).kind == AstKind::EmptyStmt
                && reparsed.ast.cover_span(id, &reparsed.tokens) == Some(marker_span)
        })
        .ok_or_else(|| {
            CoreError::Data(format!(
                "{file_path}: no empty statement at redaction site {marker_span:?}"
            ))
        })?;
    let center = built.ast_node_ids[center_ast as usize];

    let mut keep = k_hop_nodes(&built.graph, center, options.min_hops, options.max_hops)?;
    keep.insert(center);
    let (graph, mapping) = induced_subgraph(&built.graph, &keep)?;
    let center = *mapping
        .get(&center)
        .ok_or_else(|| CoreError::Graph("center dropped from its own subgraph".into()))?;

    Ok(LabeledSample {
        graph,
        center,
        label: Some(site.level),
        project: project.to_string(),
        file: file_path.to_string(),
        span: site.span,
    })
}

/// Extracts every log statement in one source file.
pub fn extract_from_source(
    file_path: &str,
    project: &str,
    source: &str,
    options: ExtractOptions,
    stats: &mut ExtractionStats,
) -> Result<Vec<LabeledSample>> {
    let parsed = java::parse_source(source)?;
    stats.unresolved_call_sites += parsed.analysis.unresolved_calls;
    let sites = find_log_statements(&parsed);
    stats.log_statements += sites.len();
    let mut out = Vec::new();
    for site in &sites {
        match make_sample(file_path, project, source, site, options) {
            Ok(sample) => {
                stats.record_sample(&sample);
                out.push(sample);
            }
            Err(_) => stats.redaction_failures += 1,
        }
    }
    Ok(out)
}

/// Cuts an unlabeled sample around every bare `;` statement in the source.
///
/// These are prediction sites: the caller marks where a log call should go
/// and asks the model for its level. Labels stay `None`.
pub fn markers_from_source(
    file_path: &str,
    project: &str,
    source: &str,
    options: ExtractOptions,
) -> Result<Vec<LabeledSample>> {
    let parsed = java::parse_source(source)?;
    let built =
        java::build_graph(file_path, project, &parsed.tokens, &parsed.ast, &parsed.analysis);
    let mut out = Vec::new();
    for id in 0..parsed.ast.nodes.len() as AstId {
        if parsed.ast.node(id).kind != AstKind::EmptyStmt {
            continue;
        }
        let span = parsed.ast.cover_span(id, &parsed.tokens).unwrap_or((0, 0));
        let center = built.ast_node_ids[id as usize];
        let mut keep = k_hop_nodes(&built.graph, center, options.min_hops, options.max_hops)?;
        keep.insert(center);
        let (graph, mapping) = induced_subgraph(&built.graph, &keep)?;
        let center = *mapping
            .get(&center)
            .ok_or_else(|| CoreError::Graph("center dropped from its own subgraph".into()))?;
        out.push(LabeledSample {
            graph,
            center,
            label: None,
            project: project.to_string(),
            file: file_path.to_string(),
            span,
        });
    }
    Ok(out)
}

// ---- sample serialization ----------------------------------------------

pub fn sample_to_json(sample: &LabeledSample) -> Result<String> {
    serde_json::to_string(sample)
        .map_err(|e| CoreError::Data(format!("sample serialization: {e}")))
}

pub fn sample_from_json(json: &str) -> Result<LabeledSample> {
    serde_json::from_str(json).map_err(|e| CoreError::Data(format!("sample parse: {e}")))
}

/// Writes samples as JSON lines, one sample per line.
pub fn write_samples_jsonl(path: &Path, samples: &[LabeledSample]) -> Result<()> {
    let mut out = String::new();
    for s in samples {
        out.push_str(&sample_to_json(s)?);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| CoreError::io(path, e))
}

pub fn read_samples_jsonl(path: &Path) -> Result<Vec<LabeledSample>> {
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let sample = sample_from_json(line).map_err(|e| {
            CoreError::Data(format!("{}:{}: {e}", path.display(), i + 1))
        })?;
        samples.push(sample);
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeType;

    const LOGGING_SRC: &str = r#"
class Worker {
    private static Logger LOG;
    void run(int count) {
        if (count > 0) {
            LOG.info("starting with {}", count);
        }
        if (LOG.isDebugEnabled()) {
            LOG.debug("details");
        }
        helper.log.warn("odd state");
        plain(count);
    }
}
"#;

    #[test]
    fn finds_level_calls_on_log_receivers() {
        let parsed = java::parse_source(LOGGING_SRC).unwrap();
        let sites = find_log_statements(&parsed);
        let found: Vec<(&str, LogLevel)> =
            sites.iter().map(|s| (s.receiver.as_str(), s.level)).collect();
        assert_eq!(
            found,
            vec![
                ("LOG", LogLevel::Info),
                ("LOG", LogLevel::Debug),
                ("log", LogLevel::Warn),
            ]
        );
    }

    #[test]
    fn enabled_checks_are_not_log_statements() {
        let src = "class C { void m() { if (LOG.isDebugEnabled()) { work(); } } }";
        let parsed = java::parse_source(src).unwrap();
        assert!(find_log_statements(&parsed).is_empty());
    }

    #[test]
    fn non_log_receiver_is_skipped() {
        let src = "class C { void m() { console.error(\"x\"); } }";
        let parsed = java::parse_source(src).unwrap();
        assert!(find_log_statements(&parsed).is_empty());
    }

    #[test]
    fn bare_level_call_is_skipped() {
        let src = "class C { void m() { error(\"x\"); } }";
        let parsed = java::parse_source(src).unwrap();
        assert!(find_log_statements(&parsed).is_empty());
    }

    #[test]
    fn redacted_source_reparses_with_marker() {
        let parsed = java::parse_source(LOGGING_SRC).unwrap();
        let site = &find_log_statements(&parsed)[0];
        let redacted = redact(LOGGING_SRC, site.span).unwrap();
        assert!(!redacted.contains("starting with"));
        let reparsed = java::parse_source(&redacted).unwrap();
        assert!(reparsed.ast.nodes.iter().any(|n| n.kind == AstKind::EmptyStmt));
    }

    #[test]
    fn sample_center_is_empty_statement_node() {
        let parsed = java::parse_source(LOGGING_SRC).unwrap();
        let site = &find_log_statements(&parsed)[0];
        let sample = make_sample(
            "Worker.java",
            "demo",
            LOGGING_SRC,
            site,
            ExtractOptions::default(),
        )
        .unwrap();
        let center = &sample.graph.nodes[sample.center as usize];
        assert_eq!(center.node_type, NodeType::AstElement);
        assert!(center.text.is_empty());
        assert_eq!(sample.label, Some(LogLevel::Info));
        // The redacted call is gone from the subgraph.
        assert!(sample.graph.nodes.iter().all(|n| n.text != "\"starting with {}\""));
        // Context survives.
        assert!(sample.graph.nodes.iter().any(|n| n.text == "count"));
    }

    #[test]
    fn hop_budget_limits_subgraph() {
        let parsed = java::parse_source(LOGGING_SRC).unwrap();
        let site = &find_log_statements(&parsed)[0];
        let near = make_sample(
            "W.java",
            "p",
            LOGGING_SRC,
            site,
            ExtractOptions { min_hops: 0, max_hops: 1 },
        )
        .unwrap();
        let far = make_sample(
            "W.java",
            "p",
            LOGGING_SRC,
            site,
            ExtractOptions { min_hops: 0, max_hops: 8 },
        )
        .unwrap();
        assert!(near.graph.node_count() < far.graph.node_count());
    }

    #[test]
    fn samples_round_trip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let parsed = java::parse_source(LOGGING_SRC).unwrap();
        let sites = find_log_statements(&parsed);
        let samples: Vec<LabeledSample> = sites
            .iter()
            .map(|s| {
                make_sample("W.java", "p", LOGGING_SRC, s, ExtractOptions::default()).unwrap()
            })
            .collect();
        let path = dir.path().join("samples.jsonl");
        write_samples_jsonl(&path, &samples).unwrap();
        let back = read_samples_jsonl(&path).unwrap();
        assert_eq!(samples, back);
    }

    #[test]
    fn level_names_round_trip() {
        for level in LogLevel::ALL {
            assert_eq!(level.name().parse::<LogLevel>().unwrap(), level);
            let json = serde_json::to_string(&level).unwrap();
            assert_eq!(json, format!("\"{}\"", level.name()));
        }
        assert_eq!("WARN".parse::<LogLevel>().unwrap(), LogLevel::Warn);
        assert!("verbose".parse::<LogLevel>().is_err());
    }

    #[test]
    fn malformed_span_is_data_error() {
        assert!(redact("short", (0, 99)).is_err());
    }

    #[test]
    fn marker_statements_become_unlabeled_samples() {
        let src = "class C { void m(int x) { int y = x; ; use(y); } }";
        let samples =
            markers_from_source("C.java", "p", src, ExtractOptions::default()).unwrap();
        assert_eq!(samples.len(), 1);
        let s = &samples[0];
        assert_eq!(s.label, None);
        let center = &s.graph.nodes[s.center as usize];
        assert_eq!(center.node_type, NodeType::AstElement);
        assert_eq!(&src[s.span.0 as usize..s.span.1 as usize], ";");
        // The surrounding method context is in the subgraph.
        assert!(s.graph.nodes.iter().any(|n| n.text == "y"));
    }

    #[test]
    fn source_without_markers_yields_nothing() {
        let src = "class C { void m() { work(); } }";
        let samples =
            markers_from_source("C.java", "p", src, ExtractOptions::default()).unwrap();
        assert!(samples.is_empty());
    }
}
