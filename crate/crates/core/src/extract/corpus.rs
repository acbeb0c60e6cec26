//! Corpus walking: finds `.java` sources and `.json` interchange graphs
//! under a root directory and extracts samples from both.
//!
//! The project name of a file is its first directory component below the
//! corpus root; files sitting directly in the root fall back to the root's
//! own name. Files are visited in sorted path order so extraction output is
//! reproducible.

use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use super::surgery::extract_from_graph;
use super::{extract_from_source, ExtractOptions, ExtractionStats, LabeledSample};
use crate::error::{CoreError, Result};
use crate::graph::graph_from_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFileKind {
    JavaSource,
    GraphFile,
}

#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub path: PathBuf,
    /// Path relative to the corpus root, with forward slashes.
    pub rel: String,
    pub project: String,
    pub kind: CorpusFileKind,
}

/// Lists extractable files under `root` in sorted order.
pub fn list_corpus_files(root: &Path) -> Result<Vec<CorpusFile>> {
    if !root.is_dir() {
        return Err(CoreError::Config(format!(
            "corpus root {} is not a directory",
            root.display()
        )));
    }
    let fallback_project = root
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            CoreError::Data(format!("walking {}: {e}", root.display()))
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let kind = match entry.path().extension().and_then(|e| e.to_str()) {
            Some("java") => CorpusFileKind::JavaSource,
            Some("json") => CorpusFileKind::GraphFile,
            _ => continue,
        };
        let rel_path = entry
            .path()
            .strip_prefix(root)
            .map_err(|e| CoreError::Data(format!("{}: {e}", entry.path().display())))?;
        let rel = rel_path
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        let project = match rel.split_once('/') {
            Some((first, _)) => first.to_string(),
            None => fallback_project.clone(),
        };
        files.push(CorpusFile { path: entry.path().to_path_buf(), rel, project, kind });
    }
    Ok(files)
}

/// Extracts labeled samples from every file under `root`.
///
/// Individual files that fail to parse are counted and skipped; the run only
/// fails on unreadable inputs or a bad root.
pub fn extract_corpus(
    root: &Path,
    options: ExtractOptions,
) -> Result<(Vec<LabeledSample>, ExtractionStats)> {
    let files = list_corpus_files(root)?;
    let mut stats = ExtractionStats::default();
    let mut samples = Vec::new();
    for file in &files {
        stats.files_scanned += 1;
        let text = std::fs::read_to_string(&file.path)
            .map_err(|e| CoreError::io(&file.path, e))?;
        match file.kind {
            CorpusFileKind::JavaSource => {
                stats.java_files += 1;
                match extract_from_source(&file.rel, &file.project, &text, options, &mut stats)
                {
                    Ok(mut s) => samples.append(&mut s),
                    Err(_) => stats.parse_failures += 1,
                }
            }
            CorpusFileKind::GraphFile => {
                stats.graph_files += 1;
                match graph_from_json(&text) {
                    Ok(graph) => match extract_from_graph(&graph, options, &mut stats) {
                        Ok(mut s) => samples.append(&mut s),
                        Err(_) => stats.parse_failures += 1,
                    },
                    Err(_) => stats.parse_failures += 1,
                }
            }
        }
    }
    Ok((samples, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(root: &Path, rel: &str, content: &str) {
        let path = root.join(rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, content).unwrap();
    }

    const SRC: &str = r#"class A {
    private static Logger LOG;
    void go(int n) { if (n > 0) { LOG.warn("n={}", n); } }
}
"#;

    #[test]
    fn walks_projects_and_extracts() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "projA/src/A.java", SRC);
        write(dir.path(), "projB/B.java", SRC);
        write(dir.path(), "projB/notes.txt", "ignored");
        let (samples, stats) = extract_corpus(dir.path(), ExtractOptions::default()).unwrap();
        assert_eq!(stats.files_scanned, 2);
        assert_eq!(stats.java_files, 2);
        assert_eq!(samples.len(), 2);
        let projects: Vec<&str> = samples.iter().map(|s| s.project.as_str()).collect();
        assert_eq!(projects, vec!["projA", "projB"]);
        assert_eq!(samples[0].file, "projA/src/A.java");
        assert_eq!(stats.samples_per_level.get("warn"), Some(&2));
    }

    #[test]
    fn parse_failures_are_counted_not_fatal() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "p/Bad.java", "class { oops");
        write(dir.path(), "p/Good.java", SRC);
        let (samples, stats) = extract_corpus(dir.path(), ExtractOptions::default()).unwrap();
        assert_eq!(stats.parse_failures, 1);
        assert_eq!(samples.len(), 1);
    }

    #[test]
    fn root_level_files_use_root_name_as_project() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "Solo.java", SRC);
        let (samples, _) = extract_corpus(dir.path(), ExtractOptions::default()).unwrap();
        assert_eq!(samples.len(), 1);
        let root_name = dir.path().file_name().unwrap().to_string_lossy().into_owned();
        assert_eq!(samples[0].project, root_name);
    }

    #[test]
    fn missing_root_is_config_error() {
        let err = extract_corpus(Path::new("/no/such/dir"), ExtractOptions::default());
        assert!(matches!(err, Err(CoreError::Config(_))));
    }
}
