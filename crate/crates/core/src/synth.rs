//! Synthetic Java corpus with one log statement per file.
//!
//! Each generated file embeds the logging call in a context motif chosen
//! by its level, so a model can recover the level from the redacted
//! statement's surroundings. Identifiers vary per file under a seeded
//! generator; generation is deterministic for a given option set.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::extract::LogLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub files: usize,
    pub projects: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { files: 48, projects: 4, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthFile {
    /// Path relative to the corpus root, `project/Class.java`.
    pub rel_path: String,
    pub project: String,
    pub level: LogLevel,
    pub source: String,
}

const SUBJECTS: [&str; 16] = [
    "queue", "job", "batch", "cache", "index", "shard", "worker", "stream", "record", "bucket",
    "session", "task", "buffer", "router", "ledger", "probe",
];

const VERBS: [&str; 16] = [
    "process", "flush", "merge", "scan", "load", "sync", "drain", "emit", "rotate", "verify",
    "submit", "attach", "resolve", "retry", "pack", "split",
];

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Statements surrounding the log call for one level.
///
/// The log line itself sits between `pre` and `post`; `guard` wraps all
/// three in an if whose condition is the given text.
struct Motif {
    guard: Option<String>,
    pre: Option<String>,
    post: Option<String>,
}

fn motif(level: LogLevel, verb: &str, var: &str, lit: u32) -> Motif {
    match level {
        LogLevel::Trace => Motif {
            guard: None,
            pre: Some(format!("tracer.markStep(\"{verb}\");")),
            post: None,
        },
        LogLevel::Debug => Motif {
            guard: Some("LOG.isDebugEnabled()".into()),
            pre: None,
            post: None,
        },
        LogLevel::Info => Motif {
            guard: Some("LOG.isInfoEnabled()".into()),
            pre: None,
            post: None,
        },
        LogLevel::Warn => Motif {
            guard: None,
            pre: Some(format!("monitor.recordWarning({var});")),
            post: None,
        },
        LogLevel::Error => Motif {
            guard: Some(format!("{var} > {lit}")),
            pre: None,
            post: Some(format!("throw new JobException(\"{verb}\");")),
        },
        LogLevel::Fatal => Motif {
            guard: Some(format!("{var} < 0")),
            pre: None,
            post: Some("System.exit(1);".into()),
        },
    }
}

fn render_file(index: usize, level: LogLevel, rng: &mut ChaCha8Rng) -> (String, String) {
    let subject = SUBJECTS[rng.gen_range(0..SUBJECTS.len())];
    let verb = VERBS[rng.gen_range(0..VERBS.len())];
    let field = format!("{}Seen", SUBJECTS[rng.gen_range(0..SUBJECTS.len())]);
    let lit = rng.gen_range(1..9u32);
    let class_name = format!("{}{}{}", capitalize(verb), capitalize(subject), index);
    let method = format!("{}{}", verb, capitalize(subject));
    let var = format!("{subject}Total");
    let m = motif(level, verb, &var, lit);

    let mut body = String::new();
    body.push_str(&format!("        int {var} = {subject} + {lit};\n"));
    let log_stmt = format!("LOG.{}(\"{} {}\" + {});", level.name(), verb, subject, var);
    let mut inner = String::new();
    if let Some(pre) = &m.pre {
        inner.push_str(&format!("{pre}\n"));
    }
    inner.push_str(&format!("{log_stmt}\n"));
    if let Some(post) = &m.post {
        inner.push_str(&format!("{post}\n"));
    }
    match &m.guard {
        Some(cond) => {
            body.push_str(&format!("        if ({cond}) {{\n"));
            for line in inner.lines() {
                body.push_str(&format!("            {line}\n"));
            }
            body.push_str("        }\n");
        }
        None => {
            for line in inner.lines() {
                body.push_str(&format!("        {line}\n"));
            }
        }
    }
    body.push_str(&format!("        {field} = {var};\n"));

    let source = format!(
        "class {class_name} {{\n    int {field};\n\n    void {method}(int {subject}) {{\n{body}    }}\n}}\n"
    );
    (class_name, source)
}

/// Generates `opts.files` single-log files, cycling levels and projects.
pub fn generate(opts: &SynthOptions) -> Result<Vec<SynthFile>> {
    if opts.projects == 0 {
        return Err(CoreError::Config("synthetic corpus needs at least one project".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(opts.files);
    for i in 0..opts.files {
        let level = LogLevel::ALL[i % LogLevel::COUNT];
        let project = format!("proj{}", i % opts.projects);
        let (class_name, source) = render_file(i, level, &mut rng);
        out.push(SynthFile {
            rel_path: format!("{project}/{class_name}.java"),
            project,
            level,
            source,
        });
    }
    Ok(out)
}

/// Writes a generated corpus under `root`, one directory per project.
pub fn write_corpus(root: &Path, opts: &SynthOptions) -> Result<Vec<PathBuf>> {
    let files = generate(opts)?;
    let mut paths = Vec::with_capacity(files.len());
    for f in &files {
        let path = root.join(&f.rel_path);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CoreError::io(dir, e))?;
        }
        fs::write(&path, &f.source).map_err(|e| CoreError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
