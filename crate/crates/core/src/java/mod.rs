//! Java-subset frontend: lexer, parser, name analysis, and graph assembly.
//!
//! The pipeline for one file is [`parse_source`] followed by
//! [`build_graph`]; [`file_to_graph`] runs both.

pub mod analysis;
pub mod ast;
pub mod graph_build;
pub mod lexer;
pub mod parser;

pub use analysis::{analyze, Analysis, OccKind, Occurrence};
pub use ast::{Ast, AstChild, AstId, AstKind, TokenId};
pub use graph_build::{build_graph, BuildStats, BuiltGraph};
pub use lexer::{tokenize, SourceToken, TokenKind};
pub use parser::parse;

use crate::error::Result;

/// Everything derived from one source file short of the graph itself.
#[derive(Debug)]
pub struct ParsedFile {
    pub tokens: Vec<SourceToken>,
    pub ast: Ast,
    pub analysis: Analysis,
}

pub fn parse_source(source: &str) -> Result<ParsedFile> {
    let tokens = tokenize(source)?;
    let ast = parse(&tokens)?;
    let analysis = analyze(&ast, &tokens);
    Ok(ParsedFile { tokens, ast, analysis })
}

/// Parses a source string and assembles its program graph.
pub fn file_to_graph(file_path: &str, project: &str, source: &str) -> Result<BuiltGraph> {
    let parsed = parse_source(source)?;
    Ok(build_graph(file_path, project, &parsed.tokens, &parsed.ast, &parsed.analysis))
}
