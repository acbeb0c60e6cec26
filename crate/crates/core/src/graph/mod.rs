//! The program-graph data model: typed nodes, typed directed edges, validation,
//! and generic neighborhood queries.
//!
//! A [`ProgramGraph`] is immutable once built. Node ids are dense indices from
//! zero, so adjacency structures and state matrices can be plain vectors.

mod hop;
mod io;

pub use hop::{induced_subgraph, k_hop_nodes};
pub use io::{graph_from_json, graph_to_json, read_graph, write_graph};

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{CoreError, Result};

/// Dense node identifier, unique within one graph.
pub type NodeId = u32;

/// The seven node categories of the program graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeType {
    /// Keywords, punctuation, and literals.
    Token,
    /// Identifiers created by the programmer.
    IdentifierToken,
    /// Source comments, one node per comment token.
    CommentLine,
    /// Regular syntax-tree productions.
    AstElement,
    /// Synthesized wrapper productions (implicit blocks and the like).
    FakeAst,
    /// Marker node for a distinct type identifier.
    SymbolTyp,
    /// A variable type.
    Type,
}

impl NodeType {
    pub const ALL: [NodeType; 7] = [
        NodeType::Token,
        NodeType::IdentifierToken,
        NodeType::CommentLine,
        NodeType::AstElement,
        NodeType::FakeAst,
        NodeType::SymbolTyp,
        NodeType::Type,
    ];

    /// Stable index into per-type tables (fallback embeddings).
    pub fn index(self) -> usize {
        match self {
            NodeType::Token => 0,
            NodeType::IdentifierToken => 1,
            NodeType::CommentLine => 2,
            NodeType::AstElement => 3,
            NodeType::FakeAst => 4,
            NodeType::SymbolTyp => 5,
            NodeType::Type => 6,
        }
    }

    /// Serialized spelling, e.g. `IDENTIFIER_TOKEN`.
    pub fn wire_name(self) -> &'static str {
        match self {
            NodeType::Token => "TOKEN",
            NodeType::IdentifierToken => "IDENTIFIER_TOKEN",
            NodeType::CommentLine => "COMMENT_LINE",
            NodeType::AstElement => "AST_ELEMENT",
            NodeType::FakeAst => "FAKE_AST",
            NodeType::SymbolTyp => "SYMBOL_TYP",
            NodeType::Type => "TYPE",
        }
    }
}

/// The thirteen base edge categories.
///
/// Each base type also has a reversed message channel during propagation, for
/// 26 channels total; reversed channels are derived, never serialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeType {
    AstChild,
    NextToken,
    LastWrite,
    LastUse,
    ComputedFrom,
    ReturnsTo,
    FormalArgName,
    GuardedBy,
    GuardedByNegation,
    LastLexicalUse,
    AssociatedToken,
    HasType,
    AssociatedSymbol,
}

impl EdgeType {
    pub const COUNT: usize = 13;

    pub const ALL: [EdgeType; EdgeType::COUNT] = [
        EdgeType::AstChild,
        EdgeType::NextToken,
        EdgeType::LastWrite,
        EdgeType::LastUse,
        EdgeType::ComputedFrom,
        EdgeType::ReturnsTo,
        EdgeType::FormalArgName,
        EdgeType::GuardedBy,
        EdgeType::GuardedByNegation,
        EdgeType::LastLexicalUse,
        EdgeType::AssociatedToken,
        EdgeType::HasType,
        EdgeType::AssociatedSymbol,
    ];

    pub fn index(self) -> usize {
        match self {
            EdgeType::AstChild => 0,
            EdgeType::NextToken => 1,
            EdgeType::LastWrite => 2,
            EdgeType::LastUse => 3,
            EdgeType::ComputedFrom => 4,
            EdgeType::ReturnsTo => 5,
            EdgeType::FormalArgName => 6,
            EdgeType::GuardedBy => 7,
            EdgeType::GuardedByNegation => 8,
            EdgeType::LastLexicalUse => 9,
            EdgeType::AssociatedToken => 10,
            EdgeType::HasType => 11,
            EdgeType::AssociatedSymbol => 12,
        }
    }

    /// Message channel id for this edge type in the given direction.
    ///
    /// Forward channels are even, reversed channels odd; 26 channels in all.
    pub fn channel(self, reversed: bool) -> usize {
        self.index() * 2 + usize::from(reversed)
    }

    /// Serialized spelling, e.g. `LAST_WRITE`.
    pub fn wire_name(self) -> &'static str {
        match self {
            EdgeType::AstChild => "AST_CHILD",
            EdgeType::NextToken => "NEXT_TOKEN",
            EdgeType::LastWrite => "LAST_WRITE",
            EdgeType::LastUse => "LAST_USE",
            EdgeType::ComputedFrom => "COMPUTED_FROM",
            EdgeType::ReturnsTo => "RETURNS_TO",
            EdgeType::FormalArgName => "FORMAL_ARG_NAME",
            EdgeType::GuardedBy => "GUARDED_BY",
            EdgeType::GuardedByNegation => "GUARDED_BY_NEGATION",
            EdgeType::LastLexicalUse => "LAST_LEXICAL_USE",
            EdgeType::AssociatedToken => "ASSOCIATED_TOKEN",
            EdgeType::HasType => "HAS_TYPE",
            EdgeType::AssociatedSymbol => "ASSOCIATED_SYMBOL",
        }
    }

    /// Total number of effective message channels (base types x directions).
    pub const CHANNELS: usize = EdgeType::COUNT * 2;
}

/// Edge direction selector for adjacency queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

/// A single node: id, category, surface text, and optional byte span.
///
/// `text` is empty for pure AST nodes; token nodes carry their source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub span: Option<(u32, u32)>,
}

/// A typed directed edge between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    #[serde(rename = "type")]
    pub etype: EdgeType,
}

/// A whole-file program graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramGraph {
    #[serde(rename = "file")]
    pub file_path: String,
    pub project: String,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl ProgramGraph {
    pub fn new(file_path: impl Into<String>, project: impl Into<String>) -> Self {
        ProgramGraph {
            file_path: file_path.into(),
            project: project.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id as usize)
    }

    fn check_id(&self, id: NodeId) -> Result<()> {
        if (id as usize) < self.nodes.len() {
            Ok(())
        } else {
            Err(CoreError::Graph(format!(
                "node id {} out of range (graph has {} nodes)",
                id,
                self.nodes.len()
            )))
        }
    }

    /// Adjacent node ids under one edge channel, ascending and deduplicated.
    pub fn neighbors(&self, n: NodeId, etype: EdgeType, direction: Direction) -> Result<Vec<NodeId>> {
        self.check_id(n)?;
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter(|e| e.etype == etype)
            .filter_map(|e| match direction {
                Direction::Out if e.src == n => Some(e.dst),
                Direction::In if e.dst == n => Some(e.src),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Undirected adjacency lists over all edge types, for hop queries.
    pub(crate) fn undirected_adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.src as usize].push(e.dst);
            adj[e.dst as usize].push(e.src);
        }
        adj
    }
}

/// Checks every structural invariant and reports violations as data.
///
/// An empty result means the graph is valid. Violations name the offending
/// node or edge index so callers can log them.
pub fn validate_graph(g: &ProgramGraph) -> Vec<String> {
    let mut violations = Vec::new();
    let n = g.nodes.len();

    for (i, node) in g.nodes.iter().enumerate() {
        if node.id as usize != i {
            violations.push(format!("node {}: id {} is not its dense index", i, node.id));
        }
        if matches!(node.node_type, NodeType::Token | NodeType::IdentifierToken)
            && node.text.is_empty()
        {
            violations.push(format!("node {}: {:?} node has empty text", i, node.node_type));
        }
    }

    let mut seen = HashSet::with_capacity(g.edges.len());
    let mut ast_parents = vec![0u32; n];
    for (i, e) in g.edges.iter().enumerate() {
        if e.src as usize >= n {
            violations.push(format!("edge {}: src out of range", i));
            continue;
        }
        if e.dst as usize >= n {
            violations.push(format!("edge {}: dst out of range", i));
            continue;
        }
        if !seen.insert((e.src, e.dst, e.etype)) {
            violations.push(format!(
                "edge {}: duplicate ({}, {}, {:?})",
                i, e.src, e.dst, e.etype
            ));
        }
        if e.etype == EdgeType::AstChild {
            ast_parents[e.dst as usize] += 1;
        }
    }

    for (i, count) in ast_parents.iter().enumerate() {
        if *count > 1 {
            violations.push(format!("node {}: {} incoming AST_CHILD edges", i, count));
        }
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_graph() -> ProgramGraph {
        // a -> b -> c via NEXT_TOKEN
        let mut g = ProgramGraph::new("t.java", "p");
        for (i, t) in ["a", "b", "c"].iter().enumerate() {
            g.nodes.push(Node {
                id: i as NodeId,
                node_type: NodeType::IdentifierToken,
                text: t.to_string(),
                span: None,
            });
        }
        g.edges.push(Edge { src: 0, dst: 1, etype: EdgeType::NextToken });
        g.edges.push(Edge { src: 1, dst: 2, etype: EdgeType::NextToken });
        g
    }

    #[test]
    fn validate_reports_out_of_range_dst() {
        let mut g = chain_graph();
        g.edges[0].dst = 999;
        let v = validate_graph(&g);
        assert_eq!(v, vec!["edge 0: dst out of range".to_string()]);
    }

    #[test]
    fn validate_empty_graph_is_clean() {
        let g = ProgramGraph::new("e.java", "p");
        assert!(validate_graph(&g).is_empty());
    }

    #[test]
    fn validate_flags_duplicate_edge() {
        let mut g = chain_graph();
        g.edges.push(Edge { src: 0, dst: 1, etype: EdgeType::NextToken });
        let v = validate_graph(&g);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("duplicate"), "{v:?}");
    }

    #[test]
    fn validate_flags_empty_token_text() {
        let mut g = chain_graph();
        g.nodes[1].text.clear();
        let v = validate_graph(&g);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("empty text"));
    }

    #[test]
    fn validate_flags_double_ast_parent() {
        let mut g = chain_graph();
        g.edges.push(Edge { src: 0, dst: 2, etype: EdgeType::AstChild });
        g.edges.push(Edge { src: 1, dst: 2, etype: EdgeType::AstChild });
        let v = validate_graph(&g);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("AST_CHILD"));
    }

    #[test]
    fn neighbors_out_and_in() {
        let g = chain_graph();
        assert_eq!(g.neighbors(1, EdgeType::NextToken, Direction::Out).unwrap(), vec![2]);
        assert_eq!(g.neighbors(1, EdgeType::NextToken, Direction::In).unwrap(), vec![0]);
        assert_eq!(g.neighbors(1, EdgeType::LastWrite, Direction::Out).unwrap(), Vec::<NodeId>::new());
    }

    #[test]
    fn neighbors_unknown_id_is_error() {
        let g = chain_graph();
        assert!(g.neighbors(7, EdgeType::NextToken, Direction::Out).is_err());
    }

    #[test]
    fn wire_names_match_serialized_spelling() {
        for et in EdgeType::ALL {
            assert_eq!(serde_json::to_value(et).unwrap(), et.wire_name());
        }
        for nt in NodeType::ALL {
            assert_eq!(serde_json::to_value(nt).unwrap(), nt.wire_name());
        }
    }

    #[test]
    fn edge_channels_are_distinct() {
        let mut seen = HashSet::new();
        for et in EdgeType::ALL {
            assert!(seen.insert(et.channel(false)));
            assert!(seen.insert(et.channel(true)));
        }
        assert_eq!(seen.len(), EdgeType::CHANNELS);
        assert_eq!(EdgeType::CHANNELS, 26);
    }
}
