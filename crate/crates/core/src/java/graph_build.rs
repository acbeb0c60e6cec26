//! Assembles the program graph for one parsed file.
//!
//! Node layout: all source tokens first (node id equals token index), then
//! AST productions in preorder, then one TYPE node per distinct declared
//! type, then one SYMBOL_TYP node per distinct type-position token text.
//! Edges are appended category by category in a fixed order and deduplicated,
//! so rebuilding the same source yields a byte-identical graph.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::analysis::{Analysis, OccKind};
use super::ast::{Ast, AstChild, AstId, AstKind, TokenId};
use super::lexer::{SourceToken, TokenKind, PRIMITIVE_TYPES};
use crate::graph::{Edge, EdgeType, Node, NodeId, NodeType, ProgramGraph};

#[derive(Debug, Clone, Default)]
pub struct BuildStats {
    pub tokens: usize,
    pub ast_nodes: usize,
    pub type_nodes: usize,
    pub symbol_nodes: usize,
    pub variables: usize,
    pub occurrences: usize,
    pub unresolved_calls: usize,
    /// Post-dedup edge counts keyed by serialized edge type name.
    pub edge_counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct BuiltGraph {
    pub graph: ProgramGraph,
    /// AST arena id to graph node id.
    pub ast_node_ids: Vec<NodeId>,
    pub stats: BuildStats,
}

impl BuiltGraph {
    pub fn graph_node(&self, child: AstChild) -> NodeId {
        match child {
            AstChild::Token(t) => t,
            AstChild::Node(n) => self.ast_node_ids[n as usize],
        }
    }
}

fn token_node_type(t: &SourceToken) -> NodeType {
    match t.kind {
        TokenKind::Identifier => NodeType::IdentifierToken,
        TokenKind::Comment => NodeType::CommentLine,
        _ => NodeType::Token,
    }
}

fn preorder(ast: &Ast) -> Vec<AstId> {
    let mut order = Vec::with_capacity(ast.nodes.len());
    let mut stack = vec![ast.root];
    while let Some(n) = stack.pop() {
        order.push(n);
        // Push children reversed so they pop in document order.
        for c in ast.node(n).children.iter().rev() {
            if let AstChild::Node(child) = c {
                stack.push(*child);
            }
        }
    }
    order
}

struct EdgeSink {
    edges: Vec<Edge>,
    seen: HashSet<(NodeId, NodeId, EdgeType)>,
}

impl EdgeSink {
    fn push(&mut self, src: NodeId, dst: NodeId, etype: EdgeType) {
        if self.seen.insert((src, dst, etype)) {
            self.edges.push(Edge { src, dst, etype });
        }
    }
}

pub fn build_graph(
    file_path: &str,
    project: &str,
    tokens: &[SourceToken],
    ast: &Ast,
    analysis: &Analysis,
) -> BuiltGraph {
    let n_tokens = tokens.len();
    let mut graph = ProgramGraph::new(file_path, project);

    for (i, t) in tokens.iter().enumerate() {
        graph.nodes.push(Node {
            id: i as NodeId,
            node_type: token_node_type(t),
            text: t.text.clone(),
            span: Some(t.span),
        });
    }

    let order = preorder(ast);
    let mut ast_node_ids = vec![0 as NodeId; ast.nodes.len()];
    for (i, &aid) in order.iter().enumerate() {
        let gid = (n_tokens + i) as NodeId;
        ast_node_ids[aid as usize] = gid;
        let node_type =
            if ast.node(aid).synthetic { NodeType::FakeAst } else { NodeType::AstElement };
        graph.nodes.push(Node {
            id: gid,
            node_type,
            text: String::new(),
            span: ast.cover_span(aid, tokens),
        });
    }

    let as_graph = |c: AstChild| -> NodeId {
        match c {
            AstChild::Token(t) => t,
            AstChild::Node(n) => ast_node_ids[n as usize],
        }
    };

    // TYPE nodes, in order of first appearance among declared variables.
    let mut type_node: HashMap<String, NodeId> = HashMap::new();
    let mut type_order: Vec<String> = Vec::new();
    for v in &analysis.vars {
        if !type_node.contains_key(&v.type_text) {
            type_node.insert(v.type_text.clone(), 0);
            type_order.push(v.type_text.clone());
        }
    }
    for ty in &type_order {
        let gid = graph.nodes.len() as NodeId;
        type_node.insert(ty.clone(), gid);
        graph.nodes.push(Node {
            id: gid,
            node_type: NodeType::Type,
            text: ty.clone(),
            span: None,
        });
    }

    // SYMBOL_TYP nodes, one per distinct type-position token text, in textual
    // order of first appearance. Type positions are TypeRef leaves that are
    // identifiers or primitive type keywords.
    let mut symbol_tokens: Vec<TokenId> = Vec::new();
    for &aid in &order {
        if ast.node(aid).kind != AstKind::TypeRef {
            continue;
        }
        for leaf in ast.leaf_tokens(aid) {
            let t = &tokens[leaf as usize];
            let is_symbol = t.kind == TokenKind::Identifier
                || PRIMITIVE_TYPES.contains(&t.text.as_str());
            if is_symbol {
                symbol_tokens.push(leaf);
            }
        }
    }
    // Only outermost TypeRefs were needed above, but nested TypeRefs are also
    // in preorder; dedup keeps each token once while preserving first sight.
    let mut seen_sym_tok = HashSet::new();
    symbol_tokens.retain(|t| seen_sym_tok.insert(*t));
    let mut symbol_node: HashMap<String, NodeId> = HashMap::new();
    let mut symbol_order: Vec<String> = Vec::new();
    for &t in &symbol_tokens {
        let text = &tokens[t as usize].text;
        if !symbol_node.contains_key(text) {
            symbol_node.insert(text.clone(), 0);
            symbol_order.push(text.clone());
        }
    }
    for s in &symbol_order {
        let gid = graph.nodes.len() as NodeId;
        symbol_node.insert(s.clone(), gid);
        graph.nodes.push(Node {
            id: gid,
            node_type: NodeType::SymbolTyp,
            text: s.clone(),
            span: None,
        });
    }

    let mut sink = EdgeSink { edges: Vec::new(), seen: HashSet::new() };

    // Syntax: parent-child structure, token order, token ownership.
    for &aid in &order {
        let parent = ast_node_ids[aid as usize];
        for &c in &ast.node(aid).children {
            sink.push(parent, as_graph(c), EdgeType::AstChild);
        }
    }
    for i in 1..n_tokens {
        sink.push((i - 1) as NodeId, i as NodeId, EdgeType::NextToken);
    }
    for &aid in &order {
        let owner = ast_node_ids[aid as usize];
        for &c in &ast.node(aid).children {
            if let AstChild::Token(t) = c {
                if !tokens[t as usize].is_comment() {
                    sink.push(t, owner, EdgeType::AssociatedToken);
                }
            }
        }
    }

    // Dataflow: each non-declaration occurrence points back at the most
    // recent write and the most recent non-declaration occurrence of the
    // same variable.
    let n_vars = analysis.vars.len();
    let mut last_write: Vec<Option<TokenId>> = vec![None; n_vars];
    let mut last_use: Vec<Option<TokenId>> = vec![None; n_vars];
    for occ in &analysis.occurrences {
        let v = occ.var as usize;
        if occ.kind != OccKind::Decl {
            if let Some(w) = last_write[v] {
                sink.push(occ.token, w, EdgeType::LastWrite);
            }
            if let Some(u) = last_use[v] {
                sink.push(occ.token, u, EdgeType::LastUse);
            }
        }
        match occ.kind {
            OccKind::Decl => last_write[v] = Some(occ.token),
            OccKind::Write => {
                last_write[v] = Some(occ.token);
                last_use[v] = Some(occ.token);
            }
            OccKind::Read => last_use[v] = Some(occ.token),
        }
    }

    // Lexical use chains: reads of the same spelling anywhere in the file,
    // regardless of which variable the name resolves to.
    let mut last_lexical: HashMap<&str, TokenId> = HashMap::new();
    for occ in &analysis.occurrences {
        if occ.kind != OccKind::Read {
            continue;
        }
        let text = tokens[occ.token as usize].text.as_str();
        if let Some(&prev) = last_lexical.get(text) {
            sink.push(occ.token, prev, EdgeType::LastLexicalUse);
        }
        last_lexical.insert(text, occ.token);
    }

    // Computed-from: assignment target to each read in its right-hand side.
    let occ_kind: HashMap<TokenId, OccKind> =
        analysis.occurrences.iter().map(|o| (o.token, o.kind)).collect();
    let reads_in = |child: AstChild, out: &mut Vec<TokenId>| {
        let leaves = match child {
            AstChild::Token(t) => vec![t],
            AstChild::Node(n) => ast.leaf_tokens(n),
        };
        for leaf in leaves {
            if occ_kind.get(&leaf) == Some(&OccKind::Read) {
                out.push(leaf);
            }
        }
    };
    for &aid in &order {
        let node = ast.node(aid);
        match node.kind {
            AstKind::Assign => {
                let Some(&AstChild::Token(lhs)) = node.children.first() else { continue };
                if occ_kind.get(&lhs) != Some(&OccKind::Write) {
                    continue;
                }
                let mut reads = Vec::new();
                for &c in &node.children[1..] {
                    reads_in(c, &mut reads);
                }
                let mut seen = HashSet::new();
                for r in reads {
                    if seen.insert(r) {
                        sink.push(lhs, r, EdgeType::ComputedFrom);
                    }
                }
            }
            AstKind::VarDeclarator => {
                let Some(&AstChild::Token(lhs)) = node.children.first() else { continue };
                if occ_kind.get(&lhs) != Some(&OccKind::Decl) {
                    continue;
                }
                let eq = node.children.iter().position(|c| {
                    matches!(c, AstChild::Token(t) if tokens[*t as usize].text == "=")
                });
                let Some(eq) = eq else { continue };
                let mut reads = Vec::new();
                for &c in &node.children[eq + 1..] {
                    reads_in(c, &mut reads);
                }
                let mut seen = HashSet::new();
                for r in reads {
                    if seen.insert(r) {
                        sink.push(lhs, r, EdgeType::ComputedFrom);
                    }
                }
            }
            _ => {}
        }
    }

    // Guards.
    for g in &analysis.guards {
        let etype =
            if g.negated { EdgeType::GuardedByNegation } else { EdgeType::GuardedBy };
        sink.push(g.token, as_graph(g.condition), etype);
    }

    // Calls and returns.
    for call in &analysis.calls {
        for &(arg, param_tok) in &call.args {
            sink.push(as_graph(arg), param_tok, EdgeType::FormalArgName);
        }
    }
    for r in &analysis.returns {
        sink.push(r.token, ast_node_ids[r.method as usize], EdgeType::ReturnsTo);
    }

    // Types.
    for occ in &analysis.occurrences {
        let ty = &analysis.vars[occ.var as usize].type_text;
        if let Some(&tn) = type_node.get(ty) {
            sink.push(occ.token, tn, EdgeType::HasType);
        }
    }
    for &t in &symbol_tokens {
        let text = &tokens[t as usize].text;
        if let Some(&sn) = symbol_node.get(text) {
            sink.push(t, sn, EdgeType::AssociatedSymbol);
        }
    }

    let mut edge_counts: BTreeMap<String, usize> = BTreeMap::new();
    for e in &sink.edges {
        *edge_counts.entry(e.etype.wire_name().to_string()).or_insert(0) += 1;
    }
    graph.edges = sink.edges;

    let stats = BuildStats {
        tokens: n_tokens,
        ast_nodes: ast.nodes.len(),
        type_nodes: type_order.len(),
        symbol_nodes: symbol_order.len(),
        variables: analysis.vars.len(),
        occurrences: analysis.occurrences.len(),
        unresolved_calls: analysis.unresolved_calls,
        edge_counts,
    };

    BuiltGraph { graph, ast_node_ids, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_graph, Direction};
    use crate::java::parse_source;

    fn build(src: &str) -> BuiltGraph {
        let parsed = parse_source(src).unwrap();
        build_graph("T.java", "test", &parsed.tokens, &parsed.ast, &parsed.analysis)
    }

    fn edges_between_texts(
        b: &BuiltGraph,
        src_text: &str,
        dst_text: &str,
    ) -> Vec<EdgeType> {
        b.graph
            .edges
            .iter()
            .filter(|e| {
                b.graph.nodes[e.src as usize].text == src_text
                    && b.graph.nodes[e.dst as usize].text == dst_text
            })
            .map(|e| e.etype)
            .collect()
    }

    #[test]
    fn graph_is_structurally_valid() {
        let b = build(
            "class C { int total; void m(int x) { if (x > 0) { total = total + x; } } }",
        );
        assert!(validate_graph(&b.graph).is_empty());
    }

    #[test]
    fn token_ids_match_token_indices() {
        let b = build("class C { }");
        for (i, n) in b.graph.nodes.iter().take(b.stats.tokens).enumerate() {
            assert_eq!(n.id as usize, i);
            assert!(n.span.is_some());
        }
    }

    #[test]
    fn next_token_covers_comments() {
        let b = build("class C { /* note */ int x; }");
        let comment = b
            .graph
            .nodes
            .iter()
            .find(|n| n.node_type == NodeType::CommentLine)
            .expect("comment node");
        let prev = b.graph.neighbors(comment.id, EdgeType::NextToken, Direction::In).unwrap();
        let next = b.graph.neighbors(comment.id, EdgeType::NextToken, Direction::Out).unwrap();
        assert_eq!(prev, vec![comment.id - 1]);
        assert_eq!(next, vec![comment.id + 1]);
        // ...but comments own no production.
        assert!(b
            .graph
            .neighbors(comment.id, EdgeType::AssociatedToken, Direction::Out)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn declaration_then_write_has_only_last_write() {
        // A write after a bare declaration links to the declaration, and no
        // use chain exists yet.
        let b = build("class C { void m() { int i; i = 9; } }");
        let i_tokens: Vec<NodeId> = b
            .graph
            .nodes
            .iter()
            .filter(|n| n.text == "i" && n.node_type == NodeType::IdentifierToken)
            .map(|n| n.id)
            .collect();
        assert_eq!(i_tokens.len(), 2);
        let (decl, write) = (i_tokens[0], i_tokens[1]);
        let lw: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| e.src == write && e.dst == decl)
            .map(|e| e.etype)
            .collect();
        assert_eq!(lw, vec![EdgeType::LastWrite]);
    }

    #[test]
    fn read_after_write_has_last_write_and_last_use() {
        let b = build("class C { void m(int j) { int i; i = 0; int x = i + j; } }");
        let i_tokens: Vec<NodeId> = b
            .graph
            .nodes
            .iter()
            .filter(|n| n.text == "i")
            .map(|n| n.id)
            .collect();
        assert_eq!(i_tokens.len(), 3);
        let (write, read) = (i_tokens[1], i_tokens[2]);
        let mut kinds: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| e.src == read && e.dst == write)
            .map(|e| e.etype)
            .collect();
        kinds.sort_by_key(|e| e.index());
        assert_eq!(kinds, vec![EdgeType::LastWrite, EdgeType::LastUse]);
    }

    #[test]
    fn computed_from_links_target_to_rhs_reads() {
        let b = build("class C { void m() { int i = 1; int j = 2; int x; x = i + j; } }");
        assert_eq!(edges_between_texts(&b, "x", "i"), vec![EdgeType::ComputedFrom]);
        assert_eq!(edges_between_texts(&b, "x", "j"), vec![EdgeType::ComputedFrom]);
    }

    #[test]
    fn initializer_computed_from() {
        let b = build("class C { void m(int a) { int x = a * a; } }");
        // Two distinct read tokens of `a`, one edge each.
        let cf: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| e.etype == EdgeType::ComputedFrom)
            .collect();
        assert_eq!(cf.len(), 2, "one per distinct read token: {cf:?}");
        assert!(cf.iter().all(|e| b.graph.nodes[e.src as usize].text == "x"));
    }

    #[test]
    fn lexical_use_ignores_scopes() {
        // Two unrelated locals named v in sibling blocks: reads chain by name.
        let b = build(
            "class C { void m() { { int v = 1; use(v); } { int v = 2; use(v); } } }",
        );
        let llu: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| e.etype == EdgeType::LastLexicalUse)
            .collect();
        assert_eq!(llu.len(), 1);
        // But LAST_USE never crosses the variable boundary.
        let reads: Vec<NodeId> = b
            .graph
            .nodes
            .iter()
            .filter(|n| n.text == "v")
            .map(|n| n.id)
            .collect();
        let second_read = reads[3];
        let lu: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| e.etype == EdgeType::LastUse && e.src == second_read)
            .collect();
        assert!(lu.is_empty(), "{lu:?}");
    }

    #[test]
    fn guard_edges_point_at_condition() {
        let b = build("class C { void m(int x, int y) { if (x > y) { use(x); } else { use(y); } } }");
        let gb: Vec<_> =
            b.graph.edges.iter().filter(|e| e.etype == EdgeType::GuardedBy).collect();
        let gbn: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| e.etype == EdgeType::GuardedByNegation)
            .collect();
        assert_eq!(gb.len(), 1);
        assert_eq!(gbn.len(), 1);
        // Both point at the same condition node (the Binary for x > y).
        assert_eq!(gb[0].dst, gbn[0].dst);
        assert_eq!(b.graph.nodes[gb[0].dst as usize].node_type, NodeType::AstElement);
    }

    #[test]
    fn formal_arg_and_returns_to() {
        let b = build(
            "class C { int twice(int n) { return n + n; } void m() { int k = 1; twice(k); } }",
        );
        assert_eq!(edges_between_texts(&b, "k", "n"), vec![EdgeType::FormalArgName]);
        let rt: Vec<_> =
            b.graph.edges.iter().filter(|e| e.etype == EdgeType::ReturnsTo).collect();
        assert_eq!(rt.len(), 1);
        assert_eq!(b.graph.nodes[rt[0].src as usize].text, "return");
        assert_eq!(b.graph.nodes[rt[0].dst as usize].node_type, NodeType::AstElement);
    }

    #[test]
    fn has_type_and_associated_symbol() {
        let b = build("class C { void m(java.util.List<String> xs, int n) { use(xs, n); } }");
        let type_nodes: Vec<&Node> =
            b.graph.nodes.iter().filter(|n| n.node_type == NodeType::Type).collect();
        let texts: Vec<&str> = type_nodes.iter().map(|n| n.text.as_str()).collect();
        assert_eq!(texts, vec!["java.util.List<String>", "int"]);

        let sym_texts: Vec<&str> = b
            .graph
            .nodes
            .iter()
            .filter(|n| n.node_type == NodeType::SymbolTyp)
            .map(|n| n.text.as_str())
            .collect();
        // The method return type is a type reference too, so "void" leads.
        assert_eq!(sym_texts, vec!["void", "java", "util", "List", "String", "int"]);

        // Every xs occurrence points at its TYPE node.
        let has_type: Vec<_> = b
            .graph
            .edges
            .iter()
            .filter(|e| {
                e.etype == EdgeType::HasType
                    && b.graph.nodes[e.src as usize].text == "xs"
            })
            .collect();
        assert_eq!(has_type.len(), 2);
        assert!(has_type.iter().all(|e| b.graph.nodes[e.dst as usize].text
            == "java.util.List<String>"));
    }

    #[test]
    fn ast_nodes_have_empty_text_and_cover_spans() {
        let b = build("class C { void m() { int x = 1; } }");
        for n in &b.graph.nodes {
            match n.node_type {
                NodeType::AstElement | NodeType::FakeAst => {
                    assert!(n.text.is_empty());
                    assert!(n.span.is_some());
                }
                _ => {}
            }
        }
    }

    #[test]
    fn rebuild_is_identical() {
        let src = "class C { int t; void m(int x) { for (int i = 0; i < x; i++) { t += i; } } }";
        let a = build(src);
        let b = build(src);
        assert_eq!(a.graph, b.graph);
        assert_eq!(
            crate::graph::graph_to_json(&a.graph),
            crate::graph::graph_to_json(&b.graph)
        );
    }

    #[test]
    fn stats_match_graph_contents() {
        let b = build("class C { void m(int x) { if (x > 0) { x = x - 1; } } }");
        let total: usize = b.stats.edge_counts.values().sum();
        assert_eq!(total, b.graph.edge_count());
        assert_eq!(
            b.stats.tokens + b.stats.ast_nodes + b.stats.type_nodes + b.stats.symbol_nodes,
            b.graph.node_count()
        );
    }
}
