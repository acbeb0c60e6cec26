//! Sample extraction from imported interchange graphs, without source text.
//!
//! Works purely on graph structure: the token chain is rebuilt from
//! NEXT_TOKEN edges, log statements are found by pattern matching the chain,
//! and redaction removes the statement subtree and splices a fresh semicolon
//! token in its place. The result matches what parsing the redacted source
//! would produce around the site, so models treat both sample origins alike.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{ExtractOptions, ExtractionStats, LabeledSample, LogLevel};
use crate::error::{CoreError, Result};
use crate::graph::{
    induced_subgraph, k_hop_nodes, validate_graph, Edge, EdgeType, Node, NodeId, NodeType,
    ProgramGraph,
};

/// One pattern match on the token chain.
#[derive(Debug, Clone)]
struct ChainSite {
    /// Chain positions of the statement's tokens, first to last (semicolon).
    first: usize,
    last: usize,
    level: LogLevel,
}

/// Rebuilds the token order from NEXT_TOKEN edges.
///
/// Returns node ids in chain order. Fails if the edges do not form one
/// simple chain.
fn token_chain(g: &ProgramGraph) -> Result<Vec<NodeId>> {
    let mut next: HashMap<NodeId, NodeId> = HashMap::new();
    let mut has_prev: BTreeSet<NodeId> = BTreeSet::new();
    let mut members: BTreeSet<NodeId> = BTreeSet::new();
    for e in &g.edges {
        if e.etype != EdgeType::NextToken {
            continue;
        }
        if next.insert(e.src, e.dst).is_some() {
            return Err(CoreError::Data(format!(
                "node {} has two NEXT_TOKEN successors",
                e.src
            )));
        }
        if !has_prev.insert(e.dst) {
            return Err(CoreError::Data(format!(
                "node {} has two NEXT_TOKEN predecessors",
                e.dst
            )));
        }
        members.insert(e.src);
        members.insert(e.dst);
    }
    if members.is_empty() {
        return Ok(Vec::new());
    }
    let mut starts = members.iter().copied().filter(|n| !has_prev.contains(n));
    let start = starts
        .next()
        .ok_or_else(|| CoreError::Data("NEXT_TOKEN edges form a cycle".into()))?;
    if starts.next().is_some() {
        return Err(CoreError::Data("NEXT_TOKEN edges form multiple chains".into()));
    }
    let mut chain = vec![start];
    let mut cur = start;
    while let Some(&n) = next.get(&cur) {
        chain.push(n);
        cur = n;
        if chain.len() > members.len() {
            return Err(CoreError::Data("NEXT_TOKEN edges form a cycle".into()));
        }
    }
    if chain.len() != members.len() {
        return Err(CoreError::Data("NEXT_TOKEN edges form multiple chains".into()));
    }
    Ok(chain)
}

fn find_chain_sites(g: &ProgramGraph, chain: &[NodeId]) -> Vec<ChainSite> {
    let text = |i: usize| g.nodes[chain[i] as usize].text.as_str();
    let mut sites = Vec::new();
    for i in 0..chain.len() {
        if !text(i).to_lowercase().contains("log") {
            continue;
        }
        if g.nodes[chain[i] as usize].node_type != NodeType::IdentifierToken {
            continue;
        }
        if i + 4 >= chain.len() || text(i + 1) != "." {
            continue;
        }
        let Some(level) = LogLevel::from_method_name(text(i + 2)) else { continue };
        if text(i + 3) != "(" {
            continue;
        }
        // Balance parentheses to the end of the argument list.
        let mut depth = 0usize;
        let mut close = None;
        for j in i + 3..chain.len() {
            match text(j) {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(j);
                        break;
                    }
                }
                _ => {}
            }
        }
        let Some(close) = close else { continue };
        if close + 1 >= chain.len() || text(close + 1) != ";" {
            continue;
        }
        sites.push(ChainSite { first: i, last: close + 1, level });
    }
    sites
}

/// AST_CHILD owner of a token, via its ASSOCIATED_TOKEN edge.
fn owner_of(g: &ProgramGraph, token: NodeId) -> Option<NodeId> {
    g.edges
        .iter()
        .find(|e| e.etype == EdgeType::AssociatedToken && e.src == token)
        .map(|e| e.dst)
}

fn ast_parent(g: &ProgramGraph, node: NodeId) -> Option<NodeId> {
    g.edges
        .iter()
        .find(|e| e.etype == EdgeType::AstChild && e.dst == node)
        .map(|e| e.src)
}

/// All AST_CHILD descendants of `node`, the node itself excluded.
fn descendants(g: &ProgramGraph, node: NodeId) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![node];
    let mut children: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for e in &g.edges {
        if e.etype == EdgeType::AstChild {
            children.entry(e.src).or_default().push(e.dst);
        }
    }
    while let Some(n) = stack.pop() {
        for &c in children.get(&n).into_iter().flatten() {
            if out.insert(c) {
                stack.push(c);
            }
        }
    }
    out
}

/// Finds the statement node that covers exactly the site's token run by
/// climbing AST_CHILD parents from the semicolon's owner.
fn statement_node(g: &ProgramGraph, chain: &[NodeId], site: &ChainSite) -> Option<NodeId> {
    let site_tokens: BTreeSet<NodeId> =
        chain[site.first..=site.last].iter().copied().collect();
    let mut cur = owner_of(g, chain[site.last])?;
    for _ in 0..64 {
        let covered: BTreeSet<NodeId> = descendants(g, cur)
            .into_iter()
            .filter(|&n| {
                matches!(
                    g.nodes[n as usize].node_type,
                    NodeType::Token | NodeType::IdentifierToken | NodeType::CommentLine
                )
            })
            .collect();
        if covered == site_tokens {
            return Some(cur);
        }
        if !covered.is_subset(&site_tokens) {
            return None; // overshot: node covers more than the statement
        }
        cur = ast_parent(g, cur)?;
    }
    None
}

/// Removes the statement's subtree and splices a fresh `;` token under it,
/// stitching the NEXT_TOKEN chain back together.
fn redact_in_graph(
    g: &ProgramGraph,
    chain: &[NodeId],
    site: &ChainSite,
    stmt: NodeId,
) -> (ProgramGraph, NodeId) {
    let removed = descendants(g, stmt);
    let mut mapping: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut out = ProgramGraph::new(g.file_path.clone(), g.project.clone());
    for node in &g.nodes {
        if removed.contains(&node.id) {
            continue;
        }
        let new_id = out.nodes.len() as NodeId;
        mapping.insert(node.id, new_id);
        let mut n = node.clone();
        n.id = new_id;
        out.nodes.push(n);
    }
    let semi_id = out.nodes.len() as NodeId;
    let span = g.nodes[chain[site.first] as usize]
        .span
        .map(|(s, _)| (s, s + 1));
    out.nodes.push(Node {
        id: semi_id,
        node_type: NodeType::Token,
        text: ";".to_string(),
        span,
    });
    for e in &g.edges {
        if let (Some(&src), Some(&dst)) = (mapping.get(&e.src), mapping.get(&e.dst)) {
            out.edges.push(Edge { src, dst, etype: e.etype });
        }
    }
    let stmt_new = mapping[&stmt];
    out.edges.push(Edge { src: stmt_new, dst: semi_id, etype: EdgeType::AstChild });
    if site.first > 0 {
        if let Some(&prev) = mapping.get(&chain[site.first - 1]) {
            out.edges.push(Edge { src: prev, dst: semi_id, etype: EdgeType::NextToken });
        }
    }
    if site.last + 1 < chain.len() {
        if let Some(&next) = mapping.get(&chain[site.last + 1]) {
            out.edges.push(Edge { src: semi_id, dst: next, etype: EdgeType::NextToken });
        }
    }
    out.edges.push(Edge { src: semi_id, dst: stmt_new, etype: EdgeType::AssociatedToken });
    (out, stmt_new)
}

/// Extracts every log statement found in an imported graph.
pub fn extract_from_graph(
    g: &ProgramGraph,
    options: ExtractOptions,
    stats: &mut ExtractionStats,
) -> Result<Vec<LabeledSample>> {
    let violations = validate_graph(g);
    if !violations.is_empty() {
        return Err(CoreError::Data(format!(
            "invalid graph {}: {}",
            g.file_path, violations[0]
        )));
    }
    let chain = token_chain(g)?;
    let sites = find_chain_sites(g, &chain);
    stats.log_statements += sites.len();
    let mut out = Vec::new();
    for site in &sites {
        let Some(stmt) = statement_node(g, &chain, site) else {
            stats.redaction_failures += 1;
            continue;
        };
        let (redacted, center) = redact_in_graph(g, &chain, site, stmt);
        let mut keep = k_hop_nodes(&redacted, center, options.min_hops, options.max_hops)?;
        keep.insert(center);
        let (sub, mapping) = induced_subgraph(&redacted, &keep)?;
        let Some(&center) = mapping.get(&center) else {
            stats.redaction_failures += 1;
            continue;
        };
        let first_span = g.nodes[chain[site.first] as usize].span;
        let last_span = g.nodes[chain[site.last] as usize].span;
        let span = match (first_span, last_span) {
            (Some((s, _)), Some((_, e))) => (s, e),
            _ => (0, 0),
        };
        let sample = LabeledSample {
            graph: sub,
            center,
            label: Some(site.level),
            project: g.project.clone(),
            file: g.file_path.clone(),
            span,
        };
        stats.record_sample(&sample);
        out.push(sample);
    }
    Ok(out)
}

/// Cuts an unlabeled sample around every marker site in an imported graph.
/// No redaction is needed: the site already is a bare semicolon statement.
pub fn marker_samples_from_graph(
    g: &ProgramGraph,
    options: ExtractOptions,
) -> Result<Vec<LabeledSample>> {
    let violations = validate_graph(g);
    if !violations.is_empty() {
        return Err(CoreError::Data(format!(
            "invalid graph {}: {}",
            g.file_path, violations[0]
        )));
    }
    let mut out = Vec::new();
    for center in find_marker_sites(g) {
        let mut keep = k_hop_nodes(g, center, options.min_hops, options.max_hops)?;
        keep.insert(center);
        let (sub, mapping) = induced_subgraph(g, &keep)?;
        let Some(&mapped) = mapping.get(&center) else { continue };
        // Span of the semicolon token under the statement, when recorded.
        let span = g
            .edges
            .iter()
            .find(|e| e.etype == EdgeType::AstChild && e.src == center)
            .and_then(|e| g.nodes[e.dst as usize].span)
            .unwrap_or((0, 0));
        out.push(LabeledSample {
            graph: sub,
            center: mapped,
            label: None,
            project: g.project.clone(),
            file: g.file_path.clone(),
            span,
        });
    }
    Ok(out)
}

/// Prediction sites that are already bare semicolons: empty statements whose
/// node has exactly the one token child. Returns their statement node ids.
pub fn find_marker_sites(g: &ProgramGraph) -> Vec<NodeId> {
    let mut child_count: HashMap<NodeId, usize> = HashMap::new();
    for e in &g.edges {
        if e.etype == EdgeType::AstChild {
            *child_count.entry(e.src).or_insert(0) += 1;
        }
    }
    let mut out = Vec::new();
    for node in &g.nodes {
        if node.text != ";" {
            continue;
        }
        let Some(owner) = owner_of(g, node.id) else { continue };
        if child_count.get(&owner) == Some(&1) {
            out.push(owner);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{find_log_statements, make_sample};
    use crate::java;

    const SRC: &str = r#"class A {
    private static Logger LOG;
    void go(int n) {
        int total = n + 1;
        if (total > 1) {
            LOG.error("bad total {}", total);
        }
        use(total);
    }
}
"#;

    fn full_graph(src: &str) -> ProgramGraph {
        java::file_to_graph("A.java", "proj", src).unwrap().graph
    }

    #[test]
    fn chain_reconstruction_matches_token_order() {
        let g = full_graph(SRC);
        let chain = token_chain(&g).unwrap();
        // Tokens come first in builder layout, in source order.
        let expected: Vec<NodeId> = (0..chain.len() as NodeId).collect();
        assert_eq!(chain, expected);
    }

    #[test]
    fn finds_site_on_imported_graph() {
        let g = full_graph(SRC);
        let chain = token_chain(&g).unwrap();
        let sites = find_chain_sites(&g, &chain);
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].level, LogLevel::Error);
        assert_eq!(g.nodes[chain[sites[0].first] as usize].text, "LOG");
        assert_eq!(g.nodes[chain[sites[0].last] as usize].text, ";");
    }

    #[test]
    fn graph_redaction_matches_source_redaction() {
        // For a statement that no dataflow chain crosses, surgery on the full
        // graph and re-parsing the redacted source must agree node for node.
        // (When chains do cross the site, the two paths legitimately differ:
        // surgery drops the through-edges, a re-parse reroutes them.)
        let src = r#"class A {
    private static Logger LOG;
    void go(int n) {
        int total = n + 1;
        use(total);
        LOG.error("boom");
    }
}
"#;
        let opts = ExtractOptions { min_hops: 0, max_hops: 100 };
        let mut stats = ExtractionStats::default();
        let g = full_graph(src);
        let from_graph = extract_from_graph(&g, opts, &mut stats).unwrap();
        assert_eq!(from_graph.len(), 1);

        let parsed = java::parse_source(src).unwrap();
        let site = &find_log_statements(&parsed)[0];
        let from_source = make_sample("A.java", "proj", src, site, opts).unwrap();

        let a = &from_graph[0];
        let b = &from_source;
        assert_eq!(a.label, b.label);
        assert_eq!(a.graph.node_count(), b.graph.node_count());
        assert_eq!(a.graph.edge_count(), b.graph.edge_count());
        let texts = |g: &ProgramGraph| {
            let mut t: Vec<String> =
                g.nodes.iter().map(|n| n.text.clone()).filter(|t| !t.is_empty()).collect();
            t.sort_unstable();
            t
        };
        assert_eq!(texts(&a.graph), texts(&b.graph));
        assert!(!texts(&a.graph).iter().any(|t| t == "\"boom\""));
    }

    #[test]
    fn marker_sites_found_on_parsed_empty_statements() {
        let src = "class C { void m(int x) { if (x > 0) { ; } work(x); } }";
        let g = full_graph(src);
        let sites = find_marker_sites(&g);
        assert_eq!(sites.len(), 1);
    }

    #[test]
    fn marker_samples_match_source_markers() {
        // A graph round-trip and direct source extraction agree on what the
        // unlabeled sample around a marker looks like.
        let src = "class C { void m(int x) { if (x > 0) { ; } work(x); } }";
        let opts = ExtractOptions { min_hops: 0, max_hops: 3 };
        let g = full_graph(src);
        let from_graph = marker_samples_from_graph(&g, opts).unwrap();
        let from_source =
            crate::extract::markers_from_source("A.java", "proj", src, opts).unwrap();
        assert_eq!(from_graph.len(), 1);
        assert_eq!(from_source.len(), 1);
        assert_eq!(from_graph[0].label, None);
        assert_eq!(from_graph[0].graph.node_count(), from_source[0].graph.node_count());
        assert_eq!(from_graph[0].graph.edge_count(), from_source[0].graph.edge_count());
        assert_eq!(from_graph[0].span, from_source[0].span);
    }

    #[test]
    fn invalid_graph_is_rejected() {
        let mut g = full_graph(SRC);
        g.edges.push(Edge { src: 0, dst: 99999, etype: EdgeType::LastUse });
        let mut stats = ExtractionStats::default();
        let err = extract_from_graph(&g, ExtractOptions::default(), &mut stats);
        assert!(matches!(err, Err(CoreError::Data(_))));
    }

    #[test]
    fn broken_chain_is_rejected() {
        let mut g = full_graph(SRC);
        // Duplicate successor for token 0.
        g.edges.push(Edge { src: 0, dst: 5, etype: EdgeType::NextToken });
        let mut stats = ExtractionStats::default();
        let err = extract_from_graph(&g, ExtractOptions::default(), &mut stats);
        assert!(matches!(err, Err(CoreError::Data(_))));
    }
}
