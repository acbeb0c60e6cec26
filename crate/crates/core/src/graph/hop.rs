//! Hop-bounded neighborhood queries and subgraph induction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{NodeId, ProgramGraph};
use crate::error::{CoreError, Result};

/// Nodes whose undirected hop distance from `center` lies in `[min_hops, max_hops]`.
///
/// Distance is counted over the undirected view of all edge types. The center
/// itself is included iff `min_hops == 0`.
pub fn k_hop_nodes(
    g: &ProgramGraph,
    center: NodeId,
    min_hops: usize,
    max_hops: usize,
) -> Result<BTreeSet<NodeId>> {
    if min_hops > max_hops {
        return Err(CoreError::Config(format!(
            "hop window min {} exceeds max {}",
            min_hops, max_hops
        )));
    }
    if (center as usize) >= g.nodes.len() {
        return Err(CoreError::Graph(format!("k_hop center {} out of range", center)));
    }

    let adj = g.undirected_adjacency();
    let mut dist = vec![usize::MAX; g.nodes.len()];
    let mut queue = VecDeque::new();
    dist[center as usize] = 0;
    queue.push_back(center);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        if d == max_hops {
            continue;
        }
        for &w in &adj[v as usize] {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }

    Ok(dist
        .iter()
        .enumerate()
        .filter(|(_, &d)| d >= min_hops && d <= max_hops)
        .map(|(i, _)| i as NodeId)
        .collect())
}

/// The subgraph induced by `keep`, with nodes re-indexed densely from zero.
///
/// Relative node order is preserved and every edge with both endpoints kept
/// survives, in the original edge-list order. Returns the old-to-new id map
/// alongside so callers can remap a center id.
pub fn induced_subgraph(
    g: &ProgramGraph,
    keep: &BTreeSet<NodeId>,
) -> Result<(ProgramGraph, BTreeMap<NodeId, NodeId>)> {
    let mut remap = BTreeMap::new();
    let mut out = ProgramGraph::new(g.file_path.clone(), g.project.clone());
    for &old in keep {
        if (old as usize) >= g.nodes.len() {
            return Err(CoreError::Graph(format!("induced_subgraph: id {} out of range", old)));
        }
        let new_id = remap.len() as NodeId;
        remap.insert(old, new_id);
        let mut node = g.nodes[old as usize].clone();
        node.id = new_id;
        out.nodes.push(node);
    }
    for e in &g.edges {
        if let (Some(&s), Some(&d)) = (remap.get(&e.src), remap.get(&e.dst)) {
            out.edges.push(super::Edge { src: s, dst: d, etype: e.etype });
        }
    }
    Ok((out, remap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, EdgeType, Node, NodeType};

    fn path_graph(n: usize) -> ProgramGraph {
        let mut g = ProgramGraph::new("p.java", "p");
        for i in 0..n {
            g.nodes.push(Node {
                id: i as NodeId,
                node_type: NodeType::Token,
                text: format!("t{i}"),
                span: None,
            });
        }
        for i in 0..n - 1 {
            g.edges.push(Edge {
                src: i as NodeId,
                dst: (i + 1) as NodeId,
                etype: EdgeType::NextToken,
            });
        }
        g
    }

    #[test]
    fn k_hop_inner_window() {
        let g = path_graph(4);
        let got = k_hop_nodes(&g, 0, 0, 1).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        let got = k_hop_nodes(&g, 0, 2, 3).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn k_hop_rejects_inverted_window() {
        let g = path_graph(3);
        assert!(matches!(k_hop_nodes(&g, 0, 2, 1), Err(CoreError::Config(_))));
    }

    #[test]
    fn induced_identity_preserves_everything() {
        let g = path_graph(5);
        let keep: BTreeSet<NodeId> = (0..5).collect();
        let (sub, remap) = induced_subgraph(&g, &keep).unwrap();
        assert_eq!(sub.nodes, g.nodes);
        assert_eq!(sub.edges, g.edges);
        assert_eq!(remap.len(), 5);
    }

    #[test]
    fn induced_empty() {
        let g = path_graph(3);
        let (sub, remap) = induced_subgraph(&g, &BTreeSet::new()).unwrap();
        assert_eq!(sub.node_count(), 0);
        assert_eq!(sub.edge_count(), 0);
        assert!(remap.is_empty());
    }

    #[test]
    fn induced_keeps_only_internal_edges() {
        // triangle 0-1, 1-2, 2-0
        let mut g = path_graph(3);
        g.edges.push(Edge { src: 2, dst: 0, etype: EdgeType::NextToken });
        let keep: BTreeSet<NodeId> = [0, 1].into_iter().collect();
        let (sub, _) = induced_subgraph(&g, &keep).unwrap();
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.edges[0], Edge { src: 0, dst: 1, etype: EdgeType::NextToken });
    }

    #[test]
    fn induced_rejects_unknown_id() {
        let g = path_graph(3);
        let keep: BTreeSet<NodeId> = [0, 9].into_iter().collect();
        assert!(induced_subgraph(&g, &keep).is_err());
    }
}
