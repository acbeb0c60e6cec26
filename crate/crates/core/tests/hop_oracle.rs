//! Checks hop-neighborhood queries against an independent breadth-first
//! search on graphs built from real parsed sources.

use std::collections::BTreeSet;

use loglevel_core::graph::{induced_subgraph, k_hop_nodes};
use loglevel_core::java::file_to_graph;
use loglevel_core::{NodeId, ProgramGraph};

const SRC: &str = r#"class Ring {
    private int count;

    int step(int input) {
        int next = input + count;
        if (next > 10) {
            next = next - 10;
        }
        count = next;
        return next;
    }

    void reset() {
        count = 0;
    }
}
"#;

/// Plain per-level BFS, structured nothing like the implementation's
/// distance-array walk.
fn bfs_distances(g: &ProgramGraph, center: NodeId) -> Vec<Option<usize>> {
    let n = g.nodes.len();
    let mut dist: Vec<Option<usize>> = vec![None; n];
    dist[center as usize] = Some(0);
    let mut frontier = vec![center];
    let mut level = 0usize;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for e in &g.edges {
                for w in [
                    (e.src == v).then_some(e.dst),
                    (e.dst == v).then_some(e.src),
                ]
                .into_iter()
                .flatten()
                {
                    if dist[w as usize].is_none() {
                        dist[w as usize] = Some(level);
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
    }
    dist
}

#[test]
fn hop_windows_match_bfs_on_a_parsed_graph() {
    let built = file_to_graph("Ring.java", "proj", SRC).unwrap();
    let g = &built.graph;
    assert!(g.node_count() > 40, "fixture should be nontrivial");

    for center in [0u32, 5, (g.node_count() / 2) as u32, (g.node_count() - 1) as u32] {
        let dist = bfs_distances(g, center);
        for (min_hops, max_hops) in [(0, 0), (0, 2), (0, 6), (1, 3), (2, 2), (3, 8), (0, 1000)] {
            let got = k_hop_nodes(g, center, min_hops, max_hops).unwrap();
            let want: BTreeSet<NodeId> = dist
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_some_and(|d| d >= min_hops && d <= max_hops))
                .map(|(i, _)| i as NodeId)
                .collect();
            assert_eq!(got, want, "center {center} window [{min_hops}, {max_hops}]");
        }
    }
}

#[test]
fn whole_graph_is_reachable_from_any_token() {
    // Token chains plus tree edges connect everything in one component.
    let built = file_to_graph("Ring.java", "proj", SRC).unwrap();
    let g = &built.graph;
    let dist = bfs_distances(g, 0);
    assert!(dist.iter().all(|d| d.is_some()));
}

#[test]
fn induced_subgraph_agrees_with_direct_filtering() {
    let built = file_to_graph("Ring.java", "proj", SRC).unwrap();
    let g = &built.graph;
    let keep = k_hop_nodes(g, 10, 0, 3).unwrap();
    let (sub, remap) = induced_subgraph(g, &keep).unwrap();

    assert_eq!(sub.node_count(), keep.len());
    for (&old, &new) in &remap {
        assert_eq!(sub.nodes[new as usize].text, g.nodes[old as usize].text);
        assert_eq!(sub.nodes[new as usize].node_type, g.nodes[old as usize].node_type);
        assert_eq!(sub.nodes[new as usize].id, new);
    }
    // Edge multiset must equal the direct filter of the original list.
    let want: Vec<(NodeId, NodeId, _)> = g
        .edges
        .iter()
        .filter(|e| keep.contains(&e.src) && keep.contains(&e.dst))
        .map(|e| (remap[&e.src], remap[&e.dst], e.etype))
        .collect();
    let got: Vec<(NodeId, NodeId, _)> =
        sub.edges.iter().map(|e| (e.src, e.dst, e.etype)).collect();
    assert_eq!(got, want);
}
