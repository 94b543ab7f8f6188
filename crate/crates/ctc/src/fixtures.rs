//! Small named graphs and a seeded G(n,p) generator, shared by tests,
//! examples and the hidden fixture-generation subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

/// Triangle on {0,1,2}.
pub fn g_tri() -> Graph {
    Graph::from_edges([(0, 1), (1, 2), (0, 2)])
}

/// Two triangles sharing edge (1,2).
pub fn g_bowtie() -> Graph {
    Graph::from_edges([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
}

/// Complete graph on {0,1,2,3}.
pub fn g_k4() -> Graph {
    Graph::from_edges(complete(&[0, 1, 2, 3]))
}

/// Two K4s sharing node 3.
pub fn g_2k4() -> Graph {
    let mut e = complete(&[0, 1, 2, 3]);
    e.extend(complete(&[3, 4, 5, 6]));
    Graph::from_edges(e)
}

/// K4 plus path edges (3,4),(4,5).
pub fn g_k4path() -> Graph {
    let mut e = complete(&[0, 1, 2, 3]);
    e.push((3, 4));
    e.push((4, 5));
    Graph::from_edges(e)
}

/// K4 plus edges (0,4),(4,1).
pub fn g_shortcut() -> Graph {
    let mut e = complete(&[0, 1, 2, 3]);
    e.push((0, 4));
    e.push((4, 1));
    Graph::from_edges(e)
}

/// 5-cycle 0-1-2-3-4-0.
pub fn g_c5() -> Graph {
    Graph::from_edges([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
}

pub fn complete(nodes: &[u64]) -> Vec<(u64, u64)> {
    let mut e = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            e.push((nodes[i], nodes[j]));
        }
    }
    e
}

/// Seeded Erdos-Renyi graph on nodes 0..n. Isolated nodes are dropped by
/// construction since the graph is edge-defined.
pub fn random_gnp(seed: u64, n: u64, p: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(edges)
}

/// Three disjoint K8s plus `bridges` seeded random inter-clique edges.
/// Returns the graph and the three planted communities (external ids).
pub fn planted_k8s(seed: u64, bridges: usize) -> (Graph, Vec<Vec<u64>>) {
    let mut edges = Vec::new();
    let mut communities = Vec::new();
    for c in 0..3u64 {
        let nodes: Vec<u64> = (c * 8..c * 8 + 8).collect();
        edges.extend(complete(&nodes));
        communities.push(nodes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added = 0;
    while added < bridges {
        let a = rng.gen_range(0..24u64);
        let b = rng.gen_range(0..24u64);
        if a == b || a / 8 == b / 8 {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if !edges.contains(&e) {
            edges.push(e);
            added += 1;
        }
    }
    (Graph::from_edges(edges), communities)
}
