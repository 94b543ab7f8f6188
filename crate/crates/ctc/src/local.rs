//! Local community search (LCTC): truss-distance shortest paths, a Steiner
//! tree over the query nodes, bounded expansion, local max-truss extraction
//! and the variant bulk-delete refinement.

use std::collections::VecDeque;
use std::time::Instant;

use crate::error::{CtcError, Result};
use crate::graph::{diameter, Graph, INF};
use crate::overlay::GraphOverlay;
use crate::search::{snapshot_restore, validate_query, CommunityResult, QuerySpec};
use crate::truss::{truss_decompose, TrussIndex};

/// Sentinel for an unreachable pair.
pub const TD_INF: u64 = u64::MAX;

/// Tree spanning Q under truss distance, possibly through non-query nodes.
#[derive(Debug, Clone)]
pub struct SteinerTree {
    /// Edge ids in the host graph. Empty for singleton queries.
    pub edges: Vec<u32>,
    /// Nodes of the tree, ascending. Never empty.
    pub nodes: Vec<u32>,
    /// Minimum edge trussness over the tree; vertex trussness of q when the
    /// tree has no edges.
    pub k_t: u32,
}

/// Exact truss distance between u and v plus a witness path. The distance of
/// a path P is len(P) + gamma * (tau_bar - min edge trussness on P); the
/// minimum over all paths is realized by, for some trussness level t, a
/// shortest path using only edges of trussness >= t, so a BFS per distinct
/// level suffices. Returns None for unreachable pairs.
pub fn truss_distance(
    g: &Graph,
    idx: &TrussIndex,
    u: u32,
    v: u32,
    gamma: u32,
) -> Option<(u64, Vec<u32>)> {
    if u == v {
        return Some((0, vec![u]));
    }
    let tau_bar = idx.tau_bar_empty() as u64;
    let mut best: Option<(u64, Vec<u32>)> = None;
    // descending, so ties settle on the highest-trussness witness
    for t in idx.distinct_levels() {
        let path = level_bfs_path(g, idx, u, v, t)?;
        // distinct_levels is descending; unreachable at level t means
        // unreachable at every higher level too, but lower ones may work
        let Some(path) = path else { continue };
        let value = (path.len() as u64 - 1) + gamma as u64 * (tau_bar - t as u64);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, path));
        }
    }
    best
}

/// BFS from u to v over edges with trussness >= t. Ok(None) when v is not
/// reachable at this level, None only for impossible arguments.
fn level_bfs_path(
    g: &Graph,
    idx: &TrussIndex,
    u: u32,
    v: u32,
    t: u32,
) -> Option<Option<Vec<u32>>> {
    let mut parent = vec![INF; g.node_count()];
    parent[u as usize] = u;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            let mut path = vec![v];
            let mut cur = v;
            while cur != u {
                cur = parent[cur as usize];
                path.push(cur);
            }
            path.reverse();
            return Some(Some(path));
        }
        for &(y, _) in idx.incident_at_least(x, t) {
            if parent[y as usize] == INF {
                parent[y as usize] = x;
                queue.push_back(y);
            }
        }
    }
    Some(None)
}

fn edge_weight(idx: &TrussIndex, e: u32, gamma: u32) -> u64 {
    1 + gamma as u64 * (idx.tau_bar_empty() - idx.edge_trussness(e)) as u64
}

/// KMB construction: MST of the complete truss-distance graph on Q, witness
/// paths substituted for its edges, an MST of that union under per-edge
/// truss weights, and non-query leaves pruned off.
pub fn steiner_tree(g: &Graph, idx: &TrussIndex, q: &[u32], gamma: u32) -> Result<SteinerTree> {
    validate_query(g, q)?;
    if q.len() == 1 {
        return Ok(SteinerTree {
            edges: Vec::new(),
            nodes: vec![q[0]],
            k_t: idx.vertex_trussness(q[0]),
        });
    }

    // complete distance graph on Q
    let mut pair_paths: Vec<(u64, u32, u32, Vec<u32>)> = Vec::new();
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            let (d, path) = truss_distance(g, idx, q[i], q[j], gamma).ok_or_else(|| {
                CtcError::NoCommunity("query nodes lie in different components".into())
            })?;
            pair_paths.push((d, q[i], q[j], path));
        }
    }
    pair_paths.sort_by_key(|&(d, a, b, _)| (d, a, b));

    // Kruskal over Q, then union the witness paths of chosen pairs
    let mut comp: Vec<u32> = (0..g.node_count() as u32).collect();
    fn find(comp: &mut [u32], v: u32) -> u32 {
        let mut r = v;
        while comp[r as usize] != r {
            r = comp[r as usize];
        }
        comp[v as usize] = r;
        r
    }
    let mut union_edges: std::collections::BTreeSet<u32> = std::collections::BTreeSet::new();
    let mut picked = 0;
    for (_, a, b, path) in &pair_paths {
        let (ra, rb) = (find(&mut comp, *a), find(&mut comp, *b));
        if ra == rb {
            continue;
        }
        comp[ra as usize] = rb;
        picked += 1;
        for w in path.windows(2) {
            union_edges.insert(g.edge_id(w[0], w[1]).unwrap());
        }
        if picked == q.len() - 1 {
            break;
        }
    }

    // MST of the union subgraph under truss edge weights
    let mut pool: Vec<u32> = union_edges.into_iter().collect();
    pool.sort_by_key(|&e| (edge_weight(idx, e, gamma), e));
    let mut comp: Vec<u32> = (0..g.node_count() as u32).collect();
    let mut tree_edges = Vec::new();
    for &e in &pool {
        let (a, b) = g.edge(e);
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        if ra != rb {
            comp[ra as usize] = rb;
            tree_edges.push(e);
        }
    }

    // prune non-query leaves until fixpoint
    let is_query = {
        let mut m = vec![false; g.node_count()];
        for &v in q {
            m[v as usize] = true;
        }
        m
    };
    loop {
        let mut deg = std::collections::HashMap::new();
        for &e in &tree_edges {
            let (a, b) = g.edge(e);
            *deg.entry(a).or_insert(0u32) += 1;
            *deg.entry(b).or_insert(0u32) += 1;
        }
        let before = tree_edges.len();
        tree_edges.retain(|&e| {
            let (a, b) = g.edge(e);
            let leaf = |v: u32| deg[&v] == 1 && !is_query[v as usize];
            !leaf(a) && !leaf(b)
        });
        if tree_edges.len() == before {
            break;
        }
    }
    tree_edges.sort_unstable();

    let mut nodes: Vec<u32> = tree_edges
        .iter()
        .flat_map(|&e| {
            let (a, b) = g.edge(e);
            [a, b]
        })
        .collect();
    nodes.extend_from_slice(q);
    nodes.sort_unstable();
    nodes.dedup();
    let k_t = tree_edges
        .iter()
        .map(|&e| idx.edge_trussness(e))
        .min()
        .unwrap_or_else(|| idx.vertex_trussness(q[0]));
    Ok(SteinerTree {
        edges: tree_edges,
        nodes,
        k_t,
    })
}

/// Grow G_t around the tree: FIFO BFS from the tree nodes over edges with
/// trussness >= k_t, admitting new nodes until the cap. Edges between two
/// admitted nodes are always kept, so the tree is contained in the result.
pub fn expand_tree<'g>(
    g: &'g Graph,
    idx: &TrussIndex,
    tree: &SteinerTree,
    k_t: u32,
    eta: usize,
) -> GraphOverlay<'g> {
    let mut in_set = vec![false; g.node_count()];
    let mut count = 0usize;
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &v in &tree.nodes {
        in_set[v as usize] = true;
        count += 1;
        queue.push_back(v);
    }
    let mut edges: std::collections::BTreeSet<u32> = tree.edges.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &(u, e) in idx.incident_at_least(v, k_t) {
            if in_set[u as usize] {
                edges.insert(e);
            } else if count < eta {
                in_set[u as usize] = true;
                count += 1;
                queue.push_back(u);
                edges.insert(e);
            }
        }
    }
    let edge_ids: Vec<u32> = edges.into_iter().collect();
    GraphOverlay::from_edge_ids(g, &edge_ids)
}

/// Decompose G_t locally and return Q's component of the level-k edge
/// subgraph for the largest k <= k_t that keeps Q connected.
pub fn extract_max_truss(
    gt: &GraphOverlay<'_>,
    q: &[u32],
    k_t: u32,
) -> Result<(u32, Vec<u32>)> {
    let g = gt.base();
    let live_edges: Vec<u32> = gt.live_edges_iter().collect();
    let local = Graph::from_edges(live_edges.iter().map(|&e| {
        let (a, b) = g.edge(e);
        (a as u64, b as u64)
    }));
    let local_q: Vec<u32> = q
        .iter()
        .map(|&v| {
            local
                .internal(v as u64)
                .ok_or_else(|| CtcError::NoCommunity(format!("query node {v} not in G_t")))
        })
        .collect::<Result<_>>()?;
    let tau = truss_decompose(&local);
    let local_idx = TrussIndex::from_trussness(&local, tau);
    let k_cap = local_q
        .iter()
        .map(|&v| local_idx.vertex_trussness(v))
        .min()
        .unwrap()
        .min(k_t);
    for k in (2..=k_cap).rev() {
        let field = bfs_at_level(&local, &local_idx, local_q[0], k);
        if local_q.iter().all(|&v| field[v as usize]) {
            let mut edge_ids: Vec<u32> = (0..local.edge_count() as u32)
                .filter(|&e| {
                    let (a, b) = local.edge(e);
                    local_idx.edge_trussness(e) >= k && field[a as usize] && field[b as usize]
                })
                .map(|e| {
                    let (a, b) = local.edge(e);
                    g.edge_id(local.external(a) as u32, local.external(b) as u32)
                        .unwrap()
                })
                .collect();
            edge_ids.sort_unstable();
            return Ok((k, edge_ids));
        }
    }
    Err(CtcError::NoCommunity(
        "no k-truss connects the query inside the expanded graph".into(),
    ))
}

fn bfs_at_level(g: &Graph, idx: &TrussIndex, src: u32, k: u32) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    seen[src as usize] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in idx.incident_at_least(v, k) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

/// LCTC: Steiner tree, bounded expansion, local max-truss extraction, then
/// the variant bulk-delete refinement. When the expansion cap is too small
/// to connect Q it is doubled up to four times the requested value before
/// giving up; such results are flagged.
pub fn lctc_search(g: &Graph, idx: &TrussIndex, spec: &QuerySpec) -> Result<CommunityResult> {
    let started = Instant::now();
    let q = &spec.query;
    let tree = steiner_tree(g, idx, q, spec.gamma)?;
    if spec.eta < tree.nodes.len() {
        return Err(CtcError::InvalidArgument(format!(
            "eta {} is below the Steiner tree size {}",
            spec.eta,
            tree.nodes.len()
        )));
    }

    let mut eta = spec.eta;
    let mut eta_raised = false;
    let (k, h_edges, g0_nodes) = loop {
        let gt = expand_tree(g, idx, &tree, tree.k_t, eta);
        match extract_max_truss(&gt, q, tree.k_t) {
            Ok((k, edges)) => {
                let nodes = GraphOverlay::from_edge_ids(g, &edges).live_node_count();
                break (k, edges, nodes);
            }
            Err(CtcError::NoCommunity(_)) if eta < spec.eta * 4 => {
                eta = (eta * 2).min(spec.eta * 4);
                eta_raised = true;
            }
            Err(e) => return Err(e),
        }
    };

    let (log, snapshot_dists, iteration_log, partial) =
        crate::search::refine_bulk_delete_variant(g, k, &h_edges, q, spec.time_budget, started)?;

    let mut best = 0usize;
    for (i, &d) in snapshot_dists.iter().enumerate() {
        if d <= snapshot_dists[best] {
            best = i;
        }
    }
    let snap = snapshot_restore(g, &log, best)?;
    let nodes: Vec<u32> = snap.live_nodes_iter().collect();
    let edges: Vec<u32> = snap.live_edges_iter().collect();
    let diam = diameter(&snap)?;
    Ok(CommunityResult {
        algorithm: "lctc",
        k,
        nodes,
        edges,
        query_distance: snapshot_dists[best],
        diameter: diam,
        iterations: log.iterations.len(),
        elapsed: started.elapsed(),
        iteration_log,
        log,
        g0_nodes,
        partial,
        eta_raised,
    })
}
