//! Brute-force ground truth on small graphs: fixpoint truss decomposition,
//! maximal k for a query, and exact minimum-diameter / minimum-query-distance
//! communities by subset enumeration. Everything here is independent of the
//! peeling and search implementations it is used to check.

use crate::error::{CtcError, Result};
use crate::graph::Graph;

/// Fixpoint decomposition limit; adjacency rows are single 64-bit masks.
pub const ORACLE_DECOMPOSE_MAX_N: usize = 64;
/// Subset enumeration limit.
pub const ORACLE_ENUM_MAX_N: usize = 16;

/// One feasible community found by enumeration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    pub nodes: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub diameter: u32,
    pub query_distance: u32,
}

#[derive(Debug, Clone)]
pub struct OracleAnswer {
    pub k_opt: u32,
    pub diam_opt: u32,
    pub min_query_distance: u32,
    /// Witness attaining `diam_opt`.
    pub diam_witness: Candidate,
    /// Witness attaining `min_query_distance`.
    pub dist_witness: Candidate,
}

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    let mut rows = vec![0u64; g.node_count()];
    for &(u, v) in g.edges() {
        rows[u as usize] |= 1 << v;
        rows[v as usize] |= 1 << u;
    }
    rows
}

fn guard(g: &Graph, limit: usize) -> Result<()> {
    if g.node_count() > limit {
        return Err(CtcError::OracleSizeGuard(g.node_count(), limit));
    }
    Ok(())
}

/// Remove edges with support < k-2 until none remain; support is recounted
/// from the rows on every pass.
fn fixpoint(rows: &mut [u64], k: u32) {
    loop {
        let mut removals: Vec<(usize, usize)> = Vec::new();
        for u in 0..rows.len() {
            // iterate v > u with edge (u,v)
            let mut r = rows[u] & !(((1u64 << u) - 1) | (1 << u));
            while r != 0 {
                let v = r.trailing_zeros() as usize;
                r &= r - 1;
                let sup = (rows[u] & rows[v]).count_ones();
                if sup + 2 < k {
                    removals.push((u, v));
                }
            }
        }
        if removals.is_empty() {
            return;
        }
        for (u, v) in removals {
            rows[u] &= !(1 << v);
            rows[v] &= !(1 << u);
        }
    }
}

/// Nodes reachable from `start` through live edges, as a mask.
fn component(rows: &[u64], start: usize) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= rows[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen
}

fn bfs_dists(rows: &[u64], start: usize, within: u64) -> Vec<u32> {
    let mut dist = vec![u32::MAX; rows.len()];
    dist[start] = 0;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    let mut d = 0;
    while frontier != 0 {
        d += 1;
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= rows[v] & within;
        }
        frontier = next & !seen;
        seen |= frontier;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            dist[v] = d;
        }
    }
    dist
}

fn mask_nodes(mask: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

fn live_edges_within(rows: &[u64], within: u64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for u in mask_nodes(within) {
        let mut r = rows[u as usize] & within & !((1u64 << u) | ((1u64 << u) - 1));
        while r != 0 {
            let v = r.trailing_zeros();
            r &= r - 1;
            out.push((u, v));
        }
    }
    out
}

/// Per-edge trussness by fixpoint: for each k ascending, shrink to the
/// maximal subgraph with all supports >= k-2; an edge dropped while moving
/// to level k has trussness k-1.
pub fn oracle_truss_decompose(g: &Graph) -> Result<Vec<u32>> {
    guard(g, ORACLE_DECOMPOSE_MAX_N)?;
    let mut rows = adjacency_masks(g);
    let mut tau = vec![0u32; g.edge_count()];
    let mut k = 3u32;
    loop {
        let before = rows.clone();
        fixpoint(&mut rows, k);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let had = before[u as usize] & (1 << v) != 0;
            let has = rows[u as usize] & (1 << v) != 0;
            if had && !has {
                tau[e] = k - 1;
            }
        }
        if rows.iter().all(|&r| r == 0) {
            return Ok(tau);
        }
        k += 1;
    }
}

fn check_query(g: &Graph, q: &[u32]) -> Result<()> {
    if q.is_empty() {
        return Err(CtcError::InvalidQuery("empty query".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for &v in q {
        if (v as usize) >= g.node_count() {
            return Err(CtcError::InvalidQuery(format!("node {v} out of range")));
        }
        if !seen.insert(v) {
            return Err(CtcError::InvalidQuery(format!("duplicate node {v}")));
        }
    }
    Ok(())
}

/// True when every query node has a live incident edge and all of Q sits in
/// one component of `rows`.
fn query_connected(rows: &[u64], q: &[u32]) -> Option<u64> {
    for &v in q {
        if rows[v as usize] == 0 {
            return None;
        }
    }
    let comp = component(rows, q[0] as usize);
    q.iter().all(|&v| comp & (1 << v) != 0).then_some(comp)
}

/// Largest k whose level-k fixpoint keeps Q in one component.
pub fn oracle_max_k(g: &Graph, q: &[u32]) -> Result<u32> {
    guard(g, ORACLE_DECOMPOSE_MAX_N)?;
    check_query(g, q)?;
    let mut rows = adjacency_masks(g);
    let mut best = None;
    let mut k = 2u32;
    loop {
        fixpoint(&mut rows, k);
        if query_connected(&rows, q).is_none() {
            break;
        }
        best = Some(k);
        k += 1;
    }
    best.ok_or_else(|| CtcError::NoCommunity("query nodes are not connected".into()))
}

fn candidate_from(rows: &[u64], comp: u64, q: &[u32]) -> Candidate {
    let nodes = mask_nodes(comp);
    let mut diameter = 0;
    let mut per_node_qdist = vec![0u32; rows.len()];
    for &s in &nodes {
        let dist = bfs_dists(rows, s as usize, comp);
        for &v in &nodes {
            diameter = diameter.max(dist[v as usize]);
        }
        if q.contains(&s) {
            for &v in &nodes {
                per_node_qdist[v as usize] = per_node_qdist[v as usize].max(dist[v as usize]);
            }
        }
    }
    let query_distance = nodes
        .iter()
        .map(|&v| per_node_qdist[v as usize])
        .max()
        .unwrap_or(0);
    Candidate {
        nodes,
        edges: live_edges_within(rows, comp),
        diameter,
        query_distance,
    }
}

/// Every connected k-truss containing Q realizable as the Q-component of the
/// k-truss fixpoint of some induced subgraph. Covers all optimal solutions.
fn enumerate_candidates(g: &Graph, q: &[u32], k: u32) -> Vec<Candidate> {
    let rows = adjacency_masks(g);
    let n = g.node_count();
    let qmask: u64 = q.iter().fold(0, |m, &v| m | (1 << v));
    let others: Vec<u32> = (0..n as u32).filter(|v| !q.contains(v)).collect();
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for mask in 0u64..(1u64 << others.len()) {
        let mut smask = qmask;
        for (i, &v) in others.iter().enumerate() {
            if mask & (1 << i) != 0 {
                smask |= 1 << v;
            }
        }
        let mut sub: Vec<u64> = rows.iter().map(|&r| r & smask).collect();
        for v in 0..n {
            if smask & (1 << v) == 0 {
                sub[v] = 0;
            }
        }
        fixpoint(&mut sub, k);
        if q.is_empty() {
            // query-independent enumeration: every nonempty component counts
            let mut covered = 0u64;
            for v in 0..n {
                if sub[v] != 0 && covered & (1 << v) == 0 {
                    let comp = component(&sub, v);
                    covered |= comp;
                    let cand = candidate_from(&sub, comp, q);
                    if seen.insert((cand.nodes.clone(), cand.edges.clone())) {
                        out.push(cand);
                    }
                }
            }
        } else if let Some(comp) = query_connected(&sub, q) {
            let cand = candidate_from(&sub, comp, q);
            if seen.insert((cand.nodes.clone(), cand.edges.clone())) {
                out.push(cand);
            }
        }
    }
    out
}

/// Exact optimum by enumeration: the connected k-truss containing Q (largest
/// k) with minimum diameter, plus the minimum achievable query distance.
pub fn oracle_ctc(g: &Graph, q: &[u32]) -> Result<OracleAnswer> {
    guard(g, ORACLE_ENUM_MAX_N)?;
    check_query(g, q)?;
    let k = oracle_max_k(g, q)?;
    let cands = enumerate_candidates(g, q, k);
    assert!(!cands.is_empty(), "max-k query must have a candidate");
    let diam_witness = cands
        .iter()
        .min_by(|a, b| a.diameter.cmp(&b.diameter).then(a.nodes.cmp(&b.nodes)))
        .unwrap()
        .clone();
    let dist_witness = cands
        .iter()
        .min_by(|a, b| {
            a.query_distance
                .cmp(&b.query_distance)
                .then(a.nodes.cmp(&b.nodes))
        })
        .unwrap()
        .clone();
    Ok(OracleAnswer {
        k_opt: k,
        diam_opt: diam_witness.diameter,
        min_query_distance: dist_witness.query_distance,
        diam_witness,
        dist_witness,
    })
}

/// Minimum graph query distance over all connected k-trusses containing Q.
pub fn oracle_min_query_distance(g: &Graph, q: &[u32], k: u32) -> Result<u32> {
    guard(g, ORACLE_ENUM_MAX_N)?;
    check_query(g, q)?;
    let cands = enumerate_candidates(g, q, k);
    cands
        .iter()
        .map(|c| c.query_distance)
        .min()
        .ok_or_else(|| CtcError::NoCommunity(format!("no connected {k}-truss contains the query")))
}

/// All optimal communities for Q at the largest k (minimum diameter), deduped.
pub fn oracle_all_optimal(g: &Graph, q: &[u32]) -> Result<(u32, u32, Vec<Candidate>)> {
    guard(g, ORACLE_ENUM_MAX_N)?;
    check_query(g, q)?;
    let k = oracle_max_k(g, q)?;
    let cands = enumerate_candidates(g, q, k);
    let diam_opt = cands.iter().map(|c| c.diameter).min().unwrap();
    let optima = cands
        .into_iter()
        .filter(|c| c.diameter == diam_opt)
        .collect();
    Ok((k, diam_opt, optima))
}

/// Query-independent optima: connected subgraphs of maximum trussness with
/// minimum diameter, over all induced subgraphs.
pub fn oracle_query_independent_optima(g: &Graph) -> Result<(u32, u32, Vec<Candidate>)> {
    guard(g, ORACLE_ENUM_MAX_N)?;
    if g.edge_count() == 0 {
        return Err(CtcError::NoCommunity("graph has no edges".into()));
    }
    let tau = oracle_truss_decompose(g)?;
    let k = tau.iter().copied().max().unwrap();
    let cands = enumerate_candidates(g, &[], k);
    let diam_opt = cands.iter().map(|c| c.diameter).min().unwrap();
    let optima = cands
        .into_iter()
        .filter(|c| c.diameter == diam_opt)
        .collect();
    Ok((k, diam_opt, optima))
}

/// Feasibility check used to validate oracle witnesses and emitted
/// communities: connected, contains Q, all supports >= k-2 within the set.
pub fn is_feasible_community(
    g: &Graph,
    nodes: &[u32],
    edges: &[(u32, u32)],
    q: &[u32],
    k: u32,
) -> bool {
    if nodes.is_empty() || edges.is_empty() {
        return false;
    }
    if !q.iter().all(|v| nodes.contains(v)) {
        return false;
    }
    let node_set: std::collections::HashSet<u32> = nodes.iter().copied().collect();
    let edge_set: std::collections::HashSet<(u32, u32)> = edges
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    for &(u, v) in &edge_set {
        if g.edge_id(u, v).is_none() || !node_set.contains(&u) || !node_set.contains(&v) {
            return false;
        }
        let sup = nodes
            .iter()
            .filter(|&&w| {
                w != u
                    && w != v
                    && edge_set.contains(&(u.min(w), u.max(w)))
                    && edge_set.contains(&(v.min(w), v.max(w)))
            })
            .count() as u32;
        if sup + 2 < k {
            return false;
        }
    }
    // connectivity over the edge set
    let mut adj: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
    for &(u, v) in &edge_set {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![nodes[0]];
    seen.insert(nodes[0]);
    while let Some(v) = stack.pop() {
        for &u in adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
            if seen.insert(u) {
                stack.push(u);
            }
        }
    }
    nodes.iter().all(|v| seen.contains(v))
}
