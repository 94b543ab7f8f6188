//! Global closest-truss-community search: locating the maximal connected
//! k-truss containing the query at the largest k, k-truss maintenance under
//! node deletion, and the greedy Basic / BulkDelete loops.

use std::time::{Duration, Instant};

use crate::error::{CtcError, Result};
use crate::graph::{diameter, multi_source_bfs, Graph, INF};
use crate::overlay::{GraphOverlay, RemovalLog, RemovalRecord};
use crate::truss::TrussIndex;

#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub query: Vec<u32>,
    pub eta: usize,
    pub gamma: u32,
    pub time_budget: Duration,
}

impl QuerySpec {
    pub fn new(query: Vec<u32>) -> QuerySpec {
        QuerySpec {
            query,
            eta: 1000,
            gamma: 3,
            time_budget: Duration::from_secs(3600),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IterationStat {
    /// Graph query distance of the snapshot this iteration started from.
    pub query_distance: u32,
    /// Nodes plus edges removed by this iteration's deletion and cascade.
    pub removed: usize,
}

#[derive(Debug, Clone)]
pub struct CommunityResult {
    pub algorithm: &'static str,
    pub k: u32,
    /// Internal node ids of the answer, ascending.
    pub nodes: Vec<u32>,
    /// Internal edge ids of the answer.
    pub edges: Vec<u32>,
    pub query_distance: u32,
    pub diameter: u32,
    /// Number of deletion iterations executed (including a terminal one).
    pub iterations: usize,
    pub elapsed: Duration,
    pub iteration_log: Vec<IterationStat>,
    pub log: RemovalLog,
    /// Size of the starting graph G0, for free-rider reporting.
    pub g0_nodes: usize,
    /// Set when the time budget expired before natural termination.
    pub partial: bool,
    /// Set by the local search when the expansion cap had to be raised.
    pub eta_raised: bool,
}

impl CommunityResult {
    pub fn external_nodes(&self, g: &Graph) -> Vec<u64> {
        self.nodes.iter().map(|&v| g.external(v)).collect()
    }
}

pub(crate) fn validate_query(g: &Graph, q: &[u32]) -> Result<()> {
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
        if g.degree(v) == 0 {
            return Err(CtcError::NoCommunity(format!("node {v} has no edges")));
        }
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra as usize] = rb;
        }
    }
}

/// Find the maximal connected k-truss containing Q with the largest k: scan
/// trussness levels from min vertex trussness of Q downward, adding edges
/// level by level until Q falls into one component, then take that component
/// of the level-k edge subgraph with supports computed inside it.
pub fn find_g0<'g>(
    g: &'g Graph,
    idx: &TrussIndex,
    q: &[u32],
) -> Result<(u32, GraphOverlay<'g>)> {
    validate_query(g, q)?;
    let k_start = q.iter().map(|&v| idx.vertex_trussness(v)).min().unwrap();

    // bucket edges by trussness for descending sweeps
    let mut by_level: Vec<Vec<u32>> = vec![Vec::new(); k_start as usize + 1];
    for e in 0..g.edge_count() as u32 {
        let t = idx.edge_trussness(e).min(k_start);
        by_level[t as usize].push(e);
    }

    let mut uf = UnionFind::new(g.node_count());
    let mut k_found = None;
    for k in (2..=k_start).rev() {
        for &e in &by_level[k as usize] {
            let (u, v) = g.edge(e);
            uf.union(u, v);
        }
        let root = uf.find(q[0]);
        if q.iter().all(|&v| uf.find(v) == root) {
            k_found = Some(k);
            break;
        }
    }
    let k = k_found.ok_or_else(|| {
        CtcError::NoCommunity("query nodes lie in different components".into())
    })?;

    // BFS from Q over edges with trussness >= k, collecting the component
    let mut in_comp = vec![false; g.node_count()];
    let mut queue = std::collections::VecDeque::new();
    in_comp[q[0] as usize] = true;
    queue.push_back(q[0]);
    let mut edge_ids = Vec::new();
    let mut edge_seen = vec![false; g.edge_count()];
    while let Some(v) = queue.pop_front() {
        for &(u, e) in idx.incident_at_least(v, k) {
            if !edge_seen[e as usize] {
                edge_seen[e as usize] = true;
                edge_ids.push(e);
            }
            if !in_comp[u as usize] {
                in_comp[u as usize] = true;
                queue.push_back(u);
            }
        }
    }
    edge_ids.sort_unstable();
    Ok((k, GraphOverlay::from_edge_ids(g, &edge_ids)))
}

pub enum MaintainOutcome {
    /// Still a connected k-truss containing Q.
    Intact,
    /// Some query node was removed, Q got disconnected, or Q's component has
    /// no edges left.
    Terminated,
}

/// Remove `v_d` and cascade: delete edges whose live support falls below
/// k-2 (decrementing the other two edges of each broken triangle), drop
/// isolated vertices, then restrict to Q's component. Appends one record to
/// `log`.
pub fn truss_maintain(
    ov: &mut GraphOverlay<'_>,
    v_d: &[u32],
    k: u32,
    q: &[u32],
    log: &mut RemovalLog,
) -> MaintainOutcome {
    let g = ov.base();
    let mut record = RemovalRecord::default();
    let mut queue: std::collections::VecDeque<u32> = std::collections::VecDeque::new();
    let mut queued = vec![false; g.edge_count()];

    for &v in v_d {
        if !ov.is_live_node(v) {
            continue;
        }
        for (_, e) in ov.live_incident(v) {
            if !queued[e as usize] {
                queued[e as usize] = true;
                queue.push_back(e);
            }
        }
        ov.remove_node(v, &mut record);
    }

    while let Some(e) = queue.pop_front() {
        let (u, v) = g.edge(e);
        for w in ov.live_common_neighbors(u, v) {
            let eu = g.edge_id(u, w).unwrap();
            let ev = g.edge_id(v, w).unwrap();
            for f in [eu, ev] {
                ov.decrement_support(f);
                if ov.support(f) + 2 < k && !queued[f as usize] {
                    queued[f as usize] = true;
                    queue.push_back(f);
                }
            }
        }
        ov.remove_edge(e, &mut record);
    }

    // drop isolated vertices
    let isolated: Vec<u32> = ov
        .live_nodes_iter()
        .filter(|&v| ov.live_incident(v).is_empty())
        .collect();
    for v in isolated {
        ov.remove_node(v, &mut record);
    }

    // connectivity with Q
    let alive_q = q.iter().all(|&v| ov.is_live_node(v));
    let mut terminated = !alive_q;
    if !terminated {
        let field = multi_source_bfs(ov, &[q[0]]);
        if q.iter().any(|&v| field.dist[v as usize] == INF) {
            terminated = true;
        } else {
            // remove parts disconnected from Q's component
            let outside: Vec<u32> = ov
                .live_nodes_iter()
                .filter(|&v| field.dist[v as usize] == INF)
                .collect();
            for &v in &outside {
                for (_, e) in ov.live_incident(v) {
                    ov.remove_edge(e, &mut record);
                }
                ov.remove_node(v, &mut record);
            }
            if ov.live_edge_count() == 0 {
                // a bare query node is not a community
                terminated = true;
            }
        }
    }
    log.iterations.push(record);
    if terminated {
        MaintainOutcome::Terminated
    } else {
        MaintainOutcome::Intact
    }
}

/// Per-node query distance (max over Q of BFS distance) and its sum variant,
/// plus the graph query distance.
pub struct QueryDistances {
    pub max_dist: Vec<u32>,
    pub sum_dist: Vec<u64>,
    pub gmax: u32,
}

pub fn query_distance_all(ov: &GraphOverlay<'_>, q: &[u32]) -> QueryDistances {
    let n = ov.base().node_count();
    let mut max_dist = vec![0u32; n];
    let mut sum_dist = vec![0u64; n];
    for &src in q {
        let field = multi_source_bfs(ov, &[src]);
        for v in 0..n {
            if ov.is_live_node(v as u32) {
                let d = field.dist[v];
                max_dist[v] = max_dist[v].max(d);
                sum_dist[v] += d as u64;
            }
        }
    }
    let gmax = ov.live_nodes_iter().map(|v| max_dist[v as usize]).max().unwrap_or(0);
    QueryDistances {
        max_dist,
        sum_dist,
        gmax,
    }
}

/// Rebuild the overlay state G_i of a finished run.
pub fn snapshot_restore<'g>(
    g: &'g Graph,
    log: &RemovalLog,
    i: usize,
) -> Result<GraphOverlay<'g>> {
    if i > log.iterations.len() {
        return Err(CtcError::SnapshotOutOfRange(i, log.iterations.len()));
    }
    Ok(GraphOverlay::replay(g, log, i))
}

struct RunState<'g> {
    k: u32,
    ov: GraphOverlay<'g>,
    log: RemovalLog,
    snapshot_dists: Vec<u32>,
    iteration_log: Vec<IterationStat>,
    g0_nodes: usize,
    partial: bool,
}

impl<'g> RunState<'g> {
    fn start(g: &'g Graph, idx: &TrussIndex, q: &[u32]) -> Result<RunState<'g>> {
        let (k, ov) = find_g0(g, idx, q)?;
        let log = RemovalLog {
            initial_edges: ov.live_edges_iter().collect(),
            iterations: Vec::new(),
        };
        let g0_nodes = ov.live_node_count();
        Ok(RunState {
            k,
            ov,
            log,
            snapshot_dists: Vec::new(),
            iteration_log: Vec::new(),
            g0_nodes,
            partial: false,
        })
    }

    /// Pick the best snapshot (minimum recorded query distance, ties to the
    /// latest) and assemble the result.
    fn finish(self, algorithm: &'static str, started: Instant) -> Result<CommunityResult> {
        let mut best = 0usize;
        for (i, &d) in self.snapshot_dists.iter().enumerate() {
            if d <= self.snapshot_dists[best] {
                best = i;
            }
        }
        let snap = snapshot_restore(self.ov.base(), &self.log, best)?;
        let nodes: Vec<u32> = snap.live_nodes_iter().collect();
        let edges: Vec<u32> = snap.live_edges_iter().collect();
        let diam = diameter(&snap)?;
        Ok(CommunityResult {
            algorithm,
            k: self.k,
            nodes,
            edges,
            query_distance: self.snapshot_dists[best],
            diameter: diam,
            iterations: self.log.iterations.len(),
            elapsed: started.elapsed(),
            iteration_log: self.iteration_log,
            log: self.log,
            g0_nodes: self.g0_nodes,
            partial: self.partial,
            eta_raised: false,
        })
    }
}

/// Greedy 2-approximation: repeatedly delete the single furthest node from
/// Q (smallest id on ties), restore the k-truss, and keep the snapshot with
/// the minimum graph query distance.
pub fn basic_search(g: &Graph, idx: &TrussIndex, spec: &QuerySpec) -> Result<CommunityResult> {
    let started = Instant::now();
    let q = &spec.query;
    let mut st = RunState::start(g, idx, q)?;
    loop {
        let dists = query_distance_all(&st.ov, q);
        st.snapshot_dists.push(dists.gmax);
        let u_star = st
            .ov
            .live_nodes_iter()
            .find(|&v| dists.max_dist[v as usize] == dists.gmax)
            .expect("live graph is nonempty");
        let before = st.log.iterations.len();
        let outcome = truss_maintain(&mut st.ov, &[u_star], st.k, q, &mut st.log);
        st.iteration_log.push(IterationStat {
            query_distance: dists.gmax,
            removed: st.log.iterations[before].removed_count(),
        });
        match outcome {
            MaintainOutcome::Terminated => break,
            MaintainOutcome::Intact => {}
        }
        if started.elapsed() > spec.time_budget {
            st.partial = true;
            break;
        }
    }
    st.finish("basic", started)
}

/// BulkDelete: remove the whole shell {u : dist(u,Q) >= d-1} per iteration,
/// where d is the smallest graph query distance seen so far.
pub fn bulk_delete_search(
    g: &Graph,
    idx: &TrussIndex,
    spec: &QuerySpec,
) -> Result<CommunityResult> {
    let started = Instant::now();
    let q = &spec.query;
    let mut st = RunState::start(g, idx, q)?;
    let mut d = u32::MAX;
    loop {
        let dists = query_distance_all(&st.ov, q);
        st.snapshot_dists.push(dists.gmax);
        if dists.gmax < d {
            d = dists.gmax;
        }
        let shell: Vec<u32> = st
            .ov
            .live_nodes_iter()
            .filter(|&v| dists.max_dist[v as usize] + 1 >= d)
            .collect();
        let before = st.log.iterations.len();
        let outcome = truss_maintain(&mut st.ov, &shell, st.k, q, &mut st.log);
        st.iteration_log.push(IterationStat {
            query_distance: dists.gmax,
            removed: st.log.iterations[before].removed_count(),
        });
        match outcome {
            MaintainOutcome::Terminated => break,
            MaintainOutcome::Intact => {}
        }
        if started.elapsed() > spec.time_budget {
            st.partial = true;
            break;
        }
    }
    st.finish("bd", started)
}

/// Variant refinement used by the local search: remove, among the nodes at
/// distance >= d, those whose total distance to the query nodes is maximal.
pub(crate) fn refine_bulk_delete_variant(
    g: &Graph,
    k: u32,
    edge_ids: &[u32],
    q: &[u32],
    budget: Duration,
    started: Instant,
) -> Result<(RemovalLog, Vec<u32>, Vec<IterationStat>, bool)> {
    let mut ov = GraphOverlay::from_edge_ids(g, edge_ids);
    let mut log = RemovalLog {
        initial_edges: ov.live_edges_iter().collect(),
        iterations: Vec::new(),
    };
    let mut snapshot_dists = Vec::new();
    let mut iteration_log = Vec::new();
    let mut partial = false;
    let mut d = u32::MAX;
    loop {
        let dists = query_distance_all(&ov, q);
        snapshot_dists.push(dists.gmax);
        if dists.gmax < d {
            d = dists.gmax;
        }
        let shell: Vec<u32> = ov
            .live_nodes_iter()
            .filter(|&v| dists.max_dist[v as usize] >= d)
            .collect();
        let max_sum = shell
            .iter()
            .map(|&v| dists.sum_dist[v as usize])
            .max()
            .unwrap_or(0);
        let victims: Vec<u32> = shell
            .into_iter()
            .filter(|&v| dists.sum_dist[v as usize] == max_sum)
            .collect();
        let before = log.iterations.len();
        let outcome = truss_maintain(&mut ov, &victims, k, q, &mut log);
        iteration_log.push(IterationStat {
            query_distance: dists.gmax,
            removed: log.iterations[before].removed_count(),
        });
        match outcome {
            MaintainOutcome::Terminated => break,
            MaintainOutcome::Intact => {}
        }
        if started.elapsed() > budget {
            partial = true;
            break;
        }
    }
    Ok((log, snapshot_dists, iteration_log, partial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::oracle::{is_feasible_community, oracle_ctc};
    use crate::overlay::GraphOverlay;
    use crate::truss::TrussIndex;

    fn setup(g: &Graph) -> TrussIndex {
        TrussIndex::build(g)
    }

    fn ext_edges(g: &Graph, r: &CommunityResult) -> Vec<(u32, u32)> {
        r.edges.iter().map(|&e| g.edge(e)).collect()
    }

    #[test]
    fn find_g0_examples() {
        let g = g_k4path();
        let idx = setup(&g);
        let (k, ov) = find_g0(&g, &idx, &[0, 1]).unwrap();
        assert_eq!(k, 4);
        assert_eq!(ov.live_nodes_iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);

        let (k, ov) = find_g0(&g, &idx, &[0, 5]).unwrap();
        assert_eq!(k, 2);
        assert_eq!(ov.live_node_count(), 6);

        let g = g_tri();
        let idx = setup(&g);
        let (k, ov) = find_g0(&g, &idx, &[0, 1, 2]).unwrap();
        assert_eq!(k, 3);
        assert_eq!(ov.live_edge_count(), 3);
    }

    #[test]
    fn find_g0_disconnected_query() {
        let g = Graph::from_edges([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let idx = setup(&g);
        assert!(matches!(
            find_g0(&g, &idx, &[0, 3]),
            Err(CtcError::NoCommunity(_))
        ));
    }

    #[test]
    fn maintain_cascade_on_shared_node() {
        let g = g_2k4();
        let idx = setup(&g);
        let (k, mut ov) = find_g0(&g, &idx, &[0]).unwrap();
        assert_eq!(k, 4);
        let mut log = RemovalLog::default();
        let outcome = truss_maintain(&mut ov, &[4], k, &[0], &mut log);
        assert!(matches!(outcome, MaintainOutcome::Intact));
        assert_eq!(ov.live_nodes_iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        for e in ov.live_edges_iter() {
            assert_eq!(ov.support(e), ov.recount_support(e));
        }
    }

    #[test]
    fn maintain_terminates_when_query_cascades_out() {
        let g = g_k4();
        let idx = setup(&g);
        let (k, mut ov) = find_g0(&g, &idx, &[0]).unwrap();
        let mut log = RemovalLog::default();
        let outcome = truss_maintain(&mut ov, &[3], k, &[0], &mut log);
        assert!(matches!(outcome, MaintainOutcome::Terminated));
    }

    #[test]
    fn maintain_noop_on_intact_truss() {
        let g = g_bowtie();
        let idx = setup(&g);
        let (k, mut ov) = find_g0(&g, &idx, &[0]).unwrap();
        assert_eq!(k, 3);
        let before: Vec<u32> = ov.live_edges_iter().collect();
        let mut log = RemovalLog::default();
        truss_maintain(&mut ov, &[], k, &[0], &mut log);
        assert_eq!(ov.live_edges_iter().collect::<Vec<_>>(), before);
    }

    #[test]
    fn query_distance_examples() {
        let g = Graph::from_edges([(0, 1), (1, 2)]);
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        let ov = GraphOverlay::from_edge_ids(&g, &all);
        let d = query_distance_all(&ov, &[0, 2]);
        assert_eq!(d.max_dist[1], 1);
        assert_eq!(d.max_dist[0], 2);
        assert_eq!(d.gmax, 2);

        let g = g_2k4();
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        let ov = GraphOverlay::from_edge_ids(&g, &all);
        assert_eq!(query_distance_all(&ov, &[0]).gmax, 2);
        let d = query_distance_all(&ov, &[0, 4]);
        assert_eq!(d.max_dist[3], 1);
        assert_eq!(d.max_dist[1], 2);
        assert_eq!(d.gmax, 2);
    }

    #[test]
    fn basic_on_2k4_returns_one_clique() {
        let g = g_2k4();
        let idx = setup(&g);
        let r = basic_search(&g, &idx, &QuerySpec::new(vec![0])).unwrap();
        assert_eq!(r.k, 4);
        assert_eq!(r.nodes, vec![0, 1, 2, 3]);
        assert_eq!(r.diameter, 1);
        assert_eq!(r.query_distance, 1);
        assert!(is_feasible_community(&g, &r.nodes, &ext_edges(&g, &r), &[0], r.k));
    }

    #[test]
    fn basic_on_triangle() {
        let g = g_tri();
        let idx = setup(&g);
        let r = basic_search(&g, &idx, &QuerySpec::new(vec![0])).unwrap();
        assert_eq!(r.k, 3);
        assert_eq!(r.nodes, vec![0, 1, 2]);
        assert_eq!(r.diameter, 1);
    }

    #[test]
    fn bd_on_2k4_keeps_g0() {
        let g = g_2k4();
        let idx = setup(&g);
        let r = bulk_delete_search(&g, &idx, &QuerySpec::new(vec![0])).unwrap();
        assert_eq!(r.k, 4);
        assert_eq!(r.nodes.len(), 7);
        assert_eq!(r.diameter, 2);
        let opt = oracle_ctc(&g, &[0]).unwrap();
        assert!(r.diameter <= 2 * opt.diam_opt + 2);
    }

    #[test]
    fn bd_on_triangle() {
        let g = g_tri();
        let idx = setup(&g);
        let r = bulk_delete_search(&g, &idx, &QuerySpec::new(vec![0, 1, 2])).unwrap();
        assert_eq!(r.nodes, vec![0, 1, 2]);
    }

    #[test]
    fn snapshots_replay_deterministically() {
        let g = g_2k4();
        let idx = setup(&g);
        let r = basic_search(&g, &idx, &QuerySpec::new(vec![0])).unwrap();
        let s0 = snapshot_restore(&g, &r.log, 0).unwrap();
        assert_eq!(s0.live_node_count(), r.g0_nodes);
        let last = r.log.iterations.len() - 1;
        let a = snapshot_restore(&g, &r.log, last).unwrap();
        let b = snapshot_restore(&g, &r.log, last).unwrap();
        assert_eq!(
            a.live_nodes_iter().collect::<Vec<_>>(),
            b.live_nodes_iter().collect::<Vec<_>>()
        );
        assert!(snapshot_restore(&g, &r.log, last + 2).is_err());
    }

    #[test]
    fn per_node_distance_monotone_across_snapshots() {
        let g = g_2k4();
        let idx = setup(&g);
        let r = basic_search(&g, &idx, &QuerySpec::new(vec![0])).unwrap();
        let mut prev: Option<Vec<u32>> = None;
        for i in 0..r.log.iterations.len() {
            let snap = snapshot_restore(&g, &r.log, i).unwrap();
            if snap.live_edge_count() == 0 {
                break;
            }
            let d = query_distance_all(&snap, &[0]);
            if let Some(p) = &prev {
                for v in snap.live_nodes_iter() {
                    assert!(d.max_dist[v as usize] >= p[v as usize]);
                }
            }
            prev = Some(d.max_dist);
        }
    }
}
