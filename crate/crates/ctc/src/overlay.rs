//! Mutable deletion view over an immutable `Graph`. The base is never
//! compacted: liveness is tracked in per-node/per-edge bitsets, supports are
//! kept live per edge, and removals are appended to a replayable log.

use crate::graph::{AdjacencyView, Graph};

/// Nodes and edges removed in one search iteration.
#[derive(Debug, Clone, Default)]
pub struct RemovalRecord {
    pub nodes: Vec<u32>,
    pub edges: Vec<u32>,
}

impl RemovalRecord {
    pub fn removed_count(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }
}

/// Replayable deletion history: the live edge set of the starting graph plus
/// one `RemovalRecord` per iteration.
#[derive(Debug, Clone, Default)]
pub struct RemovalLog {
    pub initial_edges: Vec<u32>,
    pub iterations: Vec<RemovalRecord>,
}

#[derive(Debug, Clone)]
pub struct GraphOverlay<'g> {
    base: &'g Graph,
    node_live: Vec<bool>,
    edge_live: Vec<bool>,
    /// Live triangle count per edge; only meaningful for live edges.
    support: Vec<u32>,
    live_nodes: usize,
    live_edges: usize,
}

impl<'g> GraphOverlay<'g> {
    /// Overlay whose live part is exactly the given edge set (plus its
    /// endpoints), with supports counted within that subgraph.
    pub fn from_edge_ids(base: &'g Graph, edge_ids: &[u32]) -> GraphOverlay<'g> {
        let mut ov = GraphOverlay {
            base,
            node_live: vec![false; base.node_count()],
            edge_live: vec![false; base.edge_count()],
            support: vec![0; base.edge_count()],
            live_nodes: 0,
            live_edges: edge_ids.len(),
        };
        for &e in edge_ids {
            ov.edge_live[e as usize] = true;
            let (u, v) = base.edge(e);
            for w in [u, v] {
                if !ov.node_live[w as usize] {
                    ov.node_live[w as usize] = true;
                    ov.live_nodes += 1;
                }
            }
        }
        ov.recompute_supports();
        ov
    }

    pub fn base(&self) -> &'g Graph {
        self.base
    }

    pub fn is_live_node(&self, v: u32) -> bool {
        self.node_live[v as usize]
    }

    pub fn is_live_edge(&self, e: u32) -> bool {
        self.edge_live[e as usize]
    }

    pub fn live_node_count(&self) -> usize {
        self.live_nodes
    }

    pub fn live_edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn support(&self, e: u32) -> u32 {
        self.support[e as usize]
    }

    pub fn decrement_support(&mut self, e: u32) {
        self.support[e as usize] -= 1;
    }

    pub fn live_nodes_iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.base.node_count() as u32).filter(move |&v| self.node_live[v as usize])
    }

    pub fn live_edges_iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.base.edge_count() as u32).filter(move |&e| self.edge_live[e as usize])
    }

    pub fn remove_node(&mut self, v: u32, record: &mut RemovalRecord) {
        if self.node_live[v as usize] {
            self.node_live[v as usize] = false;
            self.live_nodes -= 1;
            record.nodes.push(v);
        }
    }

    pub fn remove_edge(&mut self, e: u32, record: &mut RemovalRecord) {
        if self.edge_live[e as usize] {
            self.edge_live[e as usize] = false;
            self.live_edges -= 1;
            record.edges.push(e);
        }
    }

    /// Live incident edges of `v` as (neighbor, edge id) pairs, neighbor
    /// ascending. A neighbor counts as live only through a live edge.
    pub fn live_incident(&self, v: u32) -> Vec<(u32, u32)> {
        self.base
            .neighbors(v)
            .iter()
            .filter_map(|&u| {
                let e = self.base.edge_id(v, u).unwrap();
                (self.edge_live[e as usize]).then_some((u, e))
            })
            .collect()
    }

    /// Common neighbors of a live edge, through live edges only.
    pub fn live_common_neighbors(&self, u: u32, v: u32) -> Vec<u32> {
        crate::graph::intersect_sorted(self.base.neighbors(u), self.base.neighbors(v))
            .into_iter()
            .filter(|&w| {
                self.node_live[w as usize]
                    && self.edge_live[self.base.edge_id(u, w).unwrap() as usize]
                    && self.edge_live[self.base.edge_id(v, w).unwrap() as usize]
            })
            .collect()
    }

    /// From-scratch support recount over the live subgraph.
    pub fn recount_support(&self, e: u32) -> u32 {
        let (u, v) = self.base.edge(e);
        self.live_common_neighbors(u, v).len() as u32
    }

    pub fn recompute_supports(&mut self) {
        for e in 0..self.base.edge_count() as u32 {
            if self.edge_live[e as usize] {
                self.support[e as usize] = self.recount_support(e);
            }
        }
    }

    /// Replay `log` through iteration `i` (0 = initial graph) to reproduce
    /// the overlay state `G_i`. Supports are recomputed after replay.
    pub fn replay(base: &'g Graph, log: &RemovalLog, i: usize) -> GraphOverlay<'g> {
        let mut ov = GraphOverlay::from_edge_ids(base, &log.initial_edges);
        let mut scratch = RemovalRecord::default();
        for rec in &log.iterations[..i] {
            for &e in &rec.edges {
                ov.remove_edge(e, &mut scratch);
            }
            for &v in &rec.nodes {
                ov.remove_node(v, &mut scratch);
            }
        }
        ov.recompute_supports();
        ov
    }
}

impl AdjacencyView for GraphOverlay<'_> {
    fn node_count(&self) -> usize {
        self.base.node_count()
    }

    fn is_live(&self, v: u32) -> bool {
        self.node_live[v as usize]
    }

    fn for_each_live_neighbor(&self, v: u32, f: &mut dyn FnMut(u32)) {
        for &u in self.base.neighbors(v) {
            let e = self.base.edge_id(v, u).unwrap();
            if self.edge_live[e as usize] {
                f(u);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::graph::multi_source_bfs;

    fn full_overlay(g: &Graph) -> GraphOverlay<'_> {
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        GraphOverlay::from_edge_ids(g, &all)
    }

    #[test]
    fn supports_match_base_graph() {
        let g = g_bowtie();
        let ov = full_overlay(&g);
        let sup = g.edge_support_all();
        for e in 0..g.edge_count() as u32 {
            assert_eq!(ov.support(e), sup[e as usize]);
            assert_eq!(ov.support(e), ov.recount_support(e));
        }
    }

    #[test]
    fn removed_node_blocks_bfs() {
        let g = g_2k4();
        let mut ov = full_overlay(&g);
        let mut rec = RemovalRecord::default();
        for (_, e) in ov.live_incident(3) {
            ov.remove_edge(e, &mut rec);
        }
        ov.remove_node(3, &mut rec);
        let f = multi_source_bfs(&ov, &[0]);
        for v in [4u32, 5, 6] {
            assert!(!f.reachable(v));
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let g = g_2k4();
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        let mut log = RemovalLog {
            initial_edges: all,
            iterations: vec![],
        };
        let mut ov = full_overlay(&g);
        let mut rec = RemovalRecord::default();
        for (_, e) in ov.live_incident(4) {
            ov.remove_edge(e, &mut rec);
        }
        ov.remove_node(4, &mut rec);
        log.iterations.push(rec);

        let a = GraphOverlay::replay(&g, &log, 1);
        let b = GraphOverlay::replay(&g, &log, 1);
        let live_a: Vec<u32> = a.live_nodes_iter().collect();
        let live_b: Vec<u32> = b.live_nodes_iter().collect();
        assert_eq!(live_a, live_b);
        assert!(!a.is_live_node(4));
        assert_eq!(a.live_edge_count(), ov.live_edge_count());
    }
}
