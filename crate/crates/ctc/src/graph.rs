//! Undirected simple graph with dense internal ids, sorted adjacency and
//! canonical edge keys (u < v). External ids from input files are mapped to
//! a dense 0..n range; all public output reports external ids.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{CtcError, Result};

pub const INF: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct Graph {
    /// internal -> external id, ascending.
    ext_ids: Vec<u64>,
    ext_to_int: HashMap<u64, u32>,
    /// Sorted neighbor lists over internal ids.
    adj: Vec<Vec<u32>>,
    /// Canonical edges (u < v), sorted ascending; the index is the edge id.
    edges: Vec<(u32, u32)>,
    edge_index: HashMap<(u32, u32), u32>,
}

impl Graph {
    /// Build a graph from external-id pairs. Self-loops are dropped and
    /// duplicate edges collapse to one. Internal ids are assigned by sorting
    /// the external ids, so construction is deterministic for any input order.
    pub fn from_edges<I>(pairs: I) -> Graph
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut raw: Vec<(u64, u64)> = pairs
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        raw.sort_unstable();
        raw.dedup();

        let mut ext_ids: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
        ext_ids.sort_unstable();
        ext_ids.dedup();
        let ext_to_int: HashMap<u64, u32> = ext_ids
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();

        let mut edges: Vec<(u32, u32)> = raw
            .iter()
            .map(|&(a, b)| {
                let (u, v) = (ext_to_int[&a], ext_to_int[&b]);
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();

        let mut adj = vec![Vec::new(); ext_ids.len()];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();

        Graph {
            ext_ids,
            ext_to_int,
            adj,
            edges,
            edge_index,
        }
    }

    /// Parse whitespace-separated integer pairs, one edge per line. Lines
    /// starting with '#' are comments.
    pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut pairs = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let a = it.next();
            let b = it.next();
            match (a, b) {
                (Some(a), Some(b)) => {
                    let a: u64 = a.parse().map_err(|_| CtcError::Parse {
                        line: lineno + 1,
                        msg: format!("bad token {a:?}"),
                    })?;
                    let b: u64 = b.parse().map_err(|_| CtcError::Parse {
                        line: lineno + 1,
                        msg: format!("bad token {b:?}"),
                    })?;
                    pairs.push((a, b));
                }
                _ => {
                    return Err(CtcError::Parse {
                        line: lineno + 1,
                        msg: "expected two integers".into(),
                    })
                }
            }
        }
        Ok(Graph::from_edges(pairs))
    }

    pub fn node_count(&self) -> usize {
        self.ext_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, eid: u32) -> (u32, u32) {
        self.edges[eid as usize]
    }

    pub fn edge_id(&self, u: u32, v: u32) -> Option<u32> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn external(&self, v: u32) -> u64 {
        self.ext_ids[v as usize]
    }

    pub fn internal(&self, ext: u64) -> Option<u32> {
        self.ext_to_int.get(&ext).copied()
    }

    pub fn external_ids(&self) -> &[u64] {
        &self.ext_ids
    }

    /// Sorted intersection of the two neighbor lists.
    pub fn common_neighbors(&self, u: u32, v: u32) -> Vec<u32> {
        intersect_sorted(self.neighbors(u), self.neighbors(v))
    }

    /// Triangle support of every edge, by sorted-adjacency intersection.
    pub fn edge_support_all(&self) -> Vec<u32> {
        self.edges
            .iter()
            .map(|&(u, v)| count_intersect_sorted(self.neighbors(u), self.neighbors(v)))
            .collect()
    }
}

pub fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn count_intersect_sorted(a: &[u32], b: &[u32]) -> u32 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Hop distances from a source set; `INF` marks unreachable nodes.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub dist: Vec<u32>,
}

impl DistanceField {
    pub fn reachable(&self, v: u32) -> bool {
        self.dist[v as usize] != INF
    }
}

/// Adjacency access shared by `Graph` and `GraphOverlay` so BFS-based
/// operations run on either.
pub trait AdjacencyView {
    fn node_count(&self) -> usize;
    fn is_live(&self, v: u32) -> bool;
    fn for_each_live_neighbor(&self, v: u32, f: &mut dyn FnMut(u32));
}

impl AdjacencyView for Graph {
    fn node_count(&self) -> usize {
        self.ext_ids.len()
    }

    fn is_live(&self, _v: u32) -> bool {
        true
    }

    fn for_each_live_neighbor(&self, v: u32, f: &mut dyn FnMut(u32)) {
        for &u in self.neighbors(v) {
            f(u);
        }
    }
}

/// BFS from a set of sources over the live part of the view.
pub fn multi_source_bfs<V: AdjacencyView + ?Sized>(view: &V, sources: &[u32]) -> DistanceField {
    let mut dist = vec![INF; view.node_count()];
    let mut queue = std::collections::VecDeque::new();
    for &s in sources {
        if view.is_live(s) && dist[s as usize] == INF {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        view.for_each_live_neighbor(v, &mut |u| {
            if dist[u as usize] == INF {
                dist[u as usize] = d + 1;
                queue.push_back(u);
            }
        });
    }
    DistanceField { dist }
}

/// Exact diameter by all-source BFS. Errors on disconnected input.
pub fn diameter<V: AdjacencyView + ?Sized>(view: &V) -> Result<u32> {
    let live: Vec<u32> = (0..view.node_count() as u32)
        .filter(|&v| view.is_live(v))
        .collect();
    if live.is_empty() {
        return Err(CtcError::Disconnected);
    }
    let mut diam = 0;
    for &s in &live {
        let field = multi_source_bfs(view, &[s]);
        for &v in &live {
            let d = field.dist[v as usize];
            if d == INF {
                return Err(CtcError::Disconnected);
            }
            diam = diam.max(d);
        }
    }
    Ok(diam)
}
