//! Experiment harness: F1 / density / size-ratio metrics, seeded query
//! workload generation, and ground-truth handling.

use std::collections::HashSet;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CtcError, Result};
use crate::graph::Graph;
use crate::truss::TrussIndex;

const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

/// Precision, recall and F1 of a found community `c` against ground truth
/// `chat`, both as external id sets.
pub fn f1(c: &[u64], chat: &[u64]) -> Result<(f64, f64, f64)> {
    if c.is_empty() || chat.is_empty() {
        return Err(CtcError::InvalidArgument("empty set in f1".into()));
    }
    let cs: HashSet<u64> = c.iter().copied().collect();
    let hs: HashSet<u64> = chat.iter().copied().collect();
    let inter = cs.intersection(&hs).count() as f64;
    if inter == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let prec = inter / cs.len() as f64;
    let recall = inter / hs.len() as f64;
    Ok((prec, recall, 2.0 * prec * recall / (prec + recall)))
}

pub fn edge_density(node_count: usize, edge_count: usize) -> Result<f64> {
    if node_count < 2 {
        return Err(CtcError::InvalidArgument(
            "density needs at least two nodes".into(),
        ));
    }
    let n = node_count as f64;
    Ok(2.0 * edge_count as f64 / (n * (n - 1.0)))
}

pub fn size_ratio(result_nodes: usize, g0_nodes: usize) -> f64 {
    result_nodes as f64 / g0_nodes as f64
}

#[derive(Debug, Clone)]
pub struct WorkloadParams {
    pub size: usize,
    /// Degree-rank cutoff: candidates are the top `fraction` of nodes by
    /// degree, ties at the threshold included.
    pub fraction: f64,
    /// Upper bound on pairwise BFS distance within a query set.
    pub inter_distance: u32,
    pub count: usize,
    pub seed: u64,
}

impl WorkloadParams {
    fn validate(&self) -> Result<()> {
        if self.size < 1 {
            return Err(CtcError::InvalidArgument("query size must be >= 1".into()));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(CtcError::InvalidArgument(
                "degree fraction must be in (0, 1]".into(),
            ));
        }
        if self.inter_distance < 1 {
            return Err(CtcError::InvalidArgument(
                "inter-distance must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

fn degree_pool(g: &Graph, fraction: f64) -> Vec<u32> {
    let n = g.node_count();
    let mut degrees: Vec<usize> = (0..n as u32).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let cut = (((1.0 - fraction) * n as f64).floor() as usize).min(n - 1);
    let threshold = degrees[cut];
    (0..n as u32).filter(|&v| g.degree(v) >= threshold).collect()
}

fn satisfies_constraints(g: &Graph, idx: &TrussIndex, q: &[u32], l: u32) -> bool {
    // pairwise distance bound, then connectivity over level-2 edges
    for (i, &a) in q.iter().enumerate() {
        let field = crate::graph::multi_source_bfs(g, &[a]);
        for &b in &q[i + 1..] {
            let d = field.dist[b as usize];
            if d == crate::graph::INF || d > l {
                return false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[q[0] as usize] = true;
    let mut stack = vec![q[0]];
    while let Some(v) = stack.pop() {
        for &(u, _) in idx.incident_at_least(v, 2) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                stack.push(u);
            }
        }
    }
    q.iter().all(|&v| seen[v as usize])
}

/// Seeded rejection sampling of query sets: draw `size` distinct candidates
/// from the degree pool, accept when every pair is within `inter_distance`
/// and the set is connected at level 2. Deterministic per seed.
pub fn gen_queries(g: &Graph, idx: &TrussIndex, p: &WorkloadParams) -> Result<Vec<Vec<u32>>> {
    p.validate()?;
    let pool = degree_pool(g, p.fraction);
    if pool.len() < p.size {
        return Err(CtcError::WorkloadInfeasible(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = Vec::with_capacity(p.count);
    let mut rejections = 0usize;
    while out.len() < p.count {
        let mut q: Vec<u32> = pool
            .choose_multiple(&mut rng, p.size)
            .copied()
            .collect();
        q.sort_unstable();
        if satisfies_constraints(g, idx, &q, p.inter_distance) {
            out.push(q);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(CtcError::WorkloadInfeasible(rejections));
            }
        }
    }
    Ok(out)
}

/// Ground-truth communities as external id sets (SNAP cmty format: one
/// community per line, whitespace separated).
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub communities: Vec<Vec<u64>>,
}

impl GroundTruth {
    pub fn parse<R: BufRead>(reader: R) -> Result<GroundTruth> {
        let mut communities = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut ids = Vec::new();
            for tok in line.split_whitespace() {
                let id: u64 = tok.parse().map_err(|_| CtcError::Parse {
                    line: lineno + 1,
                    msg: format!("bad node id {tok:?}"),
                })?;
                ids.push(id);
            }
            ids.sort_unstable();
            ids.dedup();
            communities.push(ids);
        }
        Ok(GroundTruth { communities })
    }

    /// Drop ids that do not resolve against the graph; returns how many were
    /// removed. Communities left empty are discarded.
    pub fn resolve(&mut self, g: &Graph) -> usize {
        let mut dropped = 0;
        for c in &mut self.communities {
            let before = c.len();
            c.retain(|&id| g.internal(id).is_some());
            dropped += before - c.len();
        }
        self.communities.retain(|c| !c.is_empty());
        dropped
    }

    /// Best F1 of `result` over the communities containing every query node;
    /// None when no community contains the full query.
    pub fn best_f1(&self, query: &[u64], result: &[u64]) -> Option<(f64, f64, f64)> {
        let mut best: Option<(f64, f64, f64)> = None;
        for c in &self.communities {
            if !query.iter().all(|id| c.binary_search(id).is_ok()) {
                continue;
            }
            let scores = f1(result, c).ok()?;
            if best.map_or(true, |(_, _, b)| scores.2 > b) {
                best = Some(scores);
            }
        }
        best
    }
}

/// Workload file: one query per line, whitespace-separated external ids;
/// '#' lines are metadata comments.
pub fn parse_workload<R: BufRead>(reader: R) -> Result<Vec<Vec<u64>>> {
    let mut queries = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut ids = Vec::new();
        for tok in line.split_whitespace() {
            let id: u64 = tok.parse().map_err(|_| CtcError::Parse {
                line: lineno + 1,
                msg: format!("bad node id {tok:?}"),
            })?;
            ids.push(id);
        }
        queries.push(ids);
    }
    if queries.is_empty() {
        return Err(CtcError::InvalidArgument("empty workload".into()));
    }
    Ok(queries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn f1_examples() {
        assert_eq!(f1(&[1, 2, 3], &[1, 2, 3]).unwrap(), (1.0, 1.0, 1.0));
        assert_eq!(f1(&[1, 2, 3, 4], &[3, 4, 5, 6]).unwrap(), (0.5, 0.5, 0.5));
        assert_eq!(f1(&[1, 2], &[3, 4]).unwrap(), (0.0, 0.0, 0.0));
        assert!(f1(&[], &[1]).is_err());
    }

    #[test]
    fn f1_is_symmetric() {
        let a = [1u64, 2, 3, 4, 7];
        let b = [2u64, 4, 9];
        let (pa, ra, fa) = f1(&a, &b).unwrap();
        let (pb, rb, fb) = f1(&b, &a).unwrap();
        assert_eq!((pa, ra), (rb, pb));
        assert_eq!(fa, fb);
    }

    #[test]
    fn density_examples() {
        assert_eq!(edge_density(4, 6).unwrap(), 1.0);
        assert_eq!(edge_density(5, 5).unwrap(), 0.5);
        assert!((edge_density(3, 2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(edge_density(1, 0).is_err());
    }

    #[test]
    fn size_ratio_examples() {
        assert_eq!(size_ratio(7, 7), 1.0);
        assert!((size_ratio(4, 7) - 4.0 / 7.0).abs() < 1e-12);
    }

    fn params(size: usize, fraction: f64, l: u32, count: usize, seed: u64) -> WorkloadParams {
        WorkloadParams {
            size,
            fraction,
            inter_distance: l,
            count,
            seed,
        }
    }

    #[test]
    fn gen_singletons_cover_any_node() {
        let g = g_2k4();
        let idx = TrussIndex::build(&g);
        let qs = gen_queries(&g, &idx, &params(1, 1.0, 1, 50, 3)).unwrap();
        assert_eq!(qs.len(), 50);
        for q in qs {
            assert_eq!(q.len(), 1);
            assert!(g.degree(q[0]) >= 1);
        }
    }

    #[test]
    fn gen_pairs_at_distance_one_are_adjacent() {
        let g = g_2k4();
        let idx = TrussIndex::build(&g);
        let qs = gen_queries(&g, &idx, &params(2, 1.0, 1, 40, 5)).unwrap();
        for q in qs {
            assert!(g.edge_id(q[0], q[1]).is_some(), "{q:?} not adjacent");
        }
    }

    #[test]
    fn gen_is_deterministic_per_seed() {
        let g = random_gnp(2, 40, 0.15);
        let idx = TrussIndex::build(&g);
        let p = params(2, 0.8, 2, 30, 99);
        let a = gen_queries(&g, &idx, &p).unwrap();
        let b = gen_queries(&g, &idx, &p).unwrap();
        assert_eq!(a, b);
        let c = gen_queries(&g, &idx, &params(2, 0.8, 2, 30, 100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gen_output_satisfies_own_constraints() {
        let g = random_gnp(8, 50, 0.12);
        let idx = TrussIndex::build(&g);
        let p = params(3, 0.9, 3, 20, 17);
        for q in gen_queries(&g, &idx, &p).unwrap() {
            assert!(satisfies_constraints(&g, &idx, &q, p.inter_distance));
            assert_eq!(q.len(), 3);
        }
    }

    #[test]
    fn gen_reports_infeasible_workloads() {
        // a path has no three pairwise-adjacent nodes
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 3)]);
        let idx = TrussIndex::build(&g);
        assert!(matches!(
            gen_queries(&g, &idx, &params(3, 1.0, 1, 1, 0)),
            Err(CtcError::WorkloadInfeasible(_))
        ));
    }

    #[test]
    fn degree_pool_cutoff() {
        // degrees: star center 4, leaves 1
        let g = Graph::from_edges([(0, 1), (0, 2), (0, 3), (0, 4)]);
        let top = degree_pool(&g, 0.2);
        assert_eq!(top, vec![0]);
        assert_eq!(degree_pool(&g, 1.0).len(), 5);
    }

    #[test]
    fn ground_truth_parse_and_resolve() {
        let text = "# comment\n1 2 3\n4 5\n99 100\n";
        let mut gt = GroundTruth::parse(text.as_bytes()).unwrap();
        assert_eq!(gt.communities.len(), 3);
        let g = Graph::from_edges([(1, 2), (2, 3), (4, 5)]);
        let dropped = gt.resolve(&g);
        assert_eq!(dropped, 2);
        assert_eq!(gt.communities.len(), 2);
    }

    #[test]
    fn best_f1_takes_max_over_containing_communities() {
        let gt = GroundTruth {
            communities: vec![vec![1, 2, 3, 4], vec![1, 2, 9, 10, 11, 12]],
        };
        let (_, _, f) = gt.best_f1(&[1, 2], &[1, 2, 3, 4]).unwrap();
        assert_eq!(f, 1.0);
        // query {9} only lives in the second community
        let (_, _, f) = gt.best_f1(&[9], &[9, 10]).unwrap();
        assert!(f < 1.0);
        assert!(gt.best_f1(&[3, 9], &[3, 9]).is_none());
    }

    #[test]
    fn workload_parse_round_trip() {
        let text = "#seed 7\n1 2\n3 4 5\n";
        let qs = parse_workload(text.as_bytes()).unwrap();
        assert_eq!(qs, vec![vec![1, 2], vec![3, 4, 5]]);
        assert!(parse_workload("# only comments\n".as_bytes()).is_err());
    }
}
