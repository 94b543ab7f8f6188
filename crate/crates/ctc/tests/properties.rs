use proptest::prelude::*;

use ctc::eval::f1;
use ctc::graph::{multi_source_bfs, Graph, INF};
use ctc::local::truss_distance;
use ctc::overlay::{GraphOverlay, RemovalRecord};
use ctc::truss::TrussIndex;

fn arb_graph() -> impl Strategy<Value = Graph> {
    prop::collection::vec((0u64..18, 0u64..18), 1..60)
        .prop_map(|pairs| Graph::from_edges(pairs.into_iter().filter(|(a, b)| a != b)))
        .prop_filter("needs at least one edge", |g| g.edge_count() > 0)
}

proptest! {
    #[test]
    fn overlay_supports_stay_consistent(g in arb_graph(), picks in prop::collection::vec(0usize..64, 0..10)) {
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        let mut ov = GraphOverlay::from_edge_ids(&g, &all);
        let mut rec = RemovalRecord::default();
        for p in picks {
            let live: Vec<u32> = ov.live_edges_iter().collect();
            if live.is_empty() {
                break;
            }
            let e = live[p % live.len()];
            ov.remove_edge(e, &mut rec);
            ov.recompute_supports();
            for f in ov.live_edges_iter() {
                prop_assert_eq!(ov.support(f), ov.recount_support(f));
            }
        }
    }

    #[test]
    fn multi_source_bfs_is_min_of_singles(g in arb_graph(), srcs in prop::collection::vec(0usize..18, 1..4)) {
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        let ov = GraphOverlay::from_edge_ids(&g, &all);
        let sources: Vec<u32> = srcs
            .into_iter()
            .map(|s| (s % g.node_count()) as u32)
            .collect();
        let combined = multi_source_bfs(&ov, &sources);
        for v in 0..g.node_count() as u32 {
            let min_single = sources
                .iter()
                .map(|&s| multi_source_bfs(&ov, &[s]).dist[v as usize])
                .min()
                .unwrap();
            prop_assert_eq!(combined.dist[v as usize], min_single);
        }
    }

    #[test]
    fn truss_distance_gamma_zero_is_bfs(g in arb_graph(), a in 0usize..18, b in 0usize..18) {
        let u = (a % g.node_count()) as u32;
        let v = (b % g.node_count()) as u32;
        let idx = TrussIndex::build(&g);
        let all: Vec<u32> = (0..g.edge_count() as u32).collect();
        let ov = GraphOverlay::from_edge_ids(&g, &all);
        let bfs = multi_source_bfs(&ov, &[u]).dist[v as usize];
        match truss_distance(&g, &idx, u, v, 0) {
            Some((d, path)) => {
                prop_assert_eq!(d, bfs as u64);
                prop_assert_eq!(path.len() as u64, d + 1);
                prop_assert_eq!(path[0], u);
                prop_assert_eq!(*path.last().unwrap(), v);
            }
            None => prop_assert_eq!(bfs, INF),
        }
    }

    #[test]
    fn truss_distance_witness_is_valid_path(g in arb_graph(), a in 0usize..18, b in 0usize..18, gamma in 0u32..5) {
        let u = (a % g.node_count()) as u32;
        let v = (b % g.node_count()) as u32;
        let idx = TrussIndex::build(&g);
        if let Some((d, path)) = truss_distance(&g, &idx, u, v, gamma) {
            let mut min_tau = u32::MAX;
            for w in path.windows(2) {
                let e = g.edge_id(w[0], w[1]);
                prop_assert!(e.is_some());
                min_tau = min_tau.min(idx.edge_trussness(e.unwrap()));
            }
            if path.len() > 1 {
                let recomputed = (path.len() as u64 - 1)
                    + gamma as u64 * (idx.tau_bar_empty() - min_tau) as u64;
                prop_assert_eq!(recomputed, d);
            }
        }
    }

    #[test]
    fn f1_is_bounded_and_symmetric(
        a in prop::collection::btree_set(0u64..40, 1..15),
        b in prop::collection::btree_set(0u64..40, 1..15),
    ) {
        let a: Vec<u64> = a.into_iter().collect();
        let b: Vec<u64> = b.into_iter().collect();
        let (pa, ra, fa) = f1(&a, &b).unwrap();
        let (pb, rb, fb) = f1(&b, &a).unwrap();
        for x in [pa, ra, fa] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        prop_assert_eq!(fa, fb);
        prop_assert_eq!((pa, ra), (rb, pb));
    }

    #[test]
    fn decompose_matches_support_definition(g in arb_graph()) {
        // every edge at trussness t has support >= t-2 inside the level-t subgraph
        let idx = TrussIndex::build(&g);
        for e in 0..g.edge_count() as u32 {
            let t = idx.edge_trussness(e);
            let level: Vec<u32> = (0..g.edge_count() as u32)
                .filter(|&f| idx.edge_trussness(f) >= t)
                .collect();
            let ov = GraphOverlay::from_edge_ids(&g, &level);
            prop_assert!(ov.recount_support(e) + 2 >= t);
        }
    }
}
