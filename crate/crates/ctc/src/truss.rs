//! Truss decomposition by support peeling and the compact truss index:
//! per-edge trussness, trussness-sorted adjacency with level markers, vertex
//! trussness, and bit-exact persistence.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use crate::error::{CtcError, Result};
use crate::graph::Graph;

/// Per-edge trussness via bucket peeling in nondecreasing support order,
/// ties broken by canonical edge key. Every edge has trussness >= 2; an edge
/// in no triangle has trussness exactly 2.
pub fn truss_decompose(g: &Graph) -> Vec<u32> {
    let m = g.edge_count();
    let mut sup = g.edge_support_all();
    let max_sup = sup.iter().copied().max().unwrap_or(0) as usize;
    let mut buckets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); max_sup + 1];
    for (e, &s) in sup.iter().enumerate() {
        buckets[s as usize].insert(e as u32);
    }
    let mut alive = vec![true; m];
    let mut trussness = vec![0u32; m];
    let mut k = 2u32;
    let mut cursor = 0usize;
    let mut remaining = m;

    while remaining > 0 {
        while buckets[cursor].is_empty() {
            cursor += 1;
        }
        let e = *buckets[cursor].iter().next().unwrap();
        buckets[cursor].remove(&e);
        k = k.max(cursor as u32 + 2);
        trussness[e as usize] = k;
        alive[e as usize] = false;
        remaining -= 1;

        let (u, v) = g.edge(e);
        for w in g.common_neighbors(u, v) {
            let eu = g.edge_id(u, w).unwrap();
            let ev = g.edge_id(v, w).unwrap();
            if !alive[eu as usize] || !alive[ev as usize] {
                continue;
            }
            for f in [eu, ev] {
                let s = sup[f as usize] as usize;
                buckets[s].remove(&f);
                sup[f as usize] -= 1;
                buckets[s - 1].insert(f);
                cursor = cursor.min(s - 1);
            }
        }
    }
    trussness
}

/// Compact truss index over an immutable graph.
#[derive(Debug, Clone)]
pub struct TrussIndex {
    edge_trussness: Vec<u32>,
    vertex_trussness: Vec<u32>,
    /// Per node: (neighbor, edge id), ordered by edge trussness descending
    /// then neighbor ascending.
    sorted_adj: Vec<Vec<(u32, u32)>>,
    /// Per node: (k, offset) pairs, k descending; offset is the start of the
    /// run of edges with trussness k in `sorted_adj`.
    level_marks: Vec<Vec<(u32, u32)>>,
    tau_bar_empty: u32,
}

impl TrussIndex {
    pub fn build(g: &Graph) -> TrussIndex {
        let trussness = truss_decompose(g);
        TrussIndex::from_trussness(g, trussness)
    }

    pub fn from_trussness(g: &Graph, edge_trussness: Vec<u32>) -> TrussIndex {
        assert_eq!(edge_trussness.len(), g.edge_count());
        let n = g.node_count();
        let mut sorted_adj = Vec::with_capacity(n);
        let mut level_marks = Vec::with_capacity(n);
        let mut vertex_trussness = vec![0u32; n];
        for v in 0..n as u32 {
            let mut entries: Vec<(u32, u32)> = g
                .neighbors(v)
                .iter()
                .map(|&u| (u, g.edge_id(v, u).unwrap()))
                .collect();
            entries.sort_by(|a, b| {
                let ta = edge_trussness[a.1 as usize];
                let tb = edge_trussness[b.1 as usize];
                tb.cmp(&ta).then(a.0.cmp(&b.0))
            });
            let mut marks = Vec::new();
            let mut prev = u32::MAX;
            for (i, &(_, e)) in entries.iter().enumerate() {
                let t = edge_trussness[e as usize];
                if t != prev {
                    marks.push((t, i as u32));
                    prev = t;
                }
            }
            vertex_trussness[v as usize] =
                entries.first().map_or(0, |&(_, e)| edge_trussness[e as usize]);
            sorted_adj.push(entries);
            level_marks.push(marks);
        }
        let tau_bar_empty = edge_trussness.iter().copied().max().unwrap_or(0);
        TrussIndex {
            edge_trussness,
            vertex_trussness,
            sorted_adj,
            level_marks,
            tau_bar_empty,
        }
    }

    pub fn edge_trussness(&self, e: u32) -> u32 {
        self.edge_trussness[e as usize]
    }

    pub fn edge_trussness_all(&self) -> &[u32] {
        &self.edge_trussness
    }

    pub fn vertex_trussness(&self, v: u32) -> u32 {
        self.vertex_trussness[v as usize]
    }

    pub fn tau_bar_empty(&self) -> u32 {
        self.tau_bar_empty
    }

    pub fn sorted_adj(&self, v: u32) -> &[(u32, u32)] {
        &self.sorted_adj[v as usize]
    }

    pub fn level_marks(&self, v: u32) -> &[(u32, u32)] {
        &self.level_marks[v as usize]
    }

    /// Incident edges of `v` with trussness >= k: a prefix of the sorted
    /// adjacency, located through the level markers.
    pub fn incident_at_least(&self, v: u32, k: u32) -> &[(u32, u32)] {
        let marks = &self.level_marks[v as usize];
        // marks are descending in k; find the first level below k.
        let cut = marks.partition_point(|&(level, _)| level >= k);
        let end = if cut == marks.len() {
            self.sorted_adj[v as usize].len()
        } else {
            marks[cut].1 as usize
        };
        &self.sorted_adj[v as usize][..end]
    }

    /// Distinct edge trussness values, ascending.
    pub fn distinct_levels(&self) -> Vec<u32> {
        let mut levels: Vec<u32> = self.edge_trussness.clone();
        levels.sort_unstable();
        levels.dedup();
        levels
    }
}

const MAGIC: &[u8; 4] = b"CTCX";
const VERSION: u32 = 1;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Write the index: magic, version, n, m, then one (u, v, trussness) record
/// per edge in canonical key order, then an FNV-1a checksum of the records.
pub fn save_index<W: Write>(idx: &TrussIndex, g: &Graph, mut sink: W) -> Result<()> {
    sink.write_all(MAGIC)?;
    sink.write_all(&VERSION.to_le_bytes())?;
    sink.write_all(&(g.node_count() as u64).to_le_bytes())?;
    sink.write_all(&(g.edge_count() as u64).to_le_bytes())?;
    let mut records = Vec::with_capacity(g.edge_count() * 12);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        records.extend_from_slice(&u.to_le_bytes());
        records.extend_from_slice(&v.to_le_bytes());
        records.extend_from_slice(&idx.edge_trussness[e].to_le_bytes());
    }
    sink.write_all(&records)?;
    sink.write_all(&fnv1a64(&records).to_le_bytes())?;
    Ok(())
}

/// Load an index and check it against `g`: node/edge counts and the edge
/// records themselves must match, so a stale index for a different graph is
/// refused. Vertex trussness and level markers are rebuilt from the records.
pub fn load_index<R: Read>(mut source: R, g: &Graph) -> Result<TrussIndex> {
    let mut header = [0u8; 24];
    source
        .read_exact(&mut header)
        .map_err(|_| CtcError::BadIndex("truncated header".into()))?;
    if &header[0..4] != MAGIC {
        return Err(CtcError::BadIndex("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(CtcError::BadIndex(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
    let m = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
    if n != g.node_count() || m != g.edge_count() {
        return Err(CtcError::IndexMismatch(format!(
            "index has n={n}, m={m}; graph has n={}, m={}",
            g.node_count(),
            g.edge_count()
        )));
    }
    let mut records = vec![0u8; m * 12];
    source
        .read_exact(&mut records)
        .map_err(|_| CtcError::BadIndex("truncated records".into()))?;
    let mut checksum = [0u8; 8];
    source
        .read_exact(&mut checksum)
        .map_err(|_| CtcError::BadIndex("missing checksum".into()))?;
    if u64::from_le_bytes(checksum) != fnv1a64(&records) {
        return Err(CtcError::BadIndex("checksum mismatch".into()));
    }
    let mut trussness = Vec::with_capacity(m);
    for (e, chunk) in records.chunks_exact(12).enumerate() {
        let u = u32::from_le_bytes(chunk[0..4].try_into().unwrap());
        let v = u32::from_le_bytes(chunk[4..8].try_into().unwrap());
        let t = u32::from_le_bytes(chunk[8..12].try_into().unwrap());
        if g.edges()[e] != (u, v) {
            return Err(CtcError::IndexMismatch(format!(
                "record {e} is ({u},{v}), graph edge is {:?}",
                g.edges()[e]
            )));
        }
        trussness.push(t);
    }
    Ok(TrussIndex::from_trussness(g, trussness))
}
