//! Weighted undirected graphs with positive integer weights and the exact
//! shortest-path machinery everything else is checked against.
//!
//! Nodes are 1-based (`1..=n`). Adjacency is stored in compressed sorted
//! form; graphs are immutable after construction and safe to share across
//! threads.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::GraphError;
use crate::usp::UspCertificate;

/// Distance sentinel for "unreachable within the hop budget".
pub const INF: u64 = i64::MAX as u64;

/// Largest admissible edge weight. Leaves headroom so that any simple-path
/// sum of n weights stays below `INF`.
pub const MAX_WEIGHT: u64 = INF >> 17;

/// Saturating distance addition against the `INF` sentinel.
#[inline]
pub fn dist_add(a: u64, b: u64) -> u64 {
    if a == INF || b == INF {
        INF
    } else {
        let s = a + b;
        if s >= INF {
            INF
        } else {
            s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub w: u64,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: u32,
    edges: Vec<Edge>,
    adj_off: Vec<u32>,
    adj: Vec<(u32, u64)>,
    pub(crate) usp: Option<UspCertificate>,
}

impl WeightedGraph {
    /// Builds a graph from an edge list. Rejects self-loops, parallel
    /// edges, out-of-range weights and disconnected inputs.
    pub fn new(n: u32, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::InfeasibleParams("empty graph".into()));
        }
        for e in &mut edges {
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if e.u == 0 || e.u > n {
                return Err(GraphError::BadNode(e.u, n));
            }
            if e.v == 0 || e.v > n {
                return Err(GraphError::BadNode(e.v, n));
            }
            if e.w == 0 || e.w > MAX_WEIGHT {
                return Err(GraphError::BadWeight(e.u, e.v, e.w));
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort();
        for pair in edges.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(GraphError::ParallelEdge(pair[0].u, pair[0].v));
            }
        }

        let mut deg = vec![0u32; n as usize + 2];
        for e in &edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        let mut adj_off = vec![0u32; n as usize + 2];
        for v in 1..=n as usize {
            adj_off[v + 1] = adj_off[v] + deg[v];
        }
        let mut adj = vec![(0u32, 0u64); 2 * edges.len()];
        let mut cursor = adj_off.clone();
        for e in &edges {
            adj[cursor[e.u as usize] as usize] = (e.v, e.w);
            cursor[e.u as usize] += 1;
            adj[cursor[e.v as usize] as usize] = (e.u, e.w);
            cursor[e.v as usize] += 1;
        }
        for v in 1..=n as usize {
            adj[adj_off[v] as usize..adj_off[v + 1] as usize].sort();
        }

        let g = WeightedGraph {
            n,
            edges,
            adj_off,
            adj,
            usp: None,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbor list of `v` with weights.
    pub fn neighbors(&self, v: u32) -> &[(u32, u64)] {
        debug_assert!(v >= 1 && v <= self.n);
        &self.adj[self.adj_off[v as usize] as usize..self.adj_off[v as usize + 1] as usize]
    }

    /// Weight of edge {u,v}, if present.
    pub fn edge_weight(&self, u: u32, v: u32) -> Option<u64> {
        self.neighbors(u)
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| self.neighbors(u)[i].1)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn usp_certificate(&self) -> Option<&UspCertificate> {
        self.usp.as_ref()
    }

    pub fn is_usp(&self) -> bool {
        self.usp.as_ref().map(|c| c.verified).unwrap_or(false)
    }

    pub fn max_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.w).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u128 {
        self.edges.iter().map(|e| e.w as u128).sum()
    }

    fn is_connected(&self) -> bool {
        let n = self.n as usize;
        let mut seen = vec![false; n + 1];
        let mut stack = vec![1u32];
        seen[1] = true;
        let mut count = 1usize;
        while let Some(v) = stack.pop() {
            for &(x, _) in self.neighbors(v) {
                if !seen[x as usize] {
                    seen[x as usize] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
        count == n
    }

    /// True if the graph is a tree (connected with n-1 edges).
    pub fn is_tree(&self) -> bool {
        self.edges.len() as u64 == self.n as u64 - 1
    }

    /// Maximum over sources of the dijkstra eccentricity.
    pub fn diameter(&self) -> u64 {
        (1..=self.n)
            .into_par_iter()
            .map(|s| {
                let t = dijkstra(self, s);
                t.dist[1..].iter().copied().max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

/// Shortest-path tree rooted at `source`. `parent[source] == source`;
/// index 0 of both arrays is unused.
#[derive(Debug, Clone)]
pub struct SpTree {
    pub source: u32,
    pub parent: Vec<u32>,
    pub dist: Vec<u64>,
}

impl SpTree {
    /// Nodes of the unique tree path from the source to `v`, source first.
    pub fn path_to(&self, mut v: u32) -> Vec<u32> {
        let mut path = vec![v];
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
            path.push(v);
        }
        path.reverse();
        path
    }
}

/// Textbook dijkstra with a binary heap. Deterministic: among equal-length
/// alternatives the tree keeps the smallest predecessor id (this only
/// matters before unique-shortest-path reweighting).
pub fn dijkstra(g: &WeightedGraph, s: u32) -> SpTree {
    assert!(s >= 1 && s <= g.n(), "source out of range");
    let n = g.n() as usize;
    let mut dist = vec![INF; n + 1];
    let mut parent = vec![0u32; n + 1];
    let mut done = vec![false; n + 1];
    dist[s as usize] = 0;
    parent[s as usize] = s;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, s)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        for &(x, w) in g.neighbors(v) {
            if done[x as usize] {
                continue;
            }
            let nd = d + w;
            if nd < dist[x as usize] {
                dist[x as usize] = nd;
                parent[x as usize] = v;
                heap.push(Reverse((nd, x)));
            } else if nd == dist[x as usize] && v < parent[x as usize] {
                parent[x as usize] = v;
            }
        }
    }
    SpTree {
        source: s,
        parent,
        dist,
    }
}

/// Batch exact distances for arbitrary (u,v) queries, grouped by source so
/// each distinct source costs one dijkstra. Runs sources in parallel.
pub fn batch_distances(g: &WeightedGraph, queries: &[(u32, u32)]) -> Vec<u64> {
    let mut by_source: Vec<(u32, Vec<usize>)> = Vec::new();
    {
        let mut order: Vec<usize> = (0..queries.len()).collect();
        order.sort_by_key(|&i| (queries[i].0.min(queries[i].1), i));
        for i in order {
            let s = queries[i].0.min(queries[i].1);
            match by_source.last_mut() {
                Some((src, idxs)) if *src == s => idxs.push(i),
                _ => by_source.push((s, vec![i])),
            }
        }
    }
    let chunks: Vec<(Vec<usize>, Vec<u64>)> = by_source
        .into_par_iter()
        .map(|(s, idxs)| {
            let tree = dijkstra(g, s);
            let ds = idxs
                .iter()
                .map(|&i| {
                    let (a, b) = queries[i];
                    let t = if a.min(b) == s { a.max(b) } else { a.min(b) };
                    tree.dist[t as usize]
                })
                .collect();
            (idxs, ds)
        })
        .collect();
    let mut out = vec![0u64; queries.len()];
    for (idxs, ds) in chunks {
        for (i, d) in idxs.into_iter().zip(ds) {
            out[i] = d;
        }
    }
    out
}

/// Extra weighted edges usable by the hop-limited relaxation. Weights must
/// already equal exact distances; `Hopset` guarantees that by construction.
pub trait ExtraEdges {
    fn for_each_edge(&self, f: &mut dyn FnMut(u32, u32, u64));
}

impl ExtraEdges for () {
    fn for_each_edge(&self, _f: &mut dyn FnMut(u32, u32, u64)) {}
}

impl ExtraEdges for [(u32, u32, u64)] {
    fn for_each_edge(&self, f: &mut dyn FnMut(u32, u32, u64)) {
        for &(u, v, w) in self {
            f(u, v, w);
        }
    }
}

/// h rounds of edge relaxation over E plus the extra edges, i.e. the
/// h-limited distance d^h from `s` in the augmented graph. Entries that are
/// unreachable within h hops stay at `INF`.
///
/// Double-buffered so round r only extends (r-1)-hop paths.
pub fn limited_hop_distances<X: ExtraEdges + ?Sized>(
    g: &WeightedGraph,
    extra: &X,
    s: u32,
    h: u32,
) -> Vec<u64> {
    assert!(h >= 1, "hop bound must be at least 1");
    assert!(s >= 1 && s <= g.n(), "source out of range");
    let n = g.n() as usize;
    let mut cur = vec![INF; n + 1];
    cur[s as usize] = 0;
    let mut next = cur.clone();
    for _ in 0..h {
        next.copy_from_slice(&cur);
        let mut relax = |u: u32, v: u32, w: u64| {
            let du = cur[u as usize];
            if du != INF {
                let nd = dist_add(du, w);
                if nd < next[v as usize] {
                    next[v as usize] = nd;
                }
            }
            let dv = cur[v as usize];
            if dv != INF {
                let nd = dist_add(dv, w);
                if nd < next[u as usize] {
                    next[u as usize] = nd;
                }
            }
        };
        for e in g.edges() {
            relax(e.u, e.v, e.w);
        }
        extra.for_each_edge(&mut relax);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

#[cfg(test)]
pub(crate) use tests::path_graph;
