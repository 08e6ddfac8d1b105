//! Unique-shortest-path enforcement by deterministic seeded weight
//! perturbation, and path extraction on certified graphs.
//!
//! Weights are multiplied by a power-of-two scale of at least 2n^2 and a
//! per-edge jitter below scale/n is added. Any path's jitter total stays
//! below one scale unit, so every scaled shortest path is also a shortest
//! path under the original weights; the jitter then breaks ties.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::GraphError;
use crate::graph::{dijkstra, Edge, WeightedGraph, INF, MAX_WEIGHT};

const USP_RETRIES: u32 = 16;

/// Certificate that a graph has a unique shortest path between every
/// ordered node pair. `jitter` is aligned with the graph's sorted edge list.
#[derive(Debug, Clone)]
pub struct UspCertificate {
    pub scale: u64,
    pub jitter: Vec<u64>,
    pub verified: bool,
}

/// Multiplicity-tracking dijkstra: number of distinct shortest paths from
/// `s` to each node, with saturating counts.
fn count_shortest_paths(g: &WeightedGraph, s: u32) -> Vec<u64> {
    let n = g.n() as usize;
    let mut dist = vec![INF; n + 1];
    let mut cnt = vec![0u64; n + 1];
    let mut done = vec![false; n + 1];
    dist[s as usize] = 0;
    cnt[s as usize] = 1;
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
                cnt[x as usize] = cnt[v as usize];
                heap.push(Reverse((nd, x)));
            } else if nd == dist[x as usize] {
                cnt[x as usize] = cnt[x as usize].saturating_add(cnt[v as usize]);
            }
        }
    }
    cnt
}

/// True if every pair has shortest-path multiplicity exactly one.
pub fn all_paths_unique(g: &WeightedGraph) -> bool {
    (1..=g.n())
        .into_par_iter()
        .all(|s| count_shortest_paths(g, s)[1..].iter().all(|&c| c == 1))
}

/// Reweights `g` so that all shortest paths become unique, returning the
/// new graph (carrying its certificate) and the certificate itself.
///
/// The first attempt uses scale 2n^2 (rounded up to a power of two); when
/// a graph carries too many tied paths for that jitter range (isolation
/// needs range on the order of m * n^2), each retry reseeds and grows the
/// scale fourfold. Fails after 16 attempts or when scaled weights would
/// leave 63 bits.
pub fn make_usp(
    g: &WeightedGraph,
    seed: u64,
) -> Result<(WeightedGraph, UspCertificate), GraphError> {
    let n = g.n() as u64;
    let base_scale = (2 * n * n).next_power_of_two();

    for attempt in 0..USP_RETRIES {
        let scale = base_scale << (2 * attempt.min(16)) as u64;
        let jitter_bound = (scale / n).max(1);
        if g.max_weight() > MAX_WEIGHT / scale {
            return Err(GraphError::UspFailure(attempt));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let m = g.m();
        let jitter: Vec<u64> = if (m as u64) < jitter_bound {
            // Enough room for pairwise-distinct jitter; reject collisions.
            let mut seen = std::collections::HashSet::with_capacity(m);
            let mut out = Vec::with_capacity(m);
            for _ in 0..m {
                loop {
                    let j = rng.random_range(0..jitter_bound);
                    if seen.insert(j) {
                        out.push(j);
                        break;
                    }
                }
            }
            out
        } else {
            (0..m).map(|_| rng.random_range(0..jitter_bound)).collect()
        };

        let edges: Vec<Edge> = g
            .edges()
            .iter()
            .zip(&jitter)
            .map(|(e, &j)| Edge {
                u: e.u,
                v: e.v,
                w: e.w * scale + j,
            })
            .collect();
        let mut scaled = WeightedGraph::new(g.n(), edges)?;
        if all_paths_unique(&scaled) {
            let cert = UspCertificate {
                scale,
                jitter,
                verified: true,
            };
            scaled.usp = Some(cert.clone());
            return Ok((scaled, cert));
        }
    }
    Err(GraphError::UspFailure(USP_RETRIES))
}

/// Checks path uniqueness of `g` as given and attaches a trivial
/// certificate (scale 1, zero jitter). Used for graphs loaded from files
/// that were already reweighted.
pub fn verify_usp(g: &WeightedGraph) -> Result<WeightedGraph, GraphError> {
    if !all_paths_unique(g) {
        return Err(GraphError::UspFailure(0));
    }
    let mut out = g.clone();
    out.usp = Some(UspCertificate {
        scale: 1,
        jitter: vec![0; g.m()],
        verified: true,
    });
    Ok(out)
}

/// The unique shortest path from `u` to `v` as an ordered node sequence.
/// Requires a USP certificate; reversing the arguments reverses the result.
pub fn shortest_path(g: &WeightedGraph, u: u32, v: u32) -> Result<Vec<u32>, GraphError> {
    if !g.is_usp() {
        return Err(GraphError::MissingUspCertificate);
    }
    let tree = dijkstra(g, u);
    Ok(tree.path_to(v))
}
