//! Skeleton dimension measurement and the randomized 3-hopset built from a
//! short-range 2-hopset plus geometrically growing distance levels.
//!
//! The skeleton of a shortest-path tree keeps the points of its geometric
//! realization whose reach (distance to the farthest descendant leaf) is at
//! least alpha times their distance from the root. The skeleton dimension
//! is the maximum number of such points on any cut sphere, over all roots
//! and radii. Level sets pick, per node and distance scale D, the
//! minimum-rank vertex in the window [D/4, D/2] of every long shortest
//! path, yielding first-hop arcs whose count is bounded by the dimension.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GraphError, HopsetError, OracleError};
use crate::graph::{dijkstra, SpTree, WeightedGraph};
use crate::hopset::{Hopset, Part};
use crate::oracle::{validate_oracle, ThreeHopOracle, ValidationScope};
use crate::ratio::Ratio;

#[derive(Debug, Clone)]
pub struct SkeletonProfile {
    /// Skeleton dimension at alpha = 1/2.
    pub k: u32,
    /// Width at the requested alpha.
    pub k_alpha: u32,
    pub alpha: Ratio,
    /// Max cut width per root node (index 1..=n), at the requested alpha.
    pub per_node: Vec<u32>,
    /// (root, radius) achieving the requested-alpha maximum.
    pub witness: Option<(u32, Ratio)>,
}

fn children_of(tree: &SpTree, n: u32) -> Vec<Vec<u32>> {
    let mut ch = vec![Vec::new(); n as usize + 1];
    for v in 1..=n {
        let p = tree.parent[v as usize];
        if p != v {
            ch[p as usize].push(v);
        }
    }
    ch
}

/// reach[v]: distance from v to the farthest leaf below it in the tree.
fn reaches(tree: &SpTree, n: u32) -> Vec<u64> {
    let mut order: Vec<u32> = (1..=n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(tree.dist[v as usize]));
    let mut reach = vec![0u64; n as usize + 1];
    for &v in &order {
        let p = tree.parent[v as usize];
        if p != v {
            let up = tree.dist[v as usize] - tree.dist[p as usize] + reach[v as usize];
            reach[p as usize] = reach[p as usize].max(up);
        }
    }
    reach
}

/// Max cut width of the alpha-skeleton of one root's tree, by an event
/// sweep over the O(m) radii where edges enter or leave the skeleton.
/// Works in the exact scaled domain r' = r * (a+b) for alpha = a/b.
fn sweep_root(tree: &SpTree, n: u32, alpha: Ratio) -> (u32, Option<Ratio>) {
    let (a, b) = (alpha.num(), alpha.den());
    let reach = reaches(tree, n);
    // Edge (parent -> v) carries skeleton points at radii
    // (dist[parent], min(dist[v], reach_top(v) / (1 + alpha))], where
    // reach_top(v) = dist[v] + reach[v].
    let mut events: Vec<(u128, i32)> = Vec::new();
    for v in 1..=n {
        let p = tree.parent[v as usize];
        if p == v {
            continue;
        }
        let lo = tree.dist[p as usize] as u128 * (a + b);
        let reach_top = tree.dist[v as usize] as u128 + reach[v as usize] as u128;
        let hi = (tree.dist[v as usize] as u128 * (a + b)).min(reach_top * b);
        if lo < hi {
            events.push((lo, 1));
            events.push((hi, -1));
        }
    }
    events.sort_unstable();
    let mut best: u32 = 0;
    let mut best_at: Option<(u128, u128)> = None;
    let mut cur: i64 = 0;
    let mut i = 0;
    while i < events.len() {
        let c = events[i].0;
        while i < events.len() && events[i].0 == c {
            cur += events[i].1 as i64;
            i += 1;
        }
        if cur as u32 > best {
            best = cur as u32;
            let next = events.get(i).map(|e| e.0).unwrap_or(c + 1);
            best_at = Some((c, next));
        }
    }
    let witness = best_at.map(|(c, next)| Ratio::new(c + next, 2 * (a + b)));
    (best, witness)
}

/// Measures the alpha-skeleton dimension of a USP graph (and always also
/// the alpha = 1/2 value, which the constructions use as k).
pub fn skeleton_dimension(g: &WeightedGraph, alpha: Ratio) -> Result<SkeletonProfile, GraphError> {
    if !g.is_usp() {
        return Err(GraphError::MissingUspCertificate);
    }
    let n = g.n();
    let half = Ratio::new(1, 2);
    let rows: Vec<(u32, Option<Ratio>, u32)> = (1..=n)
        .into_par_iter()
        .map(|u| {
            let tree = dijkstra(g, u);
            let (w, at) = sweep_root(&tree, n, alpha);
            let w_half = if alpha == half {
                w
            } else {
                sweep_root(&tree, n, half).0
            };
            (w, at, w_half)
        })
        .collect();
    let per_node: Vec<u32> = rows.iter().map(|r| r.0).collect();
    let k = rows.iter().map(|r| r.2).max().unwrap_or(0);
    let k_alpha = per_node.iter().copied().max().unwrap_or(0);
    let witness = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.0 == k_alpha)
        .filter_map(|(i, r)| r.1.map(|rad| (i as u32 + 1, rad)))
        .next();
    let mut per_node_1 = vec![0u32; n as usize + 1];
    per_node_1[1..].copy_from_slice(&per_node);
    Ok(SkeletonProfile {
        k,
        k_alpha,
        alpha,
        per_node: per_node_1,
        witness,
    })
}

/// Splits every edge longer than k * L (L = average edge length) into a
/// chain of at most ceil(w / floor(kL)) unit pieces of the same total
/// weight. Distances between original nodes are unchanged. Fails if the
/// node count would grow beyond 3x.
pub fn subdivide_long_edges(g: &WeightedGraph, k: u32) -> Result<WeightedGraph, GraphError> {
    let m = g.m() as u128;
    let total: u128 = g.total_weight();
    // threshold kL as an exact rational: w > kL  <=>  w * m > k * total
    let too_long = |w: u64| (w as u128) * m > k as u128 * total;
    let piece = ((k as u128 * total / m) as u64).max(1);

    let mut edges = Vec::with_capacity(g.m());
    let mut next = g.n();
    for e in g.edges() {
        if !too_long(e.w) {
            edges.push(*e);
            continue;
        }
        let q = e.w.div_ceil(piece);
        let mut prev = e.u;
        let mut rest = e.w;
        for _ in 0..q - 1 {
            next += 1;
            edges.push(crate::graph::Edge {
                u: prev.min(next),
                v: prev.max(next),
                w: piece,
            });
            prev = next;
            rest -= piece;
        }
        edges.push(crate::graph::Edge {
            u: prev.min(e.v),
            v: prev.max(e.v),
            w: rest,
        });
    }
    if next as u64 > 3 * g.n() as u64 {
        return Err(GraphError::BlowupExceeded {
            factor: (next as u64).div_ceil(g.n() as u64),
        });
    }
    WeightedGraph::new(next, edges)
}

#[derive(Debug, Clone, Copy)]
pub struct LevelSpec {
    pub d: u64,
    /// Upper edge of the distance band this level covers (the next level's
    /// D, computed as ceil(D^(1+eps))).
    pub band_hi: u64,
}

#[derive(Debug, Clone)]
pub struct SkeletonParams {
    pub epsilon: Ratio,
    pub dprime: u64,
    pub levels: Vec<LevelSpec>,
    /// Distinct 64-bit rank per node, index 1..=n.
    pub rho: Vec<u64>,
    pub seed: u64,
    pub diameter: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SkeletonOverrides {
    pub dprime: Option<u64>,
    pub epsilon: Option<Ratio>,
    pub max_levels: Option<u32>,
}

fn sat_pow(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Derives epsilon, the short-range cutoff D', the level sequence and the
/// random ranks. The default cutoff L_max^4 k^6 log^12 n almost always
/// exceeds the diameter at bench scale, collapsing the oracle to the
/// short-range set; the dprime override exists to exercise levels.
pub fn compute_params(
    g: &WeightedGraph,
    k: u32,
    seed: u64,
    overrides: &SkeletonOverrides,
) -> SkeletonParams {
    let kk = k.max(2) as f64;
    let epsilon = overrides.epsilon.unwrap_or_else(|| {
        let l = (1024.0 * kk.log2()).ceil() as u128;
        Ratio::new(1024, 2 * l)
    });
    let diameter = g.diameter();
    let dprime = overrides.dprime.unwrap_or_else(|| {
        let formula = sat_pow(g.max_weight() as u128, 4)
            .saturating_mul(sat_pow(k.max(1) as u128, 6))
            .saturating_mul(sat_pow((g.n() as f64).log2().ceil().max(1.0) as u128, 12));
        (formula.min(u64::MAX as u128) as u64).min(diameter)
    });

    let max_levels = overrides.max_levels.unwrap_or(64);
    let mut levels = Vec::new();
    let exp = 1.0 + epsilon.to_f64();
    let mut d = dprime;
    while d < diameter && (levels.len() as u32) < max_levels {
        let hi = (d as f64).powf(exp);
        let band_hi = if hi > u64::MAX as f64 / 2.0 {
            u64::MAX / 2
        } else {
            (hi.ceil() as u64).max(d + 1)
        };
        levels.push(LevelSpec { d, band_hi });
        d = band_hi;
    }

    let n = g.n() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho = vec![0u64; n + 1];
    let mut used = HashSet::with_capacity(n);
    for slot in rho.iter_mut().skip(1) {
        loop {
            let r = rng.random::<u64>();
            if used.insert(r) {
                *slot = r;
                break;
            }
        }
    }
    SkeletonParams {
        epsilon,
        dprime,
        levels,
        rho,
        seed,
        diameter,
    }
}

/// Short-range 2-hopset: for every ordered pair within the cutoff, link
/// both endpoints to the minimum-rank vertex of their unique shortest
/// path. One pruned tree pass per source, never pairwise.
#[derive(Debug, Clone, Default)]
pub struct HPrime {
    /// Oriented arcs (u -> hub).
    pub arcs: Vec<(u32, u32)>,
    /// Undirected shortcut pairs {u, hub} and {hub, v}.
    pub pairs: Vec<(u32, u32)>,
}

pub fn build_h_prime(g: &WeightedGraph, dprime: u64, rho: &[u64]) -> HPrime {
    let n = g.n();
    let per_source: Vec<HPrime> = (1..=n)
        .into_par_iter()
        .map(|u| {
            let tree = dijkstra(g, u);
            let ch = children_of(&tree, n);
            let mut arcs = HashSet::new();
            let mut pairs = HashSet::new();
            // DFS carrying the running argmin of rho along the root path.
            let mut stack: Vec<(u32, u32)> = vec![(u, u)];
            while let Some((v, mut hub)) = stack.pop() {
                if tree.dist[v as usize] > dprime {
                    continue;
                }
                if rho[v as usize] < rho[hub as usize] {
                    hub = v;
                }
                if v != u {
                    if hub != u {
                        arcs.insert((u, hub));
                        pairs.insert((u.min(hub), u.max(hub)));
                    }
                    if hub != v {
                        pairs.insert((v.min(hub), v.max(hub)));
                    }
                }
                for &c in &ch[v as usize] {
                    stack.push((c, hub));
                }
            }
            let mut arcs: Vec<_> = arcs.into_iter().collect();
            let mut pairs: Vec<_> = pairs.into_iter().collect();
            arcs.sort_unstable();
            pairs.sort_unstable();
            HPrime { arcs, pairs }
        })
        .collect();
    let mut out = HPrime::default();
    for hp in per_source {
        out.arcs.extend(hp.arcs);
        out.pairs.extend(hp.pairs);
    }
    out.arcs.sort_unstable();
    out.arcs.dedup();
    out.pairs.sort_unstable();
    out.pairs.dedup();
    out
}

/// One distance level: per node, the window minima of its long shortest
/// paths, the resulting first-hop arcs, and the middle pairs realized by
/// pairs in the band.
#[derive(Debug, Clone)]
pub struct LevelSets {
    pub spec: LevelSpec,
    /// R^(D)(u) per node, index 1..=n.
    pub r_sets: Vec<Vec<u32>>,
    pub h1_arcs: Vec<(u32, u32)>,
    pub h2_pairs: Vec<(u32, u32)>,
}

/// winmin[v]: the argmin of rho over ancestors of v (including v) at
/// distance within [D/4, D/2] of the root, or None.
fn window_minima(g: &WeightedGraph, tree: &SpTree, d_level: u64, rho: &[u64]) -> Vec<Option<u32>> {
    let n = g.n();
    let ch = children_of(tree, n);
    let in_window =
        |dist: u64| dist != crate::graph::INF && 4 * dist >= d_level && 2 * dist <= d_level;
    let mut winmin: Vec<Option<u32>> = vec![None; n as usize + 1];
    let mut stack: Vec<(u32, Option<u32>)> = vec![(tree.source, None)];
    while let Some((v, mut cur)) = stack.pop() {
        if in_window(tree.dist[v as usize]) {
            cur = match cur {
                Some(m) if rho[m as usize] <= rho[v as usize] => Some(m),
                _ => Some(v),
            };
        }
        winmin[v as usize] = cur;
        for &c in &ch[v as usize] {
            stack.push((c, cur));
        }
    }
    winmin
}

/// Builds the level sets for one distance scale D.
pub fn build_level(g: &WeightedGraph, spec: LevelSpec, rho: &[u64]) -> LevelSets {
    let n = g.n();
    let rows: Vec<(Vec<u64>, Vec<Option<u32>>)> = (1..=n)
        .into_par_iter()
        .map(|u| {
            let tree = dijkstra(g, u);
            let winmin = window_minima(g, &tree, spec.d, rho);
            (tree.dist, winmin)
        })
        .collect();

    let mut r_sets: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
    let mut h1_arcs = Vec::new();
    let mut h2_pairs: HashSet<(u32, u32)> = HashSet::new();
    for u in 1..=n {
        let (dist_u, winmin_u) = &rows[(u - 1) as usize];
        let mut rs: Vec<u32> = (1..=n)
            .filter(|&v| dist_u[v as usize] >= spec.d)
            .filter_map(|v| winmin_u[v as usize])
            .collect();
        rs.sort_unstable();
        rs.dedup();
        for &r in &rs {
            h1_arcs.push((u, r));
        }
        r_sets[u as usize] = rs;

        for v in 1..=n {
            let d = dist_u[v as usize];
            if v == u || d < spec.d || d > spec.band_hi {
                continue;
            }
            let (q, r) = (winmin_u[v as usize], rows[(v - 1) as usize].1[u as usize]);
            if let (Some(q), Some(r)) = (q, r) {
                if q != r {
                    h2_pairs.insert((q.min(r), q.max(r)));
                }
            }
        }
    }
    let mut h2_pairs: Vec<_> = h2_pairs.into_iter().collect();
    h2_pairs.sort_unstable();
    LevelSets {
        spec,
        r_sets,
        h1_arcs,
        h2_pairs,
    }
}

#[derive(Debug, Clone)]
pub struct SkeletonBuild {
    pub oracle: ThreeHopOracle,
    pub hopset: Hopset,
    pub k: u32,
    pub params: SkeletonParams,
    pub levels: Vec<LevelSets>,
    pub hprime_arc_count: usize,
    pub attempts: u32,
}

/// Assembles the full 3-hopset oracle: short-range set plus one level per
/// distance scale, validated against dijkstra; retries with seed+1 while
/// validation fails (the construction is randomized).
pub fn build_skeleton_oracle(
    g: &WeightedGraph,
    seed: u64,
    overrides: &SkeletonOverrides,
) -> Result<SkeletonBuild, OracleError> {
    const ATTEMPTS: u32 = 8;
    if !g.is_usp() {
        return Err(OracleError::Graph(GraphError::MissingUspCertificate));
    }
    let k = skeleton_dimension(g, Ratio::new(1, 2))
        .map_err(OracleError::Graph)?
        .k;
    let mut first_violation = None;
    for attempt in 0..ATTEMPTS {
        let params = compute_params(g, k, seed.wrapping_add(attempt as u64), overrides);
        let hprime = build_h_prime(g, params.dprime, &params.rho);
        let levels: Vec<LevelSets> = params
            .levels
            .par_iter()
            .map(|&spec| build_level(g, spec, &params.rho))
            .collect();

        let mut arcs = hprime.arcs.clone();
        let mut mids = Vec::new();
        for lv in &levels {
            arcs.extend(&lv.h1_arcs);
            mids.extend(&lv.h2_pairs);
        }
        let oracle = ThreeHopOracle::build(g, arcs.iter().copied(), mids.iter().copied());
        let report = validate_oracle(g, &oracle, ValidationScope::Auto);
        if report.pass {
            let pairs = hprime
                .pairs
                .iter()
                .map(|&(a, b)| (a, b, Part::FirstLast))
                .chain(
                    arcs[hprime.arcs.len()..]
                        .iter()
                        .map(|&(a, b)| (a, b, Part::FirstLast)),
                )
                .chain(mids.iter().map(|&(a, b)| (a, b, Part::Middle)));
            let hopset = Hopset::from_pairs(g, pairs, 3).map_err(|e| match e {
                HopsetError::Graph(g) => OracleError::Graph(g),
                other => OracleError::Graph(GraphError::InfeasibleParams(other.to_string())),
            })?;
            let hprime_arc_count = hprime.arcs.len();
            return Ok(SkeletonBuild {
                oracle,
                hopset,
                k,
                params,
                levels,
                hprime_arc_count,
                attempts: attempt + 1,
            });
        }
        if first_violation.is_none() {
            first_violation = report.violations.first().copied();
        }
    }
    let v = first_violation.unwrap();
    Err(OracleError::BuildFailed {
        attempts: ATTEMPTS,
        u: v.u,
        v: v.v,
        got: v.limited,
        want: v.exact,
    })
}
