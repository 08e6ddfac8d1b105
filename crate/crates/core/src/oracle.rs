//! The 3-hopset distance oracle: oriented first-hop lists per node plus a
//! keyed middle-hop distance table.
//!
//! A query for (u,v) probes every pair (x,y) with x in N1(u), y in N1(v)
//! against the middle table and returns the minimum of
//! d(u,x) + mid{x,y} + d(y,v). There is no early exit, so the probe count
//! is exactly |N1(u)| * |N1(v)|.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::OracleError;
use crate::graph::{batch_distances, dijkstra, WeightedGraph};
use crate::hopset::{ValidationReport, Violation, MAX_REPORTED_VIOLATIONS};
use crate::ratio::Ratio;

fn key(x: u32, y: u32) -> (u32, u32) {
    (x.min(y), x.max(y))
}

#[derive(Debug, Clone)]
pub struct ThreeHopOracle {
    n: u32,
    /// Per node w: sorted (x, d_G(w,x)) pairs realizing the oriented arcs,
    /// always including the implicit self entry (w, 0).
    n1: Vec<Vec<(u32, u64)>>,
    /// Unordered pair {x,y} -> middle length: H2 and graph edges (min on
    /// collision) plus zero-length identities for every arc target.
    mid: HashMap<(u32, u32), u64>,
    h1_size: usize,
    arc_count: usize,
    h2_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryResult {
    pub distance: u64,
    pub lookups: u64,
}

impl ThreeHopOracle {
    /// Materializes the oracle from oriented first-hop arcs (w -> x) and a
    /// set of middle pairs. Shortcut lengths are recomputed from the graph,
    /// grouped by source.
    pub fn build(
        g: &WeightedGraph,
        h1_arcs: impl IntoIterator<Item = (u32, u32)>,
        h2: impl IntoIterator<Item = (u32, u32)>,
    ) -> ThreeHopOracle {
        let n = g.n();
        let mut targets: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
        for (w, x) in h1_arcs {
            assert!(w >= 1 && w <= n && x >= 1 && x <= n, "arc out of range");
            if w != x {
                targets[w as usize].push(x);
            }
        }
        for list in &mut targets {
            list.sort_unstable();
            list.dedup();
        }

        let mut h2_pairs: Vec<(u32, u32)> = h2
            .into_iter()
            .filter(|&(x, y)| x != y)
            .map(|(x, y)| key(x, y))
            .collect();
        h2_pairs.sort_unstable();
        h2_pairs.dedup();
        let h2_size = h2_pairs.len();

        // Every needed distance in one batched pass.
        let mut queries: Vec<(u32, u32)> = Vec::new();
        for w in 1..=n {
            for &x in &targets[w as usize] {
                queries.push((w, x));
            }
        }
        queries.extend(&h2_pairs);
        let dists = batch_distances(g, &queries);

        let mut qi = 0usize;
        let mut n1: Vec<Vec<(u32, u64)>> = vec![Vec::new(); n as usize + 1];
        let mut h1_pairs: Vec<(u32, u32)> = Vec::new();
        let mut arc_count = 0usize;
        for w in 1..=n {
            let mut list = vec![(w, 0u64)];
            for &x in &targets[w as usize] {
                list.push((x, dists[qi]));
                qi += 1;
                h1_pairs.push(key(w, x));
                arc_count += 1;
            }
            list.sort_unstable();
            n1[w as usize] = list;
        }
        h1_pairs.sort_unstable();
        h1_pairs.dedup();

        let mut mid: HashMap<(u32, u32), u64> = HashMap::new();
        for e in g.edges() {
            mid.insert(key(e.u, e.v), e.w);
        }
        for &p in &h2_pairs {
            let d = dists[qi];
            qi += 1;
            mid.entry(p).and_modify(|w| *w = (*w).min(d)).or_insert(d);
        }
        for w in 1..=n {
            for &x in &targets[w as usize] {
                mid.insert((x, x), 0);
            }
        }

        let h1_size = h1_pairs.len();
        debug_assert!(h1_size <= arc_count && arc_count <= 2 * h1_size);
        ThreeHopOracle {
            n,
            n1,
            mid,
            h1_size,
            arc_count,
            h2_size,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of distinct unordered H1 shortcuts.
    pub fn h1_size(&self) -> usize {
        self.h1_size
    }

    /// Number of oriented H1 arcs (excluding implicit self entries).
    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn h2_size(&self) -> usize {
        self.h2_size
    }

    pub fn n1(&self, w: u32) -> &[(u32, u64)] {
        &self.n1[w as usize]
    }

    pub fn n1_sizes(&self) -> Vec<usize> {
        (1..=self.n).map(|w| self.n1[w as usize].len()).collect()
    }

    pub fn mid_entries(&self) -> impl Iterator<Item = (&(u32, u32), &u64)> {
        self.mid.iter()
    }

    pub fn mid_len(&self) -> usize {
        self.mid.len()
    }

    /// Probe-all distance query. Probes run in sorted target order; probe
    /// count is |N1(u)| * |N1(v)| regardless of hits.
    pub fn query(&self, u: u32, v: u32) -> Result<QueryResult, OracleError> {
        let mut best: Option<u64> = None;
        let mut lookups = 0u64;
        for &(x, du) in &self.n1[u as usize] {
            for &(y, dv) in &self.n1[v as usize] {
                lookups += 1;
                // Self-loop convention: {x,x} has length 0 whether or not
                // an identity entry was materialized.
                let m = if x == y {
                    Some(0)
                } else {
                    self.mid.get(&key(x, y)).copied()
                };
                if let Some(m) = m {
                    let total = du + m + dv;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
            }
        }
        match best {
            Some(distance) => Ok(QueryResult { distance, lookups }),
            None => Err(OracleError::NoCover(u, v)),
        }
    }

    /// The uniform-average probe count (sum |N1(u)|)^2 / n^2, exact.
    pub fn average_query_cost(&self) -> Ratio {
        let total: u128 = (1..=self.n)
            .map(|w| self.n1[w as usize].len() as u128)
            .sum();
        Ratio::new(total * total, self.n as u128 * self.n as u128)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationScope {
    Exhaustive,
    Sampled {
        pairs: u64,
        seed: u64,
    },
    /// Exhaustive up to 300 nodes, 10^4 sampled pairs above.
    Auto,
}

/// Compares oracle answers against dijkstra over all ordered pairs (or a
/// seeded sample for large graphs). A probe miss counts as a violation.
pub fn validate_oracle(
    g: &WeightedGraph,
    oracle: &ThreeHopOracle,
    scope: ValidationScope,
) -> ValidationReport {
    let n = g.n();
    let scope = match scope {
        ValidationScope::Auto => {
            if n <= 300 {
                ValidationScope::Exhaustive
            } else {
                ValidationScope::Sampled {
                    pairs: 10_000,
                    seed: 0xC0FFEE,
                }
            }
        }
        s => s,
    };
    match scope {
        ValidationScope::Exhaustive => {
            let mut results: Vec<(u32, Vec<Violation>)> = (1..=n)
                .into_par_iter()
                .map(|u| {
                    let exact = dijkstra(g, u).dist;
                    let mut viols = Vec::new();
                    for v in 1..=n {
                        let got = oracle.query(u, v).map(|r| r.distance).unwrap_or(u64::MAX);
                        if got != exact[v as usize] {
                            viols.push(Violation {
                                u,
                                v,
                                limited: got,
                                exact: exact[v as usize],
                            });
                        }
                    }
                    (u, viols)
                })
                .collect();
            results.sort_by_key(|(u, _)| *u);
            let mut violations = Vec::new();
            for (_, mut vs) in results {
                if violations.len() < MAX_REPORTED_VIOLATIONS {
                    vs.truncate(MAX_REPORTED_VIOLATIONS - violations.len());
                    violations.extend(vs);
                }
            }
            ValidationReport {
                pass: violations.is_empty(),
                pairs_checked: n as u64 * n as u64,
                violations,
            }
        }
        ValidationScope::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample: Vec<(u32, u32)> = (0..pairs)
                .map(|_| (rng.random_range(1..=n), rng.random_range(1..=n)))
                .collect();
            let exact = batch_distances(g, &sample);
            let mut violations = Vec::new();
            for (i, &(u, v)) in sample.iter().enumerate() {
                let got = oracle.query(u, v).map(|r| r.distance).unwrap_or(u64::MAX);
                if got != exact[i] && violations.len() < MAX_REPORTED_VIOLATIONS {
                    violations.push(Violation {
                        u,
                        v,
                        limited: got,
                        exact: exact[i],
                    });
                }
            }
            ValidationReport {
                pass: violations.is_empty(),
                pairs_checked: pairs,
                violations,
            }
        }
        ValidationScope::Auto => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::path_graph;

    #[test]
    fn mid_table_contents_for_path_arcs() {
        let g = path_graph(5);
        let o = ThreeHopOracle::build(&g, [(1, 3), (5, 3)], []);
        // {3,3} identity plus the four graph edges.
        assert_eq!(o.mid_len(), 5);
        assert_eq!(o.mid.get(&(3, 3)), Some(&0));
        for e in g.edges() {
            assert_eq!(o.mid.get(&key(e.u, e.v)), Some(&e.w));
        }
        assert_eq!(o.h1_size(), 2);
        assert_eq!(o.h2_size(), 0);
    }

    #[test]
    fn probe_grid_counts_and_distance() {
        let g = path_graph(5);
        let o = ThreeHopOracle::build(&g, [(1, 3), (5, 3)], []);
        let r = o.query(1, 5).unwrap();
        assert_eq!(r.distance, 4); // 2 + 0 + 2, meeting at node 3
        assert_eq!(r.lookups, 4); // |N1(1)| * |N1(5)| = 2 * 2

        let r = o.query(2, 2).unwrap();
        assert_eq!(r.distance, 0);
        assert_eq!(r.lookups, 1);
    }

    #[test]
    fn self_entries_answer_adjacent_pairs() {
        let g = path_graph(5);
        let o = ThreeHopOracle::build(&g, [], []);
        // Only self entries: adjacent pairs resolve through the E-middle.
        let r = o.query(1, 2).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.lookups, 1);
        // Non-adjacent pairs have no cover.
        assert_eq!(o.query(1, 3), Err(OracleError::NoCover(1, 3)));
    }

    #[test]
    fn duplicate_arcs_deduplicated() {
        let g = path_graph(5);
        let o = ThreeHopOracle::build(&g, [(1, 3), (1, 3), (3, 1)], []);
        assert_eq!(o.n1(1).len(), 2); // self + one target
        assert_eq!(o.h1_size(), 1);
        assert_eq!(o.arc_count(), 2); // 1->3 and 3->1
    }

    #[test]
    fn average_cost_of_singletons_is_one() {
        let g = path_graph(4);
        let o = ThreeHopOracle::build(&g, [], []);
        assert_eq!(o.average_query_cost(), Ratio::int(1));
    }

    #[test]
    fn uniform_degree_costs_square() {
        let g = path_graph(4);
        // Every node gets exactly one extra target: |N1(u)| = 2 for all u.
        let o = ThreeHopOracle::build(&g, [(1, 2), (2, 3), (3, 4), (4, 3)], []);
        assert_eq!(o.average_query_cost(), Ratio::int(4));
    }

    #[test]
    fn oracle_validation_passes_on_full_cover() {
        let g = path_graph(5);
        // Arcs from every node to node 3 make 3 a universal meeting point.
        let arcs: Vec<(u32, u32)> = (1..=5).filter(|&u| u != 3).map(|u| (u, 3)).collect();
        let o = ThreeHopOracle::build(&g, arcs, []);
        let rep = validate_oracle(&g, &o, ValidationScope::Exhaustive);
        assert!(rep.pass, "{:?}", rep.violations);
        assert_eq!(rep.pairs_checked, 25);
    }
}
