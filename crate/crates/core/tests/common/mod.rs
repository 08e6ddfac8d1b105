//! Shared oracles for integration tests: brute-force ILP optimum by subset
//! enumeration, and corpus helpers. Everything here stays independent of
//! the construction paths it checks.
#![allow(dead_code)]

use hopset_core::dijkstra;
use hopset_core::graph::{batch_distances, limited_hop_distances};
use hopset_core::WeightedGraph;

/// All unordered non-adjacent candidate pairs that lie (in order) on the
/// unique shortest path of some pair needing more than h hops. No optimal
/// hopset uses a shortcut outside this set: the equivalent-path
/// characterization confines useful shortcuts to commodity paths.
pub fn candidate_pairs(g: &WeightedGraph, h: u32) -> Vec<(u32, u32)> {
    let mut set = std::collections::BTreeSet::new();
    for s in 1..=g.n() {
        let tree = dijkstra(g, s);
        for t in s + 1..=g.n() {
            let path = tree.path_to(t);
            if path.len() <= h as usize + 1 {
                continue;
            }
            for i in 0..path.len() {
                for j in i + 1..path.len() {
                    let (a, b) = (path[i].min(path[j]), path[i].max(path[j]));
                    if !g.has_edge(a, b) {
                        set.insert((a, b));
                    }
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Checks whether a concrete shortcut set is an exact h-hopset, by h
/// rounds of relaxation from every source.
pub fn is_exact_hopset(g: &WeightedGraph, shortcuts: &[(u32, u32, u64)], h: u32) -> bool {
    for s in 1..=g.n() {
        let exact = dijkstra(g, s).dist;
        let limited = limited_hop_distances(g, shortcuts, s, h);
        if limited[1..] != exact[1..] {
            return false;
        }
    }
    true
}

/// Brute-force minimum h-hopset size by enumerating candidate subsets of
/// growing size. Returns None if no hopset of size <= cap exists.
pub fn ilp_optimum(g: &WeightedGraph, h: u32, cap: usize) -> Option<usize> {
    let candidates = candidate_pairs(g, h);
    let weights = batch_distances(g, &candidates);
    let cands: Vec<(u32, u32, u64)> = candidates
        .iter()
        .zip(&weights)
        .map(|(&(a, b), &w)| (a, b, w))
        .collect();

    fn combos(
        g: &WeightedGraph,
        cands: &[(u32, u32, u64)],
        h: u32,
        k: usize,
        start: usize,
        chosen: &mut Vec<(u32, u32, u64)>,
    ) -> bool {
        if chosen.len() == k {
            return is_exact_hopset(g, chosen, h);
        }
        let need = k - chosen.len();
        for i in start..=cands.len().saturating_sub(need) {
            chosen.push(cands[i]);
            if combos(g, cands, h, k, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    for k in 0..=cap.min(cands.len()) {
        let mut chosen = Vec::with_capacity(k);
        if combos(g, &cands, h, k, 0, &mut chosen) {
            return Some(k);
        }
    }
    None
}
