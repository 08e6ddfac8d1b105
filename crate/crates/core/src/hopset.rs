//! Hopset representation and exactness validation.
//!
//! A hopset is a set of weighted shortcut edges such that every node pair
//! has a shortest path of at most h edges in the augmented graph. Shortcut
//! weights always equal exact distances; constructors recompute them from
//! the graph rather than trusting callers or files.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::HopsetError;
use crate::graph::{batch_distances, dijkstra, limited_hop_distances, ExtraEdges, WeightedGraph};

/// Role of a shortcut in the 3-hopset split: first/last hop, middle hop,
/// or untagged (plain h-hopsets).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    Untagged,
    Middle,
    FirstLast,
}

impl Part {
    pub fn code(self) -> u8 {
        match self {
            Part::FirstLast => 1,
            Part::Middle => 2,
            Part::Untagged => 0,
        }
    }

    pub fn from_code(c: u8) -> Option<Part> {
        match c {
            1 => Some(Part::FirstLast),
            2 => Some(Part::Middle),
            0 => Some(Part::Untagged),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shortcut {
    pub u: u32,
    pub v: u32,
    pub w: u64,
    pub part: Part,
}

#[derive(Debug, Clone)]
pub struct Hopset {
    edges: Vec<Shortcut>,
    hopbound: u32,
}

impl Hopset {
    /// Builds a hopset from untagged or tagged node pairs; weights are
    /// computed from the graph (one dijkstra per distinct source).
    ///
    /// Self-loops are dropped (the self-loop convention is applied at query
    /// time instead). Duplicate pairs keep the strongest tag, FIRSTLAST
    /// over MIDDLE over UNTAGGED. A pair that coincides with a graph edge
    /// of the same length is stored only when tagged FIRSTLAST.
    pub fn from_pairs(
        g: &WeightedGraph,
        pairs: impl IntoIterator<Item = (u32, u32, Part)>,
        hopbound: u32,
    ) -> Result<Hopset, HopsetError> {
        let mut dedup: BTreeMap<(u32, u32), Part> = BTreeMap::new();
        for (a, b, part) in pairs {
            if a == b {
                continue;
            }
            for x in [a, b] {
                if x == 0 || x > g.n() {
                    return Err(HopsetError::BadNode(x, g.n()));
                }
            }
            let key = (a.min(b), a.max(b));
            let e = dedup.entry(key).or_insert(part);
            *e = (*e).max(part);
        }
        let queries: Vec<(u32, u32)> = dedup.keys().copied().collect();
        let dists = batch_distances(g, &queries);
        let mut edges = Vec::with_capacity(queries.len());
        for (((u, v), part), w) in dedup.into_iter().zip(dists) {
            if part != Part::FirstLast && g.edge_weight(u, v) == Some(w) {
                continue;
            }
            edges.push(Shortcut { u, v, w, part });
        }
        Ok(Hopset { edges, hopbound })
    }

    /// Rebuilds from explicitly weighted edges (file loads): the weights
    /// are redundant and re-verified against recomputed distances.
    pub fn from_weighted_edges(
        g: &WeightedGraph,
        edges: Vec<Shortcut>,
        hopbound: u32,
    ) -> Result<Hopset, HopsetError> {
        let claimed: BTreeMap<(u32, u32), u64> = edges
            .iter()
            .map(|s| ((s.u.min(s.v), s.u.max(s.v)), s.w))
            .collect();
        let hs = Hopset::from_pairs(g, edges.into_iter().map(|s| (s.u, s.v, s.part)), hopbound)?;
        for e in &hs.edges {
            let c = claimed[&(e.u, e.v)];
            if c != e.w {
                if c < e.w {
                    return Err(HopsetError::WeightBelowDistance {
                        u: e.u,
                        v: e.v,
                        claimed: c,
                        actual: e.w,
                    });
                }
                return Err(HopsetError::WeightMismatch {
                    u: e.u,
                    v: e.v,
                    claimed: c,
                    actual: e.w,
                });
            }
        }
        Ok(hs)
    }

    pub fn empty(hopbound: u32) -> Hopset {
        Hopset {
            edges: Vec::new(),
            hopbound,
        }
    }

    pub fn edges(&self) -> &[Shortcut] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn hopbound(&self) -> u32 {
        self.hopbound
    }

    pub fn count_part(&self, part: Part) -> usize {
        self.edges.iter().filter(|e| e.part == part).count()
    }

    /// Per-node degree over the shortcut edges.
    pub fn degrees(&self, n: u32) -> Vec<u32> {
        let mut deg = vec![0u32; n as usize + 1];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }
}

impl ExtraEdges for Hopset {
    fn for_each_edge(&self, f: &mut dyn FnMut(u32, u32, u64)) {
        for e in &self.edges {
            f(e.u, e.v, e.w);
        }
    }
}

/// One exactness violation: the hop-limited distance disagreed with the
/// true distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub u: u32,
    pub v: u32,
    pub limited: u64,
    pub exact: u64,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    pub pairs_checked: u64,
    /// First violations found, capped at 32.
    pub violations: Vec<Violation>,
}

pub const MAX_REPORTED_VIOLATIONS: usize = 32;

/// Full exactness check: from every source, h rounds of relaxation over
/// G plus the hopset must reproduce the dijkstra distances.
pub fn validate_hopset(g: &WeightedGraph, hs: &Hopset, h: u32) -> ValidationReport {
    let mut per_source: Vec<(u32, Vec<Violation>)> = (1..=g.n())
        .into_par_iter()
        .map(|s| {
            let exact = dijkstra(g, s).dist;
            let limited = limited_hop_distances(g, hs, s, h);
            let mut viols = Vec::new();
            for v in 1..=g.n() {
                if limited[v as usize] != exact[v as usize] {
                    viols.push(Violation {
                        u: s,
                        v,
                        limited: limited[v as usize],
                        exact: exact[v as usize],
                    });
                }
            }
            (s, viols)
        })
        .collect();
    per_source.sort_by_key(|(s, _)| *s);
    let mut violations = Vec::new();
    for (_, mut vs) in per_source {
        if violations.len() < MAX_REPORTED_VIOLATIONS {
            vs.truncate(MAX_REPORTED_VIOLATIONS - violations.len());
            violations.extend(vs);
        }
    }
    ValidationReport {
        pass: violations.is_empty(),
        pairs_checked: g.n() as u64 * (g.n() as u64 - 1),
        violations,
    }
}

/// The generic bidirectional query: min over meeting nodes w of
/// d^ceil(h/2)(u,w) + d^floor(h/2)(v,w) over the augmented graph.
/// Equals d_G(u,v) whenever the hopset is valid for its hopbound.
pub fn generic_query(g: &WeightedGraph, hs: &Hopset, u: u32, v: u32) -> u64 {
    let h = hs.hopbound();
    let fwd = limited_hop_distances(g, hs, u, h.div_ceil(2));
    if h == 1 {
        return fwd[v as usize];
    }
    let bwd = limited_hop_distances(g, hs, v, h / 2);
    (1..=g.n())
        .map(|w| crate::graph::dist_add(fwd[w as usize], bwd[w as usize]))
        .min()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_graph, INF};

    fn path5_hopset() -> (WeightedGraph, Hopset) {
        let g = path_graph(5);
        let hs =
            Hopset::from_pairs(&g, [(1, 3, Part::Untagged), (3, 5, Part::Untagged)], 2).unwrap();
        (g, hs)
    }

    #[test]
    fn validates_two_hop_path_cover() {
        let (g, hs) = path5_hopset();
        assert_eq!(hs.len(), 2);
        assert_eq!(hs.edges()[0].w, 2);
        let report = validate_hopset(&g, &hs, 2);
        assert!(report.pass, "{:?}", report.violations);
    }

    #[test]
    fn reports_first_violation_without_shortcuts() {
        let g = path_graph(5);
        let report = validate_hopset(&g, &Hopset::empty(1), 1);
        assert!(!report.pass);
        assert_eq!((report.violations[0].u, report.violations[0].v), (1, 3));
        assert_eq!(report.violations[0].limited, INF);
        assert_eq!(report.violations[0].exact, 2);
    }

    #[test]
    fn complete_shortcutting_is_a_one_hopset() {
        let g = path_graph(5);
        let mut pairs = Vec::new();
        for u in 1..=5u32 {
            for v in u + 1..=5 {
                if !g.has_edge(u, v) {
                    pairs.push((u, v, Part::Untagged));
                }
            }
        }
        let hs = Hopset::from_pairs(&g, pairs, 1).unwrap();
        assert_eq!(hs.len(), 6);
        assert!(validate_hopset(&g, &hs, 1).pass);
    }

    #[test]
    fn generic_query_meets_in_the_middle() {
        let (g, hs) = path5_hopset();
        assert_eq!(generic_query(&g, &hs, 1, 5), 4);
        assert_eq!(generic_query(&g, &hs, 2, 2), 0);
        for u in 1..=5 {
            let exact = dijkstra(&g, u).dist;
            for v in 1..=5 {
                assert_eq!(generic_query(&g, &hs, u, v), exact[v as usize]);
            }
        }
    }

    #[test]
    fn edge_duplicates_dropped_unless_firstlast() {
        let g = path_graph(3);
        let hs =
            Hopset::from_pairs(&g, [(1, 2, Part::Untagged), (2, 3, Part::FirstLast)], 2).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs.edges()[0].part, Part::FirstLast);
    }

    #[test]
    fn weighted_load_is_reverified() {
        let g = path_graph(4);
        let bad = vec![Shortcut {
            u: 1,
            v: 3,
            w: 1,
            part: Part::Untagged,
        }];
        match Hopset::from_weighted_edges(&g, bad, 2) {
            Err(HopsetError::WeightBelowDistance { actual: 2, .. }) => {}
            other => panic!("expected weight rejection, got {:?}", other),
        }
        let good = vec![Shortcut {
            u: 1,
            v: 3,
            w: 2,
            part: Part::Untagged,
        }];
        assert!(Hopset::from_weighted_edges(&g, good, 2).is_ok());
    }
}
