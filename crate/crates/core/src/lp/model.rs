//! The layered-flow formulation: one commodity per node pair whose
//! shortest path needs more than h hops, flow variables on layer-advancing
//! arcs between path positions, and capacity coupling to the shortcut
//! indicator variables.

use std::collections::HashMap;

use crate::error::GraphError;
use crate::graph::{dijkstra, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpKind {
    /// Minimize the hopset size at hopbound h.
    Plain,
    /// Minimize first/last-hop shortcuts under a total size bound
    /// (hopbound fixed at 3).
    Tradeoff { size_bound: u64 },
}

#[derive(Debug, Clone)]
pub struct Commodity {
    pub s: u32,
    pub t: u32,
    /// Unique shortest path from s to t, endpoints included.
    pub path: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSize {
    pub x_vars: usize,
    pub x1_vars: usize,
    pub flow_vars: usize,
    pub capacity_constraints: usize,
    pub conservation_constraints: usize,
}

#[derive(Debug, Clone)]
pub struct LpModel {
    pub n: u32,
    pub h: u32,
    pub kind: LpKind,
    /// Unordered non-adjacent pairs appearing in order on at least one
    /// commodity path; sorted.
    pub x_pairs: Vec<(u32, u32)>,
    pub x_index: HashMap<(u32, u32), usize>,
    pub commodities: Vec<Commodity>,
}

impl LpModel {
    pub fn size(&self) -> ModelSize {
        let mut flow = 0usize;
        let mut cons = 0usize;
        for c in &self.commodities {
            let l = c.path.len();
            flow += self.h as usize * l * (l + 1) / 2;
            cons += l * (self.h as usize + 1);
        }
        ModelSize {
            x_vars: self.x_pairs.len(),
            x1_vars: if matches!(self.kind, LpKind::Tradeoff { .. }) {
                self.x_pairs.len()
            } else {
                0
            },
            flow_vars: flow,
            capacity_constraints: flow,
            conservation_constraints: cons,
        }
    }

    /// Capacity class of the layer-i arc from path node a to b: fixed unit
    /// capacity for staying arcs and graph edges, otherwise the index of
    /// the governing variable (x, or x1 on the first and last hop in
    /// tradeoff mode).
    pub fn arc_capacity(&self, g: &WeightedGraph, a: u32, b: u32, layer: u32) -> ArcCap {
        if a == b || g.has_edge(a, b) {
            return ArcCap::Unit;
        }
        let idx = self.x_index[&(a.min(b), a.max(b))];
        match self.kind {
            LpKind::Plain => ArcCap::X(idx),
            LpKind::Tradeoff { .. } => {
                if layer == 1 {
                    ArcCap::X(idx)
                } else {
                    ArcCap::X1(idx)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcCap {
    Unit,
    X(usize),
    X1(usize),
}

fn build(g: &WeightedGraph, h: u32, kind: LpKind) -> Result<LpModel, GraphError> {
    if !g.is_usp() {
        return Err(GraphError::MissingUspCertificate);
    }
    assert!(h >= 2, "flow model needs hopbound >= 2");
    let n = g.n();
    let mut commodities = Vec::new();
    for s in 1..=n {
        let tree = dijkstra(g, s);
        for t in s + 1..=n {
            let path = tree.path_to(t);
            // Pairs already reachable in h hops along their own shortest
            // path are trivially covered and only bloat the model.
            if path.len() > h as usize + 1 {
                commodities.push(Commodity { s, t, path });
            }
        }
    }
    let mut x_pairs: Vec<(u32, u32)> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for c in &commodities {
            for i in 0..c.path.len() {
                for j in i + 1..c.path.len() {
                    let (a, b) = (c.path[i].min(c.path[j]), c.path[i].max(c.path[j]));
                    if !g.has_edge(a, b) && seen.insert((a, b)) {
                        x_pairs.push((a, b));
                    }
                }
            }
        }
    }
    x_pairs.sort_unstable();
    let x_index = x_pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    Ok(LpModel {
        n,
        h,
        kind,
        x_pairs,
        x_index,
        commodities,
    })
}

/// Minimum-size h-hopset model for a USP graph.
pub fn build_lp(g: &WeightedGraph, h: u32) -> Result<LpModel, GraphError> {
    build(g, h, LpKind::Plain)
}

/// Size-bounded tradeoff model: minimize the first/last-hop total subject
/// to at most `size_bound` shortcuts overall; hopbound fixed at 3.
pub fn build_lp_tradeoff(g: &WeightedGraph, size_bound: u64) -> Result<LpModel, GraphError> {
    build(g, 3, LpKind::Tradeoff { size_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};
    use crate::usp::verify_usp;

    #[test]
    fn path_three_has_no_commodities_at_h2() {
        let g = verify_usp(&generate(GraphKind::Path { n: 3 }, 0).unwrap()).unwrap();
        let m = build_lp(&g, 2).unwrap();
        assert!(m.commodities.is_empty());
        assert!(m.x_pairs.is_empty());
    }

    #[test]
    fn path_five_model_shape() {
        let g = verify_usp(&generate(GraphKind::Path { n: 5 }, 0).unwrap()).unwrap();
        let m = build_lp(&g, 2).unwrap();
        // Commodities: pairs more than 2 hops apart: (1,4), (1,5), (2,5).
        let pairs: Vec<(u32, u32)> = m.commodities.iter().map(|c| (c.s, c.t)).collect();
        assert_eq!(pairs, vec![(1, 4), (1, 5), (2, 5)]);
        // x vars: all non-adjacent pairs on those paths.
        assert_eq!(
            m.x_pairs,
            vec![(1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (3, 5)]
        );
        assert!(m.size().flow_vars > 0);
    }

    #[test]
    fn star_needs_no_vars_at_h2() {
        let g = verify_usp(&generate(GraphKind::Star { n: 4 }, 0).unwrap()).unwrap();
        let m = build_lp(&g, 2).unwrap();
        assert!(m.commodities.is_empty());
    }

    #[test]
    fn requires_usp() {
        let g = generate(GraphKind::Path { n: 5 }, 0).unwrap();
        assert!(matches!(
            build_lp(&g, 2),
            Err(GraphError::MissingUspCertificate)
        ));
    }
}
