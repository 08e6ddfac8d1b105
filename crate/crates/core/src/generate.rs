//! Deterministic graph generators for the test corpus and the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{Edge, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path {
        n: u32,
    },
    Star {
        n: u32,
    },
    /// Complete `arity`-ary tree truncated to `n` nodes, breadth-first.
    BalancedTree {
        n: u32,
        arity: u32,
    },
    Grid {
        rows: u32,
        cols: u32,
    },
    /// Random connected graph: a uniform random spanning tree plus extra
    /// edges, weights uniform in [1, 16].
    Gnm {
        n: u32,
        m: u32,
    },
    /// Random spine path with the remaining nodes attached as legs.
    Caterpillar {
        n: u32,
    },
}

pub fn generate(kind: GraphKind, seed: u64) -> Result<WeightedGraph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GraphKind::Path { n } => {
            require(n >= 1, "path needs n >= 1")?;
            let edges = (1..n)
                .map(|i| Edge {
                    u: i,
                    v: i + 1,
                    w: 1,
                })
                .collect();
            WeightedGraph::new(n, edges)
        }
        GraphKind::Star { n } => {
            require(n >= 2, "star needs n >= 2")?;
            let edges = (2..=n).map(|i| Edge { u: 1, v: i, w: 1 }).collect();
            WeightedGraph::new(n, edges)
        }
        GraphKind::BalancedTree { n, arity } => {
            require(
                n >= 1 && arity >= 1,
                "balanced tree needs n >= 1, arity >= 1",
            )?;
            let edges = (2..=n)
                .map(|i| Edge {
                    u: (i - 2) / arity + 1,
                    v: i,
                    w: 1,
                })
                .collect();
            WeightedGraph::new(n, edges)
        }
        GraphKind::Grid { rows, cols } => {
            require(
                rows >= 1 && cols >= 1 && rows * cols >= 1,
                "grid needs positive sides",
            )?;
            let id = |r: u32, c: u32| r * cols + c + 1;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push(Edge {
                            u: id(r, c),
                            v: id(r, c + 1),
                            w: 1,
                        });
                    }
                    if r + 1 < rows {
                        edges.push(Edge {
                            u: id(r, c),
                            v: id(r + 1, c),
                            w: 1,
                        });
                    }
                }
            }
            WeightedGraph::new(rows * cols, edges)
        }
        GraphKind::Gnm { n, m } => {
            require(n >= 2 && m >= n - 1, "gnm needs m >= n-1")?;
            require(
                (m as u64) <= (n as u64) * (n as u64 - 1) / 2,
                "gnm needs m <= n(n-1)/2",
            )?;
            // Random spanning tree first (random attachment over a shuffled
            // node order), so connectivity never needs rejection.
            let mut order: Vec<u32> = (1..=n).collect();
            order.shuffle(&mut rng);
            let mut present = std::collections::HashSet::new();
            let mut edges = Vec::new();
            for i in 1..n as usize {
                let u = order[i];
                let v = order[rng.random_range(0..i)];
                let key = (u.min(v), u.max(v));
                present.insert(key);
                edges.push(Edge {
                    u: key.0,
                    v: key.1,
                    w: rng.random_range(1..=16),
                });
            }
            while edges.len() < m as usize {
                let u = rng.random_range(1..=n);
                let v = rng.random_range(1..=n);
                if u == v {
                    continue;
                }
                let key = (u.min(v), u.max(v));
                if present.insert(key) {
                    edges.push(Edge {
                        u: key.0,
                        v: key.1,
                        w: rng.random_range(1..=16),
                    });
                }
            }
            WeightedGraph::new(n, edges)
        }
        GraphKind::Caterpillar { n } => {
            require(n >= 2, "caterpillar needs n >= 2")?;
            let spine = (n / 2).max(2);
            let mut edges: Vec<Edge> = (1..spine)
                .map(|i| Edge {
                    u: i,
                    v: i + 1,
                    w: 1,
                })
                .collect();
            for leg in spine + 1..=n {
                let at = rng.random_range(1..=spine);
                edges.push(Edge {
                    u: at.min(leg),
                    v: leg.max(at),
                    w: 1,
                });
            }
            WeightedGraph::new(n, edges)
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), GraphError> {
    if cond {
        Ok(())
    } else {
        Err(GraphError::InfeasibleParams(msg.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let p = generate(GraphKind::Path { n: 5 }, 0).unwrap();
        assert_eq!((p.n(), p.m()), (5, 4));
        assert!(p.edges().iter().all(|e| e.w == 1));

        let g = generate(GraphKind::Grid { rows: 4, cols: 4 }, 0).unwrap();
        assert_eq!((g.n(), g.m()), (16, 24));

        let s = generate(GraphKind::Star { n: 5 }, 0).unwrap();
        assert_eq!((s.n(), s.m()), (5, 4));
    }

    #[test]
    fn gnm_is_deterministic_and_connected() {
        let a = generate(GraphKind::Gnm { n: 20, m: 40 }, 7).unwrap();
        let b = generate(GraphKind::Gnm { n: 20, m: 40 }, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.m(), 40);
        let c = generate(GraphKind::Gnm { n: 20, m: 40 }, 8).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn infeasible_params_rejected() {
        assert!(matches!(
            generate(GraphKind::Gnm { n: 10, m: 5 }, 0),
            Err(GraphError::InfeasibleParams(_))
        ));
    }

    #[test]
    fn caterpillar_is_tree() {
        let g = generate(GraphKind::Caterpillar { n: 17 }, 3).unwrap();
        assert!(g.is_tree());
    }
}
