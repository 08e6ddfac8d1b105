//! Embedded LP solver: a cut-generation loop over the shortcut variables.
//!
//! Feasibility of the flow formulation for one commodity is exactly "max
//! flow >= 1 in the layered graph under the current capacities", so the
//! master problem only carries the x (and x1) variables and learns violated
//! min-cut inequalities until every commodity routes a unit of flow. The
//! master optimum over a subset of the cuts that is also flow-feasible is
//! the optimum of the full formulation.
//!
//! Separation uses a Dinic max-flow; the final solution is re-verified with
//! an independent Edmonds-Karp routine before being returned.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::LpError;
use crate::graph::WeightedGraph;

use super::model::{ArcCap, Commodity, LpKind, LpModel};
use super::simplex::{minimize, Row, Sense, SimplexOutcome};

pub const FLOW_TOL: f64 = 1e-6;
/// A commodity counts as satisfied during separation somewhat before the
/// final verification tolerance, so master round-off cannot ping-pong a
/// cut between satisfied and violated.
const SEP_SATISFIED: f64 = 1.0 - 5e-7;
const SEP_TOL: f64 = 1e-7;
const LINEAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Imported,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Values aligned with `model.x_pairs`.
    pub x: Vec<f64>,
    /// Tradeoff mode only; empty otherwise.
    pub x1: Vec<f64>,
    pub objective: f64,
    pub status: SolveStatus,
}

impl LpSolution {
    pub fn x_of(&self, model: &LpModel, a: u32, b: u32) -> f64 {
        model
            .x_index
            .get(&(a.min(b), a.max(b)))
            .map(|&i| self.x[i])
            .unwrap_or(0.0)
    }

    pub fn x1_of(&self, model: &LpModel, a: u32, b: u32) -> f64 {
        model
            .x_index
            .get(&(a.min(b), a.max(b)))
            .map(|&i| self.x1[i])
            .unwrap_or(0.0)
    }
}

/// Layered flow network of one commodity under concrete capacities.
/// Nodes are (path position, layer); arcs advance one layer and never move
/// backwards along the path.
struct LayeredNet {
    nodes: usize,
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    src: usize,
    dst: usize,
}

impl LayeredNet {
    fn build(
        g: &WeightedGraph,
        model: &LpModel,
        c: &Commodity,
        caps: impl Fn(ArcCap) -> f64,
    ) -> LayeredNet {
        let l = c.path.len();
        let h = model.h as usize;
        let id = |pos: usize, layer: usize| layer * l + pos;
        let mut net = LayeredNet {
            nodes: l * (h + 1),
            head: vec![Vec::new(); l * (h + 1)],
            to: Vec::new(),
            cap: Vec::new(),
            src: id(0, 0),
            dst: id(l - 1, h),
        };
        for layer in 0..h {
            for a in 0..l {
                for b in a..l {
                    let c_ab = caps(model.arc_capacity(g, c.path[a], c.path[b], layer as u32));
                    if c_ab <= 0.0 {
                        continue;
                    }
                    net.push(id(a, layer), id(b, layer + 1), c_ab);
                }
            }
        }
        net
    }

    fn push(&mut self, a: usize, b: usize, cap: f64) {
        let i = self.to.len();
        self.to.push(b);
        self.cap.push(cap);
        self.head[a].push(i);
        self.to.push(a);
        self.cap.push(0.0);
        self.head[b].push(i + 1);
    }

    /// Dinic max flow, stopped early once a full unit is routed.
    fn dinic(&mut self, need: f64) -> f64 {
        let mut flow = 0.0;
        loop {
            let mut level = vec![usize::MAX; self.nodes];
            level[self.src] = 0;
            let mut q = std::collections::VecDeque::from([self.src]);
            while let Some(v) = q.pop_front() {
                for &e in &self.head[v] {
                    if self.cap[e] > SEP_TOL && level[self.to[e]] == usize::MAX {
                        level[self.to[e]] = level[v] + 1;
                        q.push_back(self.to[e]);
                    }
                }
            }
            if level[self.dst] == usize::MAX {
                return flow;
            }
            let mut it = vec![0usize; self.nodes];
            loop {
                let pushed = self.dfs(self.src, f64::INFINITY, &level, &mut it);
                if pushed <= SEP_TOL {
                    break;
                }
                flow += pushed;
                if flow >= need {
                    return flow;
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, limit: f64, level: &[usize], it: &mut [usize]) -> f64 {
        if v == self.dst {
            return limit;
        }
        while it[v] < self.head[v].len() {
            let e = self.head[v][it[v]];
            let u = self.to[e];
            if self.cap[e] > SEP_TOL && level[u] == level[v] + 1 {
                let pushed = self.dfs(u, limit.min(self.cap[e]), level, it);
                if pushed > SEP_TOL {
                    self.cap[e] -= pushed;
                    self.cap[e ^ 1] += pushed;
                    return pushed;
                }
            }
            it[v] += 1;
        }
        0.0
    }

    /// Source side of the residual graph after a max-flow run.
    fn min_cut_side(&self) -> Vec<bool> {
        let mut side = vec![false; self.nodes];
        side[self.src] = true;
        let mut stack = vec![self.src];
        while let Some(v) = stack.pop() {
            for &e in &self.head[v] {
                if self.cap[e] > SEP_TOL && !side[self.to[e]] {
                    side[self.to[e]] = true;
                    stack.push(self.to[e]);
                }
            }
        }
        side
    }
}

/// Column index in the master problem: x variables first, then x1.
fn master_dims(model: &LpModel) -> (usize, usize) {
    let nx = model.x_pairs.len();
    let nx1 = if matches!(model.kind, LpKind::Tradeoff { .. }) {
        nx
    } else {
        0
    };
    (nx, nx1)
}

/// Solves the master restricted to the pairs that appear in some cut;
/// everything else is 0 at any master optimum and stays out of the
/// tableau. Returns full-length (x, x1, objective).
fn solve_master(
    model: &LpModel,
    cuts: &[HashMap<usize, f64>],
) -> Result<(Vec<f64>, Vec<f64>, f64), LpError> {
    let (nx, nx1) = master_dims(model);
    let tradeoff = nx1 > 0;

    let mut active_pairs: Vec<usize> = cuts
        .iter()
        .flat_map(|c| c.keys().map(|&j| if j >= nx { j - nx } else { j }))
        .collect();
    active_pairs.sort_unstable();
    active_pairs.dedup();
    let k = active_pairs.len();
    let mut compact = vec![usize::MAX; nx];
    for (ci, &p) in active_pairs.iter().enumerate() {
        compact[p] = ci;
    }

    // Compact layout: x's first, then (tradeoff) x1's.
    let nvars = if tradeoff { 2 * k } else { k };
    let mut c = vec![0.0; nvars];
    if tradeoff {
        for v in c.iter_mut().skip(k) {
            *v = 1.0;
        }
    } else {
        for v in c.iter_mut() {
            *v = 1.0;
        }
    }
    let mut rows = Vec::new();
    if let LpKind::Tradeoff { size_bound } = model.kind {
        rows.push(Row {
            terms: (0..k).map(|i| (i, 1.0)).collect(),
            sense: Sense::Le,
            rhs: size_bound as f64,
        });
        for i in 0..k {
            rows.push(Row {
                terms: vec![(k + i, 1.0), (i, -1.0)],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    for cut in cuts {
        let mut terms: Vec<(usize, f64)> = cut
            .iter()
            .map(|(&j, &v)| {
                if j >= nx {
                    (k + compact[j - nx], v)
                } else {
                    (compact[j], v)
                }
            })
            .collect();
        terms.sort_by_key(|&(j, _)| j);
        rows.push(Row {
            terms,
            sense: Sense::Ge,
            rhs: 1.0,
        });
    }

    let full = match minimize(&c, &rows) {
        SimplexOutcome::Optimal { x, objective: _ } => x,
        SimplexOutcome::Infeasible => return Err(LpError::Infeasible),
        SimplexOutcome::Unbounded => {
            return Err(LpError::SolverFailure("master reported unbounded".into()))
        }
    };
    let mut x = vec![0.0; nx];
    let mut x1 = vec![0.0; nx1];
    for (ci, &p) in active_pairs.iter().enumerate() {
        x[p] = full[ci].clamp(0.0, 1.0);
        if tradeoff {
            x1[p] = full[k + ci].clamp(0.0, 1.0).min(x[p]);
        }
    }
    let objective = if tradeoff {
        x1.iter().sum()
    } else {
        x.iter().sum()
    };
    Ok((x, x1, objective))
}

fn capacity_fn<'a>(sol_x: &'a [f64], sol_x1: &'a [f64]) -> impl Fn(ArcCap) -> f64 + 'a {
    move |cap| match cap {
        ArcCap::Unit => 1.0,
        ArcCap::X(i) => sol_x[i],
        ArcCap::X1(i) => sol_x1[i],
    }
}

/// Violated min-cut inequality for one commodity, or None if a unit of
/// flow routes already.
fn separate(
    g: &WeightedGraph,
    model: &LpModel,
    c: &Commodity,
    x: &[f64],
    x1: &[f64],
) -> Option<HashMap<usize, f64>> {
    let mut net = LayeredNet::build(g, model, c, capacity_fn(x, x1));
    let flow = net.dinic(1.0);
    if flow >= SEP_SATISFIED {
        return None;
    }
    let side = net.min_cut_side();
    // Enumerate crossing arcs over the full arc space, not just the arcs
    // materialized in the network: zero-capacity variables crossing the
    // cut must appear in the inequality or it would over-constrain.
    let l = c.path.len();
    let id = |pos: usize, layer: usize| layer * l + pos;
    let (nx, _) = master_dims(model);
    let mut cut: HashMap<usize, f64> = HashMap::new();
    for layer in 0..model.h as usize {
        for a in 0..l {
            if !side[id(a, layer)] {
                continue;
            }
            for b in a..l {
                if side[id(b, layer + 1)] {
                    continue;
                }
                match model.arc_capacity(g, c.path[a], c.path[b], layer as u32) {
                    // A unit arc across the cut bounds it at >= 1 already;
                    // the commodity cannot actually be violated.
                    ArcCap::Unit => return None,
                    ArcCap::X(i) => *cut.entry(i).or_insert(0.0) += 1.0,
                    ArcCap::X1(i) => *cut.entry(nx + i).or_insert(0.0) += 1.0,
                }
            }
        }
    }
    if cut.is_empty() {
        None
    } else {
        Some(cut)
    }
}

/// Solves the relaxation by cut generation and re-verifies the answer.
/// Cuts that go slack are purged between rounds to keep the master small;
/// a cut that returns after being purged is pinned for good.
pub fn solve_lp(g: &WeightedGraph, model: &LpModel) -> Result<LpSolution, LpError> {
    type CutKey = Vec<(usize, u64)>;
    let key_of = |cut: &HashMap<usize, f64>| -> CutKey {
        let mut key: CutKey = cut.iter().map(|(&j, &v)| (j, v.round() as u64)).collect();
        key.sort_unstable();
        key
    };

    let mut cuts: Vec<HashMap<usize, f64>> = Vec::new();
    let mut keys: Vec<CutKey> = Vec::new();
    let mut pinned: Vec<bool> = Vec::new();
    let mut seen_count: HashMap<CutKey, u32> = HashMap::new();

    for _round in 0..500 {
        let (x, x1, objective) = solve_master(model, &cuts)?;

        let new_cuts: Vec<HashMap<usize, f64>> = model
            .commodities
            .par_iter()
            .filter_map(|cm| separate(g, model, cm, &x, &x1))
            .collect();
        if new_cuts.is_empty() {
            let sol = LpSolution {
                x,
                x1,
                objective,
                status: SolveStatus::Optimal,
            };
            verify_solution(g, model, &sol)?;
            return Ok(sol);
        }

        // Purge clearly slack, unpinned cuts before growing the pool.
        let nx = model.x_pairs.len();
        let value = |cut: &HashMap<usize, f64>| -> f64 {
            cut.iter()
                .map(|(&j, &v)| v * if j >= nx { x1[j - nx] } else { x[j] })
                .sum()
        };
        let mut i = 0;
        while i < cuts.len() {
            if !pinned[i] && value(&cuts[i]) > 1.25 {
                cuts.swap_remove(i);
                keys.swap_remove(i);
                pinned.swap_remove(i);
            } else {
                i += 1;
            }
        }

        let present: std::collections::HashSet<&CutKey> = keys.iter().collect();
        let mut progressed = false;
        let mut fresh = Vec::new();
        for cut in new_cuts {
            let key = key_of(&cut);
            if present.contains(&key) || fresh.iter().any(|(k, _)| *k == key) {
                continue;
            }
            let count = seen_count.entry(key.clone()).or_insert(0);
            *count += 1;
            let pin = *count >= 2;
            fresh.push((key, (cut, pin)));
            progressed = true;
        }
        for (key, (cut, pin)) in fresh {
            cuts.push(cut);
            keys.push(key);
            pinned.push(pin);
        }
        if !progressed {
            return Err(LpError::SolverFailure(
                "separation stalled on known cuts".into(),
            ));
        }
    }
    Err(LpError::SolverFailure(
        "cut generation did not converge".into(),
    ))
}

/// Edmonds-Karp max flow, independent of the Dinic used during
/// separation. Augmenting-path count is structurally bounded, so float
/// capacities terminate.
fn edmonds_karp(net: &mut LayeredNet) -> f64 {
    let mut flow = 0.0;
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; net.nodes];
        pred[net.src] = Some(usize::MAX);
        let mut q = std::collections::VecDeque::from([net.src]);
        'bfs: while let Some(v) = q.pop_front() {
            for &e in &net.head[v] {
                let u = net.to[e];
                if net.cap[e] > SEP_TOL && pred[u].is_none() {
                    pred[u] = Some(e);
                    if u == net.dst {
                        break 'bfs;
                    }
                    q.push_back(u);
                }
            }
        }
        if pred[net.dst].is_none() {
            return flow;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = net.dst;
        while v != net.src {
            let e = pred[v].unwrap();
            bottleneck = bottleneck.min(net.cap[e]);
            v = net.to[e ^ 1];
        }
        let mut v = net.dst;
        while v != net.src {
            let e = pred[v].unwrap();
            net.cap[e] -= bottleneck;
            net.cap[e ^ 1] += bottleneck;
            v = net.to[e ^ 1];
        }
        flow += bottleneck;
    }
}

/// Checks a solution against the full formulation: variable bounds, the
/// coupling and size rows, and unit flow for every commodity.
pub fn verify_solution(
    g: &WeightedGraph,
    model: &LpModel,
    sol: &LpSolution,
) -> Result<(), LpError> {
    let bad = |msg: String| Err(LpError::BadSolution(msg));
    for (i, &v) in sol.x.iter().enumerate() {
        if !(-LINEAR_TOL..=1.0 + LINEAR_TOL).contains(&v) {
            return bad(format!("x[{i}] = {v} out of [0,1]"));
        }
    }
    if let LpKind::Tradeoff { size_bound } = model.kind {
        if sol.x1.len() != sol.x.len() {
            return bad("missing x1 values".into());
        }
        for i in 0..sol.x.len() {
            if sol.x1[i] > sol.x[i] + LINEAR_TOL {
                return bad(format!("x1[{i}] exceeds x[{i}]"));
            }
            if !(-LINEAR_TOL..=1.0 + LINEAR_TOL).contains(&sol.x1[i]) {
                return bad(format!("x1[{i}] out of [0,1]"));
            }
        }
        let total: f64 = sol.x.iter().sum();
        if total > size_bound as f64 + LINEAR_TOL {
            return bad(format!("size row violated: {total} > {size_bound}"));
        }
    }
    let fails: Vec<(u32, u32, f64)> = model
        .commodities
        .par_iter()
        .filter_map(|cm| {
            let mut net = LayeredNet::build(g, model, cm, capacity_fn(&sol.x, &sol.x1));
            let flow = edmonds_karp(&mut net);
            if flow < 1.0 - FLOW_TOL {
                Some((cm.s, cm.t, flow))
            } else {
                None
            }
        })
        .collect();
    if let Some(&(s, t, flow)) = fails.first() {
        return bad(format!("commodity ({s},{t}) routes only {flow:.9} flow"));
    }
    Ok(())
}
