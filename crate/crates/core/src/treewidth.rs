//! Tree decompositions and the bounded-treewidth hopset construction with
//! its three shortcut classes: bag edges, separator edges, and tree-hopset
//! edges.

use std::collections::{HashMap, HashSet};

use crate::ackermann::{inv_ackermann, lambda};
use crate::error::{HopsetError, TdError};
use crate::graph::WeightedGraph;
use crate::hopset::{Hopset, Part};
use crate::oracle::ThreeHopOracle;
use crate::ratio::Ratio;
use crate::tree::{split_invariants_hold, split_tree, RootedTree, TreeSplit};

/// Raw decomposition: a bag list and a tree over bag ids.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    pub n: u32,
    pub bags: Vec<Vec<u32>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> u32 {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1) as u32 - 1
    }

    /// Checks the decomposition properties against a graph: bag ids form a
    /// tree, every edge is inside some bag, and each vertex's bags induce
    /// a connected subtree.
    pub fn validate(&self, g: &WeightedGraph) -> Result<(), TdError> {
        if self.n != g.n() {
            return Err(TdError::invalid(format!(
                "decomposition is for {} nodes, graph has {}",
                self.n,
                g.n()
            )));
        }
        let nb = self.bags.len();
        if nb == 0 {
            return Err(TdError::invalid("no bags"));
        }
        if self.tree_edges.len() != nb - 1 {
            return Err(TdError::invalid(format!(
                "{} bags need {} tree edges, found {}",
                nb,
                nb - 1,
                self.tree_edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); nb];
        for &(a, b) in &self.tree_edges {
            if a >= nb || b >= nb || a == b {
                return Err(TdError::invalid(format!(
                    "bad bag edge ({},{})",
                    a + 1,
                    b + 1
                )));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; nb];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &x in &adj[v] {
                if !seen[x] {
                    seen[x] = true;
                    count += 1;
                    stack.push(x);
                }
            }
        }
        if count != nb {
            return Err(TdError::invalid("bag tree is not connected"));
        }
        for b in &self.bags {
            for &v in b {
                if v == 0 || v > self.n {
                    return Err(TdError::invalid(format!("bag vertex {} out of range", v)));
                }
            }
        }
        for e in g.edges() {
            if !self
                .bags
                .iter()
                .any(|b| b.contains(&e.u) && b.contains(&e.v))
            {
                return Err(TdError::invalid(format!(
                    "edge ({},{}) not inside any bag",
                    e.u, e.v
                )));
            }
        }
        for v in 1..=self.n {
            let holders: Vec<usize> = (0..nb).filter(|&i| self.bags[i].contains(&v)).collect();
            if holders.is_empty() {
                return Err(TdError::invalid(format!("vertex {} appears in no bag", v)));
            }
            let holder_set: HashSet<usize> = holders.iter().copied().collect();
            let mut seen = HashSet::new();
            let mut stack = vec![holders[0]];
            seen.insert(holders[0]);
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if holder_set.contains(&y) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != holders.len() {
                return Err(TdError::invalid(format!(
                    "bags of vertex {} are not connected",
                    v
                )));
            }
        }
        Ok(())
    }
}

/// Standard-form decomposition: every bag has exactly t+1 vertices,
/// neighboring bags share exactly t, rooted, with per-vertex root bags.
#[derive(Debug, Clone)]
pub struct SmoothTd {
    pub n: u32,
    pub width: u32,
    pub bags: Vec<Vec<u32>>,
    pub parent: Vec<usize>,
    pub root: usize,
    /// Per graph node (index 1..=n): the bag containing it closest to the
    /// root.
    pub rootbag: Vec<usize>,
}

/// Brings a valid decomposition to standard form: contracts subset bags,
/// pads bags from their parent to exactly t+1 vertices, and interpolates
/// neighbors until adjacent bags share exactly t. Width never increases.
pub fn normalize_td(g: &WeightedGraph, td: &TreeDecomposition) -> Result<SmoothTd, TdError> {
    td.validate(g)?;
    let t = td.width() as usize;
    let mut bags: Vec<Vec<u32>> = td.bags.clone();
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); bags.len()];
    for &(a, b) in &td.tree_edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut alive: Vec<bool> = vec![true; bags.len()];

    loop {
        // Contract adjacent subset (or equal) bags.
        let mut changed = true;
        while changed {
            changed = false;
            'outer: for x in 0..bags.len() {
                if !alive[x] {
                    continue;
                }
                for &y in adj[x].clone().iter() {
                    let xs: HashSet<u32> = bags[x].iter().copied().collect();
                    let ys: HashSet<u32> = bags[y].iter().copied().collect();
                    if xs.is_subset(&ys) || ys.is_subset(&xs) {
                        let (keep, drop) = if xs.is_subset(&ys) { (y, x) } else { (x, y) };
                        for &z in adj[drop].clone().iter() {
                            adj[z].remove(&drop);
                            if z != keep {
                                adj[z].insert(keep);
                                adj[keep].insert(z);
                            }
                        }
                        adj[drop].clear();
                        alive[drop] = false;
                        changed = true;
                        continue 'outer;
                    }
                }
            }
        }

        // Pad deficient bags top-down from their parent. Rooting at a
        // maximum-size bag means the root itself never needs padding, and
        // a parent padded to t+1 always has enough vertices outside any
        // child that survived contraction.
        let live: Vec<usize> = (0..bags.len()).filter(|&i| alive[i]).collect();
        let root = live.iter().copied().max_by_key(|&i| bags[i].len()).unwrap();
        let mut order = vec![root];
        let mut parent_of: HashMap<usize, usize> = HashMap::new();
        parent_of.insert(root, root);
        let mut qi = 0;
        while qi < order.len() {
            let v = order[qi];
            qi += 1;
            for &x in &adj[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = parent_of.entry(x) {
                    e.insert(v);
                    order.push(x);
                }
            }
        }
        let mut padded = false;
        for &v in &order {
            while bags[v].len() < t + 1 {
                let d = parent_of[&v];
                let Some(&x) = bags[d].iter().find(|x| !bags[v].contains(x)) else {
                    return Err(TdError::invalid("cannot pad bag to standard size"));
                };
                bags[v].push(x);
                bags[v].sort_unstable();
                padded = true;
            }
        }
        if !padded {
            break;
        }
        // Padding may have re-created subset pairs; contract again.
    }

    // Smooth: make adjacent bags share exactly t vertices by interpolating
    // one swap per intermediate bag.
    let live: Vec<usize> = (0..bags.len()).filter(|&i| alive[i]).collect();
    let mut final_bags: Vec<Vec<u32>> = Vec::new();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    for &v in &live {
        remap.insert(v, final_bags.len());
        final_bags.push(bags[v].clone());
    }
    let mut final_edges: Vec<(usize, usize)> = Vec::new();
    for &v in &live {
        for &x in &adj[v] {
            if v < x {
                let (mut a, b) = (remap[&v], remap[&x]);
                let xs: Vec<u32> = final_bags[a]
                    .iter()
                    .filter(|u| !final_bags[b].contains(u))
                    .copied()
                    .collect();
                let ys: Vec<u32> = final_bags[b]
                    .iter()
                    .filter(|u| !final_bags[a].contains(u))
                    .copied()
                    .collect();
                debug_assert_eq!(xs.len(), ys.len());
                // r-1 intermediate bags for r = |xs| swaps.
                let mut cur = final_bags[a].clone();
                for i in 0..xs.len().saturating_sub(1) {
                    cur.retain(|&u| u != xs[i]);
                    cur.push(ys[i]);
                    cur.sort_unstable();
                    let id = final_bags.len();
                    final_bags.push(cur.clone());
                    final_edges.push((a, id));
                    a = id;
                }
                final_edges.push((a, b));
            }
        }
    }

    if final_bags.len() > g.n() as usize {
        return Err(TdError::invalid(format!(
            "normalization produced {} bags for {} nodes",
            final_bags.len(),
            g.n()
        )));
    }
    let out = TreeDecomposition {
        n: g.n(),
        bags: final_bags,
        tree_edges: final_edges,
    };
    out.validate(g)?;
    debug_assert!(out.bags.iter().all(|b| b.len() == t + 1));
    for &(a, b) in &out.tree_edges {
        let shared = out.bags[a]
            .iter()
            .filter(|v| out.bags[b].contains(v))
            .count();
        debug_assert_eq!(shared, t, "neighboring bags must share exactly t vertices");
    }

    // Root at bag 0 and compute per-vertex root bags by BFS depth.
    let nb = out.bags.len();
    let mut adj = vec![Vec::new(); nb];
    for &(a, b) in &out.tree_edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let root = 0usize;
    let mut parent = vec![usize::MAX; nb];
    parent[root] = root;
    let mut order = vec![root];
    let mut qi = 0;
    while qi < order.len() {
        let v = order[qi];
        qi += 1;
        for &x in &adj[v] {
            if parent[x] == usize::MAX {
                parent[x] = v;
                order.push(x);
            }
        }
    }
    let mut rootbag = vec![usize::MAX; g.n() as usize + 1];
    for &b in &order {
        for &v in &out.bags[b] {
            if rootbag[v as usize] == usize::MAX {
                rootbag[v as usize] = b;
            }
        }
    }
    Ok(SmoothTd {
        n: g.n(),
        width: t as u32,
        bags: out.bags,
        parent,
        root,
        rootbag,
    })
}

/// Min-fill elimination heuristic. Valid for any connected graph; width is
/// not guaranteed optimal.
pub fn heuristic_td(g: &WeightedGraph) -> TreeDecomposition {
    let n = g.n() as usize;
    let mut adj: Vec<HashSet<u32>> = vec![HashSet::new(); n + 1];
    for e in g.edges() {
        adj[e.u as usize].insert(e.v);
        adj[e.v as usize].insert(e.u);
    }
    let mut alive: Vec<bool> = vec![true; n + 1];
    let mut bags: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut elim_pos: Vec<usize> = vec![0; n + 1];
    let mut elim_vertex: Vec<u32> = Vec::with_capacity(n);

    for step in 0..n {
        let mut best: Option<(usize, u32)> = None;
        for v in 1..=n as u32 {
            if !alive[v as usize] {
                continue;
            }
            let nb: Vec<u32> = adj[v as usize].iter().copied().collect();
            let mut fill = 0usize;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !adj[nb[i] as usize].contains(&nb[j]) {
                        fill += 1;
                    }
                }
            }
            if best.is_none_or(|(bf, bv)| fill < bf || (fill == bf && v < bv)) {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.unwrap();
        let mut bag: Vec<u32> = adj[v as usize].iter().copied().collect();
        bag.push(v);
        bag.sort_unstable();
        let nb: Vec<u32> = adj[v as usize].iter().copied().collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                adj[nb[i] as usize].insert(nb[j]);
                adj[nb[j] as usize].insert(nb[i]);
            }
        }
        for &x in &nb {
            adj[x as usize].remove(&v);
        }
        adj[v as usize].clear();
        alive[v as usize] = false;
        elim_pos[v as usize] = step;
        elim_vertex.push(v);
        bags.push(bag);
    }

    // Parent bag: the bag of the earliest-eliminated remaining vertex.
    let mut tree_edges = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let v = elim_vertex[i];
        if let Some(&w) = bag
            .iter()
            .filter(|&&w| w != v)
            .min_by_key(|&&w| elim_pos[w as usize])
        {
            tree_edges.push((i, elim_pos[w as usize]));
        }
    }
    TreeDecomposition {
        n: g.n(),
        bags,
        tree_edges,
    }
}

/// Shortcut class counts over the stored (deduplicated) hopset edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TwStats {
    pub bag_edges: usize,
    pub separator_edges: usize,
    pub tree_hopset_edges: usize,
}

struct TwCollect {
    /// (u, x) pairs by class; arcs are oriented u -> x for bag and
    /// separator edges.
    bag: Vec<(u32, u32)>,
    separator: Vec<(u32, u32)>,
    treehop: Vec<(u32, u32)>,
}

fn bag_forest_pairs(bt: &RootedTree, split: &TreeSplit, h2: u32) -> Vec<(u32, u32)> {
    // Embedded (h-2)-hopset of the selected bag forest: the forest edges
    // themselves plus the recursive structural hopset.
    let in_p: HashSet<usize> = split.p_nodes.iter().copied().collect();
    let mut up = vec![usize::MAX; bt.len()];
    let mut order = vec![bt.root()];
    let mut qi = 0;
    while qi < order.len() {
        let v = order[qi];
        qi += 1;
        for &c in bt.children(v) {
            up[c] = if in_p.contains(&v) { v } else { up[v] };
            order.push(c);
        }
    }
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    // Group the forest into trees and run the structural tree construction.
    let mut group: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut group_root = vec![usize::MAX; bt.len()];
    for &v in &order {
        if !in_p.contains(&v) {
            continue;
        }
        let r = if up[v] == usize::MAX {
            v
        } else {
            group_root[up[v]]
        };
        group_root[v] = r;
        group.entry(r).or_default().push(v);
        if up[v] != usize::MAX {
            pairs.push((bt.id(v), bt.id(up[v])));
        }
    }
    let mut roots: Vec<usize> = group.keys().copied().collect();
    roots.sort_unstable();
    for r in roots {
        let nodes = &group[&r];
        let mut local = HashMap::new();
        for (i, &v) in nodes.iter().enumerate() {
            local.insert(v, i);
        }
        let ids: Vec<u32> = nodes.iter().map(|&v| bt.id(v)).collect();
        let parent: Vec<usize> = nodes
            .iter()
            .map(|&v| if v == r { local[&v] } else { local[&up[v]] })
            .collect();
        let sub = RootedTree::from_parents(ids, parent, local[&r]);
        for (a, b, _) in crate::tree::structural_hopset_pairs(&sub, h2) {
            pairs.push((a, b));
        }
    }
    pairs
}

fn component_subtree(bt: &RootedTree, comp: &[usize]) -> RootedTree {
    let set: HashSet<usize> = comp.iter().copied().collect();
    let sub_root = *comp
        .iter()
        .find(|&&v| v == bt.root() || !set.contains(&bt.parent(v)))
        .expect("component without a top bag");
    let mut local = HashMap::new();
    for (i, &v) in comp.iter().enumerate() {
        local.insert(v, i);
    }
    let ids: Vec<u32> = comp.iter().map(|&v| bt.id(v)).collect();
    let parent: Vec<usize> = comp
        .iter()
        .map(|&v| {
            if v == sub_root {
                local[&v]
            } else {
                local[&bt.parent(v)]
            }
        })
        .collect();
    RootedTree::from_parents(ids, parent, local[&sub_root])
}

/// Recursive construction over a sub-bag-tree. `bt` carries bag ids
/// (+1) as external ids.
fn tw_recurse(bt: &RootedTree, std: &SmoothTd, owned: &[Vec<u32>], h: u32, out: &mut TwCollect) {
    let nb = bt.len();
    if nb <= 1 {
        return;
    }
    let t = std.width as u64;
    // p = (n'/t) / lambda_{h-2}(n'/t) while the subtree is larger than t
    // bags, then p = n' / lambda_{h-2}(n').
    let p = if nb as u64 > t {
        let q = (nb as u64).div_ceil(t.max(1));
        let lam = lambda(h as u64 - 2, q).max(1);
        Ratio::new(nb as u128, (t.max(1) * lam) as u128)
    } else {
        let lam = lambda(h as u64 - 2, nb as u64).max(1);
        Ratio::new(nb as u128, lam as u128)
    };

    let split = if p.gt_one() {
        let s = split_tree(bt, p);
        assert!(
            split_invariants_hold(bt, p, &s),
            "tree split guarantees violated"
        );
        s
    } else {
        // Degenerate parameters: select every bag.
        TreeSplit {
            p_nodes: (0..nb).collect(),
            components: Vec::new(),
            attachments: Vec::new(),
        }
    };

    let bag_vs = |local: usize| -> &[u32] { &std.bags[(bt.id(local) - 1) as usize] };

    if h == 2 {
        // Every node appearing in the subtree links to every vertex of
        // every selected bag.
        let mut nodes: Vec<u32> = (0..nb).flat_map(|b| bag_vs(b).iter().copied()).collect();
        nodes.sort_unstable();
        nodes.dedup();
        for &u in &nodes {
            for &b in &split.p_nodes {
                for &x in bag_vs(b) {
                    if u != x {
                        out.separator.push((u, x));
                    }
                }
            }
        }
    } else {
        for (bx, by) in bag_forest_pairs(bt, &split, h - 2) {
            let xs = &std.bags[(bx - 1) as usize];
            let ys = &std.bags[(by - 1) as usize];
            for &x in xs {
                for &y in ys {
                    if x != y {
                        out.treehop.push((x, y));
                    }
                }
            }
        }
        for (comp, atts) in split.components.iter().zip(&split.attachments) {
            for &cb in comp {
                for &u in &owned[(bt.id(cb) - 1) as usize] {
                    for &ab in atts {
                        for &y in bag_vs(ab) {
                            if u != y {
                                out.separator.push((u, y));
                            }
                        }
                    }
                }
            }
        }
    }

    for comp in &split.components {
        tw_recurse(&component_subtree(bt, comp), std, owned, h, out);
    }
}

fn bag_tree(std: &SmoothTd) -> RootedTree {
    let ids: Vec<u32> = (0..std.bags.len()).map(|i| i as u32 + 1).collect();
    RootedTree::from_parents(ids, std.parent.clone(), std.root)
}

fn owned_nodes(std: &SmoothTd) -> Vec<Vec<u32>> {
    let mut owned = vec![Vec::new(); std.bags.len()];
    for v in 1..=std.n {
        owned[std.rootbag[v as usize]].push(v);
    }
    owned
}

fn collect(g: &WeightedGraph, std: &SmoothTd, h: u32) -> TwCollect {
    assert!(h >= 2, "treewidth construction needs hopbound >= 2");
    let mut out = TwCollect {
        bag: Vec::new(),
        separator: Vec::new(),
        treehop: Vec::new(),
    };
    tw_recurse(&bag_tree(std), std, &owned_nodes(std), h, &mut out);
    for u in 1..=g.n() {
        for &x in &std.bags[std.rootbag[u as usize]] {
            if x != u {
                out.bag.push((u, x));
            }
        }
    }
    out
}

fn assemble(
    g: &WeightedGraph,
    col: &TwCollect,
    h: u32,
    tagged: bool,
) -> Result<(Hopset, TwStats), HopsetError> {
    let (link_part, mid_part) = if tagged {
        (Part::FirstLast, Part::Middle)
    } else {
        (Part::Untagged, Part::Untagged)
    };
    let pairs = col
        .treehop
        .iter()
        .map(|&(a, b)| (a, b, mid_part))
        .chain(col.separator.iter().map(|&(a, b)| (a, b, link_part)))
        .chain(col.bag.iter().map(|&(a, b)| (a, b, link_part)));
    let hs = Hopset::from_pairs(g, pairs, h)?;

    let key = |a: u32, b: u32| (a.min(b), a.max(b));
    let bag_set: HashSet<(u32, u32)> = col.bag.iter().map(|&(a, b)| key(a, b)).collect();
    let sep_set: HashSet<(u32, u32)> = col.separator.iter().map(|&(a, b)| key(a, b)).collect();
    let mut stats = TwStats::default();
    for e in hs.edges() {
        let k = (e.u, e.v);
        if bag_set.contains(&k) {
            stats.bag_edges += 1;
        } else if sep_set.contains(&k) {
            stats.separator_edges += 1;
        } else {
            stats.tree_hopset_edges += 1;
        }
    }
    Ok((hs, stats))
}

/// h-hopset for a graph with a standard-form decomposition of width t,
/// with O(t n lambda_h(n)) edges.
pub fn tw_hopset(
    g: &WeightedGraph,
    std: &SmoothTd,
    h: u32,
) -> Result<(Hopset, TwStats), HopsetError> {
    let col = collect(g, std, h);
    assemble(g, &col, h, h == 3)
}

/// The 3-hop oracle split: tree-hopset edges become middle entries, bag
/// and separator edges become oriented first-hop arcs (u -> x, for x in
/// the bag).
pub fn tw_three_hop_oracle(
    g: &WeightedGraph,
    std: &SmoothTd,
) -> Result<(ThreeHopOracle, Hopset, TwStats), HopsetError> {
    let col = collect(g, std, 3);
    let (hs, stats) = assemble(g, &col, 3, true)?;
    let arcs = col.bag.iter().chain(&col.separator).copied();
    let oracle = ThreeHopOracle::build(g, arcs, col.treehop.iter().copied());
    Ok((oracle, hs, stats))
}

/// Single-split linear-size variant at hopbound 2(alpha(n)+1): separator
/// and bag edges as usual, a 2 alpha(n)-hopset of the selected bag forest,
/// and cross edges for bag-tree edges inside components.
pub fn tw_linear_hopset(g: &WeightedGraph, std: &SmoothTd) -> Result<(Hopset, u32), HopsetError> {
    let alpha = inv_ackermann(g.n() as u64).max(1) as u32;
    let hopbound = 2 * (alpha + 1);
    let bt = bag_tree(std);
    let owned = owned_nodes(std);
    let nb = bt.len();
    let mut out = TwCollect {
        bag: Vec::new(),
        separator: Vec::new(),
        treehop: Vec::new(),
    };

    if nb > 1 {
        let p = Ratio::new(nb as u128, alpha as u128);
        let split = if p.gt_one() {
            split_tree(&bt, p)
        } else {
            TreeSplit {
                p_nodes: (0..nb).collect(),
                components: Vec::new(),
                attachments: Vec::new(),
            }
        };
        for (bx, by) in bag_forest_pairs(&bt, &split, 2 * alpha) {
            let xs = &std.bags[(bx - 1) as usize];
            let ys = &std.bags[(by - 1) as usize];
            for &x in xs {
                for &y in ys {
                    if x != y {
                        out.treehop.push((x, y));
                    }
                }
            }
        }
        for (comp, atts) in split.components.iter().zip(&split.attachments) {
            for &cb in comp {
                for &u in &owned[(bt.id(cb) - 1) as usize] {
                    for &ab in atts {
                        for &y in &std.bags[(bt.id(ab) - 1) as usize] {
                            if u != y {
                                out.separator.push((u, y));
                            }
                        }
                    }
                }
            }
            // Cross edges for bag-tree edges inside the component,
            // excluding shared vertices.
            let cset: HashSet<usize> = comp.iter().copied().collect();
            for &cb in comp {
                let pa = bt.parent(cb);
                if cb != bt.root() && cset.contains(&pa) {
                    let xs = &std.bags[(bt.id(cb) - 1) as usize];
                    let ys = &std.bags[(bt.id(pa) - 1) as usize];
                    for &x in xs {
                        if ys.contains(&x) {
                            continue;
                        }
                        for &y in ys {
                            if !xs.contains(&y) {
                                out.treehop.push((x, y));
                            }
                        }
                    }
                }
            }
        }
    }
    for u in 1..=g.n() {
        for &x in &std.bags[std.rootbag[u as usize]] {
            if x != u {
                out.bag.push((u, x));
            }
        }
    }
    let (hs, _) = assemble(g, &out, hopbound, false)?;
    Ok((hs, hopbound))
}
