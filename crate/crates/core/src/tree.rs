//! Hopsets for weighted trees: separator-based tree splitting, the
//! recursive h-hopset construction, and the linear-size
//! 2(alpha(n)+1)-hopset.
//!
//! The recursive structure is weight-independent; shortcut weights are
//! recomputed from the graph when the final `Hopset` is assembled.

use crate::ackermann::{inv_ackermann, lambda};
use crate::error::{GraphError, HopsetError};
use crate::graph::WeightedGraph;
use crate::hopset::{Hopset, Part};
use crate::ratio::Ratio;

/// Rooted tree over local indices `0..len`, carrying external ids.
#[derive(Debug, Clone)]
pub struct RootedTree {
    ids: Vec<u32>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    root: usize,
    preorder: Vec<usize>,
    pre_pos: Vec<usize>,
    depth: Vec<u32>,
}

impl RootedTree {
    /// Builds from local parent pointers (`parent[root] == root`).
    pub fn from_parents(ids: Vec<u32>, parent: Vec<usize>, root: usize) -> RootedTree {
        let n = parent.len();
        assert_eq!(ids.len(), n);
        assert_eq!(parent[root], root);
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if v != root {
                children[parent[v]].push(v);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        let mut preorder = Vec::with_capacity(n);
        let mut pre_pos = vec![0usize; n];
        let mut depth = vec![0u32; n];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            pre_pos[v] = preorder.len();
            preorder.push(v);
            for &c in children[v].iter().rev() {
                depth[c] = depth[v] + 1;
                stack.push(c);
            }
        }
        assert_eq!(preorder.len(), n, "parent pointers do not form one tree");
        RootedTree {
            ids,
            parent,
            children,
            root,
            preorder,
            pre_pos,
            depth,
        }
    }

    /// Views a tree graph as a rooted tree (rooted at external node id
    /// `root_id`). Fails if the graph is not a tree.
    pub fn from_graph(g: &WeightedGraph, root_id: u32) -> Result<RootedTree, GraphError> {
        if !g.is_tree() {
            return Err(GraphError::NotATree(g.n(), g.m()));
        }
        let n = g.n() as usize;
        let root = (root_id - 1) as usize;
        let mut parent = vec![usize::MAX; n];
        parent[root] = root;
        let mut stack = vec![root_id];
        while let Some(v) = stack.pop() {
            for &(x, _) in g.neighbors(v) {
                let xi = (x - 1) as usize;
                if parent[xi] == usize::MAX {
                    parent[xi] = (v - 1) as usize;
                    stack.push(x);
                }
            }
        }
        Ok(RootedTree::from_parents(
            (1..=g.n()).collect(),
            parent,
            root,
        ))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, local: usize) -> u32 {
        self.ids[local]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> usize {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        a
    }

    /// Sub-tree on a node subset (must be connected through `sub_root`).
    fn induced(&self, nodes: &[usize], sub_root: usize) -> RootedTree {
        let mut local = std::collections::HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            local.insert(v, i);
        }
        let ids = nodes.iter().map(|&v| self.ids[v]).collect();
        let parent = nodes
            .iter()
            .map(|&v| {
                if v == sub_root {
                    local[&v]
                } else {
                    local[&self.parent[v]]
                }
            })
            .collect();
        RootedTree::from_parents(ids, parent, local[&sub_root])
    }
}

/// Outcome of a tree split: a separator set P of at most 2p nodes
/// such that every component of T minus P has fewer than n/p nodes and at
/// most two attachment nodes in P.
#[derive(Debug, Clone)]
pub struct TreeSplit {
    pub p_nodes: Vec<usize>,
    pub components: Vec<Vec<usize>>,
    /// Per component, the P-nodes adjacent to it (at most 2).
    pub attachments: Vec<Vec<usize>>,
}

/// Bottom-up greedy split: repeatedly select the deepest node whose
/// residual subtree reaches n/p nodes, then close P under pairwise LCAs.
/// All size comparisons are exact rational cross-multiplications.
pub fn split_tree(rt: &RootedTree, p: Ratio) -> TreeSplit {
    assert!(p.gt_one(), "split parameter must exceed 1");
    let n = rt.len();
    // size >= n/p  <=>  size * p >= n
    let reaches = |size: u128| size * p.num() >= n as u128 * p.den();

    let mut size = vec![1u64; n];
    let mut in_p = vec![false; n];
    for &v in rt.preorder.iter().rev() {
        if reaches(size[v] as u128) {
            in_p[v] = true;
            size[v] = 0;
        }
        if v != rt.root() {
            size[rt.parent(v)] += size[v];
        }
    }

    // LCA closure: pairwise LCAs of the selected set, obtained from
    // preorder-consecutive pairs.
    let mut selected: Vec<usize> = (0..n).filter(|&v| in_p[v]).collect();
    selected.sort_by_key(|&v| rt.pre_pos[v]);
    for w in selected
        .windows(2)
        .map(|w| rt.lca(w[0], w[1]))
        .collect::<Vec<_>>()
    {
        in_p[w] = true;
    }
    let p_nodes: Vec<usize> = (0..n).filter(|&v| in_p[v]).collect();

    let mut comp_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for v in 0..n {
        if in_p[v] || comp_of[v] != usize::MAX {
            continue;
        }
        let ci = components.len();
        let mut nodes = vec![v];
        comp_of[v] = ci;
        let mut i = 0;
        while i < nodes.len() {
            let x = nodes[i];
            i += 1;
            let mut reach = |y: usize| {
                if !in_p[y] && comp_of[y] == usize::MAX {
                    comp_of[y] = ci;
                    nodes.push(y);
                }
            };
            if x != rt.root() {
                reach(rt.parent(x));
            }
            for &c in rt.children(x) {
                reach(c);
            }
        }
        nodes.sort_unstable();
        components.push(nodes);
    }

    let mut attachments = vec![Vec::new(); components.len()];
    for v in 0..n {
        if v == rt.root() {
            continue;
        }
        let pa = rt.parent(v);
        if in_p[v] && comp_of[pa] != usize::MAX {
            attachments[comp_of[pa]].push(v);
        } else if !in_p[v] && in_p[pa] {
            attachments[comp_of[v]].push(pa);
        }
    }
    for a in &mut attachments {
        a.sort_unstable();
        a.dedup();
        debug_assert!(a.len() <= 2, "component with more than two attachments");
    }
    TreeSplit {
        p_nodes,
        components,
        attachments,
    }
}

/// Checks the three split guarantees: separator size, component size,
/// and attachment count.
pub fn split_invariants_hold(rt: &RootedTree, p: Ratio, split: &TreeSplit) -> bool {
    let n = rt.len() as u128;
    // |P| <= 2p and components strictly below n/p nodes.
    let p_ok = split.p_nodes.len() as u128 * p.den() <= 2 * p.num();
    let comp_ok = split
        .components
        .iter()
        .all(|c| (c.len() as u128) * p.num() < n * p.den());
    let att_ok = split.attachments.iter().all(|a| a.len() <= 2);
    p_ok && comp_ok && att_ok
}

/// The closest-P-ancestor forest: trees over the selected nodes, plus the
/// list of roots.
fn p_forest(rt: &RootedTree, p_nodes: &[usize]) -> Vec<RootedTree> {
    let in_p: std::collections::HashSet<usize> = p_nodes.iter().copied().collect();
    // nearest P ancestor (strict) per node, by preorder.
    let mut up = vec![usize::MAX; rt.len()];
    for &v in &rt.preorder {
        if v != rt.root() {
            let pa = rt.parent(v);
            up[v] = if in_p.contains(&pa) { pa } else { up[pa] };
        }
    }
    // Group P nodes into trees by their P-root.
    let mut group_root = vec![usize::MAX; rt.len()];
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for &v in &rt.preorder {
        if !in_p.contains(&v) {
            continue;
        }
        let r = if up[v] == usize::MAX {
            v
        } else {
            group_root[up[v]]
        };
        group_root[v] = r;
        groups.entry(r).or_default().push(v);
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();
    roots
        .into_iter()
        .map(|r| {
            let nodes = &groups[&r];
            let mut local = std::collections::HashMap::new();
            for (i, &v) in nodes.iter().enumerate() {
                local.insert(v, i);
            }
            let ids: Vec<u32> = nodes.iter().map(|&v| rt.ids[v]).collect();
            let parent: Vec<usize> = nodes
                .iter()
                .map(|&v| if v == r { local[&v] } else { local[&up[v]] })
                .collect();
            RootedTree::from_parents(ids, parent, local[&r])
        })
        .collect()
}

/// Edges of the closest-P-ancestor forest, as external id pairs.
fn p_forest_edges(forest: &[RootedTree]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for t in forest {
        for v in 0..t.len() {
            if v != t.root() {
                out.push((t.id(v), t.id(t.parent(v))));
            }
        }
    }
    out
}

fn component_tree(rt: &RootedTree, comp: &[usize]) -> RootedTree {
    let set: std::collections::HashSet<usize> = comp.iter().copied().collect();
    let sub_root = *comp
        .iter()
        .find(|&&v| v == rt.root() || !set.contains(&rt.parent(v)))
        .expect("component without a top node");
    rt.induced(comp, sub_root)
}

/// Recursive structural construction. Emitted pairs use external ids; for
/// hopbound 3, edges touching a selected set P are tagged first/last and
/// the embedded (h-2)-hopsets are tagged middle.
fn hopset_pairs(rt: &RootedTree, h: u32, out: &mut Vec<(u32, u32, Part)>) {
    let n = rt.len();
    if n <= 2 {
        return;
    }
    if h == 1 {
        for a in 0..n {
            for b in a + 1..n {
                out.push((rt.id(a), rt.id(b), Part::Untagged));
            }
        }
        return;
    }

    let lam = lambda(h as u64 - 2, n as u64).max(1);
    let p = Ratio::new(n as u128, lam as u128);
    if !p.gt_one() {
        // Degenerate split (tiny subtree): fall back to direct shortcuts.
        for a in 0..n {
            for b in a + 1..n {
                out.push((rt.id(a), rt.id(b), Part::Untagged));
            }
        }
        return;
    }
    let split = split_tree(rt, p);
    debug_assert!(split_invariants_hold(rt, p, &split));

    if h == 2 {
        for v in 0..n {
            for &x in &split.p_nodes {
                if v != x {
                    out.push((rt.id(v), rt.id(x), Part::Untagged));
                }
            }
        }
    } else {
        let (link_part, mid_part) = if h == 3 {
            (Part::FirstLast, Part::Middle)
        } else {
            (Part::Untagged, Part::Untagged)
        };
        let forest = p_forest(rt, &split.p_nodes);
        for (a, b) in p_forest_edges(&forest) {
            out.push((a, b, mid_part));
        }
        for t in &forest {
            let mut sub = Vec::new();
            hopset_pairs(t, h - 2, &mut sub);
            out.extend(sub.into_iter().map(|(a, b, _)| (a, b, mid_part)));
        }
        for (comp, atts) in split.components.iter().zip(&split.attachments) {
            for &u in comp {
                for &x in atts {
                    out.push((rt.id(u), rt.id(x), link_part));
                }
            }
        }
    }

    for comp in &split.components {
        hopset_pairs(&component_tree(rt, comp), h, out);
    }
}

/// Structural hopset pairs for a rooted tree, in external ids. Exposed
/// for the bag-forest constructions, which reuse the recursion shape.
pub(crate) fn structural_hopset_pairs(rt: &RootedTree, h: u32) -> Vec<(u32, u32, Part)> {
    let mut out = Vec::new();
    hopset_pairs(rt, h, &mut out);
    out
}

/// h-hopset of a weighted tree with O(n lambda_h(n)) edges.
pub fn tree_hopset(g: &WeightedGraph, h: u32) -> Result<Hopset, HopsetError> {
    assert!(h >= 1, "hopbound must be at least 1");
    let rt = RootedTree::from_graph(g, 1)?;
    let mut pairs = Vec::new();
    hopset_pairs(&rt, h, &mut pairs);
    Hopset::from_pairs(g, pairs, h)
}

/// Linear-size hopset with hopbound 2(alpha(n)+1): one split with
/// p = n/alpha(n), attachment links, and a 2 alpha(n)-hopset of the
/// selected forest. Returns the hopset and its hopbound.
pub fn linear_tree_hopset(g: &WeightedGraph) -> Result<(Hopset, u32), HopsetError> {
    let n = g.n();
    assert!(n >= 2, "need at least two nodes");
    let alpha = inv_ackermann(n as u64).max(1);
    let hopbound = 2 * (alpha as u32 + 1);
    let rt = RootedTree::from_graph(g, 1)?;

    let mut pairs = Vec::new();
    let p = Ratio::new(n as u128, alpha as u128);
    if p.gt_one() {
        let split = split_tree(&rt, p);
        debug_assert!(split_invariants_hold(&rt, p, &split));
        for (comp, atts) in split.components.iter().zip(&split.attachments) {
            for &u in comp {
                for &x in atts {
                    pairs.push((rt.id(u), rt.id(x), Part::Untagged));
                }
            }
        }
        let forest = p_forest(&rt, &split.p_nodes);
        for (a, b) in p_forest_edges(&forest) {
            pairs.push((a, b, Part::Untagged));
        }
        for t in &forest {
            hopset_pairs(t, 2 * alpha as u32, &mut pairs);
        }
    } else {
        // alpha >= n only happens for tiny trees; everything is close.
        hopset_pairs(&rt, hopbound, &mut pairs);
    }
    Ok((Hopset::from_pairs(g, pairs, hopbound)?, hopbound))
}
