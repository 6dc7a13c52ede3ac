//! Minimum spanning tree over the complete terminal graph, rooting, and
//! the two equivalent tree-cost evaluations.

use std::cmp::Ordering;

use crate::cost::{CostMatrix, LabelCosts};
use crate::error::{Error, Result};

/// Disjoint sets with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

/// Undirected spanning tree; edges stored as `(u, v)` with `u < v` in the
/// order Kruskal accepted them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SpanningTree {
    pub fn total_weight(&self, weight: impl Fn(usize, usize) -> f64) -> f64 {
        self.edges.iter().map(|&(u, v)| weight(u, v)).sum()
    }
}

/// Kruskal over all pairs, ties broken by the lexicographic id pair so the
/// result does not depend on input order.
pub fn kruskal_by(ids: &[String], weight: impl Fn(usize, usize) -> f64) -> SpanningTree {
    let k = ids.len();
    let key = |u: usize, v: usize| {
        let (a, b) = (&ids[u], &ids[v]);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut pairs: Vec<(f64, usize, usize)> = (0..k)
        .flat_map(|u| (u + 1..k).map(move |v| (u, v)))
        .map(|(u, v)| (weight(u, v), u, v))
        .collect();
    pairs.sort_by(|x, y| match x.0.total_cmp(&y.0) {
        Ordering::Equal => key(x.1, x.2).cmp(&key(y.1, y.2)),
        other => other,
    });
    let mut sets = UnionFind::new(k);
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    for (_, u, v) in pairs {
        if sets.union(u, v) {
            edges.push((u, v));
            if edges.len() + 1 == k {
                break;
            }
        }
    }
    SpanningTree {
        node_count: k,
        edges,
    }
}

/// Minimum spanning tree under `w(u, v) = phi(u, v) - phi(v)`.
pub fn kruskal_mst(costs: &CostMatrix) -> Result<SpanningTree> {
    for u in 0..costs.len() {
        for v in u + 1..costs.len() {
            let (a, b) = (costs.weight(u, v), costs.weight(v, u));
            if !a.is_finite() || (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                return Err(Error::Numeric(format!(
                    "weight of ({}, {}) is not finite and symmetric: {a} vs {b}",
                    costs.ids()[u],
                    costs.ids()[v]
                )));
            }
        }
    }
    Ok(kruskal_by(costs.ids(), |u, v| costs.weight(u, v)))
}

/// Rooted tree whose nodes are labels `0..k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhyloTree {
    ids: Vec<String>,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl PhyloTree {
    /// Builds and validates a tree from a parent map; exactly one node has
    /// no parent and every node reaches it.
    pub fn from_parents(ids: Vec<String>, parent: Vec<Option<usize>>) -> Result<Self> {
        let k = ids.len();
        if parent.len() != k || k == 0 {
            return Err(Error::domain("parent map must cover every node"));
        }
        let roots: Vec<usize> = (0..k).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::domain(format!("expected one root, found {}", roots.len())));
        }
        let mut children = vec![Vec::new(); k];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= k || p == v {
                    return Err(Error::domain(format!("invalid parent {p} for node {v}")));
                }
                children[p].push(v);
            }
        }
        for c in &mut children {
            c.sort_by(|&a, &b| ids[a].cmp(&ids[b]).then(a.cmp(&b)));
        }
        let tree = PhyloTree {
            ids,
            root: roots[0],
            parent,
            children,
        };
        if tree.preorder().len() != k {
            return Err(Error::domain("parent map contains a cycle"));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            if order.len() > self.len() {
                break;
            }
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// Directed edges `(parent, child)` in preorder of the child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.preorder()
            .into_iter()
            .filter_map(|v| self.parent[v].map(|p| (p, v)))
            .collect()
    }

    /// Edges as sorted unordered pairs.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        e.sort_unstable();
        e
    }

    /// Newick with every node labeled, e.g. `(B,C)A;`. Children appear in
    /// id order.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        // (node, next child index)
        let mut stack = vec![(self.root, 0usize)];
        while let Some((v, i)) = stack.pop() {
            let kids = &self.children[v];
            if kids.is_empty() {
                out.push_str(&newick_label(&self.ids[v]));
                continue;
            }
            if i == kids.len() {
                out.push(')');
                out.push_str(&newick_label(&self.ids[v]));
                continue;
            }
            out.push(if i == 0 { '(' } else { ',' });
            stack.push((v, i + 1));
            stack.push((kids[i], 0));
        }
        out.push(';');
        out
    }
}

fn newick_label(label: &str) -> String {
    let plain = !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Orients a spanning tree away from `root` (default: smallest id).
pub fn root_tree(tree: &SpanningTree, ids: &[String], root: Option<&str>) -> Result<PhyloTree> {
    let k = tree.node_count;
    if ids.len() != k || k == 0 {
        return Err(Error::domain("ids must name every tree node"));
    }
    if tree.edges.len() + 1 != k {
        return Err(Error::domain(format!(
            "a spanning tree on {k} nodes needs {} edges, got {}",
            k - 1,
            tree.edges.len()
        )));
    }
    let root = match root {
        Some(r) => ids
            .iter()
            .position(|id| id == r)
            .ok_or_else(|| Error::domain(format!("unknown root id `{r}`")))?,
        None => (0..k).min_by(|&a, &b| ids[a].cmp(&ids[b])).unwrap(),
    };
    let mut adj = vec![Vec::new(); k];
    for &(u, v) in &tree.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent = vec![None; k];
    let mut seen = vec![false; k];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                stack.push(v);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::domain("edges do not span all nodes"));
    }
    PhyloTree::from_parents(ids.to_vec(), parent)
}

fn check_labels(tree: &PhyloTree, costs: &impl LabelCosts) -> Result<()> {
    if tree.len() > costs.label_count() {
        return Err(Error::domain(format!(
            "tree has {} nodes but costs cover only {} labels",
            tree.len(),
            costs.label_count()
        )));
    }
    Ok(())
}

/// `phi(root) + sum over (parent, child) of phi(parent, child)`.
pub fn tree_cost_directed(tree: &PhyloTree, costs: &impl LabelCosts) -> Result<f64> {
    check_labels(tree, costs)?;
    Ok(costs.node_cost(tree.root)
        + tree
            .edges()
            .into_iter()
            .map(|(p, c)| costs.edge_cost(p, c))
            .sum::<f64>())
}

/// `sum of w'(u, v) over edges + sum of phi(v) over nodes`; root-free.
pub fn tree_cost_symmetric(tree: &PhyloTree, costs: &impl LabelCosts) -> Result<f64> {
    check_labels(tree, costs)?;
    let nodes: f64 = (0..tree.len()).map(|v| costs.node_cost(v)).sum();
    let edges: f64 = tree
        .edges()
        .into_iter()
        .map(|(p, c)| costs.symmetric_weight(p, c))
        .sum();
    Ok(nodes + edges)
}

/// Path costs `d(v, u)` between all labels, excluding both endpoint costs:
/// a path pays `w'` on its edges and `phi` on its interior nodes.
pub fn spider_distances(costs: &impl LabelCosts) -> Vec<f64> {
    let n = costs.label_count();
    // Arc a -> b pays w'(a, b) + phi(b); the final node's cost is removed
    // at the end.
    let mut dist = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                dist[a * n + b] = costs.symmetric_weight(a, b) + costs.node_cost(b);
            }
        }
    }
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                let via = dist[a * n + m] + dist[m * n + b];
                if via < dist[a * n + b] {
                    dist[a * n + b] = via;
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b {
                dist[a * n + b] -= costs.node_cost(b);
            }
        }
    }
    dist
}

/// Spider ratio `(c(center) + sum_{u in S} d(center, u)) / |S|` over the
/// graph of all labels in `costs`.
pub fn spider_quotient(
    costs: &impl LabelCosts,
    center: usize,
    subset: &[usize],
    center_cost: f64,
) -> Result<f64> {
    if subset.len() < 2 {
        return Err(Error::domain("a spider needs at least two terminals"));
    }
    let n = costs.label_count();
    if center >= n || subset.iter().any(|&u| u >= n) {
        return Err(Error::domain("spider label out of range"));
    }
    let dist = spider_distances(costs);
    Ok(quotient(&dist, n, center, subset, center_cost))
}

fn quotient(dist: &[f64], n: usize, center: usize, subset: &[usize], center_cost: f64) -> f64 {
    let legs: f64 = subset.iter().map(|&u| dist[center * n + u]).sum();
    (center_cost + legs) / subset.len() as f64
}

/// Best spider ratio at `center` over every terminal subset of size at
/// least two, and over size-two subsets only: `(all, pairs)`.
pub fn best_spider_quotients(
    costs: &impl LabelCosts,
    center: usize,
    terminals: &[usize],
    center_cost: f64,
) -> Result<(f64, f64)> {
    if terminals.len() < 2 {
        return Err(Error::domain("a spider needs at least two terminals"));
    }
    if terminals.len() > 20 {
        return Err(Error::Size(format!(
            "{} terminals is too many for subset enumeration",
            terminals.len()
        )));
    }
    let n = costs.label_count();
    let dist = spider_distances(costs);
    let mut best_all = f64::INFINITY;
    let mut best_pair = f64::INFINITY;
    let mut subset = Vec::with_capacity(terminals.len());
    for mask in 1u32..(1 << terminals.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        subset.clear();
        subset.extend(
            (0..terminals.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| terminals[i]),
        );
        let q = quotient(&dist, n, center, &subset, center_cost);
        best_all = best_all.min(q);
        if subset.len() == 2 {
            best_pair = best_pair.min(q);
        }
    }
    Ok((best_all, best_pair))
}
