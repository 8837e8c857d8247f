use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::generate::HiInstance;
use crate::graph::Graph;
use crate::scalar::Scalar;

/// A tree decomposition: a tree over bag nodes plus one vertex bag per
/// node. Validity against a graph is checked by [`validate`], never
/// assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeDecomposition {
    bags: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize)>,
}

/// A violated tree-decomposition condition, with a witness.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NotATree(String),
    UncoveredVertex(usize),
    UncoveredEdge(usize, usize),
    DisconnectedBagSubtree(usize),
    BagVertexOutOfRange { node: usize, vertex: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NotATree(msg) => write!(f, "host tree invalid: {msg}"),
            Violation::UncoveredVertex(v) => write!(f, "vertex {v} in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge ({u},{v}) in no bag"),
            Violation::DisconnectedBagSubtree(v) => {
                write!(f, "bags containing vertex {v} do not form a subtree")
            }
            Violation::BagVertexOutOfRange { node, vertex } => {
                write!(f, "bag {node} mentions unknown vertex {vertex}")
            }
        }
    }
}

impl TreeDecomposition {
    pub fn new(bags: Vec<BTreeSet<usize>>, edges: Vec<(usize, usize)>) -> Self {
        TreeDecomposition { bags, edges }
    }

    pub fn bag(&self, node: usize) -> &BTreeSet<usize> {
        &self.bags[node]
    }

    pub fn bags(&self) -> &[BTreeSet<usize>] {
        &self.bags
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Tree edges, normalized `a < b` and sorted.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Width of this decomposition: max bag size minus one.
    pub fn width(&self) -> Result<usize> {
        let max = self.bags.iter().map(|b| b.len()).max().unwrap_or(0);
        if max == 0 {
            return Err(Error::EmptyDecomposition);
        }
        Ok(max - 1)
    }

    /// Union of all bags.
    pub fn covered_vertices(&self) -> BTreeSet<usize> {
        self.bags.iter().flatten().copied().collect()
    }

    fn tree_shape_violations(&self) -> Vec<Violation> {
        let n = self.bags.len();
        let mut out = Vec::new();
        if n == 0 {
            out.push(Violation::NotATree("no nodes".into()));
            return out;
        }
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                out.push(Violation::NotATree(format!("edge ({a},{b}) out of range")));
                return out;
            }
            if a == b {
                out.push(Violation::NotATree(format!("self-loop at node {a}")));
                return out;
            }
        }
        if self.edges.len() != n - 1 {
            out.push(Violation::NotATree(format!(
                "{} edges on {} nodes",
                self.edges.len(),
                n
            )));
            return out;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        if count != n {
            out.push(Violation::NotATree("disconnected".into()));
        }
        out
    }
}

/// Check all three decomposition conditions against `g`, returning every
/// violation found (empty = valid). Violations are data, not errors.
pub fn validate<W: Scalar>(d: &TreeDecomposition, g: &Graph<W>) -> Vec<Violation> {
    let mut out = d.tree_shape_violations();
    if !out.is_empty() {
        return out;
    }
    let n = g.vertex_count();
    for (node, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                out.push(Violation::BagVertexOutOfRange { node, vertex: v });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    let mut nodes_for: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (node, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            nodes_for[v].push(node);
        }
    }
    for v in 0..n {
        if nodes_for[v].is_empty() {
            out.push(Violation::UncoveredVertex(v));
        }
    }
    for e in g.edges() {
        let covered = d.bags.iter().any(|b| b.contains(&e.u) && b.contains(&e.v));
        if !covered {
            out.push(Violation::UncoveredEdge(e.u, e.v));
        }
    }
    let adj = d.adjacency();
    for v in 0..n {
        if nodes_for[v].len() <= 1 {
            continue;
        }
        let members: BTreeSet<usize> = nodes_for[v].iter().copied().collect();
        let start = nodes_for[v][0];
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if members.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != members.len() {
            out.push(Violation::DisconnectedBagSubtree(v));
        }
    }
    out
}

/// A rooted-binary decomposition obeying the join/introduce/forget/leaf
/// discipline.
#[derive(Clone, Debug)]
pub struct NiceTreeDecomposition {
    pub td: TreeDecomposition,
    pub root: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NicenessViolation {
    TooManyChildren(usize),
    JoinBagMismatch(usize),
    UnaryStepNotByOne(usize),
    LeafNotSingleton(usize),
}

impl std::fmt::Display for NicenessViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NicenessViolation::TooManyChildren(n) => write!(f, "node {n} has > 2 children"),
            NicenessViolation::JoinBagMismatch(n) => {
                write!(f, "join node {n} has a child with a different bag")
            }
            NicenessViolation::UnaryStepNotByOne(n) => {
                write!(f, "unary node {n} does not introduce/forget exactly one vertex")
            }
            NicenessViolation::LeafNotSingleton(n) => write!(f, "leaf {n} is not a singleton"),
        }
    }
}

impl NiceTreeDecomposition {
    /// Children lists under the root orientation.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let adj = self.td.adjacency();
        let mut children = vec![Vec::new(); self.td.node_count()];
        let mut seen = vec![false; self.td.node_count()];
        seen[self.root] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    children[u].push(v);
                    queue.push_back(v);
                }
            }
        }
        children
    }

    /// Check the four niceness conditions.
    pub fn check_nice(&self) -> Vec<NicenessViolation> {
        let mut out = Vec::new();
        let children = self.children();
        for (node, ch) in children.iter().enumerate() {
            let bag = self.td.bag(node);
            match ch.len() {
                0 => {
                    if bag.len() != 1 {
                        out.push(NicenessViolation::LeafNotSingleton(node));
                    }
                }
                1 => {
                    let child = self.td.bag(ch[0]);
                    let ok = (bag.len() + 1 == child.len() && bag.is_subset(child))
                        || (child.len() + 1 == bag.len() && child.is_subset(bag));
                    if !ok {
                        out.push(NicenessViolation::UnaryStepNotByOne(node));
                    }
                }
                2 => {
                    if ch.iter().any(|&c| self.td.bag(c) != bag) {
                        out.push(NicenessViolation::JoinBagMismatch(node));
                    }
                }
                _ => out.push(NicenessViolation::TooManyChildren(node)),
            }
        }
        out
    }
}

/// Convert a valid decomposition into nice form: root it, binarize joins
/// with duplicated bags, expand bag differences into introduce/forget
/// chains, and extend leaves down to singletons. Width is preserved.
pub fn make_nice<W: Scalar>(d: &TreeDecomposition, g: &Graph<W>) -> Result<NiceTreeDecomposition> {
    let violations = validate(d, g);
    if !violations.is_empty() {
        return Err(Error::InvalidDecomposition(format!(
            "{} violation(s), first: {}",
            violations.len(),
            violations[0]
        )));
    }
    if g.vertex_count() == 0 {
        return Err(Error::EmptyDecomposition);
    }

    // Contract empty bags away first; leaves must become singletons.
    let (bags, edges) = strip_empty_bags(&d.bags, &d.tree_edges());

    let mut out = Builder::default();
    let adj = {
        let mut adj = vec![Vec::new(); bags.len()];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    };
    let root = out.build(0, usize::MAX, &bags, &adj);
    let nice = NiceTreeDecomposition {
        td: TreeDecomposition::new(out.bags, out.edges),
        root,
    };
    Ok(nice)
}

fn strip_empty_bags(
    bags: &[BTreeSet<usize>],
    edges: &[(usize, usize)],
) -> (Vec<BTreeSet<usize>>, Vec<(usize, usize)>) {
    let mut bags = bags.to_vec();
    let mut edges = edges.to_vec();
    loop {
        let Some(victim) = (0..bags.len()).find(|&i| bags[i].is_empty() && bags.len() > 1) else {
            break;
        };
        let neighbors: Vec<usize> = edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == victim {
                    Some(b)
                } else if b == victim {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        edges.retain(|&(a, b)| a != victim && b != victim);
        if let Some((&hub, rest)) = neighbors.split_first() {
            for &other in rest {
                edges.push((hub, other));
            }
        }
        bags.remove(victim);
        for e in &mut edges {
            if e.0 > victim {
                e.0 -= 1;
            }
            if e.1 > victim {
                e.1 -= 1;
            }
        }
    }
    (bags, edges)
}

#[derive(Default)]
struct Builder {
    bags: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn add(&mut self, bag: BTreeSet<usize>) -> usize {
        self.bags.push(bag);
        self.bags.len() - 1
    }

    fn link(&mut self, parent: usize, child: usize) {
        self.edges.push((parent, child));
    }

    /// Emit the nice subtree for original `node`; returns its top id.
    fn build(
        &mut self,
        node: usize,
        parent: usize,
        bags: &[BTreeSet<usize>],
        adj: &[Vec<usize>],
    ) -> usize {
        let bag = &bags[node];
        let children: Vec<usize> = adj[node].iter().copied().filter(|&c| c != parent).collect();
        let top = self.add(bag.clone());
        if children.is_empty() {
            self.extend_leaf(top);
            return top;
        }
        // Binary join spine of copies of `bag`; each child hangs off one
        // spine slot via an introduce/forget chain.
        let mut slots = vec![top];
        while slots.len() < children.len() {
            let grow = slots.remove(0);
            let a = self.add(bag.clone());
            let b = self.add(bag.clone());
            self.link(grow, a);
            self.link(grow, b);
            slots.push(a);
            slots.push(b);
        }
        for (slot, &child) in slots.iter().zip(children.iter()) {
            let child_top = self.build(child, node, bags, adj);
            self.splice(*slot, child_top, bag, &bags[child]);
        }
        top
    }

    /// Connect `parent` (bag `from`) to `child_top` (bag `to`) through a
    /// forget/introduce chain so adjacent bags differ by exactly one
    /// vertex. Equal bags get a single bounce step to stay unary-legal.
    fn splice(
        &mut self,
        parent: usize,
        child_top: usize,
        from: &BTreeSet<usize>,
        to: &BTreeSet<usize>,
    ) {
        if from == to {
            // Duplicate unary bags are not nice; bounce through a
            // one-vertex-smaller bag (nonempty bags always allow it).
            let v = *from.iter().next().expect("nonempty bag");
            let mut mid = from.clone();
            mid.remove(&v);
            let id = self.add(mid);
            self.link(parent, id);
            self.link(id, child_top);
            return;
        }
        let mut current = from.clone();
        let mut at = parent;
        let mut planned: Vec<BTreeSet<usize>> = Vec::new();
        for v in from.difference(to) {
            let mut next = current.clone();
            next.remove(v);
            planned.push(next.clone());
            current = next;
        }
        for v in to.difference(from) {
            let mut next = current.clone();
            next.insert(*v);
            planned.push(next.clone());
            current = next;
        }
        debug_assert_eq!(&current, to);
        // The last planned bag equals `to`; the child's top node already
        // carries it, so stop one short.
        planned.pop();
        for bag in planned {
            let id = self.add(bag);
            self.link(at, id);
            at = id;
        }
        self.link(at, child_top);
    }

    /// Extend a leaf bag down to a singleton by forgetting vertices.
    fn extend_leaf(&mut self, leaf: usize) {
        let mut current = self.bags[leaf].clone();
        let mut at = leaf;
        while current.len() > 1 {
            let v = *current.iter().next().unwrap();
            current.remove(&v);
            let id = self.add(current.clone());
            self.link(at, id);
            at = id;
        }
    }
}

/// Greedy min-fill elimination decomposition. Valid for any connected
/// graph; width is heuristic, not optimal.
pub fn greedy_decomposition<W: Scalar>(g: &Graph<W>) -> Result<TreeDecomposition> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyDecomposition);
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in g.edges() {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut elim_bag: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    while !alive.is_empty() {
        // Min fill-in, ties by lowest id.
        let mut best: Option<(usize, usize)> = None;
        for &v in &alive {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut fill = 0usize;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            if best.map_or(true, |(bf, _)| fill < bf) {
                best = Some((fill, v));
            }
        }
        let v = best.unwrap().1;
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        let mut bag: BTreeSet<usize> = nb.into_iter().collect();
        bag.insert(v);
        elim_bag.push(bag);
        order.push(v);
        adj[v].clear();
        alive.remove(&v);
    }

    // Bag k glues to the bag of the earliest-eliminated later neighbor.
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (k, bag) in elim_bag.iter().enumerate() {
        let next = bag
            .iter()
            .filter(|&&u| u != order[k])
            .map(|&u| position[&u])
            .min();
        if let Some(p) = next {
            edges.push((k, p));
        }
    }
    Ok(TreeDecomposition::new(elim_bag, edges))
}

/// Exact treewidth by dynamic programming over vertex subsets. A test
/// oracle; hard-capped to small graphs.
pub fn exact_treewidth<W: Scalar>(g: &Graph<W>) -> Result<usize> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyDecomposition);
    }
    if n > 16 {
        return Err(Error::ResourceCeiling(format!(
            "exact treewidth capped at 16 vertices, got {n}"
        )));
    }
    if n == 1 {
        return Ok(0);
    }
    let full: u32 = (1u32 << n) - 1;
    // q(S, v): neighbors of v outside S reachable through S.
    let q = |s: u32, v: usize| -> usize {
        let mut seen = 1u32 << v;
        let mut stack = vec![v];
        let mut reach = 0u32;
        while let Some(u) = stack.pop() {
            for &(w, _) in g.neighbors(u) {
                let bit = 1u32 << w;
                if s & bit != 0 {
                    if seen & bit == 0 {
                        seen |= bit;
                        stack.push(w);
                    }
                } else {
                    reach |= bit;
                }
            }
        }
        (reach & !(1 << v)).count_ones() as usize
    };
    let mut tw = vec![usize::MAX; (full as usize) + 1];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = usize::MAX;
        for v in 0..n {
            let bit = 1u32 << v;
            if s & bit == 0 {
                continue;
            }
            let prev = s & !bit;
            if tw[prev as usize] == usize::MAX {
                continue;
            }
            let cost = q(prev, v).max(tw[prev as usize]);
            best = best.min(cost);
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize])
}

/// The explicit decomposition of an H_i instance: a central bag
/// {s, t, left vertices}, one bag R_b per right vertex, augmented path
/// decompositions for the terminal bundles, and recursive gluing of each
/// inner copy at a bag containing both placement endpoints. Width <= n+1.
pub fn h_i_decomposition<W: Scalar>(inst: &HiInstance<W>) -> TreeDecomposition {
    let layout = &inst.layout;
    let n = layout.n;
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();

    let mut central: BTreeSet<usize> = layout.left.iter().copied().collect();
    central.insert(layout.source);
    central.insert(layout.sink);
    bags.push(central);
    let central_id = 0usize;

    for b in 0..n {
        let mut bag: BTreeSet<usize> = layout.left.iter().copied().collect();
        bag.insert(layout.sink);
        bag.insert(layout.right[b]);
        let id = bags.len();
        bags.push(bag);
        edges.push((central_id, id));
    }

    // Source-side bundles: every path bag gains l_a; the first bag
    // (contains s and l_a) attaches to the central bag.
    for a in 0..n {
        for p in 0..n {
            let path = &layout.source_paths[a][p];
            let mut prev: Option<usize> = None;
            for w in path.windows(2) {
                let bag: BTreeSet<usize> = [w[0], w[1], layout.left[a]].into_iter().collect();
                let id = bags.len();
                bags.push(bag);
                match prev {
                    None => edges.push((central_id, id)),
                    Some(p) => edges.push((p, id)),
                }
                prev = Some(id);
            }
        }
    }
    // Sink-side bundles: bags gain r_b; the last bag (contains t and
    // r_b) attaches to R_b.
    for b in 0..n {
        for p in 0..n {
            let path = &layout.sink_paths[b][p];
            let mut prev: Option<usize> = None;
            for w in path.windows(2) {
                let bag: BTreeSet<usize> = [w[0], w[1], layout.right[b]].into_iter().collect();
                let id = bags.len();
                bags.push(bag);
                if let Some(p) = prev {
                    edges.push((p, id));
                }
                prev = Some(id);
            }
            edges.push((prev.unwrap(), 1 + b));
        }
    }

    let top_len = bags.len();

    if let Some(inner) = &inst.inner {
        let inner_td = h_i_decomposition(&inner.instance);
        let inner_s = inner.instance.terminal.source;
        let inner_t = inner.instance.terminal.sink;
        let glue_a = (0..inner_td.node_count())
            .find(|&i| inner_td.bag(i).contains(&inner_s) && inner_td.bag(i).contains(&inner_t))
            .expect("inner decomposition keeps both terminals in a bag");
        let inner_edges = inner_td.tree_edges();
        for (k, &(u, v)) in inner.h1_edges.iter().enumerate() {
            let map = &inner.placements[k];
            let glue_b = (0..top_len)
                .find(|&i| bags[i].contains(&u) && bags[i].contains(&v))
                .expect("every H_1 edge is covered by a top bag");
            let offset = bags.len();
            for bag in inner_td.bags() {
                bags.push(bag.iter().map(|&x| map[x]).collect());
            }
            for &(a, b) in &inner_edges {
                edges.push((offset + a, offset + b));
            }
            edges.push((offset + glue_a, glue_b));
        }
    }

    TreeDecomposition::new(bags, edges)
}

/// One split performed by [`balanced_partition`].
#[derive(Clone, Debug)]
pub struct SplitRecord {
    pub tree_edge: (usize, usize),
    pub parent_hsize: usize,
    pub side_hsizes: (usize, usize),
    /// Both sides carry at least a third of the parent's HSize.
    pub balanced: bool,
}

#[derive(Clone, Debug)]
pub struct BalancedPartition {
    /// Tree nodes per piece, each sorted.
    pub pieces: Vec<Vec<usize>>,
    pub piece_hsizes: Vec<usize>,
    /// Per deleted tree edge, the separator bag (intersection of the two
    /// incident bags). Size is at most width+1.
    pub cut_bags: Vec<BTreeSet<usize>>,
    pub deleted_edges: Vec<(usize, usize)>,
    pub splits: Vec<SplitRecord>,
    /// Number of deleted edges incident to each piece.
    pub piece_incidence: Vec<usize>,
}

/// HSize of a node set: distinct graph vertices covered by its bags.
pub fn hsize(td: &TreeDecomposition, nodes: &[usize]) -> usize {
    let mut set = BTreeSet::new();
    for &i in nodes {
        set.extend(td.bag(i).iter().copied());
    }
    set.len()
}

/// Successively delete tree edges from the component with the largest
/// HSize, picking the edge that minimizes the larger side's HSize (ties
/// by lowest edge id), until ceil(n_G / (3 * target)) pieces exist. Each
/// split is recorded with its 1/3-balance status rather than asserted.
pub fn balanced_partition(
    nice: &NiceTreeDecomposition,
    target: usize,
) -> Result<BalancedPartition> {
    let td = &nice.td;
    let n_g = td.covered_vertices().len();
    if target == 0 {
        return Err(Error::InvalidParameter("target must be >= 1".into()));
    }
    if 3 * target > n_g {
        return Err(Error::InvalidParameter(format!(
            "target {target} too large: need 3*target <= {n_g}"
        )));
    }
    let pieces_goal = n_g.div_ceil(3 * target);
    let all_edges = td.tree_edges();
    let adjacency: Vec<Vec<(usize, usize)>> = {
        let mut adj = vec![Vec::new(); td.node_count()];
        for (id, &(a, b)) in all_edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        adj
    };

    let mut deleted: BTreeSet<usize> = BTreeSet::new();
    let mut pieces: Vec<Vec<usize>> = vec![(0..td.node_count()).collect()];
    let mut splits = Vec::new();
    let mut deleted_edges = Vec::new();
    let mut cut_bags = Vec::new();

    while pieces.len() < pieces_goal {
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (i, hsize(td, p)))
            .max_by_key(|&(i, h)| (h, std::cmp::Reverse(i)))
            .unwrap();
        let piece = pieces[idx].clone();
        let piece_set: BTreeSet<usize> = piece.iter().copied().collect();
        let parent_hsize = hsize(td, &piece);

        let mut internal: Vec<usize> = Vec::new();
        for &node in &piece {
            for &(other, id) in &adjacency[node] {
                if node < other && piece_set.contains(&other) && !deleted.contains(&id) {
                    internal.push(id);
                }
            }
        }
        if internal.is_empty() {
            // Unsplittable largest piece: surface it instead of looping.
            splits.push(SplitRecord {
                tree_edge: (usize::MAX, usize::MAX),
                parent_hsize,
                side_hsizes: (parent_hsize, 0),
                balanced: false,
            });
            break;
        }
        internal.sort_unstable();

        let mut best: Option<(usize, usize, Vec<usize>, Vec<usize>)> = None;
        for &eid in &internal {
            let (a, b) = all_edges[eid];
            let side_a = component_nodes(&adjacency, &piece_set, &deleted, a, eid);
            let side_b = component_nodes(&adjacency, &piece_set, &deleted, b, eid);
            let larger = hsize(td, &side_a).max(hsize(td, &side_b));
            if best.as_ref().map_or(true, |(bl, ..)| larger < *bl) {
                best = Some((larger, eid, side_a, side_b));
            }
        }
        let (_, eid, side_a, side_b) = best.unwrap();
        let (a, b) = all_edges[eid];
        let ha = hsize(td, &side_a);
        let hb = hsize(td, &side_b);
        deleted.insert(eid);
        deleted_edges.push((a, b));
        cut_bags.push(td.bag(a).intersection(td.bag(b)).copied().collect());
        splits.push(SplitRecord {
            tree_edge: (a, b),
            parent_hsize,
            side_hsizes: (ha, hb),
            balanced: 3 * ha.min(hb) >= parent_hsize,
        });
        pieces.swap_remove(idx);
        pieces.push(side_a);
        pieces.push(side_b);
    }

    pieces.iter_mut().for_each(|p| p.sort_unstable());
    pieces.sort();
    let piece_hsizes: Vec<usize> = pieces.iter().map(|p| hsize(td, p)).collect();
    let piece_incidence = pieces
        .iter()
        .map(|p| {
            let set: BTreeSet<usize> = p.iter().copied().collect();
            deleted_edges
                .iter()
                .filter(|&&(a, b)| set.contains(&a) || set.contains(&b))
                .count()
        })
        .collect();
    Ok(BalancedPartition {
        pieces,
        piece_hsizes,
        cut_bags,
        deleted_edges,
        splits,
        piece_incidence,
    })
}

fn component_nodes(
    adjacency: &[Vec<(usize, usize)>],
    piece: &BTreeSet<usize>,
    deleted: &BTreeSet<usize>,
    start: usize,
    skip_edge: usize,
) -> Vec<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &(v, id) in &adjacency[u] {
            if id == skip_edge || deleted.contains(&id) || !piece.contains(&v) {
                continue;
            }
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().collect()
}

/// Text format: `td <num_bags> <max_bag_size> <num_graph_vertices>`
/// header, `b <id> <v...>` bag lines, then tree edges. All ids 0-based.
pub fn to_text(td: &TreeDecomposition, num_graph_vertices: usize) -> String {
    let mut out = String::new();
    let width_plus_one = td.bags().iter().map(|b| b.len()).max().unwrap_or(0);
    writeln!(
        out,
        "td {} {} {}",
        td.node_count(),
        width_plus_one,
        num_graph_vertices
    )
    .unwrap();
    for (id, bag) in td.bags().iter().enumerate() {
        let items: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
        if items.is_empty() {
            writeln!(out, "b {id}").unwrap();
        } else {
            writeln!(out, "b {id} {}", items.join(" ")).unwrap();
        }
    }
    for (a, b) in td.tree_edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}

pub fn from_text(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty decomposition file".into()))?;
    let mut p = header.split_whitespace();
    if p.next() != Some("td") {
        return Err(Error::Parse("expected `td` header".into()));
    }
    let nb: usize = p
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("bad bag count".into()))?;
    let _width_plus_one: usize = p
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("bad width field".into()))?;
    let nv: usize = p
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse("bad vertex count".into()))?;
    let mut bags = vec![BTreeSet::new(); nb];
    let mut edges = Vec::new();
    for line in lines {
        let mut tok = line.split_whitespace();
        let first = tok.next().unwrap();
        if first == "b" {
            let id: usize = tok
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad bag line: {line}")))?;
            if id >= nb {
                return Err(Error::Parse(format!("bag id {id} out of range")));
            }
            for t in tok {
                let v: usize = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad bag line: {line}")))?;
                bags[id].insert(v);
            }
        } else {
            let a: usize = first
                .parse()
                .map_err(|_| Error::Parse(format!("bad edge line: {line}")))?;
            let b: usize = tok
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line}")))?;
            if a >= nb || b >= nb {
                return Err(Error::Parse(format!("edge ({a},{b}) out of range")));
            }
            edges.push((a, b));
        }
    }
    Ok((TreeDecomposition::new(bags, edges), nv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::Rat;

    fn path3() -> Graph<Rat> {
        Graph::unit(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn single_bag_is_valid() {
        let g = path3();
        let td = TreeDecomposition::new(vec![BTreeSet::from([0, 1, 2])], vec![]);
        assert!(validate(&td, &g).is_empty());
        assert_eq!(td.width().unwrap(), 2);
    }

    #[test]
    fn path_decomposition_width_one() {
        let g = path3();
        let td = TreeDecomposition::new(
            vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])],
            vec![(0, 1)],
        );
        assert!(validate(&td, &g).is_empty());
        assert_eq!(td.width().unwrap(), 1);
    }

    #[test]
    fn uncovered_edge_detected() {
        let g = path3();
        let td = TreeDecomposition::new(
            vec![BTreeSet::from([0, 1]), BTreeSet::from([2])],
            vec![(0, 1)],
        );
        let v = validate(&td, &g);
        assert!(v.contains(&Violation::UncoveredEdge(1, 2)));
        assert_eq!(td.width().unwrap(), 1);
    }

    #[test]
    fn disconnected_bag_subtree_detected() {
        let g: Graph<Rat> = Graph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let td = TreeDecomposition::new(
            vec![
                BTreeSet::from([0, 1]),
                BTreeSet::from([1, 2]),
                BTreeSet::from([0, 2]),
            ],
            vec![(0, 1), (1, 2)],
        );
        let v = validate(&td, &g);
        assert!(v.contains(&Violation::DisconnectedBagSubtree(0)));
    }

    #[test]
    fn make_nice_single_bag() {
        let g: Graph<Rat> = Graph::unit(1, std::iter::empty()).unwrap();
        let td = TreeDecomposition::new(vec![BTreeSet::from([0])], vec![]);
        let nice = make_nice(&td, &g).unwrap();
        assert!(nice.check_nice().is_empty());
        assert!(validate(&nice.td, &g).is_empty());
    }

    #[test]
    fn make_nice_path_preserves_width() {
        let g = path3();
        let td = TreeDecomposition::new(
            vec![BTreeSet::from([0, 1]), BTreeSet::from([1, 2])],
            vec![(0, 1)],
        );
        let nice = make_nice(&td, &g).unwrap();
        assert!(nice.check_nice().is_empty());
        assert!(validate(&nice.td, &g).is_empty());
        assert_eq!(nice.td.width().unwrap(), 1);
    }

    #[test]
    fn make_nice_rejects_invalid_input() {
        let g = path3();
        let td = TreeDecomposition::new(
            vec![BTreeSet::from([0, 1]), BTreeSet::from([2])],
            vec![(0, 1)],
        );
        assert!(make_nice(&td, &g).is_err());
    }

    #[test]
    fn make_nice_handles_joins_and_big_bags() {
        let g: Graph<Rat> = generate::grid(3).unwrap();
        let td = greedy_decomposition(&g).unwrap();
        let nice = make_nice(&td, &g).unwrap();
        assert!(nice.check_nice().is_empty(), "{:?}", nice.check_nice());
        assert!(validate(&nice.td, &g).is_empty());
        assert_eq!(nice.td.width().unwrap(), td.width().unwrap());
    }

    #[test]
    fn greedy_decomposition_is_valid() {
        for n in [3usize, 4, 5] {
            let g: Graph<Rat> = generate::grid(n).unwrap();
            let td = greedy_decomposition(&g).unwrap();
            assert!(validate(&td, &g).is_empty());
        }
    }

    #[test]
    fn exact_treewidth_known_values() {
        let tree: Graph<Rat> = Graph::unit(5, vec![(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(exact_treewidth(&tree).unwrap(), 1);
        let c5: Graph<Rat> = generate::cycle(5).unwrap();
        assert_eq!(exact_treewidth(&c5).unwrap(), 2);
        let k4: Graph<Rat> = generate::complete(4).unwrap();
        assert_eq!(exact_treewidth(&k4).unwrap(), 3);
        let k33: Graph<Rat> = generate::complete_bipartite(3).unwrap();
        assert_eq!(exact_treewidth(&k33).unwrap(), 3);
        let g3: Graph<Rat> = generate::grid(3).unwrap();
        assert_eq!(exact_treewidth(&g3).unwrap(), 3);
    }

    #[test]
    fn gnm_treewidth_matches_core() {
        // Subdividing K_{n,n} keeps treewidth n (checked exactly at n=2).
        let g: Graph<Rat> = generate::g_nm(2, 2).unwrap();
        assert_eq!(exact_treewidth(&g).unwrap(), 2);
        let k22: Graph<Rat> = generate::complete_bipartite(2).unwrap();
        assert_eq!(exact_treewidth(&k22).unwrap(), 2);
    }

    #[test]
    fn hi_decomposition_base_case() {
        let inst = generate::h_i::<Rat>(2, 1, 1_000_000).unwrap();
        let td = h_i_decomposition(&inst);
        assert!(validate(&td, &inst.terminal.graph).is_empty());
        assert_eq!(td.width().unwrap(), 3);
        assert_eq!(td.bag(0).len(), 4);
        assert!(td.bag(0).contains(&inst.terminal.source));
        assert!(td.bag(0).contains(&inst.terminal.sink));
    }

    #[test]
    fn hi_decomposition_recursive() {
        let inst = generate::h_i::<Rat>(2, 2, 1_000_000).unwrap();
        let td = h_i_decomposition(&inst);
        assert!(validate(&td, &inst.terminal.graph).is_empty());
        assert_eq!(td.width().unwrap(), 3);
    }

    #[test]
    fn td_text_round_trip() {
        let inst = generate::h_i::<Rat>(2, 1, 1_000_000).unwrap();
        let td = h_i_decomposition(&inst);
        let text = to_text(&td, inst.terminal.graph.vertex_count());
        let (parsed, nv) = from_text(&text).unwrap();
        assert_eq!(nv, inst.terminal.graph.vertex_count());
        assert_eq!(parsed.bags(), td.bags());
        assert_eq!(parsed.tree_edges(), td.tree_edges());
        assert_eq!(to_text(&parsed, nv), text);
    }

    #[test]
    fn balanced_partition_grid4() {
        let g: Graph<Rat> = generate::grid(4).unwrap();
        let td = greedy_decomposition(&g).unwrap();
        let nice = make_nice(&td, &g).unwrap();
        let part = balanced_partition(&nice, 4).unwrap();
        assert_eq!(part.pieces.len(), 2);
        assert!(part.piece_hsizes.iter().all(|&h| h >= 4));
        for s in &part.splits {
            assert!(s.balanced, "split {s:?} not 1/3-balanced");
        }
        let width = nice.td.width().unwrap();
        for cut in &part.cut_bags {
            assert!(cut.len() <= width + 1);
        }
    }

    #[test]
    fn balanced_partition_target_too_large() {
        let g = path3();
        let td = TreeDecomposition::new(vec![BTreeSet::from([0, 1, 2])], vec![]);
        let nice = make_nice(&td, &g).unwrap();
        assert!(balanced_partition(&nice, 2).is_err());
    }
}
