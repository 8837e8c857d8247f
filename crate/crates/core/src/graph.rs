use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{is_unit, min_scalar, Scalar};

/// A finite undirected graph with strictly positive edge weights.
///
/// Vertex ids are `0..vertex_count`. There are no self-loops and at most
/// one edge per unordered pair: parallel edges collapse to the minimum
/// weight on construction. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<W> {
    vertex_count: usize,
    edges: Vec<Edge<W>>,
    adj: Vec<Vec<(usize, usize)>>,
    labels: BTreeMap<usize, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<W> {
    pub u: usize,
    pub v: usize,
    pub w: W,
}

impl<W: Scalar> Graph<W> {
    /// Build a graph from an edge list. Endpoints may come in either
    /// order; duplicates collapse to the smallest weight.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, W)>,
    {
        let mut collapsed: BTreeMap<(usize, usize), W> = BTreeMap::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if a >= vertex_count {
                return Err(Error::VertexOutOfRange(a, vertex_count));
            }
            if b >= vertex_count {
                return Err(Error::VertexOutOfRange(b, vertex_count));
            }
            if !(w > W::zero()) {
                return Err(Error::NonPositiveWeight(a, b));
            }
            let key = (a.min(b), a.max(b));
            match collapsed.get(&key) {
                Some(old) => {
                    let w = min_scalar(old.clone(), w);
                    collapsed.insert(key, w);
                }
                None => {
                    collapsed.insert(key, w);
                }
            }
        }
        let edges: Vec<Edge<W>> = collapsed
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        let mut adj = vec![Vec::new(); vertex_count];
        for (idx, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, idx));
            adj[e.v].push((e.u, idx));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            adj,
            labels: BTreeMap::new(),
        })
    }

    /// Unit-weight graph from vertex pairs.
    pub fn unit<I>(vertex_count: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(
            vertex_count,
            pairs.into_iter().map(|(a, b)| (a, b, W::one())),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    /// Neighbors of `u` with edge indices, sorted by neighbor id.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&key))
            .ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<&W> {
        self.edge_index(a, b).map(|i| &self.edges[i].w)
    }

    pub fn set_label(&mut self, v: usize, tag: impl Into<String>) {
        self.labels.insert(v, tag.into());
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(&v).map(|s| s.as_str())
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    pub fn has_unit_weights(&self) -> bool {
        self.edges.iter().all(|e| is_unit(&e.w))
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.vertex_count
    }

    /// Hop distances from `s` (edge weights ignored). `None` = unreachable.
    pub fn bfs_hops(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &(v, _) in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Length of a shortest cycle in hops, or `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in 0..self.vertex_count {
            // BFS from s; a non-tree edge closing at depths d1, d2 gives a
            // cycle through s of length d1 + d2 + 1.
            let mut dist = vec![usize::MAX; self.vertex_count];
            let mut parent_edge = vec![usize::MAX; self.vertex_count];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, idx) in &self.adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent_edge[v] = idx;
                        queue.push_back(v);
                    } else if parent_edge[u] != idx {
                        let len = dist[u] + dist[v] + 1;
                        if best.map_or(true, |b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    /// Replace every edge by a path of `k` unit edges. Requires unit
    /// weights; fresh vertices are labeled with the edge they came from.
    pub fn subdivide(&self, k: usize) -> Result<Graph<W>> {
        if k == 0 {
            return Err(Error::InvalidParameter("subdivision factor must be >= 1".into()));
        }
        if !self.has_unit_weights() {
            return Err(Error::NonUnitWeights);
        }
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(self.edges.len() * k);
        let mut labels: Vec<(usize, String)> = Vec::new();
        let mut next = self.vertex_count;
        for e in &self.edges {
            let mut prev = e.u;
            for step in 1..k {
                labels.push((next, format!("sub:{}-{}:{}", e.u, e.v, step)));
                pairs.push((prev, next));
                prev = next;
                next += 1;
            }
            pairs.push((prev, e.v));
        }
        let mut g = Graph::unit(next, pairs)?;
        for (v, tag) in labels {
            g.set_label(v, tag);
        }
        for (v, tag) in &self.labels {
            g.set_label(*v, tag.clone());
        }
        Ok(g)
    }

    /// Contract the edge `(a, b)`: endpoints merge into `min(a, b)`,
    /// parallel edges collapse to minimum weight, the loop is dropped.
    /// Returns the new graph and the old-id -> new-id renaming map.
    pub fn contract_edge(&self, a: usize, b: usize) -> Result<(Graph<W>, Vec<usize>)> {
        if self.edge_index(a, b).is_none() {
            return Err(Error::EdgeNotFound(a, b));
        }
        let keep = a.min(b);
        let drop = a.max(b);
        let mut rename = vec![0usize; self.vertex_count];
        for (old, slot) in rename.iter_mut().enumerate() {
            *slot = if old == drop {
                keep
            } else if old > drop {
                old - 1
            } else {
                old
            };
        }
        let edges = self.edges.iter().filter_map(|e| {
            let u = rename[e.u];
            let v = rename[e.v];
            if u == v {
                None
            } else {
                Some((u, v, e.w.clone()))
            }
        });
        let mut g = Graph::from_edges(self.vertex_count - 1, edges)?;
        for (v, tag) in &self.labels {
            if *v != drop {
                g.set_label(rename[*v], tag.clone());
            }
        }
        Ok((g, rename))
    }

    /// Same graph with vertices renamed by a permutation `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph<W>> {
        if perm.len() != self.vertex_count {
            return Err(Error::InvalidParameter("permutation length mismatch".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (perm[e.u], perm[e.v], e.w.clone()));
        let mut g = Graph::from_edges(self.vertex_count, edges)?;
        for (v, tag) in &self.labels {
            g.set_label(perm[*v], tag.clone());
        }
        Ok(g)
    }

    /// Text format: `graph <V> <E>` header, one `u v w` line per edge
    /// (sorted), then `label v <tag>` lines (sorted). Weights print as
    /// `p/q` or plain integers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "graph {} {}", self.vertex_count, self.edges.len()).unwrap();
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u, e.v, e.w.format_token()).unwrap();
        }
        for (v, tag) in &self.labels {
            writeln!(out, "label {} {}", v, tag).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("graph") {
            return Err(Error::Parse("expected `graph <V> <E>` header".into()));
        }
        let v: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad vertex count".into()))?;
        let e: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad edge count".into()))?;
        let mut edges = Vec::with_capacity(e);
        let mut labels = Vec::new();
        for line in lines {
            let mut tok = line.split_whitespace();
            let first = tok.next().unwrap();
            if first == "label" {
                let vid: usize = tok
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad label line: {line}")))?;
                let tag = tok.collect::<Vec<_>>().join(" ");
                if tag.is_empty() {
                    return Err(Error::Parse(format!("bad label line: {line}")));
                }
                labels.push((vid, tag));
            } else {
                let a: usize = first
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad edge line: {line}")))?;
                let b: usize = tok
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad edge line: {line}")))?;
                let w = tok
                    .next()
                    .and_then(W::parse_token)
                    .ok_or_else(|| Error::Parse(format!("bad weight in line: {line}")))?;
                edges.push((a, b, w));
            }
        }
        if edges.len() != e {
            return Err(Error::Parse(format!(
                "header promised {e} edges, found {}",
                edges.len()
            )));
        }
        let mut g = Graph::from_edges(v, edges).map_err(|err| Error::Parse(err.to_string()))?;
        for (vid, tag) in labels {
            if vid >= g.vertex_count() {
                return Err(Error::Parse(format!("label for unknown vertex {vid}")));
            }
            g.set_label(vid, tag);
        }
        Ok(g)
    }

    /// DOT export for visualization.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph g {\n");
        for v in 0..self.vertex_count {
            match self.labels.get(&v) {
                Some(tag) => writeln!(out, "  {} [label=\"{}\"];", v, tag).unwrap(),
                None => writeln!(out, "  {};", v).unwrap(),
            }
        }
        for e in &self.edges {
            if is_unit(&e.w) {
                writeln!(out, "  {} -- {};", e.u, e.v).unwrap();
            } else {
                writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.w.format_token()).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn path(n: usize) -> Graph<Rat> {
        Graph::unit(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn parallel_edges_collapse_to_min() {
        let g: Graph<Rat> = Graph::from_edges(
            2,
            vec![
                (0, 1, Rat::from_integer(3)),
                (1, 0, Rat::from_integer(2)),
            ],
        )
        .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(*g.edge_weight(0, 1).unwrap(), Rat::from_integer(2));
    }

    #[test]
    fn self_loop_rejected() {
        let r: Result<Graph<Rat>> = Graph::unit(2, vec![(1, 1)]);
        assert!(matches!(r, Err(Error::SelfLoop(1))));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        let r: Result<Graph<Rat>> = Graph::from_edges(2, vec![(0, 1, Rat::from_integer(0))]);
        assert!(matches!(r, Err(Error::NonPositiveWeight(0, 1))));
    }

    #[test]
    fn subdivide_triangle_gives_hexagon() {
        let k3: Graph<Rat> = Graph::unit(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let c6 = k3.subdivide(2).unwrap();
        assert_eq!(c6.vertex_count(), 6);
        assert_eq!(c6.edge_count(), 6);
        assert!(c6.girth() == Some(6));
    }

    #[test]
    fn subdivide_by_one_is_identity() {
        let g: Graph<Rat> = Graph::unit(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let h = g.subdivide(1).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(g.vertex_count(), h.vertex_count());
    }

    #[test]
    fn subdivide_k22_by_three() {
        let k22: Graph<Rat> = Graph::unit(4, vec![(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let g = k22.subdivide(3).unwrap();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn subdivide_zero_errors() {
        let g = path(3);
        assert!(g.subdivide(0).is_err());
    }

    #[test]
    fn contract_triangle_edge() {
        let k3: Graph<Rat> = Graph::unit(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let (g, rename) = k3.contract_edge(0, 1).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(rename, vec![0, 0, 1]);
    }

    #[test]
    fn contract_middle_of_path() {
        let g = path(4);
        let (h, _) = g.contract_edge(1, 2).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 2);
    }

    #[test]
    fn contract_missing_edge_errors() {
        let g = path(3);
        assert!(matches!(g.contract_edge(0, 2), Err(Error::EdgeNotFound(0, 2))));
    }

    #[test]
    fn contract_spanning_tree_of_k4_to_point() {
        let mut g: Graph<Rat> = Graph::unit(
            4,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        // Contract the star edges (0,1), (0,2), (0,3) tracking renames.
        for _ in 0..3 {
            let (v, _) = g
                .neighbors(0)
                .first()
                .copied()
                .expect("vertex 0 keeps a neighbor until the end");
            let (h, _) = g.contract_edge(0, v).unwrap();
            g = h;
        }
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn text_round_trip_with_rational_weights() {
        let mut g: Graph<Rat> = Graph::from_edges(
            3,
            vec![
                (0, 1, Rat::new(1, 3)),
                (1, 2, Rat::from_integer(4)),
            ],
        )
        .unwrap();
        g.set_label(0, "source");
        let text = g.to_text();
        let h = Graph::<Rat>::from_text(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(text, h.to_text());
    }

    #[test]
    fn malformed_text_rejected() {
        assert!(Graph::<Rat>::from_text("nope").is_err());
        assert!(Graph::<Rat>::from_text("graph 2 1\n0 1 0\n").is_err());
        assert!(Graph::<Rat>::from_text("graph 2 2\n0 1 1\n").is_err());
    }
}
