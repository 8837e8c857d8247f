use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// A graph with two distinguished terminals.
#[derive(Clone, Debug)]
pub struct TerminalGraph<W> {
    pub graph: Graph<W>,
    pub source: usize,
    pub sink: usize,
}

/// Complete graph K_n.
pub fn complete<W: Scalar>(n: usize) -> Result<Graph<W>> {
    require_positive(n)?;
    Graph::unit(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))
}

/// Complete bipartite K_{n,n}: left side `0..n`, right side `n..2n`.
pub fn complete_bipartite<W: Scalar>(n: usize) -> Result<Graph<W>> {
    require_positive(n)?;
    Graph::unit(
        2 * n,
        (0..n).flat_map(move |i| (n..2 * n).map(move |j| (i, j))),
    )
}

/// Cycle C_n (degenerate below 3: a point, or a single edge).
pub fn cycle<W: Scalar>(n: usize) -> Result<Graph<W>> {
    require_positive(n)?;
    if n == 1 {
        return Graph::unit(1, std::iter::empty());
    }
    Graph::unit(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// n x n grid; vertex (row, col) has id `row * n + col`.
pub fn grid<W: Scalar>(n: usize) -> Result<Graph<W>> {
    require_positive(n)?;
    let mut pairs = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let id = r * n + c;
            if c + 1 < n {
                pairs.push((id, id + 1));
            }
            if r + 1 < n {
                pairs.push((id, id + n));
            }
        }
    }
    Graph::unit(n * n, pairs)
}

/// G_{n,m}: the m-subdivision of K_{n,n}.
pub fn g_nm<W: Scalar>(n: usize, m: usize) -> Result<Graph<W>> {
    complete_bipartite::<W>(n)?.subdivide(m)
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("size parameter must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Vertex layout of an H_1 skeleton: terminals, the K_{n,n} core, and the
/// full vertex sequences of the terminal path bundles. For recursive
/// instances these vertices persist while the edges between them are
/// replaced by inner copies.
#[derive(Clone, Debug)]
pub struct H1Layout {
    pub n: usize,
    pub source: usize,
    pub sink: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// `source_paths[a][p]` = vertex sequence from source to left vertex a.
    pub source_paths: Vec<Vec<Vec<usize>>>,
    /// `sink_paths[b][p]` = vertex sequence from right vertex b to sink.
    pub sink_paths: Vec<Vec<Vec<usize>>>,
}

impl H1Layout {
    /// The canonical disjoint path for core position (a, b): source path
    /// `sp_{a,b}`, then the core edge, then sink path `tp_{b,a}`.
    pub fn st_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut path = self.source_paths[a][b].clone();
        path.extend_from_slice(&self.sink_paths[b][a]);
        path
    }

    /// All n^2 canonical edge-disjoint s-t paths, core-position order.
    pub fn st_paths(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                out.push(self.st_path(a, b));
            }
        }
        out
    }
}

/// H_1: K_{n,n} whose left vertices attach to a source by n disjoint
/// unit paths of length n each, and mirrored on the right to a sink.
/// 2n^3 + n^2 edges.
pub fn h1<W: Scalar>(n: usize) -> Result<(TerminalGraph<W>, H1Layout)> {
    require_positive(n)?;
    let source = 0usize;
    let sink = 1usize;
    let left: Vec<usize> = (0..n).map(|a| 2 + a).collect();
    let right: Vec<usize> = (0..n).map(|b| 2 + n + b).collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut labels: Vec<(usize, String)> = vec![(source, "s".into()), (sink, "t".into())];
    for (a, &l) in left.iter().enumerate() {
        labels.push((l, format!("l{a}")));
    }
    for (b, &r) in right.iter().enumerate() {
        labels.push((r, format!("r{b}")));
    }

    let interior = n - 1;
    let sp_base = 2 + 2 * n;
    let tp_base = sp_base + n * n * interior;
    let mut source_paths = vec![vec![Vec::new(); n]; n];
    let mut sink_paths = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for p in 0..n {
            let base = sp_base + (a * n + p) * interior;
            let mut path = vec![source];
            for k in 0..interior {
                path.push(base + k);
                labels.push((base + k, format!("sp{a}.{p}.{}", k + 1)));
            }
            path.push(left[a]);
            for w in path.windows(2) {
                pairs.push((w[0], w[1]));
            }
            source_paths[a][p] = path;
        }
    }
    for b in 0..n {
        for p in 0..n {
            let base = tp_base + (b * n + p) * interior;
            let mut path = vec![right[b]];
            for k in 0..interior {
                path.push(base + k);
                labels.push((base + k, format!("tp{b}.{p}.{}", k + 1)));
            }
            path.push(sink);
            for w in path.windows(2) {
                pairs.push((w[0], w[1]));
            }
            sink_paths[b][p] = path;
        }
    }
    for &l in &left {
        for &r in &right {
            pairs.push((l, r));
        }
    }

    let vertex_count = tp_base + n * n * interior;
    let mut graph = Graph::unit(vertex_count, pairs)?;
    for (v, tag) in labels {
        graph.set_label(v, tag);
    }
    Ok((
        TerminalGraph {
            graph,
            source,
            sink,
        },
        H1Layout {
            n,
            source,
            sink,
            left,
            right,
            source_paths,
            sink_paths,
        },
    ))
}

/// One tracked copy of G_{n,m} inside a host graph: an explicit witness
/// map from G_{n,m} vertex ids to host ids plus the host edge set it
/// spans. Construction-time provenance, not isomorphism search.
#[derive(Clone, Debug)]
pub struct TrackedCopy {
    pub vertex_map: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// Copies of G_{n,(2n+1)^j} tracked at color level j.
#[derive(Clone, Debug)]
pub struct CopyLevel {
    pub level: usize,
    pub subdivision: u64,
    pub copies: Vec<TrackedCopy>,
}

/// All tracked copies in an H_i instance, per level j = 0..i-1.
#[derive(Clone, Debug)]
pub struct CopyCatalog {
    pub n: usize,
    pub depth: usize,
    pub levels: Vec<CopyLevel>,
}

impl CopyCatalog {
    /// Guaranteed copy count at level j: m^{i-j-1} * n^{2j}.
    pub fn expected_copies(n: usize, depth: usize, level: usize) -> u128 {
        let m = edge_count_h1(n);
        (m as u128).pow((depth - level - 1) as u32) * (n as u128).pow(2 * level as u32)
    }
}

/// Recursive H_i instance with full construction provenance: the
/// top-level H_1 skeleton, per-edge placements of the inner H_{i-1},
/// the canonical disjoint s-t paths, and the tracked copy catalog.
#[derive(Clone, Debug)]
pub struct HiInstance<W> {
    pub n: usize,
    pub depth: usize,
    pub terminal: TerminalGraph<W>,
    pub layout: H1Layout,
    pub st_paths: Vec<Vec<usize>>,
    pub catalog: CopyCatalog,
    pub inner: Option<Box<HiInner<W>>>,
}

#[derive(Clone, Debug)]
pub struct HiInner<W> {
    pub instance: HiInstance<W>,
    /// Top-level H_1 edges in sorted order; placement k realizes edge k.
    pub h1_edges: Vec<(usize, usize)>,
    /// `placements[k][local]` maps inner vertex ids into the host.
    pub placements: Vec<Vec<usize>>,
}

pub fn edge_count_h1(n: usize) -> u64 {
    (2 * n * n * n + n * n) as u64
}

/// Exact edge count of H_i: (2n^3 + n^2)^i.
pub fn edge_count_hi(n: usize, depth: usize) -> Option<u128> {
    (edge_count_h1(n) as u128).checked_pow(depth as u32)
}

/// Build H_i by replacing every edge of H_1 with a copy of H_{i-1}.
/// Errors when the exact edge count would exceed `max_edges`.
pub fn h_i<W: Scalar>(n: usize, depth: usize, max_edges: u64) -> Result<HiInstance<W>> {
    require_positive(n)?;
    require_positive(depth)?;
    let total = edge_count_hi(n, depth)
        .ok_or_else(|| Error::ResourceCeiling("H_i edge count overflows".into()))?;
    if total > max_edges as u128 {
        return Err(Error::ResourceCeiling(format!(
            "H_{depth}({n}) has {total} edges, ceiling is {max_edges}"
        )));
    }

    if depth == 1 {
        let (terminal, layout) = h1::<W>(n)?;
        let st_paths = layout.st_paths();
        let core = TrackedCopy {
            vertex_map: layout.left.iter().chain(layout.right.iter()).copied().collect(),
            edges: sorted_pairs(
                layout
                    .left
                    .iter()
                    .flat_map(|&l| layout.right.iter().map(move |&r| (l, r))),
            ),
        };
        let catalog = CopyCatalog {
            n,
            depth,
            levels: vec![CopyLevel {
                level: 0,
                subdivision: 1,
                copies: vec![core],
            }],
        };
        return Ok(HiInstance {
            n,
            depth,
            terminal,
            layout,
            st_paths,
            catalog,
            inner: None,
        });
    }

    let inner = h_i::<W>(n, depth - 1, max_edges)?;
    let (template, layout) = h1::<W>(n)?;
    let h1_edges: Vec<(usize, usize)> =
        template.graph.edges().iter().map(|e| (e.u, e.v)).collect();
    let edge_index: BTreeMap<(usize, usize), usize> = h1_edges
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();

    let inner_n = inner.terminal.graph.vertex_count();
    let mut next = template.graph.vertex_count();
    let mut placements: Vec<Vec<usize>> = Vec::with_capacity(h1_edges.len());
    for &(u, v) in &h1_edges {
        let mut map = vec![usize::MAX; inner_n];
        map[inner.terminal.source] = u;
        map[inner.terminal.sink] = v;
        for (local, slot) in map.iter_mut().enumerate() {
            if *slot == usize::MAX {
                debug_assert!(local != inner.terminal.source && local != inner.terminal.sink);
                *slot = next;
                next += 1;
            }
        }
        placements.push(map);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(total as usize);
    for map in &placements {
        for e in inner.terminal.graph.edges() {
            pairs.push((map[e.u], map[e.v]));
        }
    }
    let mut graph = Graph::unit(next, pairs)?;
    for (v, tag) in template.graph.labels() {
        graph.set_label(*v, tag.clone());
    }

    // Canonical s-t paths: inner path c stitched along every H_1 path.
    let inner_paths = inner.st_paths.len();
    let mut st_paths = Vec::with_capacity(n * n * inner_paths);
    for a in 0..n {
        for b in 0..n {
            let skeleton = layout.st_path(a, b);
            for c in 0..inner_paths {
                let mut path = vec![layout.source];
                for w in skeleton.windows(2) {
                    let (x, y) = (w[0], w[1]);
                    let k = edge_index[&(x.min(y), x.max(y))];
                    let seg = map_path(&inner.st_paths[c], &placements[k]);
                    if x < y {
                        path.extend_from_slice(&seg[1..]);
                    } else {
                        path.extend(seg[..seg.len() - 1].iter().rev());
                    }
                }
                st_paths.push(path);
            }
        }
    }

    // Catalog: inherited levels from every inner copy, plus the top level
    // built by pairing inner path c across all n^2 core positions.
    let mut levels: Vec<CopyLevel> = Vec::with_capacity(depth);
    for inner_level in &inner.catalog.levels {
        let mut copies = Vec::with_capacity(placements.len() * inner_level.copies.len());
        for map in &placements {
            for copy in &inner_level.copies {
                copies.push(TrackedCopy {
                    vertex_map: copy.vertex_map.iter().map(|&v| map[v]).collect(),
                    edges: sorted_pairs(copy.edges.iter().map(|&(u, v)| (map[u], map[v]))),
                });
            }
        }
        levels.push(CopyLevel {
            level: inner_level.level,
            subdivision: inner_level.subdivision,
            copies,
        });
    }
    let m_sub = (2 * n as u64 + 1).pow((depth - 1) as u32);
    let interior = (m_sub - 1) as usize;
    let mut top_copies = Vec::with_capacity(inner_paths);
    for c in 0..inner_paths {
        let mut vertex_map = vec![usize::MAX; 2 * n + n * n * interior];
        vertex_map[..n].copy_from_slice(&layout.left);
        vertex_map[n..2 * n].copy_from_slice(&layout.right);
        let mut edges = Vec::with_capacity(n * n * m_sub as usize);
        for a in 0..n {
            for b in 0..n {
                let core = a * n + b;
                let k = edge_index[&(layout.left[a], layout.right[b])];
                let seg = map_path(&inner.st_paths[c], &placements[k]);
                for (h, slot) in seg[1..seg.len() - 1].iter().enumerate() {
                    vertex_map[2 * n + core * interior + h] = *slot;
                }
                for w in seg.windows(2) {
                    edges.push((w[0], w[1]));
                }
            }
        }
        top_copies.push(TrackedCopy {
            vertex_map,
            edges: sorted_pairs(edges),
        });
    }
    levels.push(CopyLevel {
        level: depth - 1,
        subdivision: m_sub,
        copies: top_copies,
    });

    Ok(HiInstance {
        n,
        depth,
        terminal: TerminalGraph {
            graph,
            source: layout.source,
            sink: layout.sink,
        },
        layout,
        st_paths,
        catalog: CopyCatalog { n, depth, levels },
        inner: Some(Box::new(HiInner {
            instance: inner,
            h1_edges,
            placements,
        })),
    })
}

fn map_path(path: &[usize], map: &[usize]) -> Vec<usize> {
    path.iter().map(|&v| map[v]).collect()
}

fn sorted_pairs(iter: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = iter
        .into_iter()
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Re-validate every catalog claim against the host graph: each copy is
/// structurally equal to its reference G_{n,m} under the witness map,
/// copies within a level are pairwise edge-disjoint, and the level count
/// matches the guarantee.
pub fn verify_catalog<W: Scalar>(inst: &HiInstance<W>) -> Result<()> {
    let g = &inst.terminal.graph;
    for level in &inst.catalog.levels {
        let reference: Graph<W> = g_nm(inst.n, level.subdivision as usize)?;
        let expected = CopyCatalog::expected_copies(inst.n, inst.depth, level.level);
        if (level.copies.len() as u128) < expected {
            return Err(Error::InvalidParameter(format!(
                "level {} has {} copies, expected at least {}",
                level.level,
                level.copies.len(),
                expected
            )));
        }
        let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (idx, copy) in level.copies.iter().enumerate() {
            if copy.vertex_map.len() != reference.vertex_count() {
                return Err(Error::InvalidParameter(format!(
                    "level {} copy {idx}: witness map has wrong arity",
                    level.level
                )));
            }
            let distinct: BTreeSet<usize> = copy.vertex_map.iter().copied().collect();
            if distinct.len() != copy.vertex_map.len() {
                return Err(Error::InvalidParameter(format!(
                    "level {} copy {idx}: witness map not injective",
                    level.level
                )));
            }
            if copy.edges.len() != reference.edge_count() {
                return Err(Error::InvalidParameter(format!(
                    "level {} copy {idx}: edge count mismatch",
                    level.level
                )));
            }
            let edge_set: BTreeSet<(usize, usize)> = copy.edges.iter().copied().collect();
            for e in reference.edges() {
                let host = (
                    copy.vertex_map[e.u].min(copy.vertex_map[e.v]),
                    copy.vertex_map[e.u].max(copy.vertex_map[e.v]),
                );
                if !g.has_edge(host.0, host.1) {
                    return Err(Error::InvalidParameter(format!(
                        "level {} copy {idx}: witnessed edge {host:?} missing in host",
                        level.level
                    )));
                }
                if !edge_set.contains(&host) {
                    return Err(Error::InvalidParameter(format!(
                        "level {} copy {idx}: witnessed edge {host:?} not in copy edge set",
                        level.level
                    )));
                }
            }
            for &e in &copy.edges {
                if !used.insert(e) {
                    return Err(Error::InvalidParameter(format!(
                        "level {}: copies share edge {e:?}",
                        level.level
                    )));
                }
            }
        }
    }
    Ok(())
}
