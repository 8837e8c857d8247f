use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Maximum set of pairwise edge-disjoint `s`-`t` paths (unit capacities,
/// weights ignored). Returns the max-flow value and that many simple
/// vertex paths. Tie-breaking is by lowest vertex id throughout, so the
/// output is deterministic.
pub fn max_edge_disjoint_paths<W: Scalar>(
    g: &Graph<W>,
    s: usize,
    t: usize,
) -> Result<(usize, Vec<Vec<usize>>)> {
    let n = g.vertex_count();
    if s >= n {
        return Err(Error::VertexOutOfRange(s, n));
    }
    if t >= n {
        return Err(Error::VertexOutOfRange(t, n));
    }
    if s == t {
        return Err(Error::InvalidParameter("source equals sink".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected(s, t));
    }

    // One antiparallel arc pair per undirected edge, both of capacity 1.
    // flow[2e] is the signed flow u -> v; flow[2e+1] = -flow[2e].
    let m = g.edge_count();
    let mut flow: Vec<i8> = vec![0; 2 * m];
    let arc_of = |u: usize, eidx: usize| -> usize {
        let e = &g.edges()[eidx];
        if e.u == u {
            2 * eidx
        } else {
            2 * eidx + 1
        }
    };

    let mut value = 0usize;
    loop {
        // BFS in the residual graph; neighbors come pre-sorted by id.
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(u) = queue.pop_front() {
            for &(v, eidx) in g.neighbors(u) {
                let a = arc_of(u, eidx);
                if seen[v] || flow[a] >= 1 {
                    continue;
                }
                seen[v] = true;
                parent[v] = Some((u, a));
                if v == t {
                    break 'bfs;
                }
                queue.push_back(v);
            }
        }
        if !seen[t] {
            break;
        }
        let mut v = t;
        while let Some((u, a)) = parent[v] {
            flow[a] += 1;
            flow[a ^ 1] -= 1;
            v = u;
        }
        value += 1;
    }

    // Net flow decomposition into simple paths, lowest next-vertex first.
    // Any loop encountered mid-walk is a circulation; excising it keeps
    // flow conservation intact for the remaining walks.
    let mut out: Vec<VecDeque<usize>> = vec![VecDeque::new(); n];
    for (eidx, e) in g.edges().iter().enumerate() {
        match flow[2 * eidx] {
            1 => out[e.u].push_back(e.v),
            -1 => out[e.v].push_back(e.u),
            _ => {}
        }
    }
    for list in &mut out {
        list.make_contiguous().sort_unstable();
    }

    let mut paths = Vec::with_capacity(value);
    for _ in 0..value {
        let mut path = vec![s];
        let mut at = vec![usize::MAX; n];
        at[s] = 0;
        loop {
            let u = *path.last().unwrap();
            let v = out[u]
                .pop_front()
                .expect("flow conservation guarantees an outgoing arc");
            if v == t {
                path.push(t);
                break;
            }
            if at[v] != usize::MAX {
                for dropped in path.drain(at[v] + 1..) {
                    at[dropped] = usize::MAX;
                }
            } else {
                at[v] = path.len();
                path.push(v);
            }
        }
        paths.push(path);
    }
    Ok((value, paths))
}
