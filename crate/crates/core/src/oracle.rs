use std::collections::HashSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embed::{distortion, DistortionReport, Embedding};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metric::{shortest_path_metric, Metric};
use crate::scalar::{cmp_scalar, Scalar, Stretch};

#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub max_source: usize,
    pub max_states: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_source: 12,
            max_states: 100_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult<W> {
    pub embedding: Embedding<W>,
    pub report: DistortionReport<W>,
    pub distortion: Stretch<W>,
    pub states: u64,
    /// Exhaustive search completed; the result is provably optimal.
    pub exact: bool,
}

/// Exhaustive minimum-distortion vertex map from `source` into `host`,
/// branch-and-bound on the partial expansion-contraction product.
///
/// When the host has fewer points than the source every map collapses a
/// pair, so the optimum is infinite contraction; that case returns
/// immediately with a representative map. Otherwise collapsing branches
/// are pruned against a finite injective incumbent, so the search runs
/// over injective maps and the first-found optimum is returned.
pub fn min_distortion_into_host<W: Scalar>(
    source: &Metric<W>,
    host: &Metric<W>,
    limits: OracleLimits,
) -> Result<OracleResult<W>> {
    let ns = source.size();
    let nh = host.size();
    if ns == 0 || nh == 0 {
        return Err(Error::InvalidParameter("empty metric".into()));
    }
    if ns > limits.max_source {
        return Err(Error::ResourceCeiling(format!(
            "source has {ns} points, oracle cap is {} (use heuristic mode)",
            limits.max_source
        )));
    }

    if nh < ns {
        // Pigeonhole: every total map identifies two source points.
        let map: Vec<usize> = (0..ns).map(|i| i.min(nh - 1)).collect();
        let embedding = Embedding::new(map, source.clone(), host.clone())?;
        let report = distortion(&embedding);
        let d = report.distortion.clone();
        return Ok(OracleResult {
            embedding,
            report,
            distortion: d,
            states: 0,
            exact: true,
        });
    }

    // Assign high-degree vertices first: degree in the metric sense is
    // the number of partners at the global minimum distance, which for
    // unit-weight graph metrics is the graph degree.
    let order = assignment_order(source);

    // Injective seed incumbent.
    let seed_map: Vec<usize> = {
        let mut map = vec![0usize; ns];
        for (slot, &v) in order.iter().enumerate() {
            map[v] = slot;
        }
        map
    };
    let seed_emb = Embedding::new(seed_map, source.clone(), host.clone())?;
    let seed_rep = distortion(&seed_emb);
    let mut best_value = match &seed_rep.distortion {
        Stretch::Finite(d) => d.clone(),
        Stretch::Infinite => unreachable!("injective map into a valid metric is finite"),
    };
    let mut best_map = seed_emb.map.clone();

    // DFS over assignments in `order`, host candidates ascending.
    let mut assigned: Vec<usize> = Vec::with_capacity(ns);
    let mut exp_stack: Vec<W> = vec![W::zero()];
    let mut con_stack: Vec<W> = vec![W::zero()];
    let mut states: u64 = 0;

    struct Frame {
        next_candidate: usize,
    }
    let mut stack = vec![Frame { next_candidate: 0 }];
    let mut used = vec![false; nh];

    while let Some(frame) = stack.last_mut() {
        let depth = assigned.len();
        if frame.next_candidate >= nh {
            stack.pop();
            if let Some(h) = assigned.pop() {
                used[h] = false;
                exp_stack.pop();
                con_stack.pop();
            }
            continue;
        }
        let h = frame.next_candidate;
        frame.next_candidate += 1;
        if used[h] {
            continue;
        }
        states += 1;
        if states > limits.max_states {
            return Err(Error::ResourceCeiling(format!(
                "oracle exceeded {} states (use heuristic mode or raise the cap)",
                limits.max_states
            )));
        }
        let x = order[depth];
        let mut exp = exp_stack[depth].clone();
        let mut con = con_stack[depth].clone();
        let mut feasible = true;
        for (j, &hj) in assigned.iter().enumerate() {
            let nu = source.dist(x, order[j]).clone();
            let mu = host.dist(h, hj).clone();
            if mu.is_zero() {
                feasible = false;
                break;
            }
            let e = mu.clone() / nu.clone();
            if cmp_scalar(&e, &exp) == std::cmp::Ordering::Greater {
                exp = e;
            }
            let c = nu / mu;
            if cmp_scalar(&c, &con) == std::cmp::Ordering::Greater {
                con = c;
            }
        }
        if !feasible {
            continue;
        }
        let bound = exp.clone() * con.clone();
        if depth > 0 && cmp_scalar(&bound, &best_value) != std::cmp::Ordering::Less {
            continue;
        }
        if depth + 1 == ns {
            // Complete map strictly better than the incumbent.
            if cmp_scalar(&bound, &best_value) == std::cmp::Ordering::Less {
                best_value = bound;
                let mut map = vec![0usize; ns];
                for (slot, &v) in order.iter().enumerate() {
                    map[v] = if slot < assigned.len() { assigned[slot] } else { h };
                }
                best_map = map;
            }
            continue;
        }
        assigned.push(h);
        used[h] = true;
        exp_stack.push(exp);
        con_stack.push(con);
        stack.push(Frame { next_candidate: 0 });
    }

    let embedding = Embedding::new(best_map, source.clone(), host.clone())?;
    let report = distortion(&embedding);
    let d = report.distortion.clone();
    Ok(OracleResult {
        embedding,
        report,
        distortion: d,
        states,
        exact: true,
    })
}

fn assignment_order<W: Scalar>(source: &Metric<W>) -> Vec<usize> {
    let n = source.size();
    if n <= 1 {
        return (0..n).collect();
    }
    let dmin = source.min_positive_distance().expect("n >= 2");
    let degree: Vec<usize> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v && *source.dist(u, v) == dmin)
                .count()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(degree[v]), v));
    order
}

/// Best distortion among `count` uniformly random total maps; the
/// randomized cross-check for oracle soundness.
pub fn random_map_best<W: Scalar>(
    source: &Metric<W>,
    host: &Metric<W>,
    count: u64,
    seed: u64,
) -> Stretch<W> {
    let ns = source.size();
    let nh = host.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Stretch::Infinite;
    let mut map = vec![0usize; ns];
    for _ in 0..count {
        for slot in map.iter_mut() {
            *slot = rng.gen_range(0..nh);
        }
        let value = map_distortion(source, host, &map, Some(&best));
        if value.cmp_stretch(&best) == std::cmp::Ordering::Less {
            best = value;
        }
    }
    best
}

/// Distortion of one explicit map, with early abort once `cutoff` is
/// provably not beaten.
fn map_distortion<W: Scalar>(
    source: &Metric<W>,
    host: &Metric<W>,
    map: &[usize],
    cutoff: Option<&Stretch<W>>,
) -> Stretch<W> {
    let mut exp = W::zero();
    let mut con = W::zero();
    for (x, y) in source.pairs() {
        let nu = source.dist(x, y).clone();
        let mu = host.dist(map[x], map[y]).clone();
        if mu.is_zero() {
            return Stretch::Infinite;
        }
        let e = mu.clone() / nu.clone();
        if cmp_scalar(&e, &exp) == std::cmp::Ordering::Greater {
            exp = e;
        }
        let c = nu / mu;
        if cmp_scalar(&c, &con) == std::cmp::Ordering::Greater {
            con = c;
        }
        if let Some(Stretch::Finite(cut)) = cutoff {
            let partial = exp.clone() * con.clone();
            if cmp_scalar(&partial, cut) != std::cmp::Ordering::Less {
                return Stretch::Finite(partial);
            }
        }
    }
    Stretch::Finite(exp * con)
}

/// Greedy local-search heuristic: random restarts plus single-vertex
/// reassignment descent. Explicitly non-optimal; `exact` is false.
pub fn heuristic_min_distortion<W: Scalar>(
    source: &Metric<W>,
    host: &Metric<W>,
    restarts: u64,
    seed: u64,
) -> Result<OracleResult<W>> {
    let ns = source.size();
    let nh = host.size();
    if ns == 0 || nh == 0 {
        return Err(Error::InvalidParameter("empty metric".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Stretch<W>, Vec<usize>)> = None;
    let mut states = 0u64;
    for _ in 0..restarts.max(1) {
        let mut map: Vec<usize> = (0..ns).map(|_| rng.gen_range(0..nh)).collect();
        let mut value = map_distortion(source, host, &map, None);
        loop {
            let mut improved = false;
            for v in 0..ns {
                let original = map[v];
                for h in 0..nh {
                    if h == original {
                        continue;
                    }
                    map[v] = h;
                    states += 1;
                    let candidate = map_distortion(source, host, &map, Some(&value));
                    if candidate.cmp_stretch(&value) == std::cmp::Ordering::Less {
                        value = candidate;
                        improved = true;
                    } else {
                        map[v] = original;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        if best
            .as_ref()
            .map_or(true, |(b, _)| value.cmp_stretch(b) == std::cmp::Ordering::Less)
        {
            best = Some((value, map));
        }
    }
    let (value, map) = best.unwrap();
    let embedding = Embedding::new(map, source.clone(), host.clone())?;
    let report = distortion(&embedding);
    Ok(OracleResult {
        embedding,
        report,
        distortion: value,
        states,
        exact: false,
    })
}

/// All non-isomorphic trees on `n` vertices as edge lists (Pruefer
/// enumeration deduplicated by centroid-rooted canonical encoding).
/// Hard-capped at 9 vertices.
pub fn enumerate_trees(n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("tree size must be >= 1".into()));
    }
    if n > 9 {
        return Err(Error::ResourceCeiling(format!(
            "tree enumeration capped at 9 vertices, got {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![vec![]]);
    }
    if n == 2 {
        return Ok(vec![vec![(0, 1)]]);
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = pruefer_decode(&seq, n);
        let key = canonical_tree_code(&edges, n);
        if seen.insert(key) {
            out.push(edges);
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == seq.len() {
                return Ok(out);
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn pruefer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &s in seq {
        let std::cmp::Reverse(leaf) = leaves.pop().unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(std::cmp::Reverse(s));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a.min(b), a.max(b)));
    edges
}

/// AHU encoding rooted at the centroid (or the smaller encoding over the
/// two centroids).
fn canonical_tree_code(edges: &[(usize, usize)], n: usize) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let centroids = tree_centroids(&adj);
    centroids
        .into_iter()
        .map(|c| ahu(&adj, c, usize::MAX))
        .min()
        .unwrap()
}

fn tree_centroids(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut frontier: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        let mut next = Vec::new();
        for &v in &frontier {
            removed[v] = true;
            remaining -= 1;
            for &u in &adj[v] {
                if !removed[u] {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        frontier = next;
    }
    (0..n).filter(|&v| !removed[v]).collect()
}

fn ahu(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut parts: Vec<String> = adj[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| ahu(adj, u, v))
        .collect();
    parts.sort();
    format!("({})", parts.concat())
}

#[derive(Clone, Debug)]
pub struct TreeSearchResult<W> {
    pub tree: Graph<W>,
    pub embedding: Embedding<W>,
    pub distortion: Stretch<W>,
    pub trees_tried: usize,
    pub states: u64,
}

/// Minimum distortion over all trees with up to `max_tree_vertices`
/// vertices (non-isomorphic enumeration; integer edge weights up to
/// `max_weight`). Exhaustive per host via the oracle.
pub fn min_distortion_over_trees<W: Scalar>(
    source: &Metric<W>,
    max_tree_vertices: usize,
    max_weight: u64,
    limits: OracleLimits,
) -> Result<TreeSearchResult<W>> {
    if max_weight == 0 {
        return Err(Error::InvalidParameter("max weight must be >= 1".into()));
    }
    let mut best: Option<TreeSearchResult<W>> = None;
    let mut trees_tried = 0usize;
    let mut states = 0u64;
    for size in 1..=max_tree_vertices {
        for edges in enumerate_trees(size)? {
            for weights in weight_assignments(edges.len(), max_weight) {
                let tree: Graph<W> = Graph::from_edges(
                    size,
                    edges
                        .iter()
                        .zip(weights.iter())
                        .map(|(&(a, b), &w)| (a, b, W::from_ratio(w as i64, 1))),
                )?;
                let host = shortest_path_metric(&tree)?;
                let result = min_distortion_into_host(source, &host, limits)?;
                trees_tried += 1;
                states += result.states;
                let better = best.as_ref().map_or(true, |b| {
                    result.distortion.cmp_stretch(&b.distortion) == std::cmp::Ordering::Less
                });
                if better {
                    best = Some(TreeSearchResult {
                        tree,
                        embedding: result.embedding,
                        distortion: result.distortion,
                        trees_tried,
                        states,
                    });
                }
            }
        }
    }
    let mut best = best.expect("at least the single-vertex tree is enumerated");
    best.trees_tried = trees_tried;
    best.states = states;
    Ok(best)
}

fn weight_assignments(len: usize, max_weight: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![1u64; len]];
    if max_weight <= 1 {
        return out;
    }
    out.clear();
    let mut current = vec![1u64; len];
    loop {
        out.push(current.clone());
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            current[i] += 1;
            if current[i] <= max_weight {
                break;
            }
            current[i] = 1;
            i += 1;
        }
    }
}
