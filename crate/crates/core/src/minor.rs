use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Certificate that `minor` is a minor of `host`: pairwise disjoint
/// connected branch sets, one per minor vertex, plus a host edge
/// witnessing every minor edge. Weights play no role.
#[derive(Clone, Debug, Serialize)]
pub struct MinorWitness {
    /// Branch set per minor vertex, each sorted.
    pub branch_sets: Vec<Vec<usize>>,
    /// Minor edge -> host edge between the two branch sets.
    pub edge_witnesses: Vec<((usize, usize), (usize, usize))>,
}

#[derive(Clone, Copy, Debug)]
pub struct MinorSearchLimits {
    pub max_minor_vertices: usize,
    pub max_host_vertices: usize,
}

impl Default for MinorSearchLimits {
    fn default() -> Self {
        MinorSearchLimits {
            max_minor_vertices: 6,
            max_host_vertices: 25,
        }
    }
}

/// Exhaustive minor containment check. Returns a re-verified witness on
/// success, or `None` after exhausting the search space.
///
/// Search: seed branch sets in minor-vertex order (host candidates
/// ascending, each set's seed is its minimum element), then repair
/// unwitnessed minor edges by growing either endpoint set one adjacent
/// host vertex at a time. Deterministic first-found witness.
pub fn has_minor<W: Scalar>(
    host: &Graph<W>,
    minor: &Graph<W>,
    limits: MinorSearchLimits,
) -> Result<Option<MinorWitness>> {
    let k = minor.vertex_count();
    let n = host.vertex_count();
    if k > limits.max_minor_vertices {
        return Err(Error::ResourceCeiling(format!(
            "minor has {k} vertices, cap is {}",
            limits.max_minor_vertices
        )));
    }
    if n > limits.max_host_vertices {
        return Err(Error::ResourceCeiling(format!(
            "host has {n} vertices, cap is {}",
            limits.max_host_vertices
        )));
    }
    if k == 0 || k > n {
        return Ok(None);
    }

    let minor_edges: Vec<(usize, usize)> = minor.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut state = SearchState {
        host,
        minor_edges: &minor_edges,
        owner: vec![usize::MAX; n],
        sets: vec![Vec::new(); k],
        failed: std::collections::HashSet::new(),
    };
    if !state.seed(0) {
        return Ok(None);
    }
    let witness = state.extract_witness();
    debug_assert!(verify_witness(host, minor, &witness));
    if !verify_witness(host, minor, &witness) {
        return Err(Error::InvalidParameter(
            "internal: search produced an invalid witness".into(),
        ));
    }
    Ok(Some(witness))
}

struct SearchState<'a, W> {
    host: &'a Graph<W>,
    minor_edges: &'a [(usize, usize)],
    owner: Vec<usize>,
    sets: Vec<Vec<usize>>,
    /// Exhausted (owner, edge-index) states; different growth orders
    /// reach identical states, so this caps the duplication.
    failed: std::collections::HashSet<(Vec<u8>, u32)>,
}

impl<W: Scalar> SearchState<'_, W> {
    /// Choose a seed for branch set `j`, then move to the repair phase
    /// once every set is seeded.
    fn seed(&mut self, j: usize) -> bool {
        if j == self.sets.len() {
            return self.repair(0);
        }
        for v in 0..self.owner.len() {
            if self.owner[v] != usize::MAX {
                continue;
            }
            self.owner[v] = j;
            self.sets[j].push(v);
            if self.seed(j + 1) {
                return true;
            }
            self.sets[j].pop();
            self.owner[v] = usize::MAX;
        }
        false
    }

    fn touches(&self, a: usize, b: usize) -> bool {
        self.sets[a].iter().any(|&u| {
            self.host
                .neighbors(u)
                .iter()
                .any(|&(w, _)| self.owner[w] == b)
        })
    }

    /// Satisfy minor edges in order; grow either side when unwitnessed.
    fn repair(&mut self, next_edge: usize) -> bool {
        let Some(&(a, b)) = self.minor_edges.get(next_edge) else {
            return true;
        };
        if self.touches(a, b) {
            return self.repair(next_edge + 1);
        }
        let key = (
            self.owner.iter().map(|&o| o.min(254) as u8).collect::<Vec<u8>>(),
            next_edge as u32,
        );
        if self.failed.contains(&key) {
            return false;
        }
        for (side, other) in [(a, b), (b, a)] {
            // Corridor restriction: a growth step is useful for this edge
            // only if the new vertex still reaches the partner set
            // through unassigned vertices. Canonical growth keeps every
            // set's seed as its minimum element.
            let corridor = self.reaches_set(other);
            let seed = self.sets[side][0];
            let frontier: BTreeSet<usize> = self
                .sets[side]
                .iter()
                .flat_map(|&u| self.host.neighbors(u).iter().map(|&(w, _)| w))
                .filter(|&w| self.owner[w] == usize::MAX && w > seed && corridor[w])
                .collect();
            for v in frontier {
                self.owner[v] = side;
                self.sets[side].push(v);
                if self.repair(next_edge) {
                    return true;
                }
                self.sets[side].pop();
                self.owner[v] = usize::MAX;
            }
        }
        self.failed.insert(key);
        false
    }

    /// Unassigned vertices from which an unassigned path reaches a
    /// neighbor of branch set `target`.
    fn reaches_set(&self, target: usize) -> Vec<bool> {
        let n = self.owner.len();
        let mut mark = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &u in &self.sets[target] {
            for &(w, _) in self.host.neighbors(u) {
                if self.owner[w] == usize::MAX && !mark[w] {
                    mark[w] = true;
                    queue.push_back(w);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            for &(w, _) in self.host.neighbors(u) {
                if self.owner[w] == usize::MAX && !mark[w] {
                    mark[w] = true;
                    queue.push_back(w);
                }
            }
        }
        mark
    }

    fn extract_witness(&self) -> MinorWitness {
        let branch_sets: Vec<Vec<usize>> = self
            .sets
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                s
            })
            .collect();
        let edge_witnesses = self
            .minor_edges
            .iter()
            .map(|&(a, b)| {
                let host_edge = self
                    .sets[a]
                    .iter()
                    .find_map(|&u| {
                        self.host
                            .neighbors(u)
                            .iter()
                            .find(|&&(w, _)| self.owner[w] == b)
                            .map(|&(w, _)| (u.min(w), u.max(w)))
                    })
                    .expect("repair phase witnessed this edge");
                ((a, b), host_edge)
            })
            .collect();
        MinorWitness {
            branch_sets,
            edge_witnesses,
        }
    }
}

/// Independent witness validation: disjointness, connectivity of every
/// branch set, and one host edge per minor edge between the right sets.
pub fn verify_witness<W: Scalar>(host: &Graph<W>, minor: &Graph<W>, w: &MinorWitness) -> bool {
    if w.branch_sets.len() != minor.vertex_count() {
        return false;
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, set) in w.branch_sets.iter().enumerate() {
        if set.is_empty() {
            return false;
        }
        for &v in set {
            if v >= host.vertex_count() {
                return false;
            }
            if owner.insert(v, j).is_some() {
                return false;
            }
        }
        // Connectivity within the set.
        let members: BTreeSet<usize> = set.iter().copied().collect();
        let mut seen = BTreeSet::from([set[0]]);
        let mut queue = VecDeque::from([set[0]]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in host.neighbors(u) {
                if members.contains(&v) && seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        if seen.len() != members.len() {
            return false;
        }
    }
    let witnessed: BTreeMap<(usize, usize), (usize, usize)> = w
        .edge_witnesses
        .iter()
        .map(|&(me, he)| ((me.0.min(me.1), me.0.max(me.1)), he))
        .collect();
    for e in minor.edges() {
        let Some(&(hu, hv)) = witnessed.get(&(e.u, e.v)) else {
            return false;
        };
        if !host.has_edge(hu, hv) {
            return false;
        }
        let ou = owner.get(&hu);
        let ov = owner.get(&hv);
        if !(ou == Some(&e.u) && ov == Some(&e.v) || ou == Some(&e.v) && ov == Some(&e.u)) {
            return false;
        }
    }
    true
}

/// JSON form used by the CLI.
#[derive(Serialize)]
pub struct MinorCheckJson {
    pub has_minor: bool,
    pub branch_sets: Option<BTreeMap<String, Vec<usize>>>,
    pub edge_witnesses: Option<BTreeMap<String, (usize, usize)>>,
}

pub fn minor_check_json(result: &Option<MinorWitness>) -> MinorCheckJson {
    match result {
        Some(w) => MinorCheckJson {
            has_minor: true,
            branch_sets: Some(
                w.branch_sets
                    .iter()
                    .enumerate()
                    .map(|(j, s)| (j.to_string(), s.clone()))
                    .collect(),
            ),
            edge_witnesses: Some(
                w.edge_witnesses
                    .iter()
                    .map(|&((a, b), he)| (format!("{a}-{b}"), he))
                    .collect(),
            ),
        },
        None => MinorCheckJson {
            has_minor: false,
            branch_sets: None,
            edge_witnesses: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::Rat;

    fn limits() -> MinorSearchLimits {
        MinorSearchLimits::default()
    }

    #[test]
    fn path_has_no_triangle_minor() {
        let p4: Graph<Rat> = Graph::unit(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let k3: Graph<Rat> = generate::complete(3).unwrap();
        assert!(has_minor(&p4, &k3, limits()).unwrap().is_none());
    }

    #[test]
    fn c4_contains_triangle_minor() {
        let c4: Graph<Rat> = generate::cycle(4).unwrap();
        let k3: Graph<Rat> = generate::complete(3).unwrap();
        let w = has_minor(&c4, &k3, limits()).unwrap().unwrap();
        assert!(verify_witness(&c4, &k3, &w));
    }

    #[test]
    fn k33_contains_k3_and_k44_contains_k4() {
        let k33: Graph<Rat> = generate::complete_bipartite(3).unwrap();
        let k3: Graph<Rat> = generate::complete(3).unwrap();
        assert!(has_minor(&k33, &k3, limits()).unwrap().is_some());
        let k44: Graph<Rat> = generate::complete_bipartite(4).unwrap();
        let k4: Graph<Rat> = generate::complete(4).unwrap();
        let w = has_minor(&k44, &k4, limits()).unwrap().unwrap();
        assert!(verify_witness(&k44, &k4, &w));
    }

    #[test]
    fn grid3_excludes_k5() {
        let g: Graph<Rat> = generate::grid(3).unwrap();
        let k5: Graph<Rat> = generate::complete(5).unwrap();
        assert!(has_minor(&g, &k5, limits()).unwrap().is_none());
    }

    #[test]
    fn k5_contains_k4_as_subgraph() {
        let k5: Graph<Rat> = generate::complete(5).unwrap();
        let k4: Graph<Rat> = generate::complete(4).unwrap();
        let w = has_minor(&k5, &k4, limits()).unwrap().unwrap();
        assert!(verify_witness(&k5, &k4, &w));
    }

    #[test]
    fn self_minor_via_identity_branch_sets() {
        for g in [
            generate::cycle::<Rat>(5).unwrap(),
            generate::grid::<Rat>(2).unwrap(),
            generate::complete::<Rat>(4).unwrap(),
        ] {
            let w = has_minor(&g, &g, limits()).unwrap().unwrap();
            assert!(verify_witness(&g, &g, &w));
        }
    }

    #[test]
    fn tampered_witness_rejected() {
        let k5: Graph<Rat> = generate::complete(5).unwrap();
        let k4: Graph<Rat> = generate::complete(4).unwrap();
        let mut w = has_minor(&k5, &k4, limits()).unwrap().unwrap();
        // Overlap two branch sets.
        let stolen = w.branch_sets[0][0];
        w.branch_sets[1].push(stolen);
        assert!(!verify_witness(&k5, &k4, &w));
    }

    #[test]
    fn caps_enforced() {
        let g: Graph<Rat> = generate::grid(6).unwrap();
        let k3: Graph<Rat> = generate::complete(3).unwrap();
        assert!(matches!(
            has_minor(&g, &k3, limits()),
            Err(Error::ResourceCeiling(_))
        ));
        let k7: Graph<Rat> = generate::complete(7).unwrap();
        let small: Graph<Rat> = generate::grid(3).unwrap();
        assert!(matches!(
            has_minor(&small, &k7, limits()),
            Err(Error::ResourceCeiling(_))
        ));
    }

    #[test]
    fn monotone_under_edge_addition() {
        let c5: Graph<Rat> = generate::cycle(5).unwrap();
        let k3: Graph<Rat> = generate::complete(3).unwrap();
        assert!(has_minor(&c5, &k3, limits()).unwrap().is_some());
        // Add a chord; the minor must survive.
        let mut pairs: Vec<(usize, usize)> =
            c5.edges().iter().map(|e| (e.u, e.v)).collect();
        pairs.push((0, 2));
        let chorded: Graph<Rat> = Graph::unit(5, pairs).unwrap();
        assert!(has_minor(&chorded, &k3, limits()).unwrap().is_some());
    }
}
