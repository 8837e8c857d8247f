use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{cmp_scalar, max_scalar, min_scalar, OrdKey, Scalar};

/// Dense symmetric distance matrix over `0..size`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<W> {
    size: usize,
    d: Vec<W>,
}

impl<W: Scalar> Metric<W> {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> W) -> Self {
        let mut d = vec![W::zero(); size * size];
        for i in 0..size {
            for j in (i + 1)..size {
                let w = f(i, j);
                d[i * size + j] = w.clone();
                d[j * size + i] = w;
            }
        }
        Metric { size, d }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dist(&self, i: usize, j: usize) -> &W {
        &self.d[i * self.size + j]
    }

    /// All unordered pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |i| ((i + 1)..self.size).map(move |j| (i, j)))
    }

    pub fn scale(&self, factor: &W) -> Metric<W> {
        Metric {
            size: self.size,
            d: self.d.iter().map(|x| x.clone() * factor.clone()).collect(),
        }
    }

    pub fn diameter(&self) -> W {
        let mut best = W::zero();
        for (i, j) in self.pairs() {
            best = max_scalar(best, self.dist(i, j).clone());
        }
        best
    }

    /// Smallest distance between distinct points; `None` for < 2 points.
    pub fn min_positive_distance(&self) -> Option<W> {
        let mut best: Option<W> = None;
        for (i, j) in self.pairs() {
            let d = self.dist(i, j).clone();
            best = Some(match best {
                Some(b) => min_scalar(b, d),
                None => d,
            });
        }
        best
    }

    /// Check the metric axioms; Err carries the first violation found.
    pub fn verify(&self) -> Result<()> {
        for i in 0..self.size {
            if !self.dist(i, i).is_zero() {
                return Err(Error::InvalidMetric(format!("d({i},{i}) != 0")));
            }
            for j in 0..self.size {
                if self.dist(i, j) != self.dist(j, i) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) asymmetric")));
                }
                if i != j && !(self.dist(i, j).clone() > W::zero()) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) not positive")));
                }
            }
        }
        for i in 0..self.size {
            for j in 0..self.size {
                for k in 0..self.size {
                    let direct = self.dist(i, k).clone();
                    let detour = self.dist(i, j).clone() + self.dist(j, k).clone();
                    if cmp_scalar(&direct, &detour) == std::cmp::Ordering::Greater {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Shortest-path closure of a connected graph (Dijkstra per source; exact
/// in the scalar type).
pub fn shortest_path_metric<W: Scalar>(g: &Graph<W>) -> Result<Metric<W>> {
    let n = g.vertex_count();
    let mut d: Vec<W> = vec![W::zero(); n * n];
    for s in 0..n {
        let row = dijkstra(g, s)?;
        for (t, w) in row.into_iter().enumerate() {
            d[s * n + t] = w;
        }
    }
    Ok(Metric { size: n, d })
}

fn dijkstra<W: Scalar>(g: &Graph<W>, s: usize) -> Result<Vec<W>> {
    let n = g.vertex_count();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut heap: BinaryHeap<Reverse<(OrdKey<W>, usize)>> = BinaryHeap::new();
    dist[s] = Some(W::zero());
    heap.push(Reverse((OrdKey(W::zero()), s)));
    while let Some(Reverse((OrdKey(du), u))) = heap.pop() {
        if dist[u].as_ref() != Some(&du) {
            continue;
        }
        for &(v, idx) in g.neighbors(u) {
            let cand = du.clone() + g.edges()[idx].w.clone();
            let better = match &dist[v] {
                Some(dv) => cmp_scalar(&cand, dv) == std::cmp::Ordering::Less,
                None => true,
            };
            if better {
                dist[v] = Some(cand.clone());
                heap.push(Reverse((OrdKey(cand), v)));
            }
        }
    }
    dist.into_iter()
        .enumerate()
        .map(|(t, w)| w.ok_or(Error::Disconnected(t, s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::Rat;

    #[test]
    fn unit_path_distances() {
        let g: Graph<Rat> = Graph::unit(3, vec![(0, 1), (1, 2)]).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(*m.dist(0, 2), Rat::from_integer(2));
        m.verify().unwrap();
    }

    #[test]
    fn unit_c4_antipodal() {
        let g: Graph<Rat> = generate::cycle(4).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(*m.dist(0, 2), Rat::from_integer(2));
        assert_eq!(*m.dist(1, 3), Rat::from_integer(2));
        m.verify().unwrap();
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let g: Graph<Rat> = Graph::unit(3, vec![(0, 1)]).unwrap();
        assert!(matches!(
            shortest_path_metric(&g),
            Err(Error::Disconnected(_, _))
        ));
    }

    #[test]
    fn rational_weights_are_exact() {
        let g: Graph<Rat> = Graph::from_edges(
            3,
            vec![
                (0, 1, Rat::new(1, 3)),
                (1, 2, Rat::new(1, 6)),
                (0, 2, Rat::new(2, 3)),
            ],
        )
        .unwrap();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(*m.dist(0, 2), Rat::new(1, 2));
    }

    #[test]
    fn edge_weight_bounds_distance() {
        let g: Graph<Rat> = Graph::from_edges(
            4,
            vec![
                (0, 1, Rat::from_integer(5)),
                (1, 2, Rat::from_integer(1)),
                (2, 3, Rat::from_integer(1)),
                (0, 3, Rat::from_integer(1)),
            ],
        )
        .unwrap();
        let m = shortest_path_metric(&g).unwrap();
        for e in g.edges() {
            assert!(*m.dist(e.u, e.v) <= e.w);
        }
        assert_eq!(*m.dist(0, 1), Rat::from_integer(3));
    }
}
