use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embed::Embedding;
use crate::metric::Metric;
use crate::scalar::{cmp_scalar, Scalar};

/// Dyadic radius multiplier denominator: beta = b/1024, b in [1024, 2048).
const BETA_DENOM: i64 = 1024;

/// Sample a random hierarchically-separated dominating tree metric over
/// the source points (FRT-style cut decomposition: power-of-2 scale
/// hierarchy, one random vertex permutation, one random dyadic radius
/// multiplier). The returned embedding is the identity map onto the tree
/// metric restricted to the source points; it dominates the source
/// metric on every sample, exactly.
///
/// The output is a pure function of `(source, seed)`.
pub fn frt_sample<W: Scalar>(source: &Metric<W>, seed: u64) -> Embedding<W> {
    let n = source.size();
    if n <= 1 {
        return Embedding::identity(source.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let beta: W = W::from_ratio(rng.gen_range(BETA_DENOM..2 * BETA_DENOM), BETA_DENOM);

    let d_min = source
        .min_positive_distance()
        .expect("metric has at least two points");
    let diameter = source.diameter();
    // Smallest level count with 2^(L-1) * d_min >= diameter.
    let mut levels = 1usize;
    while levels < 62 {
        let reach = W::from_ratio(1 << (levels - 1), 1) * d_min.clone();
        if cmp_scalar(&reach, &diameter) != std::cmp::Ordering::Less {
            break;
        }
        levels += 1;
    }

    // Center signature per vertex and level: level 0 is the vertex
    // itself; at level l every vertex adopts the first permutation
    // element within radius beta * 2^(l-1) * d_min.
    let mut signature: Vec<Vec<usize>> = Vec::with_capacity(levels + 1);
    signature.push((0..n).collect());
    for level in 1..=levels {
        let radius = beta.clone() * W::from_ratio(1 << (level - 1), 1) * d_min.clone();
        let mut row = vec![usize::MAX; n];
        for (v, slot) in row.iter_mut().enumerate() {
            *slot = perm
                .iter()
                .copied()
                .find(|&u| cmp_scalar(source.dist(u, v), &radius) != std::cmp::Ordering::Greater)
                .expect("top radius reaches every vertex");
        }
        signature.push(row);
    }

    // Leaf-to-leaf tree distance: with divergence level i (the highest
    // level where signatures differ), the path climbs to the common
    // cluster at i+1 on both sides: 2 * beta * d_min * (2^(i+1) - 1).
    let tree = Metric::from_fn(n, |u, v| {
        let mut diverge = 0usize;
        for level in (0..=levels).rev() {
            if signature[level][u] != signature[level][v] {
                diverge = level;
                break;
            }
        }
        beta.clone()
            * W::from_ratio(2 * ((1i64 << (diverge + 1)) - 1), 1)
            * d_min.clone()
    });
    Embedding {
        map: (0..n).collect(),
        source: source.clone(),
        host: tree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{distortion, dominates};
    use crate::generate;
    use crate::graph::Graph;
    use crate::metric::shortest_path_metric;
    use crate::scalar::Stretch;
    use crate::Rat;

    #[test]
    fn two_point_metric_dominated_and_bounded() {
        let g: Graph<Rat> = Graph::unit(2, vec![(0, 1)]).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        for seed in 0..50 {
            let e = frt_sample(&m, seed);
            assert!(dominates(&e));
            // Single level: tree distance is 2 * beta in [2, 4).
            let d = e.host.dist(0, 1);
            assert!(*d >= Rat::from_integer(2) && *d < Rat::from_integer(4));
        }
    }

    #[test]
    fn tree_metric_is_a_metric_and_deterministic() {
        let g: Graph<Rat> = generate::grid(3).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        let a = frt_sample(&m, 7);
        let b = frt_sample(&m, 7);
        assert_eq!(a.host, b.host);
        a.host.verify().unwrap();
        let c = frt_sample(&m, 8);
        assert!(c.host != a.host || c.map == a.map);
    }

    #[test]
    fn domination_holds_across_seeds() {
        let g: Graph<Rat> = generate::grid(4).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        for seed in 0..200 {
            let e = frt_sample(&m, seed);
            assert!(dominates(&e), "seed {seed} not dominating");
            let r = distortion(&e);
            assert!(matches!(r.distortion, Stretch::Finite(_)));
        }
    }

    #[test]
    fn uniform_four_point_metric_anchor() {
        // Regression anchor on K_4's metric: mean pairwise stretch over a
        // fixed seed range stays within the hierarchy's blowup bound.
        let g: Graph<Rat> = generate::complete(4).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        let mut total = Rat::from_integer(0);
        let samples = 10_000u64;
        for seed in 0..samples {
            let e = frt_sample(&m, seed);
            assert!(dominates(&e));
            let mut acc = Rat::from_integer(0);
            for (x, y) in m.pairs() {
                acc += *e.host.dist(x, y) / *m.dist(x, y);
            }
            total += acc / Rat::from_integer(6);
        }
        let mean = total / Rat::from_integer(samples as i64);
        // Hierarchy with one level: stretch in [2, 4); mean near 3.
        assert!(mean >= Rat::from_integer(2) && mean < Rat::from_integer(4));
    }
}
