use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A subset A of the n x n grid's vertices. |A| plays the role of
/// beta^2; beta itself stays symbolic (comparisons square both sides so
/// only integer arithmetic happens).
#[derive(Clone, Debug)]
pub struct GridSubset {
    n: usize,
    cells: BTreeSet<(usize, usize)>,
}

impl GridSubset {
    pub fn new(n: usize, cells: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid side must be >= 1".into()));
        }
        let cells: BTreeSet<(usize, usize)> = cells.into_iter().collect();
        if let Some(&(r, c)) = cells.iter().find(|&&(r, c)| r >= n || c >= n) {
            return Err(Error::InvalidParameter(format!(
                "cell ({r},{c}) outside {n} x {n} grid"
            )));
        }
        Ok(GridSubset { n, cells })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &BTreeSet<(usize, usize)> {
        &self.cells
    }

    /// |A| = beta^2.
    pub fn beta_squared(&self) -> usize {
        self.cells.len()
    }

    /// |A| <= n^2 / 2, the hypothesis both separator lemmas assume.
    pub fn small_enough(&self) -> bool {
        2 * self.cells.len() <= self.n * self.n
    }

    pub fn contains(&self, cell: (usize, usize)) -> bool {
        self.cells.contains(&cell)
    }

    fn neighbors(&self, (r, c): (usize, usize)) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        [
            (r.wrapping_sub(1), c),
            (r + 1, c),
            (r, c.wrapping_sub(1)),
            (r, c + 1),
        ]
        .into_iter()
        .filter(move |&(rr, cc)| rr < n && cc < n)
    }

    /// Cells of A with at least one grid neighbor outside A.
    pub fn boundary(&self) -> Vec<(usize, usize)> {
        self.cells
            .iter()
            .copied()
            .filter(|&cell| self.neighbors(cell).any(|nb| !self.contains(nb)))
            .collect()
    }
}

/// Count rows and columns that A intersects but does not fill.
pub fn rows_cols_intersected_not_filled(a: &GridSubset) -> (usize, usize) {
    let n = a.n();
    let mut row_counts = vec![0usize; n];
    let mut col_counts = vec![0usize; n];
    for &(r, c) in a.cells() {
        row_counts[r] += 1;
        col_counts[c] += 1;
    }
    let partial = |counts: Vec<usize>| counts.into_iter().filter(|&k| k >= 1 && k < n).count();
    (partial(row_counts), partial(col_counts))
}

/// max(rows, cols) >= beta, squared: the separator lower bound the row
/// lemma promises under |A| <= n^2/2.
pub fn rows_lemma_holds(a: &GridSubset) -> bool {
    let (rows, cols) = rows_cols_intersected_not_filled(a);
    let best = rows.max(cols);
    best * best >= a.beta_squared()
}

/// Which side fired in the row lemma (diagnostic for the symmetric
/// reading: rows, columns, or both).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowsOrCols {
    Rows,
    Cols,
    Both,
    Neither,
}

pub fn rows_lemma_case(a: &GridSubset) -> RowsOrCols {
    let (rows, cols) = rows_cols_intersected_not_filled(a);
    let b2 = a.beta_squared();
    match (rows * rows >= b2, cols * cols >= b2) {
        (true, true) => RowsOrCols::Both,
        (true, false) => RowsOrCols::Rows,
        (false, true) => RowsOrCols::Cols,
        (false, false) => RowsOrCols::Neither,
    }
}

/// |B| <= beta/4, squared to integers: (4|B|)^2 <= |A|.
pub fn vertices_lemma_hypothesis(a: &GridSubset, b: &BTreeSet<(usize, usize)>) -> bool {
    let k = 4 * b.len();
    k * k <= a.beta_squared()
}

/// Vertices of A with a neighbor outside A at grid distance at least
/// beta / (4 |B|) from every vertex of B. Grid distance is the shortest
/// path in the full grid, i.e. the Manhattan distance. The distance
/// comparison is exact via squaring: (4 |B| d)^2 >= |A|.
///
/// An empty B makes the distance condition vacuous.
pub fn boundary_far_vertices(
    a: &GridSubset,
    b: &BTreeSet<(usize, usize)>,
) -> Result<Vec<(usize, usize)>> {
    if let Some(&cell) = b.iter().find(|&cell| !a.contains(*cell)) {
        return Err(Error::InvalidParameter(format!(
            "B contains {cell:?} outside A"
        )));
    }
    let b2 = a.beta_squared();
    let far = a
        .boundary()
        .into_iter()
        .filter(|&(r, c)| {
            b.iter().all(|&(br, bc)| {
                let d = r.abs_diff(br) + c.abs_diff(bc);
                let lhs = 4 * b.len() * d;
                lhs * lhs >= b2
            })
        })
        .collect();
    Ok(far)
}

/// |result| >= beta/2, squared: (2 count)^2 >= |A|.
pub fn vertices_lemma_holds(a: &GridSubset, b: &BTreeSet<(usize, usize)>) -> Result<bool> {
    let count = boundary_far_vertices(a, b)?.len();
    Ok(4 * count * count >= a.beta_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_subset_counts_zero() {
        let a = GridSubset::new(4, []).unwrap();
        assert_eq!(rows_cols_intersected_not_filled(&a), (0, 0));
        assert!(boundary_far_vertices(&a, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn full_row_of_grid4() {
        let a = GridSubset::new(4, (0..4).map(|c| (1, c))).unwrap();
        // The full row is filled (0 partial rows); every column is
        // intersected but not filled.
        assert_eq!(rows_cols_intersected_not_filled(&a), (0, 4));
    }

    #[test]
    fn two_by_two_block_of_grid4() {
        let a = GridSubset::new(4, [(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(rows_cols_intersected_not_filled(&a), (2, 2));
        assert!(rows_lemma_holds(&a));
        // B = one corner: threshold beta/(4|B|) = 2/4 < 1, so every
        // boundary vertex except those at distance 0 qualifies.
        let b: BTreeSet<_> = [(0, 0)].into_iter().collect();
        assert!(vertices_lemma_hypothesis(&a, &b) == false);
        let far = boundary_far_vertices(&a, &b).unwrap();
        assert!(far.len() >= 1);
        assert!(!far.contains(&(0, 0)));
    }

    #[test]
    fn out_of_range_cell_rejected() {
        assert!(GridSubset::new(3, [(3, 0)]).is_err());
    }

    #[test]
    fn b_outside_a_rejected() {
        let a = GridSubset::new(4, [(0, 0)]).unwrap();
        let b: BTreeSet<_> = [(2, 2)].into_iter().collect();
        assert!(boundary_far_vertices(&a, &b).is_err());
    }

    #[test]
    fn empty_b_returns_all_boundary() {
        let a = GridSubset::new(5, [(2, 2), (2, 3), (3, 2)]).unwrap();
        let far = boundary_far_vertices(&a, &BTreeSet::new()).unwrap();
        assert_eq!(far.len(), 3);
    }

    fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> GridSubset {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .collect();
        all.shuffle(rng);
        GridSubset::new(n, all.into_iter().take(size)).unwrap()
    }

    #[test]
    fn rows_lemma_random_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
        for _ in 0..1000 {
            let size = rng.gen_range(1..=32);
            let a = random_subset(&mut rng, 8, size);
            assert!(a.small_enough());
            assert!(rows_lemma_holds(&a), "violated for {:?}", a.cells());
        }
    }

    #[test]
    fn vertices_lemma_random_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
        let mut checked = 0;
        while checked < 1000 {
            let size = rng.gen_range(1..=32usize);
            let a = random_subset(&mut rng, 8, size);
            let max_b = ((size as f64).sqrt() / 4.0).floor() as usize;
            let cells: Vec<_> = a.cells().iter().copied().collect();
            let b: BTreeSet<_> = cells
                .choose_multiple(&mut rng, max_b.min(cells.len()))
                .copied()
                .collect();
            if !vertices_lemma_hypothesis(&a, &b) {
                continue;
            }
            assert!(
                vertices_lemma_holds(&a, &b).unwrap(),
                "violated for A={:?} B={:?}",
                a.cells(),
                b
            );
            checked += 1;
        }
    }
}
