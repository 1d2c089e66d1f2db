use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rank::RankedLexicon;

/// Logarithmic bin of a rank: `floor(bins_per_decade · log10(rank))`.
pub fn bin_index(rank: f64, bins_per_decade: u32) -> usize {
    (bins_per_decade as f64 * rank.max(1.0).log10()).floor() as usize
}

/// Lower rank edge of bin `k`.
pub fn bin_lower_rank(k: usize, bins_per_decade: u32) -> f64 {
    10f64.powf(k as f64 / bins_per_decade as f64)
}

/// Counts of rank-rank pairs in logarithmic bins, indexed by
/// `(bin of rank_A, bin of rank_B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistogramGrid {
    bins_per_decade: u32,
    max_rank: u64,
    side: usize,
    counts: Vec<u64>,
}

impl HistogramGrid {
    fn empty(bins_per_decade: u32, max_rank: u64) -> Self {
        let side = bin_index(max_rank.max(1) as f64, bins_per_decade) + 1;
        Self {
            bins_per_decade,
            max_rank,
            side,
            counts: vec![0; side * side],
        }
    }

    pub fn bins_per_decade(&self) -> u32 {
        self.bins_per_decade
    }

    /// Largest rank the grid covers (the lexicon size).
    pub fn max_rank(&self) -> u64 {
        self.max_rank
    }

    /// Number of bins along each axis.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        if i < self.side && j < self.side {
            self.counts[i * self.side + j]
        } else {
            0
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Non-empty cells as `((i, j), count)`, row-major.
    pub fn nonempty(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(k, &c)| ((k / self.side, k % self.side), c))
    }

    /// `cell_x<TAB>cell_y<TAB>count` for every non-empty cell, where x is the
    /// system-A bin and y the system-B bin.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "cell_x\tcell_y\tcount")?;
        for ((i, j), c) in self.nonempty() {
            writeln!(out, "{i}\t{j}\t{c}")?;
        }
        Ok(())
    }
}

/// Cell of every lexicon type, aligned with the lexicon order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellIndex {
    cells: Vec<(usize, usize)>,
}

impl CellIndex {
    pub fn new(a: &RankedLexicon, b: &RankedLexicon, bins_per_decade: u32) -> Result<Self> {
        check(a, b, bins_per_decade)?;
        Ok(Self {
            cells: a
                .ranks()
                .par_iter()
                .zip(b.ranks().par_iter())
                .map(|(&ra, &rb)| {
                    (
                        bin_index(ra, bins_per_decade),
                        bin_index(rb, bins_per_decade),
                    )
                })
                .collect(),
        })
    }

    pub fn cell_of(&self, type_index: usize) -> (usize, usize) {
        self.cells[type_index]
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }
}

fn check(a: &RankedLexicon, b: &RankedLexicon, bins_per_decade: u32) -> Result<()> {
    if bins_per_decade == 0 {
        return Err(Error::invalid("bins_per_decade must be at least 1"));
    }
    if !a.same_lexicon(b) {
        return Err(Error::invalid(
            "both systems must be ranked over the same combined lexicon",
        ));
    }
    Ok(())
}

/// Bins every type's `(rank_A, rank_B)` pair.
pub fn build_histogram(
    a: &RankedLexicon,
    b: &RankedLexicon,
    bins_per_decade: u32,
) -> Result<HistogramGrid> {
    check(a, b, bins_per_decade)?;
    Ok(grid_from_index(
        &CellIndex::new(a, b, bins_per_decade)?,
        bins_per_decade,
        a.len() as u64,
    ))
}

pub(crate) fn grid_from_index(
    index: &CellIndex,
    bins_per_decade: u32,
    max_rank: u64,
) -> HistogramGrid {
    let mut grid = HistogramGrid::empty(bins_per_decade, max_rank);
    let side = grid.side;
    for &(i, j) in &index.cells {
        grid.counts[i * side + j] += 1;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::{rank_pair, FrequencyTable};
    use proptest::prelude::*;

    fn t(entries: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable::from_counts(1, "x", entries.iter().map(|&(k, c)| (k, c))).unwrap()
    }

    #[test]
    fn bins() {
        assert_eq!(bin_index(1.0, 15), 0);
        assert_eq!(bin_index(10.0, 15), 15);
        assert_eq!(bin_index(9.99, 15), 14);
        assert_eq!(bin_index(100.0, 1), 2);
        assert_eq!(bin_index(1000.0, 15), 45);
    }

    #[test]
    fn single_type() {
        let (a, b) = rank_pair(&t(&[("x", 1)]), &t(&[("x", 4)])).unwrap();
        let g = build_histogram(&a, &b, 15).unwrap();
        assert_eq!(g.get(0, 0), 1);
        assert_eq!(g.total(), 1);
    }

    #[test]
    fn zero_bins_rejected() {
        let (a, b) = rank_pair(&t(&[("x", 1)]), &t(&[("x", 4)])).unwrap();
        assert!(build_histogram(&a, &b, 0).is_err());
    }

    proptest! {
        #[test]
        fn mass_and_diagonal(
            a in proptest::collection::hash_map("[a-z]{1,2}", 1u64..50, 1..120),
            b in proptest::collection::hash_map("[a-z]{1,2}", 1u64..50, 1..120),
            bpd in 1u32..30,
        ) {
            let ta = FrequencyTable::from_counts(1, "A", a).unwrap();
            let tb = FrequencyTable::from_counts(1, "B", b).unwrap();
            let (ra, rb) = rank_pair(&ta, &tb).unwrap();
            let g = build_histogram(&ra, &rb, bpd).unwrap();
            prop_assert_eq!(g.total(), ra.len() as u64);

            let (sa, sb) = rank_pair(&ta, &ta).unwrap();
            let same = build_histogram(&sa, &sb, bpd).unwrap();
            prop_assert_eq!(same.total(), sa.len() as u64);
            prop_assert!(same.nonempty().all(|((i, j), _)| i == j));
        }
    }
}
