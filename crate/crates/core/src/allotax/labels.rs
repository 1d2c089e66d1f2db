use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::histogram::{bin_lower_rank, CellIndex, HistogramGrid};
use crate::rtd::Direction;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinLabel {
    /// `(bin of rank_A, bin of rank_B)`
    pub cell: (usize, usize),
    /// Side of the diagonal the cell lies on.
    pub side: Direction,
    #[serde(rename = "type")]
    pub ty: String,
}

/// Cells on the outer envelope of the histogram.
///
/// Cells are grouped into bands of constant `i + j` (one horizontal slice of
/// the rotated diamond). Within each band the non-empty cell farthest from
/// the diagonal is taken on each side, provided its outer rank coordinate
/// starts beyond `min_rank`.
pub fn outer_cells(grid: &HistogramGrid, min_rank: f64) -> Vec<((usize, usize), Direction)> {
    let mut best: BTreeMap<(usize, u8), (usize, usize)> = BTreeMap::new();
    let bpd = grid.bins_per_decade();
    for ((i, j), _) in grid.nonempty() {
        if i == j || bin_lower_rank(i.max(j), bpd) <= min_rank {
            continue;
        }
        // side 0: i < j, leaning toward A
        let side = u8::from(i > j);
        let key = (i + j, side);
        let dist = i.abs_diff(j);
        match best.get(&key) {
            Some(&(bi, bj)) if bi.abs_diff(bj) >= dist => {}
            _ => {
                best.insert(key, (i, j));
            }
        }
    }
    best.into_iter()
        .map(|((_, side), cell)| {
            (
                cell,
                if side == 0 {
                    Direction::A
                } else {
                    Direction::B
                },
            )
        })
        .collect()
}

/// Picks one type uniformly at random from each outer cell. The draw is a
/// pure function of `seed`.
pub fn select_bin_labels(
    grid: &HistogramGrid,
    index: &CellIndex,
    types: &[String],
    seed: u64,
    min_rank: f64,
) -> Vec<BinLabel> {
    let targets = outer_cells(grid, min_rank);
    let mut members: BTreeMap<(usize, usize), Vec<&str>> =
        targets.iter().map(|&(c, _)| (c, Vec::new())).collect();
    for (k, cell) in index.cells().iter().enumerate() {
        if let Some(m) = members.get_mut(cell) {
            m.push(&types[k]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    targets
        .into_iter()
        .filter_map(|(cell, side)| {
            let m = members.get_mut(&cell)?;
            m.sort_unstable();
            let pick = m[rng.gen_range(0..m.len())];
            Some(BinLabel {
                cell,
                side,
                ty: pick.to_owned(),
            })
        })
        .collect()
}
