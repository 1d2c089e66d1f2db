//! Rank-turbulence divergence between two ranked systems.
//!
//! Each type τ with ranks r_A and r_B contributes
//!
//! ```text
//! δ(τ) = | r_A^(-α) − r_B^(-α) |^(1/(α+1))
//! ```
//!
//! and the divergence is the sum over the combined lexicon. At the default
//! α = 1/3 the outer exponent is exactly 3/4. No normalization constant is
//! applied: totals are unnormalized, and everything built on them (sorting,
//! top-k, dominance) is invariant to such a constant.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::RankedLexicon;

pub const DEFAULT_ALPHA: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceConfig {
    pub alpha: f64,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl DivergenceConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// Which system a type leans toward: the one where it ranks higher
/// (numerically lower rank).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    A,
    B,
    None,
}

impl Direction {
    pub fn of(rank_a: f64, rank_b: f64) -> Self {
        match rank_a.partial_cmp(&rank_b) {
            Some(Ordering::Less) => Direction::A,
            Some(Ordering::Greater) => Direction::B,
            _ => Direction::None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::A => Direction::B,
            Direction::B => Direction::A,
            Direction::None => Direction::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::A => "A",
            Direction::B => "B",
            Direction::None => "none",
        }
    }
}

#[inline]
pub(crate) fn contribution_unchecked(rank_a: f64, rank_b: f64, alpha: f64) -> f64 {
    let (lo, hi) = if rank_a <= rank_b {
        (rank_a, rank_b)
    } else {
        (rank_b, rank_a)
    };
    if lo == hi {
        return 0.0;
    }
    // lo^-α − hi^-α = lo^-α · (1 − (lo/hi)^α); the bracket goes through
    // ln_1p/expm1 so neighbouring large ranks do not cancel.
    let gap = -(-alpha * ((hi - lo) / lo).ln_1p()).exp_m1();
    (lo.powf(-alpha) * gap).powf((alpha + 1.0).recip())
}

/// Per-type divergence contribution for ranks `rank_a`, `rank_b` ≥ 1.
pub fn contribution(rank_a: f64, rank_b: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    for r in [rank_a, rank_b] {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::invalid(format!("rank must be ≥ 1, got {r}")));
        }
    }
    Ok(contribution_unchecked(rank_a, rank_b, alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEntry {
    #[serde(rename = "type")]
    pub ty: String,
    pub rank_a: f64,
    pub rank_b: f64,
    pub contribution: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub alpha: f64,
    pub label_a: String,
    pub label_b: String,
    /// Sorted by descending contribution, ties broken lexicographically.
    pub entries: Vec<DivergenceEntry>,
    /// Unnormalized sum of all contributions.
    pub total: f64,
}

pub(crate) fn by_contribution(a: &DivergenceEntry, b: &DivergenceEntry) -> Ordering {
    b.contribution
        .total_cmp(&a.contribution)
        .then_with(|| a.ty.cmp(&b.ty))
}

/// Divergence contributions of every type in the shared lexicon.
pub fn divergence_report(
    a: &RankedLexicon,
    b: &RankedLexicon,
    config: &DivergenceConfig,
) -> Result<DivergenceReport> {
    check_alpha(config.alpha)?;
    if !a.same_lexicon(b) {
        return Err(Error::invalid(
            "both systems must be ranked over the same combined lexicon",
        ));
    }
    let alpha = config.alpha;
    let types = a.lexicon().types();
    let mut entries: Vec<DivergenceEntry> = types
        .par_iter()
        .zip(a.ranks().par_iter().zip(b.ranks().par_iter()))
        .map(|(ty, (&ra, &rb))| DivergenceEntry {
            ty: ty.clone(),
            rank_a: ra,
            rank_b: rb,
            contribution: contribution_unchecked(ra, rb, alpha),
            direction: Direction::of(ra, rb),
        })
        .collect();
    entries.par_sort_unstable_by(by_contribution);
    let total = entries.iter().map(|e| e.contribution).sum();
    Ok(DivergenceReport {
        alpha,
        label_a: a.label().to_owned(),
        label_b: b.label().to_owned(),
        entries,
        total,
    })
}

impl DivergenceReport {
    /// `type, rank_A, rank_B, contribution, direction` rows in report order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "type\trank_A\trank_B\tcontribution\tdirection")?;
        for e in &self.entries {
            writeln!(
                out,
                "{}\t{}\t{}\t{:e}\t{}",
                e.ty,
                e.rank_a,
                e.rank_b,
                e.contribution,
                e.direction.as_str()
            )?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }
}

/// The first `k` entries, optionally only those leaning toward `direction`.
pub fn top_contributors(
    report: &DivergenceReport,
    k: usize,
    direction: Option<Direction>,
) -> Vec<&DivergenceEntry> {
    report
        .entries
        .iter()
        .filter(|e| direction.is_none_or(|d| e.direction == d))
        .take(k)
        .collect()
}
