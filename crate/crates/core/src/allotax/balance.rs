use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::FrequencyTable;

/// The three system-balance bars, each as `(percent for A, percent for B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Balance {
    /// Share of the combined token count held by each system; sums to 100.
    pub total_count: (f64, f64),
    /// Percent of the combined lexicon present in each system.
    pub lexicon: (f64, f64),
    /// Percent of the combined lexicon found only in each system.
    pub exclusive: (f64, f64),
}

impl Balance {
    pub fn rows(&self) -> [(&'static str, (f64, f64)); 3] {
        [
            ("total_count", self.total_count),
            ("all_types", self.lexicon),
            ("exclusive_types", self.exclusive),
        ]
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bar\tpercent_A\tpercent_B")?;
        for (name, (a, b)) in self.rows() {
            writeln!(out, "{name}\t{a}\t{b}")?;
        }
        Ok(())
    }
}

pub fn balance_bars(a: &FrequencyTable, b: &FrequencyTable) -> Result<Balance> {
    if a.order() != b.order() {
        return Err(Error::invalid("balance bars need tables of the same order"));
    }
    let grand = a.total() + b.total();
    if grand == 0 {
        return Err(Error::invalid("both corpora are empty"));
    }
    let shared = a.keys().filter(|k| b.contains(k)).count();
    let w = (a.len() + b.len() - shared) as f64;
    let pct = |x: f64, of: f64| 100.0 * x / of;
    Ok(Balance {
        total_count: (
            pct(a.total() as f64, grand as f64),
            pct(b.total() as f64, grand as f64),
        ),
        lexicon: (pct(a.len() as f64, w), pct(b.len() as f64, w)),
        exclusive: (
            pct((a.len() - shared) as f64, w),
            pct((b.len() - shared) as f64, w),
        ),
    })
}
