//! Monthly rank systems and the term that rose most between a month and a
//! lagged earlier month.
//!
//! Two scores are offered for "rose most". [`DominanceMode::Divergence`]
//! takes the largest rank-turbulence contribution among types whose rank
//! improved; [`DominanceMode::RawRankGain`] takes the largest drop in rank
//! number, which favors types climbing out of the long tail. Comparisons are
//! between single months, bucketed in UTC.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Datelike};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{load_frequency_table, persist_frequency_table, CleanedComment};
use crate::rank::{rank_pair, FrequencyTable};
use crate::rtd::{contribution, DEFAULT_ALPHA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    /// 1 through 12.
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(format!("month must be 1..=12, got {month}")));
        }
        Ok(Self { year, month })
    }

    pub fn from_timestamp(created_utc: i64) -> Result<Self> {
        let d = DateTime::from_timestamp(created_utc, 0)
            .ok_or_else(|| Error::invalid(format!("timestamp {created_utc} out of range")))?;
        Ok(Self {
            year: d.year(),
            month: d.month(),
        })
    }

    fn index(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_index(i: i64) -> Self {
        Self {
            year: i.div_euclid(12) as i32,
            month: i.rem_euclid(12) as u32 + 1,
        }
    }

    /// The month `months` later (negative for earlier).
    pub fn offset(self, months: i64) -> Self {
        Self::from_index(self.index() + months)
    }

    /// Months from `earlier` to `self`.
    pub fn months_since(self, earlier: Self) -> i64 {
        self.index() - earlier.index()
    }

    pub fn month_name(self) -> &'static str {
        const NAMES: [&str; 12] = [
            "January",
            "February",
            "March",
            "April",
            "May",
            "June",
            "July",
            "August",
            "September",
            "October",
            "November",
            "December",
        ];
        NAMES[self.month as usize - 1]
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("expected YYYY-MM, got {s:?}"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        YearMonth::new(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
    }
}

/// One 1-gram table per calendar month over a contiguous range. Months with
/// no tokens hold empty tables.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyPanel {
    months: BTreeMap<YearMonth, FrequencyTable>,
}

impl MonthlyPanel {
    /// Accepts any set of unigram tables and fills gaps with empty months.
    pub fn from_tables(tables: BTreeMap<YearMonth, FrequencyTable>) -> Result<Self> {
        let mut months = tables;
        for (ym, t) in months.iter_mut() {
            if t.order() != 1 {
                return Err(Error::invalid(format!("month {ym} table is not 1-grams")));
            }
            t.set_label(ym.to_string());
        }
        if let (Some(&first), Some(&last)) = (months.keys().next(), months.keys().next_back()) {
            for k in 0..=last.months_since(first) {
                let ym = first.offset(k);
                months
                    .entry(ym)
                    .or_insert_with(|| FrequencyTable::new(1, ym.to_string()));
            }
        }
        Ok(Self { months })
    }

    /// Buckets tokens by the UTC month of each comment.
    pub fn from_comments(comments: &[CleanedComment]) -> Result<Self> {
        let tables = comments
            .par_iter()
            .try_fold(
                BTreeMap::new,
                |mut acc: BTreeMap<YearMonth, FrequencyTable>, c| {
                    let ym = YearMonth::from_timestamp(c.comment.created_utc)?;
                    let t = acc.entry(ym).or_insert_with(|| FrequencyTable::new(1, ""));
                    for tok in &c.tokens {
                        t.add(tok, 1);
                    }
                    Ok::<_, Error>(acc)
                },
            )
            .try_reduce(BTreeMap::new, |mut a, b| {
                for (ym, t) in b {
                    match a.get_mut(&ym) {
                        Some(x) => x.merge(t),
                        None => {
                            a.insert(ym, t);
                        }
                    }
                }
                Ok(a)
            })?;
        Self::from_tables(tables)
    }

    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    pub fn get(&self, ym: YearMonth) -> Option<&FrequencyTable> {
        self.months.get(&ym)
    }

    pub fn months(&self) -> impl Iterator<Item = (YearMonth, &FrequencyTable)> + '_ {
        self.months.iter().map(|(&k, v)| (k, v))
    }

    pub fn first(&self) -> Option<YearMonth> {
        self.months.keys().next().copied()
    }

    pub fn last(&self) -> Option<YearMonth> {
        self.months.keys().next_back().copied()
    }

    pub fn total(&self, ym: YearMonth) -> u64 {
        self.get(ym).map_or(0, FrequencyTable::total)
    }

    /// Months inside the range that have no tokens.
    pub fn empty_months(&self) -> Vec<YearMonth> {
        self.months
            .iter()
            .filter(|(_, t)| t.is_empty())
            .map(|(&k, _)| k)
            .collect()
    }

    /// Writes `YYYY-MM.tsv` per month into `dir`.
    pub fn save_dir(&self, dir: &Path, metadata: &[String]) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(Error::at_path(dir))?;
        let mut paths = Vec::with_capacity(self.months.len());
        for (ym, t) in &self.months {
            let p = dir.join(format!("{ym}.tsv"));
            persist_frequency_table(t, &p, metadata)?;
            paths.push(p);
        }
        Ok(paths)
    }

    /// Reads every `YYYY-MM.tsv` in `dir`; other files are ignored.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut tables = BTreeMap::new();
        for entry in std::fs::read_dir(dir).map_err(Error::at_path(dir))? {
            let path = entry.map_err(Error::at_path(dir))?.path();
            let Some(ym) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".tsv"))
                .and_then(|n| n.parse::<YearMonth>().ok())
            else {
                continue;
            };
            tables.insert(ym, load_frequency_table(&path)?);
        }
        if tables.is_empty() {
            return Err(Error::invalid(format!(
                "no YYYY-MM.tsv month tables in {}",
                dir.display()
            )));
        }
        Self::from_tables(tables)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceMode {
    #[default]
    Divergence,
    RawRankGain,
}

impl DominanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DominanceMode::Divergence => "divergence",
            DominanceMode::RawRankGain => "raw-rank-gain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceEntry {
    pub later: YearMonth,
    pub earlier: YearMonth,
    pub term: String,
    pub rank_earlier: f64,
    pub rank_later: f64,
    /// Divergence contribution or rank gain, depending on `mode`.
    pub score: f64,
    pub mode: DominanceMode,
}

/// The type that rose most from `later - lag` to `later`, or `None` when no
/// type improved its rank.
pub fn dominant_term(
    panel: &MonthlyPanel,
    later: YearMonth,
    lag: u32,
    mode: DominanceMode,
) -> Result<Option<DominanceEntry>> {
    if lag == 0 {
        return Err(Error::invalid("lag must be at least one month"));
    }
    let earlier = later.offset(-(lag as i64));
    let get = |ym: YearMonth| {
        panel
            .get(ym)
            .ok_or_else(|| Error::MissingMonth(ym.to_string()))
    };
    let (te, tl) = (get(earlier)?, get(later)?);
    let (re, rl) = rank_pair(te, tl)?;
    let mut best: Option<(f64, &str, f64, f64)> = None;
    for ((ty, &r0), &r1) in re.lexicon().types().iter().zip(re.ranks()).zip(rl.ranks()) {
        if r1 >= r0 {
            continue;
        }
        let score = match mode {
            DominanceMode::Divergence => contribution(r0, r1, DEFAULT_ALPHA)?,
            DominanceMode::RawRankGain => r0 - r1,
        };
        let better = match best {
            None => true,
            Some((s, t, _, _)) => score > s || (score == s && ty.as_str() < t),
        };
        if better {
            best = Some((score, ty, r0, r1));
        }
    }
    Ok(
        best.map(|(score, term, rank_earlier, rank_later)| DominanceEntry {
            later,
            earlier,
            term: term.to_owned(),
            rank_earlier,
            rank_later,
            score,
            mode,
        }),
    )
}

/// One comparison per month that has a lagged partner in the panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceTable {
    pub lag: u32,
    pub mode: DominanceMode,
    /// `(later month, entry)` in month order.
    pub cells: Vec<(YearMonth, Option<DominanceEntry>)>,
}

pub fn dominance_table(
    panel: &MonthlyPanel,
    lag: u32,
    mode: DominanceMode,
) -> Result<DominanceTable> {
    if lag == 0 {
        return Err(Error::invalid("lag must be at least one month"));
    }
    if panel.len() <= lag as usize {
        return Err(Error::invalid(format!(
            "a lag of {lag} months needs at least {} months, panel has {}",
            lag + 1,
            panel.len()
        )));
    }
    let laters: Vec<YearMonth> = panel.months.keys().skip(lag as usize).copied().collect();
    let cells = laters
        .par_iter()
        .map(|&ym| Ok((ym, dominant_term(panel, ym, lag, mode)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DominanceTable { lag, mode, cells })
}

impl DominanceTable {
    /// Column heading for a later month: its year, or the compared year pair
    /// when the lag is a whole number of years.
    fn column(&self, later: YearMonth) -> String {
        if self.lag.is_multiple_of(12) {
            format!("{}-{}", later.year - (self.lag / 12) as i32, later.year)
        } else {
            later.year.to_string()
        }
    }

    /// Rows are months of the year, columns years; each cell holds the
    /// dominant term, `-` where nothing rose and blank where no comparison
    /// exists.
    pub fn grid(&self) -> (Vec<String>, Vec<(&'static str, Vec<String>)>) {
        let mut cols: Vec<String> = self.cells.iter().map(|(ym, _)| self.column(*ym)).collect();
        cols.dedup();
        let mut rows: Vec<(&'static str, Vec<String>)> = (1..=12)
            .map(|m| {
                (
                    YearMonth { year: 0, month: m }.month_name(),
                    vec![String::new(); cols.len()],
                )
            })
            .collect();
        for (ym, e) in &self.cells {
            let c = cols
                .iter()
                .position(|x| *x == self.column(*ym))
                .unwrap_or(0);
            rows[ym.month as usize - 1].1[c] = e
                .as_ref()
                .map_or_else(|| "-".to_owned(), |e| e.term.clone());
        }
        rows.retain(|(_, cells)| cells.iter().any(|c| !c.is_empty()));
        (cols, rows)
    }

    pub fn write_grid_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (cols, rows) = self.grid();
        writeln!(out, "month\t{}", cols.join("\t"))?;
        for (name, cells) in rows {
            writeln!(out, "{name}\t{}", cells.join("\t"))?;
        }
        Ok(())
    }

    pub fn write_grid_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (cols, rows) = self.grid();
        let width = |s: &str| s.chars().count();
        let w0 = rows.iter().map(|(n, _)| width(n)).max().unwrap_or(0).max(5);
        let widths: Vec<usize> = (0..cols.len())
            .map(|c| {
                rows.iter()
                    .map(|(_, cells)| width(&cells[c]))
                    .chain([width(&cols[c])])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |first: &str, cells: &[String]| {
            let mut s = format!("{first:<w0$}");
            for (c, w) in cells.iter().zip(&widths) {
                s.push_str("  ");
                s.push_str(c);
                s.extend(std::iter::repeat_n(' ', w - width(c)));
            }
            s.trim_end().to_owned()
        };
        writeln!(out, "{}", line("Month", &cols))?;
        for (name, cells) in &rows {
            writeln!(out, "{}", line(name, cells))?;
        }
        Ok(())
    }

    /// One row per comparison.
    pub fn write_entries_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "later\tearlier\tterm\trank_earlier\trank_later\tscore\tmode"
        )?;
        for (ym, e) in &self.cells {
            match e {
                Some(e) => writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    e.later,
                    e.earlier,
                    e.term,
                    e.rank_earlier,
                    e.rank_later,
                    e.score,
                    e.mode.as_str()
                )?,
                None => writeln!(
                    out,
                    "{ym}\t{}\t\t\t\t\t{}",
                    ym.offset(-(self.lag as i64)),
                    self.mode.as_str()
                )?,
            }
        }
        Ok(())
    }
}

/// Combined count of `terms` in each month over that month's token total;
/// zero for empty months.
pub fn relative_frequency_series(panel: &MonthlyPanel, terms: &[String]) -> Vec<(YearMonth, f64)> {
    let mut terms: Vec<&str> = terms.iter().map(String::as_str).collect();
    terms.sort_unstable();
    terms.dedup();
    panel
        .months()
        .map(|(ym, t)| {
            let hits: u64 = terms.iter().map(|k| t.get(k)).sum();
            let total = t.total();
            (
                ym,
                if total == 0 {
                    0.0
                } else {
                    hits as f64 / total as f64
                },
            )
        })
        .collect()
}
