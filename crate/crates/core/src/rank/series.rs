use std::collections::BTreeMap;
use std::io::Write;

use chrono::{DateTime, NaiveDate};

use crate::error::{Error, Result};

/// Values sorted in descending order and paired with ordinal ranks `1..=N`.
///
/// Unlike [`tie_averaged_ranks`](super::tie_averaged_ranks), ties keep
/// distinct ordinal ranks; this is the plotting convention for Zipf curves.
pub fn zipf_distribution(values: &[u64]) -> Result<Vec<(u64, u64)>> {
    if values.is_empty() {
        return Err(Error::invalid("zipf distribution of an empty list"));
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    Ok(v.into_iter().zip(1u64..).map(|(x, r)| (r, x)).collect())
}

/// UTC calendar date of an epoch timestamp.
pub fn utc_date(created_utc: i64) -> Result<NaiveDate> {
    DateTime::from_timestamp(created_utc, 0)
        .map(|d| d.date_naive())
        .ok_or_else(|| Error::invalid(format!("timestamp {created_utc} out of range")))
}

/// Comment counts per UTC date, with every date between the first and last
/// present (zero where nothing was posted).
pub fn comments_per_day<I>(timestamps: I) -> Result<BTreeMap<NaiveDate, u64>>
where
    I: IntoIterator<Item = i64>,
{
    let mut counts = BTreeMap::new();
    for t in timestamps {
        *counts.entry(utc_date(t)?).or_insert(0u64) += 1;
    }
    if let (Some(&first), Some(&last)) = (counts.keys().next(), counts.keys().next_back()) {
        for day in first.iter_days().take_while(|d| *d <= last) {
            counts.entry(day).or_insert(0);
        }
    }
    Ok(counts)
}

/// Writes `(x, y)` rows under a two-column header.
pub fn write_two_column<W, X, Y, I>(
    mut out: W,
    header: (&str, &str),
    rows: I,
) -> std::io::Result<()>
where
    W: Write,
    X: std::fmt::Display,
    Y: std::fmt::Display,
    I: IntoIterator<Item = (X, Y)>,
{
    writeln!(out, "{}\t{}", header.0, header.1)?;
    for (x, y) in rows {
        writeln!(out, "{x}\t{y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn day(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn zipf_sorts_descending() {
        assert_eq!(
            zipf_distribution(&[3, 1, 2]).unwrap(),
            [(1, 3), (2, 2), (3, 1)]
        );
        assert_eq!(zipf_distribution(&[5, 5]).unwrap(), [(1, 5), (2, 5)]);
        assert!(zipf_distribution(&[]).is_err());
    }

    #[test]
    fn same_day_counts() {
        let c = comments_per_day([1_500_000_000, 1_500_000_100]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.values().next(), Some(&2));
    }

    #[test]
    fn midnight_boundary() {
        // 2017-07-14T23:59:59Z and the next second
        let c = comments_per_day([1_500_076_799, 1_500_076_800]).unwrap();
        assert_eq!(c.get(&day(2017, 7, 14)), Some(&1));
        assert_eq!(c.get(&day(2017, 7, 15)), Some(&1));
    }

    #[test]
    fn gaps_are_zero_filled() {
        let c = comments_per_day([1_500_000_000, 1_500_000_000 + 4 * 86_400]).unwrap();
        assert_eq!(c.values().copied().collect::<Vec<_>>(), [1, 0, 0, 0, 1]);
        assert!(comments_per_day(std::iter::empty()).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn zipf_is_monotone(values in proptest::collection::vec(1u64..500, 1..200)) {
            let z = zipf_distribution(&values).unwrap();
            prop_assert_eq!(z.len(), values.len());
            prop_assert!(z.windows(2).all(|w| w[0].1 >= w[1].1 && w[1].0 == w[0].0 + 1));
        }
    }
}
