use std::cmp::Ordering;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// Counts of n-grams of one order for one corpus (or one time slice).
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    order: usize,
    label: String,
    counts: FxHashMap<String, u64>,
    total: u64,
}

impl PartialEq for FrequencyTable {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.label == other.label
            && self.total == other.total
            && self.counts == other.counts
    }
}

impl Eq for FrequencyTable {}

/// Number of space-separated tokens in an n-gram key, or `None` if the key
/// has empty tokens.
pub(crate) fn ngram_order(key: &str) -> Option<usize> {
    let mut n = 0;
    for tok in key.split(' ') {
        if tok.is_empty() {
            return None;
        }
        n += 1;
    }
    Some(n)
}

impl FrequencyTable {
    pub fn new(order: usize, label: impl Into<String>) -> Self {
        Self {
            order,
            label: label.into(),
            counts: FxHashMap::default(),
            total: 0,
        }
    }

    /// Builds a table from explicit counts, validating every key and count.
    pub fn from_counts<I, S>(order: usize, label: impl Into<String>, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        if order == 0 {
            return Err(Error::invalid("n-gram order must be at least 1"));
        }
        let mut table = Self::new(order, label);
        for (k, c) in counts {
            let k = k.into();
            if c == 0 {
                return Err(Error::invalid(format!("zero count for {k:?}")));
            }
            if ngram_order(&k) != Some(order) {
                return Err(Error::invalid(format!("{k:?} is not a {order}-gram")));
            }
            table.add(&k, c);
        }
        Ok(table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// Sum of all counts (number of n-gram tokens).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct types.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.counts.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.counts.iter().map(|(k, &c)| (k.as_str(), c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> + '_ {
        self.counts.keys().map(String::as_str)
    }

    /// Adds `count` occurrences of `key`. Callers are responsible for the key
    /// having the table's order.
    pub fn add(&mut self, key: &str, count: u64) {
        if count == 0 {
            return;
        }
        debug_assert_eq!(ngram_order(key), Some(self.order), "{key:?}");
        match self.counts.get_mut(key) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(key.to_owned(), count);
            }
        }
        self.total += count;
    }

    /// Folds `other` into `self`. Associative and commutative, so the merged
    /// table does not depend on how input was sharded.
    pub fn merge(&mut self, mut other: FrequencyTable) {
        if other.counts.len() > self.counts.len() {
            std::mem::swap(&mut self.counts, &mut other.counts);
            std::mem::swap(&mut self.total, &mut other.total);
        }
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
    }

    /// Entries sorted by descending count, then lexicographically.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.iter().collect();
        v.par_sort_unstable_by(by_count_desc);
        v
    }

    /// Sub-table of the entries accepted by `keep`; counts are unchanged.
    pub fn filtered(&self, mut keep: impl FnMut(&str) -> bool) -> FrequencyTable {
        let mut out = FrequencyTable::new(self.order, self.label.clone());
        for (k, c) in self.iter() {
            if keep(k) {
                out.add(k, c);
            }
        }
        out
    }
}

pub(crate) fn by_count_desc(a: &(&str, u64), b: &(&str, u64)) -> Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

fn check_order(gram: &str, order: usize) -> Result<()> {
    if ngram_order(gram) != Some(order) {
        return Err(Error::invalid(format!("{gram:?} is not a {order}-gram")));
    }
    Ok(())
}

/// Exact multiset counts of an n-gram stream.
pub fn count_frequencies<I, S>(grams: I, order: usize) -> Result<FrequencyTable>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if order == 0 {
        return Err(Error::invalid("n-gram order must be at least 1"));
    }
    let mut table = FrequencyTable::new(order, "");
    for g in grams {
        let g = g.as_ref();
        check_order(g, order)?;
        table.add(g, 1);
    }
    Ok(table)
}

/// Parallel [`count_frequencies`] over a slice; the result is identical for
/// every thread count.
pub fn count_frequencies_par<S>(grams: &[S], order: usize) -> Result<FrequencyTable>
where
    S: AsRef<str> + Sync,
{
    if order == 0 {
        return Err(Error::invalid("n-gram order must be at least 1"));
    }
    grams
        .par_chunks(64 * 1024)
        .map(|chunk| count_frequencies(chunk.iter().map(AsRef::as_ref), order))
        .try_reduce(
            || FrequencyTable::new(order, ""),
            |mut a, b| {
                a.merge(b);
                Ok(a)
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn counts_a_stream() {
        let t = count_frequencies(["a", "b", "a"], 1).unwrap();
        assert_eq!(t.get("a"), 2);
        assert_eq!(t.get("b"), 1);
        assert_eq!(t.total(), 3);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn empty_stream() {
        let t = count_frequencies(Vec::<String>::new(), 1).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.total(), 0);
    }

    #[test]
    fn wrong_order_rejected() {
        assert!(count_frequencies(["a b"], 1).is_err());
        assert!(count_frequencies(["a  b"], 2).is_err());
        assert!(FrequencyTable::from_counts(2, "x", [("a b", 0)]).is_err());
    }

    #[test]
    fn sorted_by_count_then_lexicographic() {
        let t = FrequencyTable::from_counts(1, "", [("b", 2), ("a", 2), ("c", 5)]).unwrap();
        assert_eq!(t.sorted(), vec![("c", 5), ("a", 2), ("b", 2)]);
    }

    fn oracle(stream: &[String]) -> HashMap<String, u64> {
        let mut m = HashMap::new();
        for s in stream {
            *m.entry(s.clone()).or_insert(0) += 1;
        }
        m
    }

    proptest! {
        #[test]
        fn merge_matches_sequential_for_any_split(
            stream in proptest::collection::vec("[a-e]{1,2}", 0..200),
            cuts in proptest::collection::vec(0usize..200, 0..6),
        ) {
            let whole = count_frequencies(&stream, 1).unwrap();
            let mut cuts: Vec<usize> = cuts.into_iter().map(|c| c.min(stream.len())).collect();
            cuts.push(0);
            cuts.push(stream.len());
            cuts.sort();
            let mut merged = FrequencyTable::new(1, "");
            for w in cuts.windows(2).rev() {
                merged.merge(count_frequencies(&stream[w[0]..w[1]], 1).unwrap());
            }
            prop_assert_eq!(&merged, &whole);
            let expected = oracle(&stream);
            prop_assert_eq!(whole.len(), expected.len());
            for (k, c) in expected {
                prop_assert_eq!(whole.get(&k), c);
            }
            prop_assert_eq!(whole.total() as usize, stream.len());
        }
    }
}
