use std::cmp::Reverse;
use std::io::Write;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::table::FrequencyTable;
use crate::error::{Error, Result};

/// The union of types over two systems, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedLexicon {
    types: Vec<String>,
    index: FxHashMap<String, usize>,
}

impl CombinedLexicon {
    /// Builds a lexicon from distinct types, keeping their order.
    pub fn from_types<I, S>(types: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let types: Vec<String> = types.into_iter().map(Into::into).collect();
        let mut index = FxHashMap::default();
        index.reserve(types.len());
        for (i, t) in types.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate lexicon type {t:?}")));
            }
        }
        Ok(Self { types, index })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn position(&self, ty: &str) -> Option<usize> {
        self.index.get(ty).copied()
    }

    pub fn contains(&self, ty: &str) -> bool {
        self.index.contains_key(ty)
    }
}

/// Union of the types of `a` and `b`, ordered by descending count in `a`,
/// then descending count in `b`, then lexicographically.
pub fn combined_lexicon(a: &FrequencyTable, b: &FrequencyTable) -> Result<Arc<CombinedLexicon>> {
    if a.order() != b.order() {
        return Err(Error::invalid(format!(
            "cannot combine a {}-gram table with a {}-gram table",
            a.order(),
            b.order()
        )));
    }
    let mut rows: Vec<(&str, u64, u64)> = a.iter().map(|(k, c)| (k, c, b.get(k))).collect();
    rows.extend(
        b.iter()
            .filter(|(k, _)| !a.contains(k))
            .map(|(k, c)| (k, 0, c)),
    );
    rows.sort_unstable_by(|x, y| {
        y.1.cmp(&x.1)
            .then_with(|| y.2.cmp(&x.2))
            .then_with(|| x.0.cmp(y.0))
    });
    Ok(Arc::new(CombinedLexicon::from_types(
        rows.into_iter().map(|(k, _, _)| k.to_owned()),
    )?))
}

/// Rank shared by every zero-frequency type when `observed` of `size` types
/// have positive counts: the mean of positions `observed+1 ..= size`.
pub fn zero_frequency_rank(observed: usize, size: usize) -> f64 {
    observed as f64 + (size - observed + 1) as f64 / 2.0
}

/// Tie-averaged descending-frequency ranks of one system over a combined
/// lexicon. Types absent from the system have frequency 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedLexicon {
    lexicon: Arc<CombinedLexicon>,
    label: String,
    freqs: Vec<u64>,
    ranks: Vec<f64>,
}

impl RankedLexicon {
    pub fn lexicon(&self) -> &Arc<CombinedLexicon> {
        &self.lexicon
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of types W.
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Frequencies aligned with [`CombinedLexicon::types`].
    pub fn frequencies(&self) -> &[u64] {
        &self.freqs
    }

    /// Ranks aligned with [`CombinedLexicon::types`].
    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn rank_of(&self, ty: &str) -> Option<f64> {
        self.lexicon.position(ty).map(|i| self.ranks[i])
    }

    pub fn frequency_of(&self, ty: &str) -> Option<u64> {
        self.lexicon.position(ty).map(|i| self.freqs[i])
    }

    /// Whether both systems were ranked over the same lexicon.
    pub fn same_lexicon(&self, other: &RankedLexicon) -> bool {
        Arc::ptr_eq(&self.lexicon, &other.lexicon) || self.lexicon == other.lexicon
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64, f64)> + '_ {
        self.lexicon
            .types
            .iter()
            .zip(&self.freqs)
            .zip(&self.ranks)
            .map(|((t, &f), &r)| (t.as_str(), f, r))
    }

    /// `type<TAB>frequency<TAB>rank`, by ascending rank then type.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut rows: Vec<_> = self.iter().collect();
        rows.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.0.cmp(b.0)));
        writeln!(out, "type\tfrequency\trank")?;
        for (t, f, r) in rows {
            writeln!(out, "{t}\t{f}\t{r}")?;
        }
        Ok(())
    }
}

/// Ranks `table` over `lexicon`: descending frequency, rank 1 for the most
/// frequent type, and every block of `n` tied types sharing the mean of the
/// `n` positions it spans. Zero-frequency types form the last tie block and
/// share [`zero_frequency_rank`].
pub fn tie_averaged_ranks(
    table: &FrequencyTable,
    lexicon: &Arc<CombinedLexicon>,
) -> Result<RankedLexicon> {
    if let Some(missing) = table.keys().find(|k| !lexicon.contains(k)) {
        return Err(Error::invalid(format!(
            "lexicon is missing table type {missing:?}"
        )));
    }
    let freqs: Vec<u64> = lexicon.types.iter().map(|t| table.get(t)).collect();
    let mut order: Vec<usize> = (0..freqs.len()).collect();
    order.sort_unstable_by_key(|&i| Reverse(freqs[i]));
    let mut ranks = vec![0.0; freqs.len()];
    let mut start = 0;
    while start < order.len() {
        let f = freqs[order[start]];
        let mut end = start + 1;
        while end < order.len() && freqs[order[end]] == f {
            end += 1;
        }
        // positions start+1 ..= end, 1-based
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    Ok(RankedLexicon {
        lexicon: Arc::clone(lexicon),
        label: table.label().to_owned(),
        freqs,
        ranks,
    })
}

/// Combined lexicon plus both rankings in one call.
pub fn rank_pair(a: &FrequencyTable, b: &FrequencyTable) -> Result<(RankedLexicon, RankedLexicon)> {
    let lex = combined_lexicon(a, b)?;
    Ok((tie_averaged_ranks(a, &lex)?, tie_averaged_ranks(b, &lex)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(entries: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable::from_counts(1, "t", entries.iter().map(|&(k, c)| (k, c))).unwrap()
    }

    fn lex(types: &[&str]) -> Arc<CombinedLexicon> {
        Arc::new(CombinedLexicon::from_types(types.iter().copied()).unwrap())
    }

    #[test]
    fn union_and_order() {
        let a = table(&[("a", 1), ("b", 5)]);
        let b = table(&[("b", 2), ("c", 9)]);
        let l = combined_lexicon(&a, &b).unwrap();
        assert_eq!(l.types(), ["b", "a", "c"]);
        assert_eq!(combined_lexicon(&a, &a).unwrap().len(), 2);
    }

    #[test]
    fn disjoint_union_size() {
        let a = table(&[("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1)]);
        let b = table(&[
            ("f", 1),
            ("g", 1),
            ("h", 1),
            ("i", 1),
            ("j", 1),
            ("k", 1),
            ("l", 1),
        ]);
        assert_eq!(combined_lexicon(&a, &b).unwrap().len(), 12);
    }

    #[test]
    fn order_mismatch_rejected() {
        let a = table(&[("a", 1)]);
        let b = FrequencyTable::from_counts(2, "", [("a b", 1)]).unwrap();
        assert!(combined_lexicon(&a, &b).is_err());
    }

    #[test]
    fn ties_share_average_rank() {
        let t = table(&[("a", 5), ("b", 3), ("c", 3), ("d", 1)]);
        let r = tie_averaged_ranks(&t, &lex(&["a", "b", "c", "d"])).unwrap();
        assert_eq!(r.ranks(), [1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn zero_frequency_block() {
        let t = table(&[("a", 2)]);
        let r = tie_averaged_ranks(&t, &lex(&["a", "b", "c"])).unwrap();
        assert_eq!(r.ranks(), [1.0, 2.5, 2.5]);
        assert_eq!(r.frequency_of("c"), Some(0));
        assert_eq!(zero_frequency_rank(1, 3), 2.5);
    }

    #[test]
    fn lexicon_must_cover_table() {
        let t = table(&[("a", 2), ("z", 1)]);
        assert!(tie_averaged_ranks(&t, &lex(&["a", "b"])).is_err());
    }

    #[test]
    fn duplicate_lexicon_types_rejected() {
        assert!(CombinedLexicon::from_types(["a", "a"]).is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_rank_sum(counts in proptest::collection::vec(0u64..6, 1..80)) {
            let names: Vec<String> = (0..counts.len()).map(|i| format!("t{i}")).collect();
            let t = FrequencyTable::from_counts(
                1, "p",
                names.iter().zip(&counts).filter(|(_, &c)| c > 0).map(|(n, &c)| (n.clone(), c)),
            ).unwrap();
            let l = Arc::new(CombinedLexicon::from_types(names.clone()).unwrap());
            let r = tie_averaged_ranks(&t, &l).unwrap();
            let w = counts.len() as f64;
            prop_assert_eq!(r.ranks().iter().sum::<f64>(), w * (w + 1.0) / 2.0);
            for i in 0..counts.len() {
                for j in 0..counts.len() {
                    let (fi, fj) = (counts[i], counts[j]);
                    let (ri, rj) = (r.ranks()[i], r.ranks()[j]);
                    if fi > fj { prop_assert!(ri < rj); }
                    if fi == fj { prop_assert_eq!(ri, rj); }
                }
            }
        }

        #[test]
        fn zero_types_do_not_reorder_observed(
            counts in proptest::collection::vec(1u64..6, 1..30),
            extra in 1usize..10,
        ) {
            let names: Vec<String> = (0..counts.len()).map(|i| format!("t{i}")).collect();
            let t = FrequencyTable::from_counts(1, "p", names.iter().cloned().zip(counts.iter().copied())).unwrap();
            let small = Arc::new(CombinedLexicon::from_types(names.clone()).unwrap());
            let mut more = names.clone();
            more.extend((0..extra).map(|i| format!("z{i}")));
            let big = Arc::new(CombinedLexicon::from_types(more).unwrap());
            let rs = tie_averaged_ranks(&t, &small).unwrap();
            let rb = tie_averaged_ranks(&t, &big).unwrap();
            for n in &names {
                prop_assert_eq!(rs.rank_of(n), rb.rank_of(n));
            }
        }
    }
}
