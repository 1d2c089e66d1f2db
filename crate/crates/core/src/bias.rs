//! N-grams containing a query term, ranked by how strongly they lean toward
//! one corpus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::{rank_pair, FrequencyTable};
use crate::rtd::{
    divergence_report, top_contributors, Direction, DivergenceConfig, DivergenceEntry,
};

/// Where ranks come from before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankScope {
    /// Rank only the matching n-grams against each other.
    #[default]
    SubLexicon,
    /// Rank every n-gram in both tables, then keep the matching ones.
    FullTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasQuery {
    /// A group of interchangeable single tokens; an n-gram matches if it
    /// contains any of them.
    pub terms: Vec<String>,
    pub k: usize,
    pub alpha: f64,
    pub target: Direction,
    pub scope: RankScope,
}

impl BiasQuery {
    pub fn new(terms: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            terms: terms.into_iter().map(Into::into).collect(),
            k: 10,
            alpha: crate::rtd::DEFAULT_ALPHA,
            target: Direction::A,
            scope: RankScope::SubLexicon,
        }
    }
}

fn check_terms(terms: &[String]) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::invalid("at least one query term is required"));
    }
    for t in terms {
        if t.is_empty() || t.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!(
                "query term must be a single token, got {t:?}"
            )));
        }
    }
    Ok(())
}

fn matches(ngram: &str, terms: &[String]) -> bool {
    ngram.split(' ').any(|tok| terms.iter().any(|t| t == tok))
}

/// Keeps the n-grams having one of `terms` as a whole token. Counts are
/// unchanged.
pub fn filter_ngrams_containing(
    table: &FrequencyTable,
    terms: &[String],
) -> Result<FrequencyTable> {
    check_terms(terms)?;
    if table.order() < 2 {
        return Err(Error::invalid("term filtering needs bigrams or longer"));
    }
    Ok(table.filtered(|k| matches(k, terms)))
}

/// The `query.k` matching n-grams with the largest divergence contribution
/// among those leaning toward `query.target`.
pub fn top_biased(
    a: &FrequencyTable,
    b: &FrequencyTable,
    query: &BiasQuery,
) -> Result<Vec<DivergenceEntry>> {
    if a.order() != b.order() {
        return Err(Error::invalid(format!(
            "tables differ in order: {} vs {}",
            a.order(),
            b.order()
        )));
    }
    if query.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if query.target == Direction::None {
        return Err(Error::invalid("target must be system A or B"));
    }
    let cfg = DivergenceConfig::new(query.alpha)?;
    let fa = filter_ngrams_containing(a, &query.terms)?;
    let fb = filter_ngrams_containing(b, &query.terms)?;
    if fa.is_empty() && fb.is_empty() {
        return Ok(Vec::new());
    }
    let (ra, rb) = match query.scope {
        RankScope::SubLexicon => rank_pair(&fa, &fb)?,
        RankScope::FullTable => rank_pair(a, b)?,
    };
    let report = divergence_report(&ra, &rb, &cfg)?;
    Ok(match query.scope {
        RankScope::SubLexicon => top_contributors(&report, query.k, Some(query.target))
            .into_iter()
            .cloned()
            .collect(),
        RankScope::FullTable => report
            .entries
            .into_iter()
            .filter(|e| e.direction == query.target && matches(&e.ty, &query.terms))
            .take(query.k)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(label: &str, entries: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable::from_counts(2, label, entries.iter().map(|&(k, c)| (k, c))).unwrap()
    }

    fn terms(t: &[&str]) -> Vec<String> {
        t.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn filter_by_token() {
        let tab = t("A", &[("femoids are", 5), ("are the", 2)]);
        let f = filter_ngrams_containing(&tab, &terms(&["femoids"])).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.get("femoids are"), 5);
        assert!(filter_ngrams_containing(&tab, &terms(&["foid"]))
            .unwrap()
            .is_empty());
        assert!(filter_ngrams_containing(&tab, &terms(&["zzz"]))
            .unwrap()
            .is_empty());
        assert!(filter_ngrams_containing(&tab, &terms(&["two words"])).is_err());
        assert!(filter_ngrams_containing(&tab, &[]).is_err());
    }

    #[test]
    fn term_groups() {
        let tab = t(
            "A",
            &[("a roastie", 1), ("roasties are", 2), ("are the", 1)],
        );
        let f = filter_ngrams_containing(&tab, &terms(&["roastie", "roasties"])).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn unigrams_rejected() {
        let tab = FrequencyTable::from_counts(1, "A", [("x", 1)]).unwrap();
        assert!(filter_ngrams_containing(&tab, &terms(&["x"])).is_err());
    }

    #[test]
    fn identical_corpora_have_no_bias() {
        let a = t("A", &[("x y", 3), ("y x", 1)]);
        let q = BiasQuery::new(["x"]);
        assert!(top_biased(&a, &a, &q).unwrap().is_empty());
    }

    #[test]
    fn scopes_agree_on_direction() {
        let a = t("A", &[("x y", 9), ("x z", 1), ("p q", 50)]);
        let b = t("B", &[("x z", 9), ("x y", 1), ("p r", 50)]);
        for scope in [RankScope::SubLexicon, RankScope::FullTable] {
            let q = BiasQuery {
                scope,
                ..BiasQuery::new(["x"])
            };
            let top = top_biased(&a, &b, &q).unwrap();
            assert_eq!(top.len(), 1, "{scope:?}");
            assert_eq!(top[0].ty, "x y");
        }
    }
}
