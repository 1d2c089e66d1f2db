use serde::{Deserialize, Serialize};

use super::ndjson::RawRecord;

/// Author name of Reddit's moderation bot; its comments are dropped.
pub const AUTOMODERATOR: &str = "AutoModerator";

/// One retained comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub author: String,
    pub body: String,
    pub created_utc: i64,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Values of `author`/`body` that mark a deleted record.
    pub deleted_markers: Vec<String>,
    /// Excluded bot accounts.
    pub excluded_authors: Vec<String>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            deleted_markers: vec!["[deleted]".into(), "[removed]".into()],
            excluded_authors: vec![AUTOMODERATOR.into()],
        }
    }
}

/// Counts of dropped records by the first rule each one failed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionTally {
    pub deleted_author: u64,
    pub automoderator: u64,
    pub deleted_body: u64,
    pub missing_timestamp: u64,
}

impl RejectionTally {
    pub fn total(&self) -> u64 {
        self.deleted_author + self.automoderator + self.deleted_body + self.missing_timestamp
    }

    pub fn merge(&mut self, other: &RejectionTally) {
        self.deleted_author += other.deleted_author;
        self.automoderator += other.automoderator;
        self.deleted_body += other.deleted_body;
        self.missing_timestamp += other.missing_timestamp;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    DeletedAuthor,
    AutoModerator,
    DeletedBody,
    MissingTimestamp,
}

impl FilterConfig {
    fn is_deleted(&self, s: Option<&str>) -> bool {
        match s {
            None => true,
            Some(s) => s.trim().is_empty() || self.deleted_markers.iter().any(|m| m == s),
        }
    }

    /// The first rule `rec` violates, if any.
    pub fn check(&self, rec: &RawRecord) -> Option<Rejection> {
        let author = rec.author.as_deref();
        if self.is_deleted(author) {
            return Some(Rejection::DeletedAuthor);
        }
        if author.is_some_and(|a| self.excluded_authors.iter().any(|x| x == a)) {
            return Some(Rejection::AutoModerator);
        }
        if self.is_deleted(rec.body.as_deref()) {
            return Some(Rejection::DeletedBody);
        }
        if !matches!(rec.created_utc, Some(t) if t > 0) {
            return Some(Rejection::MissingTimestamp);
        }
        None
    }

    /// Applies the rules to one record, updating `tally` on rejection.
    pub fn apply(
        &self,
        rec: RawRecord,
        default_source: &str,
        tally: &mut RejectionTally,
    ) -> Option<Comment> {
        match self.check(&rec) {
            Some(Rejection::DeletedAuthor) => tally.deleted_author += 1,
            Some(Rejection::AutoModerator) => tally.automoderator += 1,
            Some(Rejection::DeletedBody) => tally.deleted_body += 1,
            Some(Rejection::MissingTimestamp) => tally.missing_timestamp += 1,
            None => {
                return Some(Comment {
                    id: rec.id.unwrap_or_else(|| format!("L{}", rec.line)),
                    author: rec.author.unwrap_or_default(),
                    body: rec.body.unwrap_or_default(),
                    created_utc: rec.created_utc.unwrap_or_default(),
                    source: rec.source.unwrap_or_else(|| default_source.to_owned()),
                })
            }
        }
        None
    }
}

/// Drops deleted, bot-authored and untimestamped records.
pub fn filter_comments<I>(records: I, config: &FilterConfig) -> (Vec<Comment>, RejectionTally)
where
    I: IntoIterator<Item = RawRecord>,
{
    let mut tally = RejectionTally::default();
    let kept = records
        .into_iter()
        .filter_map(|r| config.apply(r, "", &mut tally))
        .collect();
    (kept, tally)
}

impl From<Comment> for RawRecord {
    fn from(c: Comment) -> Self {
        RawRecord {
            author: Some(c.author),
            body: Some(c.body),
            created_utc: Some(c.created_utc),
            source: Some(c.source),
            id: Some(c.id),
            line: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(author: Option<&str>, body: Option<&str>, ts: Option<i64>) -> RawRecord {
        RawRecord {
            author: author.map(Into::into),
            body: body.map(Into::into),
            created_utc: ts,
            source: Some("s".into()),
            id: Some("i".into()),
            line: 1,
        }
    }

    #[test]
    fn automoderator_dropped() {
        let (kept, tally) = filter_comments(
            [rec(Some("AutoModerator"), Some("rules"), Some(10))],
            &FilterConfig::default(),
        );
        assert!(kept.is_empty());
        assert_eq!(tally.automoderator, 1);
    }

    #[test]
    fn deleted_markers_dropped() {
        let cfg = FilterConfig::default();
        let (kept, tally) = filter_comments(
            [
                rec(Some("[deleted]"), Some("x"), Some(10)),
                rec(Some("a"), Some("[removed]"), Some(10)),
                rec(Some("a"), Some("[deleted]"), Some(10)),
                rec(None, Some("x"), Some(10)),
                rec(Some("a"), Some(""), Some(10)),
            ],
            &cfg,
        );
        assert!(kept.is_empty());
        assert_eq!(tally.deleted_author, 2);
        assert_eq!(tally.deleted_body, 3);
    }

    #[test]
    fn missing_or_zero_timestamp_dropped() {
        let (kept, tally) = filter_comments(
            [
                rec(Some("a"), Some("b"), None),
                rec(Some("a"), Some("b"), Some(0)),
            ],
            &FilterConfig::default(),
        );
        assert!(kept.is_empty());
        assert_eq!(tally.missing_timestamp, 2);
    }

    #[test]
    fn valid_record_retained_unchanged() {
        let (kept, tally) = filter_comments(
            [rec(Some("a"), Some("Hello!"), Some(5))],
            &FilterConfig::default(),
        );
        assert_eq!(tally.total(), 0);
        assert_eq!(
            kept,
            vec![Comment {
                id: "i".into(),
                author: "a".into(),
                body: "Hello!".into(),
                created_utc: 5,
                source: "s".into(),
            }]
        );
    }

    #[test]
    fn custom_markers() {
        let cfg = FilterConfig {
            deleted_markers: vec!["<gone>".into()],
            ..Default::default()
        };
        let (kept, _) = filter_comments(
            [
                rec(Some("[deleted]"), Some("x"), Some(1)),
                rec(Some("<gone>"), Some("x"), Some(1)),
            ],
            &cfg,
        );
        assert_eq!(kept.len(), 1);
    }

    fn arb_field() -> impl Strategy<Value = Option<String>> {
        prop_oneof![
            Just(None),
            Just(Some("[deleted]".to_string())),
            Just(Some("[removed]".to_string())),
            Just(Some("AutoModerator".to_string())),
            Just(Some(String::new())),
            "[a-z]{1,6}".prop_map(Some),
        ]
    }

    proptest! {
        #[test]
        fn filtering_is_idempotent(
            rows in proptest::collection::vec((arb_field(), arb_field(), proptest::option::of(-5i64..50)), 0..60)
        ) {
            let cfg = FilterConfig::default();
            let records: Vec<RawRecord> = rows
                .into_iter()
                .map(|(a, b, t)| RawRecord { author: a, body: b, created_utc: t, ..Default::default() })
                .collect();
            let (once, _) = filter_comments(records, &cfg);
            let (twice, tally) = filter_comments(once.clone().into_iter().map(RawRecord::from), &cfg);
            prop_assert_eq!(tally.total(), 0);
            prop_assert_eq!(once, twice);
        }
    }
}
