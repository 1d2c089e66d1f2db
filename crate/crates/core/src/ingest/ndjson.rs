//! Newline-delimited JSON comment dumps.
//!
//! Only the fields named by a [`FieldMap`] are materialized; every other key
//! in a record is skipped without allocation.

use std::fmt;
use std::io::{BufRead, Write};

use serde::de::{self, DeserializeSeed, IgnoredAny, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Names of the JSON keys carrying each comment field. Defaults follow the
/// Pushshift dump layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldMap {
    pub author: String,
    pub body: String,
    pub created_utc: String,
    pub source: String,
    pub id: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        Self {
            author: "author".into(),
            body: "body".into(),
            created_utc: "created_utc".into(),
            source: "subreddit".into(),
            id: "id".into(),
        }
    }
}

/// A record as it appears in the dump, before any cleaning rule is applied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawRecord {
    pub author: Option<String>,
    pub body: Option<String>,
    pub created_utc: Option<i64>,
    pub source: Option<String>,
    pub id: Option<String>,
    /// 1-based line number in the originating stream.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SkipEntry {
    pub line: usize,
    pub reason: String,
}

/// Lines that could not be parsed, in line order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SkipReport {
    pub entries: Vec<SkipEntry>,
}

impl SkipReport {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, line: usize, reason: impl Into<String>) {
        self.entries.push(SkipEntry {
            line,
            reason: reason.into(),
        });
    }

    pub fn merge(&mut self, other: SkipReport) {
        self.entries.extend(other.entries);
    }

    pub fn sort(&mut self) {
        self.entries.sort();
    }

    /// Writes the report as `line<TAB>reason` rows under a header.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "line\treason")?;
        for e in &self.entries {
            let reason = e.reason.replace(['\t', '\n', '\r'], " ");
            writeln!(out, "{}\t{}", e.line, reason)?;
        }
        Ok(())
    }
}

struct RecordSeed<'a> {
    fields: &'a FieldMap,
}

#[derive(Clone, Copy)]
enum Slot {
    Author,
    Body,
    Created,
    Source,
    Id,
}

impl<'a> RecordSeed<'a> {
    fn slot(&self, key: &str) -> Option<Slot> {
        let f = self.fields;
        if key == f.author {
            Some(Slot::Author)
        } else if key == f.body {
            Some(Slot::Body)
        } else if key == f.created_utc {
            Some(Slot::Created)
        } else if key == f.source {
            Some(Slot::Source)
        } else if key == f.id {
            Some(Slot::Id)
        } else {
            None
        }
    }
}

impl<'de, 'a> DeserializeSeed<'de> for RecordSeed<'a> {
    type Value = RawRecord;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> Result<RawRecord, D::Error> {
        d.deserialize_map(self)
    }
}

impl<'de, 'a> Visitor<'de> for RecordSeed<'a> {
    type Value = RawRecord;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a JSON object")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawRecord, A::Error> {
        let mut rec = RawRecord::default();
        while let Some(key) = map.next_key::<std::borrow::Cow<'de, str>>()? {
            match self.slot(&key) {
                Some(Slot::Author) => rec.author = map.next_value::<LooseString>()?.0,
                Some(Slot::Body) => rec.body = map.next_value::<LooseString>()?.0,
                Some(Slot::Source) => rec.source = map.next_value::<LooseString>()?.0,
                Some(Slot::Id) => rec.id = map.next_value::<LooseString>()?.0,
                Some(Slot::Created) => rec.created_utc = map.next_value::<LooseTimestamp>()?.0,
                None => {
                    map.next_value::<IgnoredAny>()?;
                }
            }
        }
        Ok(rec)
    }
}

/// A string field that tolerates `null` and numbers.
struct LooseString(Option<String>);

impl<'de> Deserialize<'de> for LooseString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LooseString;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a string, number or null")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<LooseString, E> {
                Ok(LooseString(Some(v.to_owned())))
            }
            fn visit_string<E: de::Error>(self, v: String) -> Result<LooseString, E> {
                Ok(LooseString(Some(v)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LooseString, E> {
                Ok(LooseString(Some(v.to_string())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LooseString, E> {
                Ok(LooseString(Some(v.to_string())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<LooseString, E> {
                Ok(LooseString(Some(v.to_string())))
            }
            fn visit_bool<E: de::Error>(self, v: bool) -> Result<LooseString, E> {
                Ok(LooseString(Some(v.to_string())))
            }
            fn visit_unit<E: de::Error>(self) -> Result<LooseString, E> {
                Ok(LooseString(None))
            }
            fn visit_none<E: de::Error>(self) -> Result<LooseString, E> {
                Ok(LooseString(None))
            }
        }
        d.deserialize_any(V)
    }
}

/// Epoch seconds; Pushshift stores these as integers, floats or numeric strings
/// depending on the dump year.
struct LooseTimestamp(Option<i64>);

impl<'de> Deserialize<'de> for LooseTimestamp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LooseTimestamp;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an epoch timestamp")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<LooseTimestamp, E> {
                Ok(LooseTimestamp(Some(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<LooseTimestamp, E> {
                Ok(LooseTimestamp(i64::try_from(v).ok()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<LooseTimestamp, E> {
                Ok(LooseTimestamp(v.is_finite().then_some(v.trunc() as i64)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<LooseTimestamp, E> {
                let v = v.trim();
                Ok(LooseTimestamp(v.parse::<i64>().ok().or_else(|| {
                    v.parse::<f64>()
                        .ok()
                        .filter(|f| f.is_finite())
                        .map(|f| f.trunc() as i64)
                })))
            }
            fn visit_unit<E: de::Error>(self) -> Result<LooseTimestamp, E> {
                Ok(LooseTimestamp(None))
            }
            fn visit_none<E: de::Error>(self) -> Result<LooseTimestamp, E> {
                Ok(LooseTimestamp(None))
            }
        }
        d.deserialize_any(V)
    }
}

/// Parses one line. `Ok(None)` for blank lines.
pub fn parse_line(line: &str, line_no: usize, fields: &FieldMap) -> Result<Option<RawRecord>> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    let mut de = serde_json::Deserializer::from_str(trimmed);
    let mut rec = RecordSeed { fields }
        .deserialize(&mut de)
        .and_then(|r| de.end().map(|_| r))
        .map_err(|e| Error::MalformedRecord {
            line: line_no,
            message: e.to_string(),
        })?;
    rec.line = line_no;
    Ok(Some(rec))
}

/// Parses a whole NDJSON stream.
///
/// Malformed lines land in the skip report and parsing continues, unless
/// `strict` is set, in which case the first malformed line aborts.
pub fn parse_ndjson<R: BufRead>(
    reader: R,
    fields: &FieldMap,
    strict: bool,
) -> Result<(Vec<RawRecord>, SkipReport)> {
    let mut records = Vec::new();
    let mut skips = SkipReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                if strict {
                    return Err(Error::MalformedRecord {
                        line: line_no,
                        message: "invalid UTF-8".into(),
                    });
                }
                skips.push(line_no, "invalid UTF-8");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        match parse_line(&line, line_no, fields) {
            Ok(Some(rec)) => records.push(rec),
            Ok(None) => {}
            Err(e) if strict => return Err(e),
            Err(Error::MalformedRecord { message, .. }) => skips.push(line_no, message),
            Err(e) => return Err(e),
        }
    }
    Ok((records, skips))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> (Vec<RawRecord>, SkipReport) {
        parse_ndjson(s.as_bytes(), &FieldMap::default(), false).unwrap()
    }

    #[test]
    fn maps_pushshift_fields() {
        let (recs, skips) =
            parse(r#"{"author":"x","body":"hi","created_utc":1500000000,"subreddit":"s"}"#);
        assert!(skips.is_empty());
        assert_eq!(
            recs,
            vec![RawRecord {
                author: Some("x".into()),
                body: Some("hi".into()),
                created_utc: Some(1_500_000_000),
                source: Some("s".into()),
                id: None,
                line: 1,
            }]
        );
    }

    #[test]
    fn blank_lines_yield_nothing() {
        let (recs, skips) = parse("\n   \n");
        assert!(recs.is_empty());
        assert!(skips.is_empty());
    }

    #[test]
    fn malformed_line_is_reported_and_skipped() {
        let input = "{bad\n{\"author\":\"a\",\"body\":\"b\",\"created_utc\":\"12\"}\n";
        let (recs, skips) = parse(input);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].created_utc, Some(12));
        assert_eq!(recs[0].line, 2);
        assert_eq!(skips.entries.len(), 1);
        assert_eq!(skips.entries[0].line, 1);
    }

    #[test]
    fn strict_mode_aborts() {
        let err =
            parse_ndjson("{\"a\":1}\n[1,2]\n".as_bytes(), &FieldMap::default(), true).unwrap_err();
        assert!(matches!(err, Error::MalformedRecord { line: 2, .. }));
    }

    #[test]
    fn unknown_fields_and_nulls_are_tolerated() {
        let (recs, _) = parse(
            r#"{"score":5,"nested":{"k":[1,2]},"author":null,"body":"t","created_utc":1.5e9,"id":"abc"}"#,
        );
        assert_eq!(recs[0].author, None);
        assert_eq!(recs[0].created_utc, Some(1_500_000_000));
        assert_eq!(recs[0].id.as_deref(), Some("abc"));
    }

    #[test]
    fn custom_field_map() {
        let fields = FieldMap {
            author: "user".into(),
            body: "text".into(),
            created_utc: "ts".into(),
            source: "forum".into(),
            id: "key".into(),
        };
        let (recs, _) = parse_ndjson(
            r#"{"user":"u","text":"t","ts":7,"forum":"f","key":"k","author":"ignored"}"#.as_bytes(),
            &fields,
            true,
        )
        .unwrap();
        assert_eq!(recs[0].author.as_deref(), Some("u"));
        assert_eq!(recs[0].source.as_deref(), Some("f"));
    }

    #[test]
    fn trailing_garbage_is_malformed() {
        let (recs, skips) = parse(r#"{"body":"x"} extra"#);
        assert!(recs.is_empty());
        assert_eq!(skips.len(), 1);
    }
}
