//! Sharded ingestion: dump files → cleaned comments → n-gram tables.
//!
//! Each file is read in fixed-size line chunks; chunks are processed on the
//! rayon pool and their partial results merged. Every merged quantity is
//! either a commutative sum or sorted by input position afterwards, so the
//! output does not depend on the thread count.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clean::{CleanConfig, Cleaner};
use super::filter::{Comment, FilterConfig, RejectionTally};
use super::manifest::{open_dump, CorpusManifest, SourceFile};
use super::ndjson::{parse_line, FieldMap, SkipReport};
use super::ngram::for_each_ngram;
use crate::dominance::YearMonth;
use crate::error::{Error, Result};
use crate::rank::table::FrequencyTable;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestOptions {
    pub label: String,
    pub fields: FieldMap,
    pub filter: FilterConfig,
    pub clean: CleanConfig,
    /// N-gram orders to count.
    pub orders: Vec<usize>,
    /// Abort on the first malformed line instead of reporting it.
    pub strict: bool,
    /// Keep every cleaned comment and its tokens in the output.
    pub keep_comments: bool,
    /// Only keep records whose source is listed; empty keeps everything.
    pub sources: Vec<String>,
    /// Also count unigrams per UTC calendar month.
    pub monthly: bool,
    pub chunk_lines: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            label: "corpus".into(),
            fields: FieldMap::default(),
            filter: FilterConfig::default(),
            clean: CleanConfig::default(),
            orders: vec![1],
            strict: false,
            keep_comments: false,
            sources: Vec::new(),
            monthly: false,
            chunk_lines: 8192,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedComment {
    pub comment: Comment,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSkips {
    pub path: PathBuf,
    pub report: SkipReport,
}

#[derive(Debug, Clone)]
pub struct IngestOutput {
    /// One table per requested order, in request order.
    pub tables: Vec<FrequencyTable>,
    pub manifest: CorpusManifest,
    pub skips: Vec<FileSkips>,
    /// Cleaned token count of every retained comment, in input order.
    pub comment_lengths: Vec<u64>,
    /// `created_utc` of every retained comment, aligned with `comment_lengths`.
    pub comment_times: Vec<i64>,
    /// Unigram table per month when `monthly` was requested.
    pub monthly: BTreeMap<YearMonth, FrequencyTable>,
    /// Present when `keep_comments` was requested; input order.
    pub comments: Vec<CleanedComment>,
}

impl IngestOutput {
    pub fn table(&self, order: usize) -> Option<&FrequencyTable> {
        self.tables.iter().find(|t| t.order() == order)
    }
}

type Position = (usize, usize);

struct Partial {
    tables: Vec<FrequencyTable>,
    tally: RejectionTally,
    skips: SkipReport,
    excluded_by_source: u64,
    records: u64,
    tokens: u64,
    utc_range: Option<(i64, i64)>,
    lengths: Vec<(Position, u64, i64)>,
    comments: Vec<(Position, CleanedComment)>,
    monthly: BTreeMap<YearMonth, FrequencyTable>,
}

impl Partial {
    fn new(orders: &[usize], label: &str) -> Self {
        Self {
            tables: orders
                .iter()
                .map(|&n| FrequencyTable::new(n, label))
                .collect(),
            tally: RejectionTally::default(),
            skips: SkipReport::default(),
            excluded_by_source: 0,
            records: 0,
            tokens: 0,
            utc_range: None,
            lengths: Vec::new(),
            comments: Vec::new(),
            monthly: BTreeMap::new(),
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.tables.iter_mut().zip(other.tables) {
            a.merge(b);
        }
        self.tally.merge(&other.tally);
        self.skips.merge(other.skips);
        self.excluded_by_source += other.excluded_by_source;
        self.records += other.records;
        self.tokens += other.tokens;
        self.utc_range = match (self.utc_range, other.utc_range) {
            (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
            (a, b) => a.or(b),
        };
        self.lengths.extend(other.lengths);
        self.comments.extend(other.comments);
        for (ym, t) in other.monthly {
            match self.monthly.get_mut(&ym) {
                Some(x) => x.merge(t),
                None => {
                    self.monthly.insert(ym, t);
                }
            }
        }
        self
    }
}

struct Chunk {
    file: usize,
    first_line: usize,
    lines: Vec<Vec<u8>>,
}

fn read_chunks<R: BufRead>(
    mut reader: R,
    file: usize,
    chunk_lines: usize,
) -> impl Iterator<Item = Result<Chunk>> {
    let mut next_line = 1usize;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut lines = Vec::with_capacity(chunk_lines);
        let first_line = next_line;
        while lines.len() < chunk_lines {
            let mut buf = Vec::new();
            match reader.read_until(b'\n', &mut buf) {
                Ok(0) => {
                    done = true;
                    break;
                }
                Ok(_) => {
                    if buf.last() == Some(&b'\n') {
                        buf.pop();
                    }
                    lines.push(buf);
                    next_line += 1;
                }
                Err(e) => {
                    done = true;
                    return Some(Err(e.into()));
                }
            }
        }
        (!lines.is_empty()).then_some(Ok(Chunk {
            file,
            first_line,
            lines,
        }))
    })
}

struct Worker<'a> {
    opts: &'a IngestOptions,
    cleaner: Cleaner,
}

impl Worker<'_> {
    fn process(&self, chunk: Chunk) -> Result<Partial> {
        let opts = self.opts;
        let mut part = Partial::new(&opts.orders, &opts.label);
        let mut tokens = Vec::new();
        let mut buf = String::new();
        for (i, raw) in chunk.lines.into_iter().enumerate() {
            let line_no = chunk.first_line + i;
            let parsed = match String::from_utf8(raw) {
                Ok(line) => parse_line(&line, line_no, &opts.fields),
                Err(_) => Err(Error::MalformedRecord {
                    line: line_no,
                    message: "invalid UTF-8".into(),
                }),
            };
            let rec = match parsed {
                Ok(Some(r)) => r,
                Ok(None) => continue,
                Err(e) if opts.strict => return Err(e),
                Err(Error::MalformedRecord { message, .. }) => {
                    part.skips.push(line_no, message);
                    continue;
                }
                Err(e) => return Err(e),
            };
            if !opts.sources.is_empty()
                && !rec
                    .source
                    .as_ref()
                    .is_some_and(|s| opts.sources.iter().any(|x| x == s))
            {
                part.excluded_by_source += 1;
                continue;
            }
            let Some(comment) = opts.filter.apply(rec, &opts.label, &mut part.tally) else {
                continue;
            };
            tokens.clear();
            self.cleaner.tokenize_into(&comment.body, &mut tokens);
            for table in part.tables.iter_mut() {
                let n = table.order();
                for_each_ngram(&tokens, n, &mut buf, |g| table.add(g, 1));
            }
            let pos = (chunk.file, line_no);
            part.records += 1;
            part.tokens += tokens.len() as u64;
            let t = comment.created_utc;
            part.utc_range = Some(match part.utc_range {
                Some((lo, hi)) => (lo.min(t), hi.max(t)),
                None => (t, t),
            });
            part.lengths.push((pos, tokens.len() as u64, t));
            if opts.monthly {
                let month = part
                    .monthly
                    .entry(YearMonth::from_timestamp(t)?)
                    .or_insert_with(|| FrequencyTable::new(1, opts.label.as_str()));
                for tok in &tokens {
                    month.add(tok, 1);
                }
            }
            if opts.keep_comments {
                part.comments.push((
                    pos,
                    CleanedComment {
                        comment,
                        tokens: tokens.clone(),
                    },
                ));
            }
        }
        Ok(part)
    }
}

fn ingest_reader<R: BufRead + Send>(
    reader: R,
    file: usize,
    worker: &Worker<'_>,
) -> Result<Partial> {
    let opts = worker.opts;
    read_chunks(reader, file, opts.chunk_lines.max(1))
        .par_bridge()
        .map(|chunk| worker.process(chunk?))
        .try_reduce(
            || Partial::new(&opts.orders, &opts.label),
            |a, b| Ok(a.merge(b)),
        )
}

fn validate(opts: &IngestOptions) -> Result<()> {
    if opts.orders.is_empty() || opts.orders.contains(&0) {
        return Err(Error::invalid("n-gram orders must be non-empty and ≥ 1"));
    }
    let mut seen = opts.orders.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != opts.orders.len() {
        return Err(Error::invalid("duplicate n-gram order"));
    }
    Ok(())
}

fn finish(
    opts: &IngestOptions,
    mut parts: Vec<(Option<PathBuf>, Partial)>,
    sources: Vec<SourceFile>,
) -> IngestOutput {
    let mut skips = Vec::new();
    let mut total = Partial::new(&opts.orders, &opts.label);
    for (path, mut part) in parts.drain(..) {
        let mut report = std::mem::take(&mut part.skips);
        report.sort();
        if !report.is_empty() {
            skips.push(FileSkips {
                path: path.unwrap_or_default(),
                report,
            });
        }
        total = total.merge(part);
    }
    total.lengths.par_sort_unstable_by_key(|(p, _, _)| *p);
    total.comments.par_sort_unstable_by_key(|(p, _)| *p);
    let skipped = skips.iter().map(|s| s.report.len() as u64).sum();
    IngestOutput {
        manifest: CorpusManifest {
            label: opts.label.clone(),
            record_count: total.records,
            token_count: total.tokens,
            date_range: total.utc_range,
            rejections: total.tally,
            excluded_by_source: total.excluded_by_source,
            skipped_lines: skipped,
            sources,
        },
        tables: total.tables,
        skips,
        comment_lengths: total.lengths.iter().map(|&(_, n, _)| n).collect(),
        comment_times: total.lengths.iter().map(|&(_, _, t)| t).collect(),
        monthly: total.monthly,
        comments: total.comments.into_iter().map(|(_, c)| c).collect(),
    }
}

/// Ingests dump files (plain, `.gz` or `.zst`) into frequency tables.
pub fn ingest_files(paths: &[impl AsRef<Path>], opts: &IngestOptions) -> Result<IngestOutput> {
    validate(opts)?;
    let worker = Worker {
        opts,
        cleaner: Cleaner::new(&opts.clean),
    };
    let mut parts = Vec::with_capacity(paths.len());
    let mut sources = Vec::with_capacity(paths.len());
    for (i, path) in paths.iter().enumerate() {
        let path = path.as_ref();
        sources.push(SourceFile::describe(path)?);
        let part = ingest_reader(open_dump(path)?, i, &worker)?;
        parts.push((Some(path.to_path_buf()), part));
    }
    Ok(finish(opts, parts, sources))
}

/// Ingests an in-memory NDJSON stream.
pub fn ingest_reader_once<R: BufRead + Send>(
    reader: R,
    opts: &IngestOptions,
) -> Result<IngestOutput> {
    validate(opts)?;
    let worker = Worker {
        opts,
        cleaner: Cleaner::new(&opts.clean),
    };
    let part = ingest_reader(reader, 0, &worker)?;
    Ok(finish(opts, vec![(None, part)], Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUMP: &str = concat!(
        r#"{"author":"a","body":"You're a don't","created_utc":1500000000,"subreddit":"s","id":"1"}"#,
        "\n",
        r#"{"author":"AutoModerator","body":"rules","created_utc":1500000001,"subreddit":"s"}"#,
        "\n",
        "{bad\n",
        "\n",
        r#"{"author":"b","body":"all femoids are","created_utc":1500000100,"subreddit":"t","id":"2"}"#,
        "\n",
        r#"{"author":"[deleted]","body":"x","created_utc":1500000002}"#,
        "\n",
    );

    fn opts() -> IngestOptions {
        IngestOptions {
            orders: vec![1, 2],
            keep_comments: true,
            chunk_lines: 2,
            ..Default::default()
        }
    }

    #[test]
    fn end_to_end_on_small_dump() {
        let out = ingest_reader_once(DUMP.as_bytes(), &opts()).unwrap();
        let m = &out.manifest;
        assert_eq!(m.record_count, 2);
        assert_eq!(m.token_count, 6);
        assert_eq!(m.date_range, Some((1_500_000_000, 1_500_000_100)));
        assert_eq!(m.rejections.automoderator, 1);
        assert_eq!(m.rejections.deleted_author, 1);
        assert_eq!(out.skips.len(), 1);
        assert_eq!(out.skips[0].report.entries[0].line, 3);
        let uni = out.table(1).unwrap();
        assert_eq!(uni.get("a"), 1);
        assert_eq!(uni.get("dont"), 1);
        let bi = out.table(2).unwrap();
        assert_eq!(bi.total(), 4);
        assert_eq!(bi.get("all femoids"), 1);
        assert_eq!(out.comment_lengths, vec![3, 3]);
        assert_eq!(out.comment_times, vec![1_500_000_000, 1_500_000_100]);
        assert_eq!(out.comments[1].comment.id, "2");
        assert!(out.monthly.is_empty());
    }

    #[test]
    fn monthly_tables() {
        let o = IngestOptions {
            monthly: true,
            ..opts()
        };
        let out = ingest_reader_once(DUMP.as_bytes(), &o).unwrap();
        assert_eq!(out.monthly.len(), 1);
        let (ym, t) = out.monthly.iter().next().unwrap();
        assert_eq!(ym.to_string(), "2017-07");
        assert_eq!(t, out.table(1).unwrap());
    }

    #[test]
    fn strict_aborts() {
        let o = IngestOptions {
            strict: true,
            ..opts()
        };
        assert!(ingest_reader_once(DUMP.as_bytes(), &o).is_err());
    }

    #[test]
    fn source_restriction() {
        let o = IngestOptions {
            sources: vec!["t".into()],
            ..opts()
        };
        let out = ingest_reader_once(DUMP.as_bytes(), &o).unwrap();
        assert_eq!(out.manifest.record_count, 1);
        assert_eq!(out.manifest.excluded_by_source, 3);
    }

    #[test]
    fn rejects_bad_orders() {
        for orders in [vec![], vec![0], vec![2, 2]] {
            let o = IngestOptions { orders, ..opts() };
            assert!(ingest_reader_once(DUMP.as_bytes(), &o).is_err());
        }
    }

    #[test]
    fn identical_across_thread_counts_and_chunk_sizes() {
        let mut dump = String::new();
        for i in 0..500 {
            dump.push_str(&format!(
                "{{\"author\":\"u{}\",\"body\":\"w{} w{} shared w{}\",\"created_utc\":{}}}\n",
                i % 7,
                i % 13,
                i % 5,
                i % 31,
                1_500_000_000 + i
            ));
        }
        let run = |threads: usize, chunk: usize| {
            let o = IngestOptions {
                chunk_lines: chunk,
                ..opts()
            };
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ingest_reader_once(dump.as_bytes(), &o).unwrap())
        };
        let base = run(1, 1000);
        for (threads, chunk) in [(2, 7), (8, 3), (3, 64)] {
            let other = run(threads, chunk);
            assert_eq!(other.tables, base.tables);
            assert_eq!(other.manifest, base.manifest);
            assert_eq!(other.comment_lengths, base.comment_lengths);
            assert_eq!(other.comments, base.comments);
            assert_eq!(other.comment_times, base.comment_times);
        }
    }
}
