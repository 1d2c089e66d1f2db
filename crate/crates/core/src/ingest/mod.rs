//! Comment dump ingestion: parsing, record filtering, text cleaning,
//! n-gram extraction, and corpus artifacts on disk.

pub mod clean;
pub mod fetch;
pub mod filter;
pub mod manifest;
pub mod ndjson;
pub mod ngram;
pub mod pipeline;
pub mod table_io;

pub use clean::{clean_text, CleanConfig, Cleaner, HyphenMode, TokenStream};
pub use fetch::{fetch_dump, FetchOptions};
pub use filter::{filter_comments, Comment, FilterConfig, RejectionTally};
pub use manifest::{open_dump, CorpusManifest, SourceFile};
pub use ndjson::{parse_ndjson, FieldMap, RawRecord, SkipReport};
pub use ngram::extract_ngrams;
pub use pipeline::{ingest_files, ingest_reader_once, CleanedComment, IngestOptions, IngestOutput};
pub use table_io::{
    load_frequency_table, persist_frequency_table, read_frequency_table, write_frequency_table,
};
