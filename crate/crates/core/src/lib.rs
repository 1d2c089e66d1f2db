//! Corpus comparison by rank-turbulence divergence.
//!
//! The crate ingests comment dumps into n-gram frequency tables, ranks two
//! corpora over their combined lexicon, scores every type's contribution to
//! the rank-turbulence divergence, and builds allotaxonographs. Temporal and
//! statistical analyses (monthly narrative dominance, ADF stationarity,
//! two-sample KS, bootstrap means) live alongside.

pub mod allotax;
pub mod bias;
pub mod dominance;
pub mod error;
pub mod ingest;
pub mod rank;
pub mod rtd;
pub mod stats;
pub mod synth;

pub use allotax::{build_allotax, render_svg, AllotaxOptions, AllotaxSpec, Style};
pub use bias::{filter_ngrams_containing, top_biased, BiasQuery, RankScope};
pub use dominance::{
    dominance_table, dominant_term, relative_frequency_series, DominanceEntry, DominanceMode,
    MonthlyPanel, YearMonth,
};
pub use error::{Error, Result};
pub use rank::{CombinedLexicon, FrequencyTable, RankedLexicon};
pub use rtd::{Direction, DivergenceConfig, DivergenceEntry, DivergenceReport};
