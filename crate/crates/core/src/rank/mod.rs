//! Frequency tables, combined lexicons and tie-averaged rankings, plus the
//! Zipf and comments-per-day summary series.

pub mod lexicon;
pub mod series;
pub mod table;

pub use lexicon::{
    combined_lexicon, rank_pair, tie_averaged_ranks, zero_frequency_rank, CombinedLexicon,
    RankedLexicon,
};
pub use series::{comments_per_day, utc_date, write_two_column, zipf_distribution};
pub use table::{count_frequencies, count_frequencies_par, FrequencyTable};
