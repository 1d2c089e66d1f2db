//! Synthetic comment dumps with Zipf-distributed vocabulary, for tests and
//! benchmarks.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub comments: usize,
    pub vocabulary: usize,
    /// Zipf exponent of word frequencies.
    pub exponent: f64,
    /// Tokens per comment are uniform on `1..=2·mean_tokens - 1`.
    pub mean_tokens: usize,
    /// Fraction of vocabulary positions permuted away from the base order,
    /// so two configs with different seeds rank words differently.
    pub shuffle: f64,
    pub seed: u64,
    pub start_utc: i64,
    pub span_secs: i64,
    pub source: String,
    /// Add deleted records, bot comments, URLs, markup and punctuation.
    pub noise: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            comments: 1000,
            vocabulary: 20_000,
            exponent: 1.1,
            mean_tokens: 20,
            shuffle: 0.0,
            seed: 0,
            start_utc: 1_483_228_800, // 2017-01-01
            span_secs: 2 * 365 * 86_400,
            source: "synthetic".into(),
            noise: true,
        }
    }
}

/// Bijective base-26 spelling of `i`: a, b, …, z, aa, ab, …
pub fn word(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).expect("ascii")
}

#[derive(Serialize)]
struct Line<'a> {
    id: String,
    author: &'a str,
    body: &'a str,
    created_utc: i64,
    subreddit: &'a str,
}

/// Writes `config.comments` NDJSON records to `out`.
pub fn write_dump<W: Write>(config: &SynthConfig, mut out: W) -> Result<()> {
    if config.vocabulary == 0 || config.mean_tokens == 0 || config.span_secs <= 0 {
        return Err(Error::invalid(
            "vocabulary, mean_tokens and span must be positive",
        ));
    }
    let zipf = Zipf::new(config.vocabulary as u64, config.exponent)
        .map_err(|e| Error::invalid(format!("zipf: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..config.vocabulary).collect();
    let moved = ((config.shuffle.clamp(0.0, 1.0) * config.vocabulary as f64) as usize)
        .min(config.vocabulary);
    if moved > 1 {
        let mut picks: Vec<usize> =
            rand::seq::index::sample(&mut rng, config.vocabulary, moved).into_vec();
        let mut targets = picks.clone();
        targets.shuffle(&mut rng);
        picks.sort_unstable();
        let before = order.clone();
        for (p, t) in picks.iter().zip(&targets) {
            order[*p] = before[*t];
        }
    }
    let words: Vec<String> = order.into_iter().map(word).collect();

    let mut body = String::new();
    for n in 0..config.comments {
        body.clear();
        let len = rng.gen_range(1..2 * config.mean_tokens);
        for k in 0..len {
            if k > 0 {
                body.push(' ');
            }
            let w = &words[zipf.sample(&mut rng) as usize - 1];
            if config.noise {
                match rng.gen_range(0..200) {
                    0 => body.push_str("https://example.com/x "),
                    1 => body.push_str("&gt;"),
                    2..=5 => {
                        let mut c = w.chars();
                        let first = c.next().unwrap().to_ascii_uppercase();
                        body.push(first);
                        body.push_str(c.as_str());
                        body.push(',');
                        continue;
                    }
                    6..=9 => {
                        body.push_str(w);
                        body.push('.');
                        continue;
                    }
                    _ => {}
                }
            }
            body.push_str(w);
        }
        let roll = if config.noise {
            rng.gen_range(0..1000)
        } else {
            999
        };
        let author = match roll {
            0..=9 => "[deleted]".to_owned(),
            10..=14 => "AutoModerator".to_owned(),
            _ => format!("u{}", rng.gen_range(0..50_000)),
        };
        let text = if roll == 15 {
            "[removed]"
        } else {
            body.as_str()
        };
        let line = Line {
            id: format!("{:x}", n),
            author: &author,
            body: text,
            created_utc: config.start_utc + rng.gen_range(0..config.span_secs),
            subreddit: &config.source,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
