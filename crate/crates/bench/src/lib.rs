//! Inputs shared by the benchmarks.

use lexdiv::synth::{write_dump, SynthConfig};
use lexdiv::FrequencyTable;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Zipf-shaped unigram table over `types` words; the seed permutes which
/// word gets which count.
pub fn zipf_table(types: usize, seed: u64, label: &str) -> FrequencyTable {
    let mut words: Vec<String> = (0..types).map(lexdiv::synth::word).collect();
    words.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let counts = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), (1e7 / (i as f64 + 1.0).powf(1.1)).ceil() as u64));
    FrequencyTable::from_counts(1, label, counts).expect("distinct words")
}

/// NDJSON dump of `comments` synthetic comments.
pub fn dump(comments: usize, seed: u64) -> Vec<u8> {
    let cfg = SynthConfig {
        comments,
        seed,
        ..Default::default()
    };
    let mut out = Vec::new();
    write_dump(&cfg, &mut out).expect("in-memory write");
    out
}

/// Deterministic pseudo-random walk of length `n`.
pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = 0.0;
    (0..n)
        .map(|_| {
            y += rng.gen_range(-1.0..1.0);
            y
        })
        .collect()
}
