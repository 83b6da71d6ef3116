//! Seeded search for merge-condition-(4) failure instances.
//!
//! Dropping the same-coverage condition lets paths over different word
//! multisets merge, which can discard the prefix of the true optimum.
//! This module hunts for concrete instances where the weakened search
//! returns a strictly worse result than the exhaustive oracle.

use bagorder_core::corpus::{parse_corpus, Bag, Vocab};
use bagorder_core::error::Error;
use bagorder_core::scoring::{LogScore, Order};
use bagorder_core::search::{brute_force_generate, generate, Model, SearchConfig};
use bagorder_core::tables::train;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A pinned instance demonstrating the condition-(4) failure mode.
#[derive(Debug, Clone)]
pub struct Counterexample {
    /// Corpus the tables were trained on, one sentence per line.
    pub corpus_text: String,
    /// Model configuration (condition4 on; the demonstration turns it off).
    pub config: SearchConfig,
    /// The bag, as surface words.
    pub bag_words: Vec<String>,
    /// True maximum from the exhaustive oracle.
    pub oracle_score: LogScore,
    /// Score from merging without condition (4); `None` when that search
    /// died entirely.
    pub unsafe_score: Option<LogScore>,
    /// 0-based index of the trial that produced the instance.
    pub trial: u32,
}

const VOCAB: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Check one instance: does the condition4-off search score strictly
/// below the oracle maximum?
pub fn check_instance(
    corpus_text: &str,
    config: &SearchConfig,
    bag_words: &[String],
) -> Result<Option<(LogScore, Option<LogScore>)>, Error> {
    let mut vocab = Vocab::new();
    let corpus = parse_corpus(corpus_text, &mut vocab).expect("corpus text is marker-free");
    let order = match config.order {
        Order::N(n) => n.max(3),
        Order::Full => 3,
    };
    let (pairs, ngrams) = train(&corpus, order, None);
    let mut bag = Bag::new();
    for word in bag_words {
        match vocab.get(word) {
            Some(id) => bag.insert(id),
            None => return Ok(None),
        }
    }
    let oracle = match brute_force_generate(&bag, config, &pairs, &ngrams) {
        Ok(result) => result,
        Err(Error::NoArrangement { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut weakened = *config;
    weakened.condition4 = false;
    match generate(&bag, &weakened, &pairs, &ngrams) {
        Ok(result) if result.score < oracle.score => {
            Ok(Some((oracle.score, Some(result.score))))
        }
        Ok(_) => Ok(None),
        Err(Error::NoArrangement { .. }) => Ok(Some((oracle.score, None))),
        Err(e) => Err(e),
    }
}

/// Random search over small corpora and bags for a condition-(4)
/// counterexample. Deterministic in the seed.
pub fn find_condition4_counterexample(seed: u64, max_trials: u32) -> Option<Counterexample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = [
        SearchConfig::new(Model::Exact, Order::N(2)),
        SearchConfig::new(Model::Exact, Order::N(3)),
        SearchConfig::new(Model::Approx, Order::N(3)),
    ];
    for trial in 0..max_trials {
        let sentence_count = rng.gen_range(5..=10);
        let mut corpus_text = String::new();
        for _ in 0..sentence_count {
            let len = rng.gen_range(2..=5);
            let line: Vec<&str> = (0..len).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())]).collect();
            corpus_text.push_str(&line.join(" "));
            corpus_text.push('\n');
        }
        let bag_size = rng.gen_range(4..=6);
        let bag_words: Vec<String> = (0..bag_size)
            .map(|_| VOCAB[rng.gen_range(0..VOCAB.len())].to_string())
            .collect();
        let config = configs[rng.gen_range(0..configs.len())];
        if let Ok(Some((oracle_score, unsafe_score))) =
            check_instance(&corpus_text, &config, &bag_words)
        {
            return Some(Counterexample {
                corpus_text,
                config,
                bag_words,
                oracle_score,
                unsafe_score,
                trial,
            });
        }
    }
    None
}
