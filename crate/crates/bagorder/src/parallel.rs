//! Multi-threaded training and evaluation drivers.
//!
//! Sentences train and evaluate independently; workers take contiguous
//! chunks and the partial results merge by commutative sums, so any
//! thread count produces identical tables and reports.

use bagorder_core::corpus::Sentence;
use bagorder_core::error::Error;
use bagorder_core::eval::{eval_sentence, evaluate, EvalReport, SentenceEval};
use bagorder_core::search::{generate, SearchConfig};
use bagorder_core::tables::{train, NGramTables, PairTable};

/// Train tables across `threads` workers and merge the partial counts.
pub fn train_parallel(
    corpus: &[Sentence],
    order: usize,
    distance_cap: Option<u32>,
    threads: usize,
) -> (PairTable, NGramTables) {
    if threads <= 1 || corpus.len() <= 1 {
        return train(corpus, order, distance_cap);
    }
    let chunk_size = corpus.len().div_ceil(threads);
    let parts: Vec<(PairTable, NGramTables)> = std::thread::scope(|scope| {
        let handles: Vec<_> = corpus
            .chunks(chunk_size)
            .map(|chunk| scope.spawn(move || train(chunk, order, distance_cap)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .collect()
    });
    let mut parts = parts.into_iter();
    let (mut pairs, mut ngrams) = parts.next().expect("at least one chunk");
    for (p, n) in parts {
        pairs.absorb(p);
        ngrams.absorb(n);
    }
    (pairs, ngrams)
}

/// Evaluate a test set across `threads` workers.
pub fn evaluate_parallel(
    test: &[Sentence],
    configs: &[SearchConfig],
    pairs: &PairTable,
    ngrams: &NGramTables,
    threads: usize,
) -> Result<EvalReport, Error> {
    if threads <= 1 || test.len() <= 1 {
        return evaluate(test, configs, pairs, ngrams);
    }
    for cfg in configs {
        cfg.validate(ngrams)?;
    }
    let chunk_size = test.len().div_ceil(threads);
    let chunks: Vec<Result<Vec<SentenceEval>, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = test
            .chunks(chunk_size)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|s| eval_sentence(s, configs, pairs, ngrams, &generate))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation worker panicked"))
            .collect()
    });
    let labels = configs.iter().map(SearchConfig::label).collect();
    let mut evals = Vec::with_capacity(test.len());
    for chunk in chunks {
        evals.extend(chunk?);
    }
    Ok(EvalReport::from_sentence_evals(labels, evals))
}
