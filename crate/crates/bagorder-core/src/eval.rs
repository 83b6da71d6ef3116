//! Error-distribution evaluation tables and parameter counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Bag, Sentence};
use crate::error::Error;
use crate::search::{generate, GenerationResult, Model, SearchConfig};
use crate::scoring::Order;
use crate::tables::{NGramTables, PairTable};

/// Per-configuration outcome of regenerating one sentence from its bag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigOutcome {
    /// The selected arrangement differs from the reference (or the
    /// search died).
    pub error: bool,
    /// More than one final state shared the maximum score.
    pub tie: bool,
    /// Every path reached probability zero.
    pub dead: bool,
}

/// Outcomes of one test sentence under every evaluated configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceEval {
    pub length: usize,
    pub outcomes: Vec<ConfigOutcome>,
}

/// The generation function signature [`evaluate_with`] plugs in, so the
/// brute-force oracle can stand in for the real search.
pub type Generator<'a> = &'a dyn Fn(
    &Bag,
    &SearchConfig,
    &PairTable,
    &NGramTables,
) -> Result<GenerationResult, Error>;

/// Regenerate one sentence from its bag under each configuration and
/// compare against the reference by strict sequence equality.
pub fn eval_sentence(
    s: &Sentence,
    configs: &[SearchConfig],
    pairs: &PairTable,
    ngrams: &NGramTables,
    gen: Generator<'_>,
) -> Result<SentenceEval, Error> {
    let reference = s.pad();
    let bag = s.to_bag();
    let mut outcomes = Vec::with_capacity(configs.len());
    for cfg in configs {
        let outcome = match gen(&bag, cfg, pairs, ngrams) {
            Ok(mut result) => {
                result.is_error = Some(result.best != reference);
                ConfigOutcome {
                    error: result.best != reference,
                    tie: result.tie_count > 1,
                    dead: false,
                }
            }
            Err(Error::NoArrangement { .. }) => ConfigOutcome {
                error: true,
                tie: false,
                dead: true,
            },
            Err(e) => return Err(e),
        };
        outcomes.push(outcome);
    }
    Ok(SentenceEval {
        length: s.word_count(),
        outcomes,
    })
}

/// One table row: counts per configuration for a sentence length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalRow {
    pub length: usize,
    pub total: u64,
    pub errors: Vec<u64>,
    pub ties: Vec<u64>,
    pub dead: Vec<u64>,
}

impl EvalRow {
    fn zeroed(length: usize, width: usize) -> EvalRow {
        EvalRow {
            length,
            total: 0,
            errors: alloc::vec![0; width],
            ties: alloc::vec![0; width],
            dead: alloc::vec![0; width],
        }
    }

    fn absorb(&mut self, eval: &SentenceEval) {
        self.total += 1;
        for (i, o) in eval.outcomes.iter().enumerate() {
            self.errors[i] += o.error as u64;
            self.ties[i] += o.tie as u64;
            self.dead[i] += o.dead as u64;
        }
    }
}

/// Error-distribution table: one row per observed sentence length plus a
/// computed totals row, one column group per configuration label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    /// Aggregate per-sentence outcomes into length-keyed rows. The
    /// aggregation is a commutative sum, so any evaluation order yields
    /// the same report.
    pub fn from_sentence_evals<I>(labels: Vec<String>, evals: I) -> EvalReport
    where
        I: IntoIterator<Item = SentenceEval>,
    {
        let width = labels.len();
        let mut by_length: BTreeMap<usize, EvalRow> = BTreeMap::new();
        for eval in evals {
            assert_eq!(eval.outcomes.len(), width);
            by_length
                .entry(eval.length)
                .or_insert_with(|| EvalRow::zeroed(eval.length, width))
                .absorb(&eval);
        }
        EvalReport {
            labels,
            rows: by_length.into_values().collect(),
        }
    }

    /// Column-wise sums over all rows (the table's final row).
    pub fn totals(&self) -> EvalRow {
        let mut totals = EvalRow::zeroed(0, self.labels.len());
        for row in &self.rows {
            totals.total += row.total;
            for i in 0..self.labels.len() {
                totals.errors[i] += row.errors[i];
                totals.ties[i] += row.ties[i];
                totals.dead[i] += row.dead[i];
            }
        }
        totals
    }
}

/// Evaluate a test set with the real search.
pub fn evaluate(
    test: &[Sentence],
    configs: &[SearchConfig],
    pairs: &PairTable,
    ngrams: &NGramTables,
) -> Result<EvalReport, Error> {
    evaluate_with(test, configs, pairs, ngrams, &generate)
}

/// Evaluate a test set with a pluggable generation function.
pub fn evaluate_with(
    test: &[Sentence],
    configs: &[SearchConfig],
    pairs: &PairTable,
    ngrams: &NGramTables,
    gen: Generator<'_>,
) -> Result<EvalReport, Error> {
    for cfg in configs {
        cfg.validate(ngrams)?;
    }
    let labels = configs.iter().map(SearchConfig::label).collect();
    let mut evals = Vec::with_capacity(test.len());
    for s in test {
        evals.push(eval_sentence(s, configs, pairs, ngrams, gen)?);
    }
    Ok(EvalReport::from_sentence_evals(labels, evals))
}

/// Stored-parameter count for one model configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamReport {
    pub label: String,
    /// Distinct stored table entries backing the model.
    pub distinct_parameters: u64,
    /// The applicable asymptotic bound.
    pub bound_note: &'static str,
    /// Vocabulary size V, marker included.
    pub vocab_size: usize,
    /// The bound's limit: the order n for the exact model, the largest
    /// stored distance for the approximate one.
    pub limit: u64,
}

/// Count the distinct parameters a model configuration draws on.
///
/// The approximate model always reads the same pair table (plus the
/// unigram entries for its order-2 denominators), so its count does not
/// depend on the order. The exact model of order n reads the n-gram and
/// (n−1)-gram tables.
pub fn param_count(
    model: Model,
    order: Order,
    pairs: &PairTable,
    ngrams: &NGramTables,
    vocab_size: usize,
) -> Result<ParamReport, Error> {
    let label = SearchConfig::new(model, order).label();
    match model {
        Model::Approx => Ok(ParamReport {
            label,
            distinct_parameters: (pairs.distinct() + ngrams.distinct(1)) as u64,
            bound_note: "O((L-1)*V^2)",
            vocab_size,
            limit: pairs.max_distance() as u64,
        }),
        Model::Exact => match order {
            Order::Full => Err(Error::ExactFullOrder),
            Order::N(n) if n < 2 => Err(Error::OrderTooSmall { order: n }),
            Order::N(n) if n > ngrams.order() => Err(Error::OrderExceedsTables {
                requested: n,
                trained: ngrams.order(),
            }),
            Order::N(n) => Ok(ParamReport {
                label,
                distinct_parameters: (ngrams.distinct(n) + ngrams.distinct(n - 1)) as u64,
                bound_note: "O(V^n)",
                vocab_size,
                limit: n as u64,
            }),
        },
    }
}
