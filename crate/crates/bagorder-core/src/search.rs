//! Bag generation: level-synchronous queue search with DP merging, plus
//! an exhaustive permutation oracle.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Bag, Sentence, TokenId, MARKER};
use crate::error::Error;
use crate::scoring::{
    approx_score_direct, effective_order, markov_score, LogScore, Order, Ring,
};
use crate::tables::{NGramTables, PairProbs, PairTable};

/// Which sentence model scores the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Exact n-gram Markov model.
    Exact,
    /// Approximate model over directed pair minima.
    Approx,
}

/// Search configuration: model, window order, and merge behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub model: Model,
    pub order: Order,
    /// Merge condition (4): paths must cover the same words. Turning it
    /// off demonstrates the merge failure mode and voids optimality.
    pub condition4: bool,
    /// Optional beam width; any value voids the optimality guarantee.
    pub beam_width: Option<usize>,
}

impl SearchConfig {
    pub fn new(model: Model, order: Order) -> Self {
        SearchConfig {
            model,
            order,
            condition4: true,
            beam_width: None,
        }
    }

    /// Short model label: `M3`, `AM2`, `AMn`, ...
    pub fn label(&self) -> String {
        let prefix = match self.model {
            Model::Exact => "M",
            Model::Approx => "AM",
        };
        match self.order {
            Order::N(n) => format!("{prefix}{n}"),
            Order::Full => format!("{prefix}n"),
        }
    }

    /// Check the configuration against the trained tables.
    pub fn validate(&self, ngrams: &NGramTables) -> Result<(), Error> {
        match (self.model, self.order) {
            (Model::Exact, Order::Full) => Err(Error::ExactFullOrder),
            (Model::Exact, Order::N(n)) => {
                if n < 2 {
                    Err(Error::OrderTooSmall { order: n })
                } else if n > ngrams.order() {
                    Err(Error::OrderExceedsTables {
                        requested: n,
                        trained: ngrams.order(),
                    })
                } else {
                    Ok(())
                }
            }
            (Model::Approx, Order::N(n)) if n < 2 => Err(Error::OrderTooSmall { order: n }),
            (Model::Approx, _) => Ok(()),
        }
    }
}

/// Configuration resolved against a concrete bag size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact { n: usize },
    /// Approximate model with window width n strictly inside the sentence.
    Windowed { n: usize },
    /// Approximate model whose window is the whole padded sentence.
    Full,
}

fn resolve_mode(cfg: &SearchConfig, word_total: usize) -> Result<(Mode, bool), Error> {
    match cfg.model {
        Model::Exact => match cfg.order {
            Order::N(n) => Ok((Mode::Exact { n }, false)),
            Order::Full => Err(Error::ExactFullOrder),
        },
        Model::Approx => {
            let (n, clamped) = effective_order(cfg.order, word_total);
            if n == word_total + 2 {
                Ok((Mode::Full, clamped))
            } else {
                Ok((Mode::Windowed { n }, clamped))
            }
        }
    }
}

/// A partial arrangement: the padded prefix built so far, the unused
/// words, and the incrementally accrued score.
///
/// For windowed approximate search the path carries ring states for the
/// numerator and denominator windows; both are functions of the path's
/// trailing tokens, which is what makes suffix-keyed merging safe. Under
/// the full-sentence order the path instead tracks the running minimum
/// over all pairs seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    tokens: Vec<TokenId>,
    remaining: Bag,
    score: LogScore,
    num_ring: Option<Ring>,
    den_ring: Option<Ring>,
    full_min: f64,
    complete: bool,
}

impl Path {
    /// The start node: a lone leading marker with the whole bag unused.
    pub fn start(bag: Bag, cfg: &SearchConfig, pairs: &impl PairProbs) -> Path {
        let (mode, _) = resolve_mode(cfg, bag.total()).expect("invalid search configuration");
        let mut path = Path {
            tokens: alloc::vec![MARKER],
            remaining: bag,
            score: LogScore::ONE,
            num_ring: None,
            den_ring: None,
            full_min: f64::INFINITY,
            complete: false,
        };
        path.init_rings_if_ready(&mode, pairs);
        path
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn score(&self) -> LogScore {
        self.score
    }

    pub fn remaining(&self) -> &Bag {
        &self.remaining
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Total words of the originating bag (used and unused).
    fn word_total(&self) -> usize {
        self.tokens.len() - 1 + self.remaining.total()
    }

    /// A dead path can never reach a nonzero complete score.
    pub fn is_dead(&self) -> bool {
        self.score.is_zero() || self.full_min == 0.0
    }

    fn init_rings_if_ready(&mut self, mode: &Mode, pairs: &impl PairProbs) {
        if let Mode::Windowed { n } = mode {
            if self.tokens.len() == n - 1 {
                self.num_ring = Some(Ring::init(&self.tokens, pairs));
                if *n >= 3 {
                    self.den_ring = Some(Ring::init(&self.tokens[1..], pairs));
                }
            }
        }
    }

    /// Append one token, accruing the score factors its position owes.
    fn child(
        &self,
        next: TokenId,
        is_final_marker: bool,
        mode: &Mode,
        pairs: &impl PairProbs,
        ngrams: &NGramTables,
    ) -> Path {
        let t = self.tokens.len();
        let m = self.word_total();
        let mut child = self.clone();
        if !is_final_marker {
            let removed = child.remaining.remove(next);
            debug_assert!(removed, "expanding a word not in the bag");
        }
        match mode {
            Mode::Exact { n } => {
                let ctx_len = t.min(n - 1);
                let p = ngrams.cond_prob(&child.tokens[t - ctx_len..t], next);
                child.score.mul_prob(p);
            }
            Mode::Windowed { n } => {
                if t >= n - 1 {
                    let num = child
                        .num_ring
                        .as_mut()
                        .expect("numerator ring missing")
                        .shift(next, pairs);
                    child.score.mul_prob(num);
                    if t <= m {
                        let den = match child.den_ring.as_mut() {
                            Some(ring) => ring.shift(next, pairs),
                            None => ngrams.cond_prob(&[], next),
                        };
                        child.score.div_prob(den);
                    }
                }
            }
            Mode::Full => {
                for i in 0..t {
                    let p = pairs.pair_prob(child.tokens[i], next, (t - i) as u32);
                    child.full_min = child.full_min.min(p);
                }
                if is_final_marker {
                    debug_assert!(child.full_min.is_finite());
                    child.score.mul_prob(child.full_min);
                }
            }
        }
        child.tokens.push(next);
        child.complete = is_final_marker;
        child.init_rings_if_ready(mode, pairs);
        child
    }
}

/// Merge identity: paths agreeing on all components expand identically.
///
/// The suffix is the last min(n−1, length) tokens, so paths at or below
/// length n−1 carry their whole sequence and never collide, which
/// realizes the rule that only paths longer than n−1 are merged.
/// Coverage is the unused-word multiset (equivalent to the used one for
/// a fixed bag) and is omitted when merge condition (4) is disabled.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StateKey {
    length: usize,
    suffix: Vec<TokenId>,
    coverage: Option<Vec<(TokenId, u32)>>,
}

impl StateKey {
    pub fn of(path: &Path, cfg: &SearchConfig) -> StateKey {
        let (mode, _) =
            resolve_mode(cfg, path.word_total()).expect("invalid search configuration");
        let n = match mode {
            Mode::Exact { n } | Mode::Windowed { n } => n,
            Mode::Full => path.word_total() + 2,
        };
        let len = path.tokens.len();
        let suffix_len = len.min(n - 1);
        StateKey {
            length: len,
            suffix: path.tokens[len - suffix_len..].to_vec(),
            coverage: cfg.condition4.then(|| path.remaining.iter().collect()),
        }
    }
}

/// Expand a path by one level: one child per distinct unused word, or
/// the single completing child that appends the end marker.
///
/// Children carry their incremental score factors; zero-score children
/// are returned and left to the caller to prune.
pub fn expand(
    path: &Path,
    cfg: &SearchConfig,
    pairs: &impl PairProbs,
    ngrams: &NGramTables,
) -> Vec<Path> {
    debug_assert!(!path.complete, "expanding a complete path");
    let (mode, _) = resolve_mode(cfg, path.word_total()).expect("invalid search configuration");
    if path.remaining.is_empty() {
        return alloc::vec![path.child(MARKER, true, &mode, pairs, ngrams)];
    }
    path.remaining
        .iter()
        .map(|(token, _)| path.child(token, false, &mode, pairs, ngrams))
        .collect()
}

/// Merge a candidate into a level keyed by [`StateKey`], keeping the
/// higher-scoring path and breaking exact ties toward the
/// lexicographically smaller token sequence.
pub fn merge_into(level: &mut BTreeMap<StateKey, Path>, candidate: Path, cfg: &SearchConfig) {
    use alloc::collections::btree_map::Entry;
    let key = StateKey::of(&candidate, cfg);
    match level.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(candidate);
        }
        Entry::Occupied(mut slot) => {
            let held = slot.get();
            let replace = match candidate.score.cmp(&held.score) {
                core::cmp::Ordering::Greater => true,
                core::cmp::Ordering::Less => false,
                core::cmp::Ordering::Equal => candidate.tokens < held.tokens,
            };
            if replace {
                slot.insert(candidate);
            }
        }
    }
}

/// Outcome of a bag generation run.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationResult {
    /// Best-scoring complete padded sequence `[*, w1.., *]`.
    pub best: Vec<TokenId>,
    pub score: LogScore,
    /// Final states sharing the maximum score (1 when the winner is unique).
    pub tie_count: u64,
    /// Paths expanded across all levels (permutations scored, for the oracle).
    pub expanded_states: u64,
    /// Beam search was active, so the result may be suboptimal.
    pub approximate: bool,
    /// Merge condition (4) was disabled, so the result may be suboptimal.
    pub unsafe_merge: bool,
    /// A finite order exceeded m+2 and was clamped to the full window.
    pub clamped: bool,
    /// Set by evaluation when compared against a reference sentence.
    pub is_error: Option<bool>,
}

impl GenerationResult {
    /// The arrangement without its boundary markers.
    pub fn stripped(&self) -> &[TokenId] {
        &self.best[1..self.best.len() - 1]
    }
}

/// Recover the best-scoring arrangement of a bag.
///
/// Level-synchronous search: every path in a level is expanded, children
/// merge into the next level under [`StateKey`] identity, dead children
/// are dropped, and after m+1 levels every surviving path is complete.
/// With condition (4) on and no beam the returned score is the true
/// maximum over all arrangements.
pub fn generate(
    bag: &Bag,
    cfg: &SearchConfig,
    pairs: &PairTable,
    ngrams: &NGramTables,
) -> Result<GenerationResult, Error> {
    cfg.validate(ngrams)?;
    let (_, clamped) = resolve_mode(cfg, bag.total())?;
    let levels = bag.total() + 1;
    let mut current = alloc::vec![Path::start(bag.clone(), cfg, pairs)];
    let mut expanded: u64 = 0;
    for step in 1..=levels {
        let mut next: BTreeMap<StateKey, Path> = BTreeMap::new();
        for path in &current {
            expanded += 1;
            for child in expand(path, cfg, pairs, ngrams) {
                if !child.is_dead() {
                    merge_into(&mut next, child, cfg);
                }
            }
        }
        if next.is_empty() {
            return Err(Error::NoArrangement { level: step });
        }
        current = next.into_values().collect();
        if let Some(width) = cfg.beam_width {
            current.sort_by(|a, b| {
                b.score
                    .cmp(&a.score)
                    .then_with(|| a.tokens.cmp(&b.tokens))
            });
            current.truncate(width.max(1));
        }
    }
    debug_assert!(current.iter().all(Path::is_complete));
    let mut best = &current[0];
    for path in &current[1..] {
        if path.score > best.score || (path.score == best.score && path.tokens < best.tokens) {
            best = path;
        }
    }
    let tie_count = current.iter().filter(|p| p.score == best.score).count() as u64;
    Ok(GenerationResult {
        best: best.tokens.clone(),
        score: best.score,
        tie_count,
        expanded_states: expanded,
        approximate: cfg.beam_width.is_some(),
        unsafe_merge: !cfg.condition4,
        clamped,
        is_error: None,
    })
}

/// Hard cap on the bag size [`brute_force_generate`] accepts.
pub const BRUTE_FORCE_CAP: usize = 8;

/// Classic in-place next lexicographic permutation; multiset-aware.
fn next_permutation(v: &mut [TokenId]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exhaustive oracle: score every distinct permutation of the bag from
/// scratch (no rings, no merging) and return the argmax under the same
/// lexicographic tie-break as [`generate`].
///
/// Zero-score permutations are not candidates, mirroring the search's
/// pruning; if every permutation is zero the bag has no arrangement.
/// `expanded_states` reports the number of permutations scored and
/// `tie_count` the number of max-scoring permutations.
pub fn brute_force_generate(
    bag: &Bag,
    cfg: &SearchConfig,
    pairs: &PairTable,
    ngrams: &NGramTables,
) -> Result<GenerationResult, Error> {
    cfg.validate(ngrams)?;
    if bag.total() > BRUTE_FORCE_CAP {
        return Err(Error::BagTooLarge {
            total: bag.total(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let (_, clamped) = resolve_mode(cfg, bag.total())?;
    let mut words: Vec<TokenId> = Vec::with_capacity(bag.total());
    for (token, count) in bag.iter() {
        for _ in 0..count {
            words.push(token);
        }
    }
    let mut best: Option<(Vec<TokenId>, LogScore)> = None;
    let mut tie_count = 0u64;
    let mut scored = 0u64;
    loop {
        scored += 1;
        let sentence = Sentence::new(words.clone());
        let score = match (cfg.model, cfg.order) {
            (Model::Exact, Order::N(n)) => markov_score(&sentence, n, ngrams)?,
            (Model::Exact, Order::Full) => unreachable!("validated"),
            (Model::Approx, order) => approx_score_direct(&sentence, order, pairs, ngrams).score,
        };
        if !score.is_zero() {
            match &best {
                Some((_, top)) if score < *top => {}
                Some((_, top)) if score == *top => tie_count += 1,
                // First permutation in ascending lexicographic order wins ties.
                _ => {
                    best = Some((words.clone(), score));
                    tie_count = 1;
                }
            }
        }
        if !next_permutation(&mut words) {
            break;
        }
    }
    match best {
        None => Err(Error::NoArrangement { level: 0 }),
        Some((tokens, score)) => {
            let mut padded = Vec::with_capacity(tokens.len() + 2);
            padded.push(MARKER);
            padded.extend_from_slice(&tokens);
            padded.push(MARKER);
            Ok(GenerationResult {
                best: padded,
                score,
                tie_count,
                expanded_states: scored,
                approximate: false,
                unsafe_merge: false,
                clamped,
                is_error: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, Vocab};
    use crate::tables::train;
    use alloc::vec;

    fn t(i: u32) -> TokenId {
        TokenId(i)
    }

    fn setup(text: &str, order: usize) -> (Vocab, Vec<Sentence>, PairTable, NGramTables) {
        let mut vocab = Vocab::new();
        let corpus = parse_corpus(text, &mut vocab).unwrap();
        let (pairs, ngrams) = train(&corpus, order, None);
        (vocab, corpus, pairs, ngrams)
    }

    fn bag_of(words: &[u32]) -> Bag {
        let mut bag = Bag::new();
        for &w in words {
            bag.insert(t(w));
        }
        bag
    }

    #[test]
    fn expand_one_child_per_distinct_word() {
        let (_, _, pairs, ngrams) = setup("a b\nb a\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let start = Path::start(bag_of(&[1, 2]), &cfg, &pairs);
        let children = expand(&start, &cfg, &pairs, &ngrams);
        assert_eq!(children.len(), 2);
        let mut sequences: Vec<_> = children.iter().map(|c| c.tokens().to_vec()).collect();
        sequences.sort();
        assert_eq!(sequences, vec![vec![t(0), t(1)], vec![t(0), t(2)]]);
    }

    #[test]
    fn expand_deduplicates_repeated_words() {
        let (_, _, pairs, ngrams) = setup("a a\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let start = Path::start(bag_of(&[1, 1]), &cfg, &pairs);
        let children = expand(&start, &cfg, &pairs, &ngrams);
        assert_eq!(children.len(), 1);
        assert_eq!(children[0].remaining().total(), 1);
    }

    #[test]
    fn expand_exhausted_bag_appends_final_marker() {
        let (_, _, pairs, ngrams) = setup("a b\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let mut path = Path::start(bag_of(&[1, 2]), &cfg, &pairs);
        for token in [t(1), t(2)] {
            path = expand(&path, &cfg, &pairs, &ngrams)
                .into_iter()
                .find(|c| *c.tokens().last().unwrap() == token)
                .unwrap();
        }
        let finals = expand(&path, &cfg, &pairs, &ngrams);
        assert_eq!(finals.len(), 1);
        assert!(finals[0].is_complete());
        assert_eq!(finals[0].tokens(), &[t(0), t(1), t(2), t(0)]);
    }

    #[test]
    fn merge_respects_coverage_only_under_condition4() {
        let (_, _, pairs, ngrams) = setup("a b c\nb a c\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let start = Path::start(bag_of(&[1, 2, 3]), &cfg, &pairs);
        let level1 = expand(&start, &cfg, &pairs, &ngrams);
        // The two length-3 paths ending in c cover different words.
        let mut candidates = Vec::new();
        for p in &level1 {
            for c in expand(p, &cfg, &pairs, &ngrams) {
                if *c.tokens().last().unwrap() == t(3) {
                    candidates.push(c);
                }
            }
        }
        assert_eq!(candidates.len(), 2);
        let mut with_cond4: BTreeMap<StateKey, Path> = BTreeMap::new();
        for c in candidates.clone() {
            merge_into(&mut with_cond4, c, &cfg);
        }
        assert_eq!(with_cond4.len(), 2, "different coverage: both kept");
        let mut unsafe_cfg = cfg;
        unsafe_cfg.condition4 = false;
        let mut merged: BTreeMap<StateKey, Path> = BTreeMap::new();
        for c in candidates.clone() {
            merge_into(&mut merged, c, &unsafe_cfg);
        }
        assert_eq!(merged.len(), 1, "same length and suffix: merged");
        let survivor = merged.values().next().unwrap();
        let max_score = candidates.iter().map(Path::score).max().unwrap();
        assert_eq!(survivor.score(), max_score, "higher probability survives");
    }

    #[test]
    fn merge_equal_scores_prefers_lexicographically_smaller_sequence() {
        let (_, _, pairs, _) = setup("a b\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        // Hand-built paths with identical keys and scores, distinguished
        // only by their token order.
        let mut low = Path::start(bag_of(&[1, 2, 3]), &cfg, &pairs);
        low.tokens = vec![t(0), t(1), t(2), t(3)];
        low.remaining = Bag::new();
        let mut high = low.clone();
        high.tokens = vec![t(0), t(2), t(1), t(3)];
        let mut level: BTreeMap<StateKey, Path> = BTreeMap::new();
        merge_into(&mut level, high, &cfg);
        merge_into(&mut level, low.clone(), &cfg);
        assert_eq!(level.len(), 1);
        assert_eq!(level.values().next().unwrap().tokens(), low.tokens());
    }

    #[test]
    fn generate_single_word_bag() {
        let (_, _, pairs, ngrams) = setup("a\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let result = generate(&bag_of(&[1]), &cfg, &pairs, &ngrams).unwrap();
        assert_eq!(result.best, vec![t(0), t(1), t(0)]);
        assert_eq!(result.tie_count, 1);
    }

    #[test]
    fn generate_empty_bag_yields_markers_only() {
        let (_, _, pairs, ngrams) = setup("\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let result = generate(&Bag::new(), &cfg, &pairs, &ngrams).unwrap();
        assert_eq!(result.best, vec![t(0), t(0)]);
    }

    #[test]
    fn generate_scores_at_least_the_reference_arrangement() {
        let (_, corpus, pairs, ngrams) = setup("a b c d\nd c b a\nb d a c\n", 3);
        for cfg in [
            SearchConfig::new(Model::Exact, Order::N(2)),
            SearchConfig::new(Model::Exact, Order::N(3)),
            SearchConfig::new(Model::Approx, Order::N(3)),
            SearchConfig::new(Model::Approx, Order::Full),
        ] {
            let reference = &corpus[0];
            let result = generate(&reference.to_bag(), &cfg, &pairs, &ngrams).unwrap();
            let ref_score = match (cfg.model, cfg.order) {
                (Model::Exact, Order::N(n)) => markov_score(reference, n, &ngrams).unwrap(),
                (Model::Exact, Order::Full) => unreachable!(),
                (Model::Approx, order) => {
                    approx_score_direct(reference, order, &pairs, &ngrams).score
                }
            };
            assert!(
                result.score >= ref_score,
                "{}: best {} < reference {}",
                cfg.label(),
                result.score,
                ref_score
            );
        }
    }

    #[test]
    fn generate_result_strips_to_the_input_bag() {
        let (_, _, pairs, ngrams) = setup("a b a c\nc a b a\n", 2);
        let bag = bag_of(&[1, 1, 2, 3]);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let result = generate(&bag, &cfg, &pairs, &ngrams).unwrap();
        let mut rebuilt = Bag::new();
        for &token in result.stripped() {
            rebuilt.insert(token);
        }
        assert_eq!(rebuilt, bag);
    }

    #[test]
    fn generate_dies_on_unconnectable_bag() {
        let (_, _, pairs, ngrams) = setup("a b\nc d\n", 2);
        let cfg = SearchConfig::new(Model::Exact, Order::N(2));
        let err = generate(&bag_of(&[1, 4]), &cfg, &pairs, &ngrams).unwrap_err();
        assert!(matches!(err, Error::NoArrangement { .. }), "{err:?}");
    }

    #[test]
    fn generate_rejects_exact_full_and_untrained_orders() {
        let (_, _, pairs, ngrams) = setup("a b\n", 2);
        let bag = bag_of(&[1]);
        let cfg = SearchConfig::new(Model::Exact, Order::Full);
        assert_eq!(
            generate(&bag, &cfg, &pairs, &ngrams),
            Err(Error::ExactFullOrder)
        );
        let cfg = SearchConfig::new(Model::Exact, Order::N(4));
        assert_eq!(
            generate(&bag, &cfg, &pairs, &ngrams),
            Err(Error::OrderExceedsTables {
                requested: 4,
                trained: 2
            })
        );
    }

    #[test]
    fn brute_force_enumerates_distinct_multiset_permutations() {
        let (_, _, pairs, ngrams) = setup("a a b\na b a\nb a a\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let result = brute_force_generate(&bag_of(&[1, 1, 2]), &cfg, &pairs, &ngrams).unwrap();
        assert_eq!(result.expanded_states, 3, "3!/2! distinct permutations");
    }

    #[test]
    fn brute_force_refuses_oversized_bags() {
        let (_, _, pairs, ngrams) = setup("a b\n", 2);
        let bag = bag_of(&[1, 2, 1, 2, 1, 2, 1, 2, 1]);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        assert_eq!(
            brute_force_generate(&bag, &cfg, &pairs, &ngrams),
            Err(Error::BagTooLarge { total: 9, cap: 8 })
        );
    }

    #[test]
    fn brute_force_single_word() {
        let (_, _, pairs, ngrams) = setup("a\n", 2);
        let cfg = SearchConfig::new(Model::Approx, Order::N(2));
        let result = brute_force_generate(&bag_of(&[1]), &cfg, &pairs, &ngrams).unwrap();
        assert_eq!(result.best, vec![t(0), t(1), t(0)]);
    }

    #[test]
    fn generate_matches_brute_force_on_small_bags() {
        let (_, corpus, pairs, ngrams) = setup(
            "a b c d e\nb a d c e\nc e a b d\ne d c b a\na c e b d\n",
            3,
        );
        let configs = [
            SearchConfig::new(Model::Exact, Order::N(2)),
            SearchConfig::new(Model::Exact, Order::N(3)),
            SearchConfig::new(Model::Approx, Order::N(2)),
            SearchConfig::new(Model::Approx, Order::N(3)),
            SearchConfig::new(Model::Approx, Order::Full),
        ];
        for s in &corpus {
            let bag = s.to_bag();
            for cfg in &configs {
                let dp = generate(&bag, cfg, &pairs, &ngrams);
                let oracle = brute_force_generate(&bag, cfg, &pairs, &ngrams);
                match (dp, oracle) {
                    (Ok(a), Ok(b)) => {
                        assert_eq!(a.score, b.score, "{}", cfg.label());
                        assert_eq!(a.best, b.best, "{}", cfg.label());
                    }
                    (Err(Error::NoArrangement { .. }), Err(Error::NoArrangement { .. })) => {}
                    (a, b) => panic!("{}: divergent outcomes {a:?} vs {b:?}", cfg.label()),
                }
            }
        }
    }

    #[test]
    fn suffix_equal_paths_gain_equal_incremental_factors() {
        let (_, _, pairs, ngrams) = setup(
            "a b c d e\nb a c d e\nc d a b e\ne a b c d\nd e c a b\n",
            3,
        );
        let cfg = SearchConfig::new(Model::Approx, Order::N(3));
        let bag = bag_of(&[1, 2, 3, 4, 5]);
        let walk = |order: &[u32]| {
            let mut path = Path::start(bag.clone(), &cfg, &pairs);
            for &w in order {
                path = expand(&path, &cfg, &pairs, &ngrams)
                    .into_iter()
                    .find(|c| *c.tokens().last().unwrap() == t(w))
                    .unwrap();
            }
            path
        };
        // Same length, same coverage, same 2-token suffix, different prefix.
        let p1 = walk(&[1, 2, 3, 4]);
        let p2 = walk(&[2, 1, 3, 4]);
        assert_eq!(StateKey::of(&p1, &cfg), StateKey::of(&p2, &cfg));
        let f1 = walk(&[1, 2, 3, 4, 5]).score().value() - p1.score().value();
        let f2 = walk(&[2, 1, 3, 4, 5]).score().value() - p2.score().value();
        assert_eq!(f1, f2, "incremental factor depends only on the suffix");
    }

    #[test]
    fn next_permutation_visits_multiset_orderings() {
        let mut v = vec![t(1), t(1), t(2)];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![t(1), t(1), t(2)],
                vec![t(1), t(2), t(1)],
                vec![t(2), t(1), t(1)],
            ]
        );
    }

    #[test]
    fn labels_follow_model_convention() {
        assert_eq!(SearchConfig::new(Model::Exact, Order::N(2)).label(), "M2");
        assert_eq!(SearchConfig::new(Model::Approx, Order::N(4)).label(), "AM4");
        assert_eq!(SearchConfig::new(Model::Approx, Order::Full).label(), "AMn");
    }
}
