//! Sentence scoring under the exact and approximate Markov models.

use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{Sentence, TokenId};
use crate::error::Error;
use crate::tables::{NGramTables, PairProbs};

/// Model window width: a finite order n, or the whole padded sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    N(usize),
    Full,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::N(n) => write!(f, "{n}"),
            Order::Full => write!(f, "full"),
        }
    }
}

/// Resolution of the fixed-point log representation: 2^40 units per nat.
const LOG_UNITS: f64 = (1u64 << 40) as f64;

/// A log-domain probability with an absorbing zero element.
///
/// Probability products map to additions and quotients to subtractions.
/// The value is held in fixed point (integer multiples of 2⁻⁴⁰ nats), so
/// accumulation is exact and order-independent: two arrangements built
/// from the same multiset of factors score bit-identically no matter how
/// their factors interleave, and exact ties are decided by the shared
/// lexicographic tie-break instead of floating-point rounding order.
/// Probability 0 is a sentinel that absorbs under multiplication and
/// sorts below every finite score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogScore(i64);

impl LogScore {
    /// Probability 1 (empty product).
    pub const ONE: LogScore = LogScore(0);

    /// Probability 0, the absorbing minimum.
    pub const ZERO: LogScore = LogScore(i64::MIN);

    fn quantize(nats: f64) -> i64 {
        libm::round(nats * LOG_UNITS) as i64
    }

    pub fn from_prob(p: f64) -> Self {
        debug_assert!(p >= 0.0);
        if p > 0.0 {
            LogScore(Self::quantize(libm::log(p)))
        } else {
            LogScore::ZERO
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0 == i64::MIN
    }

    /// The natural-log value; −∞ for the zero element.
    pub fn value(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.0 as f64 / LOG_UNITS
        }
    }

    /// Multiply by a probability factor. Saturation on astronomically
    /// long products degrades to the zero element.
    pub fn mul_prob(&mut self, p: f64) {
        debug_assert!(p >= 0.0);
        if self.is_zero() {
            return;
        }
        if p > 0.0 {
            self.0 = self.0.saturating_add(Self::quantize(libm::log(p)));
        } else {
            *self = LogScore::ZERO;
        }
    }

    /// Divide by a probability factor.
    ///
    /// A zero divisor marks the score dead rather than producing an
    /// undefined quotient; it only arises for events absent from training.
    pub fn div_prob(&mut self, p: f64) {
        debug_assert!(p >= 0.0);
        if self.is_zero() {
            return;
        }
        if p > 0.0 {
            self.0 = self.0.saturating_sub(Self::quantize(libm::log(p)));
        } else {
            *self = LogScore::ZERO;
        }
    }
}

impl fmt::Display for LogScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Minimum pair probability over all ordered index pairs of `words`.
///
/// This is the naive all-pairs route over L(L−1)/2 lookups; [`Ring`]
/// computes the same minima incrementally.
pub fn pair_min(words: &[TokenId], pairs: &impl PairProbs) -> f64 {
    debug_assert!(words.len() >= 2);
    let mut min = f64::INFINITY;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            min = min.min(pairs.pair_prob(words[i], words[j], (j - i) as u32));
        }
    }
    min
}

/// Minimum pair probability of a window, with the one-word convention.
///
/// For two or more words this is [`pair_min`]; a single-word window has
/// no pairs and its minimum is defined as the word's unigram probability,
/// which is what makes the order-2 approximate model mirror the bigram
/// model's unigram denominators.
pub fn tuple_min(words: &[TokenId], pairs: &impl PairProbs, unigrams: &NGramTables) -> f64 {
    assert!(!words.is_empty());
    if words.len() == 1 {
        unigrams.cond_prob(&[], words[0])
    } else {
        pair_min(words, pairs)
    }
}

/// Circular buffer of running pair-probability minima.
///
/// For a sliding window of width w over a token sequence, the ring keeps
/// one slot per position of the last w−1 tokens. A slot holds the
/// minimum probability over the directed pairs starting at its position,
/// so the minimum over all pairs of the w-token window ending at a new
/// token costs w−1 lookups instead of w(w−1)/2: every retained slot is
/// lowered by the pair from its position to the new token, the freed
/// oldest slot is recycled for the new position, and the slot minimum is
/// the window minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    /// Window tokens, oldest at `head`, wrapping circularly.
    tokens: Vec<TokenId>,
    /// Running minimum per token position; +∞ means no pairs recorded yet.
    slots: Vec<f64>,
    head: usize,
}

impl Ring {
    /// Build the ring over the first w−1 tokens.
    ///
    /// Slot i starts at the minimum over pairs from position i to later
    /// window positions; the final position has no pairs yet and starts
    /// at the +∞ placeholder.
    pub fn init(window: &[TokenId], pairs: &impl PairProbs) -> Self {
        assert!(!window.is_empty());
        let len = window.len();
        let mut slots = Vec::with_capacity(len);
        for i in 0..len {
            let mut min = f64::INFINITY;
            for j in i + 1..len {
                min = min.min(pairs.pair_prob(window[i], window[j], (j - i) as u32));
            }
            slots.push(min);
        }
        Ring {
            tokens: window.to_vec(),
            slots,
            head: 0,
        }
    }

    /// Number of tokens the ring summarizes (w−1).
    pub fn span(&self) -> usize {
        self.tokens.len()
    }

    /// Minimum over the slots: the pair minimum of the current window
    /// (+∞ when the window holds a single token and hence no pairs).
    pub fn minimum(&self) -> f64 {
        self.slots.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Slide the window one token forward.
    ///
    /// Lowers each slot by the pair from its position to `next` (exactly
    /// w−1 lookups), returns the pair minimum of the full w-token window
    /// ending at `next`, and recycles the oldest slot for `next`.
    pub fn shift(&mut self, next: TokenId, pairs: &impl PairProbs) -> f64 {
        let len = self.tokens.len();
        let mut min = f64::INFINITY;
        for offset in 0..len {
            let idx = (self.head + offset) % len;
            let distance = (len - offset) as u32;
            let p = pairs.pair_prob(self.tokens[idx], next, distance);
            self.slots[idx] = self.slots[idx].min(p);
            min = min.min(self.slots[idx]);
        }
        self.tokens[self.head] = next;
        self.slots[self.head] = f64::INFINITY;
        self.head = (self.head + 1) % len;
        min
    }
}

/// Log probability of a sentence under the exact n-gram Markov model.
///
/// Multiplies the conditional probability of every padded position after
/// the leading marker given its preceding min(t, n−1) tokens, so the
/// context escalates from a single marker up to full width. The leading
/// marker's own probability is taken as 1: it is shared by every
/// arrangement of a bag and cannot change a comparison.
pub fn markov_score(s: &Sentence, order: usize, ngrams: &NGramTables) -> Result<LogScore, Error> {
    if order < 2 {
        return Err(Error::OrderTooSmall { order });
    }
    if order > ngrams.order() {
        return Err(Error::OrderExceedsTables {
            requested: order,
            trained: ngrams.order(),
        });
    }
    let padded = s.pad();
    let mut score = LogScore::ONE;
    for t in 1..padded.len() {
        let ctx_len = t.min(order - 1);
        score.mul_prob(ngrams.cond_prob(&padded[t - ctx_len..t], padded[t]));
    }
    Ok(score)
}

/// Score of a sentence under the approximate n-gram Markov model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxScore {
    pub score: LogScore,
    /// Set when a finite order exceeded m+2 and was clamped to the
    /// full-sentence window.
    pub clamped: bool,
}

/// Resolve a requested order against a sentence of m words: the window
/// can never exceed the padded length m+2.
pub(crate) fn effective_order(order: Order, word_count: usize) -> (usize, bool) {
    let len = word_count + 2;
    match order {
        Order::Full => (len, false),
        Order::N(n) => {
            debug_assert!(n >= 2);
            if n > len {
                (len, true)
            } else {
                (n, false)
            }
        }
    }
}

/// Log score under the approximate n-gram Markov model, computed with
/// ring shifts.
///
/// Each window of n padded tokens contributes its pair minimum as a
/// numerator factor and each interior window of n−1 tokens divides by
/// its own minimum; with the full-sentence order the denominator is
/// empty and the score is the single whole-sentence pair minimum.
/// Orders beyond m+2 clamp to the full window and set the `clamped` flag.
pub fn approx_score(
    s: &Sentence,
    order: Order,
    pairs: &impl PairProbs,
    unigrams: &NGramTables,
) -> ApproxScore {
    let padded = s.pad();
    let (n, clamped) = effective_order(order, s.word_count());
    let mut score = LogScore::ONE;
    if n == padded.len() {
        let mut ring = Ring::init(&padded[..n - 1], pairs);
        score.mul_prob(ring.shift(padded[n - 1], pairs));
        return ApproxScore { score, clamped };
    }
    let mut num_ring = Ring::init(&padded[..n - 1], pairs);
    let mut den_ring = if n >= 3 {
        Some(Ring::init(&padded[1..n - 1], pairs))
    } else {
        None
    };
    for t in n - 1..padded.len() {
        score.mul_prob(num_ring.shift(padded[t], pairs));
        if t + 1 < padded.len() {
            let den = match den_ring.as_mut() {
                Some(ring) => ring.shift(padded[t], pairs),
                None => unigrams.cond_prob(&[], padded[t]),
            };
            score.div_prob(den);
        }
    }
    ApproxScore { score, clamped }
}

/// The approximate-model score evaluated directly from the definition:
/// one naive [`tuple_min`] per window, no ring state.
///
/// Factor accumulation order matches [`approx_score`] exactly, so the
/// two routes agree bit for bit; this is the independent route used by
/// the brute-force search oracle.
pub fn approx_score_direct(
    s: &Sentence,
    order: Order,
    pairs: &impl PairProbs,
    unigrams: &NGramTables,
) -> ApproxScore {
    let padded = s.pad();
    let (n, clamped) = effective_order(order, s.word_count());
    let mut score = LogScore::ONE;
    if n == padded.len() {
        score.mul_prob(pair_min(&padded, pairs));
        return ApproxScore { score, clamped };
    }
    for t in n - 1..padded.len() {
        score.mul_prob(pair_min(&padded[t + 1 - n..=t], pairs));
        if t + 1 < padded.len() {
            score.div_prob(tuple_min(&padded[t + 2 - n..=t], pairs, unigrams));
        }
    }
    ApproxScore { score, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, Vocab};
    use crate::tables::{train, PairTable};
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn t(i: u32) -> TokenId {
        TokenId(i)
    }

    fn tables_for(text: &str, order: usize) -> (Vocab, Vec<Sentence>, PairTable, NGramTables) {
        let mut vocab = Vocab::new();
        let corpus = parse_corpus(text, &mut vocab).unwrap();
        let (pairs, ngrams) = train(&corpus, order, None);
        (vocab, corpus, pairs, ngrams)
    }

    /// Pair probabilities tabulated from seeded random counts, so ring
    /// results can be checked against the naive route on arbitrary windows.
    struct RandomProbs {
        grid: Vec<f64>,
        vocab: usize,
        max_distance: usize,
    }

    impl RandomProbs {
        fn new(seed: u64, vocab: usize, max_distance: usize, zeros: bool) -> Self {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let grid = (0..vocab * vocab * max_distance)
                .map(|_| {
                    if zeros && rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen_range(1..=1000) as f64 / 1000.0
                    }
                })
                .collect();
            RandomProbs {
                grid,
                vocab,
                max_distance,
            }
        }
    }

    impl PairProbs for RandomProbs {
        fn pair_prob(&self, left: TokenId, right: TokenId, distance: u32) -> f64 {
            let d = distance as usize;
            assert!(d >= 1 && d <= self.max_distance);
            self.grid[(left.index() * self.vocab + right.index()) * self.max_distance + d - 1]
        }
    }

    #[test]
    fn log_score_orders_with_zero_as_minimum() {
        let mut a = LogScore::ONE;
        a.mul_prob(0.5);
        assert!(LogScore::ZERO < a);
        assert!(a < LogScore::ONE);
        let mut z = a;
        z.mul_prob(0.0);
        assert!(z.is_zero());
        z.mul_prob(0.9);
        assert!(z.is_zero(), "zero absorbs");
    }

    #[test]
    fn log_score_multiplication_is_addition() {
        let mut s = LogScore::ONE;
        s.mul_prob(0.25);
        s.mul_prob(0.5);
        s.div_prob(0.5);
        assert!((s.value() - 0.25f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn tuple_min_of_three_known_probs() {
        // P(a,b,1)=0.3, P(b,c,1)=0.2, P(a,c,2)=0.5
        struct Fixed;
        impl PairProbs for Fixed {
            fn pair_prob(&self, l: TokenId, r: TokenId, d: u32) -> f64 {
                match (l.0, r.0, d) {
                    (1, 2, 1) => 0.3,
                    (2, 3, 1) => 0.2,
                    (1, 3, 2) => 0.5,
                    _ => panic!("unexpected lookup"),
                }
            }
        }
        assert_eq!(pair_min(&[t(1), t(2), t(3)], &Fixed), 0.2);
    }

    #[test]
    fn tuple_min_of_two_words_is_the_single_pair() {
        let probs = RandomProbs::new(7, 5, 8, false);
        assert_eq!(
            pair_min(&[t(1), t(4)], &probs),
            probs.pair_prob(t(1), t(4), 1)
        );
    }

    #[test]
    fn tuple_min_single_word_is_unigram_probability() {
        let (_, _, pairs, ngrams) = tables_for("a b\n", 2);
        assert_eq!(tuple_min(&[t(1)], &pairs, &ngrams), 1.0 / 4.0);
    }

    #[test]
    fn ring_init_small_windows() {
        let probs = RandomProbs::new(1, 4, 4, false);
        // n=3 window [a,b]: first slot the adjacent pair, second empty.
        let ring = Ring::init(&[t(1), t(2)], &probs);
        assert_eq!(ring.slots[0], probs.pair_prob(t(1), t(2), 1));
        assert_eq!(ring.slots[1], f64::INFINITY);
        // n=2 window [a]: one empty slot.
        let ring = Ring::init(&[t(1)], &probs);
        assert_eq!(ring.slots, vec![f64::INFINITY]);
    }

    #[test]
    fn ring_init_minimum_matches_naive() {
        let probs = RandomProbs::new(2, 6, 8, false);
        let window = [t(1), t(3), t(2), t(5)];
        let ring = Ring::init(&window, &probs);
        assert_eq!(ring.minimum(), pair_min(&window, &probs));
    }

    #[test]
    fn ring_shift_matches_naive_three_window() {
        let probs = RandomProbs::new(3, 4, 4, false);
        let mut ring = Ring::init(&[t(1), t(2)], &probs);
        let got = ring.shift(t(3), &probs);
        assert_eq!(got, pair_min(&[t(1), t(2), t(3)], &probs));
        // Ring now summarizes [b, c].
        let got = ring.shift(t(1), &probs);
        assert_eq!(got, pair_min(&[t(2), t(3), t(1)], &probs));
    }

    #[test]
    fn ring_shift_two_window_is_adjacent_pair() {
        let probs = RandomProbs::new(4, 4, 4, false);
        let mut ring = Ring::init(&[t(1)], &probs);
        assert_eq!(ring.shift(t(2), &probs), probs.pair_prob(t(1), t(2), 1));
    }

    #[test]
    fn ring_shift_streams_match_naive_minimum() {
        for width in 2..=8usize {
            let probs = RandomProbs::new(width as u64, 9, width, true);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + width as u64);
            let stream: Vec<TokenId> =
                (0..200).map(|_| t(rng.gen_range(0..9))).collect();
            let mut ring = Ring::init(&stream[..width - 1], &probs);
            for end in width - 1..stream.len() {
                let got = ring.shift(stream[end], &probs);
                let want = pair_min(&stream[end + 1 - width..=end], &probs);
                assert_eq!(got, want, "width {width} at {end}");
            }
        }
    }

    #[test]
    fn markov_score_single_sentence_is_certain() {
        let (_, corpus, _, ngrams) = tables_for("a b\n", 2);
        let score = markov_score(&corpus[0], 2, &ngrams).unwrap();
        assert_eq!(score, LogScore::ONE);
    }

    #[test]
    fn markov_score_two_sentence_counts() {
        let (_, corpus, _, ngrams) = tables_for("a b\nb a\n", 2);
        let score = markov_score(&corpus[0], 2, &ngrams).unwrap();
        assert!((score.value() - (1.0f64 / 8.0).ln()).abs() < 1e-9);
    }

    #[test]
    fn markov_score_unseen_bigram_is_zero() {
        let (mut vocab, _, _, ngrams) = {
            let mut vocab = Vocab::new();
            let corpus = parse_corpus("a b\nc d\n", &mut vocab).unwrap();
            let (pairs, ngrams) = train(&corpus, 2, None);
            (vocab, corpus, pairs, ngrams)
        };
        let a = vocab.intern("a");
        let d = vocab.intern("d");
        let s = Sentence::new(vec![a, d]);
        assert!(markov_score(&s, 2, &ngrams).unwrap().is_zero());
    }

    #[test]
    fn markov_score_rejects_untrained_order() {
        let (_, corpus, _, ngrams) = tables_for("a b\n", 2);
        assert_eq!(
            markov_score(&corpus[0], 3, &ngrams),
            Err(Error::OrderExceedsTables {
                requested: 3,
                trained: 2
            })
        );
    }

    #[test]
    fn markov_score_escalating_contexts_at_higher_order() {
        let (_, corpus, _, ngrams) = tables_for("a b c\n", 3);
        // P(a|*)·P(b|*,a)·P(c|a,b)·P(*|b,c) = 1 on the one-sentence table.
        let score = markov_score(&corpus[0], 3, &ngrams).unwrap();
        assert_eq!(score, LogScore::ONE);
    }

    #[test]
    fn approx_score_order2_matches_hand_computation() {
        let (_, corpus, pairs, ngrams) = tables_for("a b\n", 2);
        let got = approx_score(&corpus[0], Order::N(2), &pairs, &ngrams);
        let want = ((1.0f64 / 6.0).powi(3) / (0.25 * 0.25)).ln();
        assert!(!got.clamped);
        assert!((got.score.value() - want).abs() < 1e-9);
    }

    #[test]
    fn approx_score_full_is_whole_sentence_pair_minimum() {
        let (_, corpus, pairs, ngrams) = tables_for("a b c a\nb c\n", 2);
        for s in &corpus {
            let got = approx_score(s, Order::Full, &pairs, &ngrams);
            let want = pair_min(&s.pad(), &pairs);
            assert_eq!(got.score, LogScore::from_prob(want));
        }
    }

    #[test]
    fn approx_score_uniform_pairs_scores_all_arrangements_alike() {
        struct Uniform;
        impl PairProbs for Uniform {
            fn pair_prob(&self, _: TokenId, _: TokenId, _: u32) -> f64 {
                0.125
            }
        }
        let (_, _, _, ngrams) = tables_for("a b c\n", 2);
        let arrangements = [
            Sentence::new(vec![t(1), t(2), t(3)]),
            Sentence::new(vec![t(3), t(1), t(2)]),
            Sentence::new(vec![t(2), t(3), t(1)]),
        ];
        let scores: Vec<_> = arrangements
            .iter()
            .map(|s| approx_score(s, Order::Full, &Uniform, &ngrams).score)
            .collect();
        assert!(scores.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn approx_score_clamps_excessive_order_with_flag() {
        let (_, corpus, pairs, ngrams) = tables_for("a b\n", 2);
        let clamped = approx_score(&corpus[0], Order::N(7), &pairs, &ngrams);
        let full = approx_score(&corpus[0], Order::Full, &pairs, &ngrams);
        assert!(clamped.clamped);
        assert!(!full.clamped);
        assert_eq!(clamped.score, full.score);
    }

    #[test]
    fn approx_score_exact_window_fit_degenerates_to_full() {
        let (_, corpus, pairs, ngrams) = tables_for("a b c\nc b a\nb a c\n", 2);
        // m = 3, so order 5 spans the whole padded sentence.
        for s in &corpus {
            let at_fit = approx_score(s, Order::N(5), &pairs, &ngrams);
            let full = approx_score(s, Order::Full, &pairs, &ngrams);
            assert!(!at_fit.clamped);
            assert_eq!(at_fit.score, full.score);
        }
    }

    #[test]
    fn approx_ring_route_equals_direct_route_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut vocab = Vocab::new();
        let words = ["a", "b", "c", "d", "e", "f"];
        let mut lines = alloc::string::String::new();
        for _ in 0..30 {
            let len = rng.gen_range(1..=9);
            let line: Vec<&str> =
                (0..len).map(|_| words[rng.gen_range(0..words.len())]).collect();
            lines.push_str(&line.join(" "));
            lines.push('\n');
        }
        let corpus = parse_corpus(&lines, &mut vocab).unwrap();
        let (pairs, ngrams) = train(&corpus, 3, None);
        for s in &corpus {
            for order in [Order::N(2), Order::N(3), Order::N(4), Order::Full] {
                let ringed = approx_score(s, order, &pairs, &ngrams);
                let direct = approx_score_direct(s, order, &pairs, &ngrams);
                assert_eq!(ringed, direct, "sentence {s:?} order {order}");
            }
        }
    }

    #[test]
    fn window_minimum_is_monotone_under_extension() {
        let probs = RandomProbs::new(9, 8, 10, false);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let len = rng.gen_range(3..=10);
            let window: Vec<TokenId> = (0..len).map(|_| t(rng.gen_range(0..8))).collect();
            let whole = pair_min(&window, &probs);
            for start in 0..len - 1 {
                for end in start + 2..=len {
                    if end - start >= 2 {
                        assert!(whole <= pair_min(&window[start..end], &probs));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_denominator_kills_the_score() {
        let (_, _, pairs, mut ngrams) = tables_for("a b\n", 2);
        // A word unseen in unigram terms: simulate by scoring tokens
        // outside the trained vocabulary with a floored pair table.
        let mut floored = pairs.clone();
        floored.set_floor(1e-6);
        ngrams.set_floor(0.0);
        let s = Sentence::new(vec![t(9), t(8)]);
        let got = approx_score(&s, Order::N(2), &floored, &ngrams);
        assert!(got.score.is_zero());
    }
}
