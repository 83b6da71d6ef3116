//! Directed-pair and k-gram count tables with relative-frequency probabilities.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::corpus::{Sentence, TokenId};

/// A directed word pair `(left, right)` observed `distance` positions apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub left: TokenId,
    pub right: TokenId,
    /// Positional offset j−i; distance 1 means adjacency.
    pub distance: u32,
}

impl PairKey {
    pub fn new(left: TokenId, right: TokenId, distance: u32) -> Self {
        debug_assert!(distance >= 1);
        PairKey {
            left,
            right,
            distance,
        }
    }
}

/// Source of directed pair probabilities.
///
/// Abstracting the lookup lets tests instrument how many lookups the
/// ring structure performs per shift.
pub trait PairProbs {
    fn pair_prob(&self, left: TokenId, right: TokenId, distance: u32) -> f64;
}

/// Counts and probabilities of directed word pairs with distance.
///
/// Probabilities are relative frequencies against the global pair total,
/// so that minima over pairs of different distances share one scale.
/// Unseen pairs get the configurable `floor` (0 by default).
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    counts: BTreeMap<PairKey, u64>,
    total_pairs: u64,
    max_distance: u32,
    floor: f64,
}

impl Default for PairTable {
    fn default() -> Self {
        PairTable {
            counts: BTreeMap::new(),
            total_pairs: 0,
            max_distance: 0,
            floor: 0.0,
        }
    }
}

impl PairTable {
    pub fn new() -> Self {
        PairTable::default()
    }

    /// Rebuild a table from `(key, count)` rows; totals are recomputed.
    /// Returns `None` on a duplicate key or a zero count.
    pub fn from_counts<I>(rows: I) -> Option<Self>
    where
        I: IntoIterator<Item = (PairKey, u64)>,
    {
        let mut table = PairTable::new();
        for (key, count) in rows {
            if count == 0 || table.counts.insert(key, count).is_some() {
                return None;
            }
            table.total_pairs += count;
            table.max_distance = table.max_distance.max(key.distance);
        }
        Some(table)
    }

    fn add(&mut self, key: PairKey) {
        *self.counts.entry(key).or_insert(0) += 1;
        self.total_pairs += 1;
        self.max_distance = self.max_distance.max(key.distance);
    }

    pub fn count(&self, key: &PairKey) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn total_pairs(&self) -> u64 {
        self.total_pairs
    }

    pub fn max_distance(&self) -> u32 {
        self.max_distance
    }

    /// Number of distinct stored pair keys.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Probability assigned to unseen pairs (a runtime knob, not persisted).
    pub fn set_floor(&mut self, floor: f64) {
        assert!((0.0..=1.0).contains(&floor));
        self.floor = floor;
    }

    /// Stored rows in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&PairKey, u64)> {
        self.counts.iter().map(|(k, &c)| (k, c))
    }

    /// Fold another table's counts into this one by addition. Counting
    /// is associative and commutative, so partitioned training merges to
    /// the same table as a single pass.
    pub fn absorb(&mut self, other: PairTable) {
        for (key, count) in other.counts {
            *self.counts.entry(key).or_insert(0) += count;
        }
        self.total_pairs += other.total_pairs;
        self.max_distance = self.max_distance.max(other.max_distance);
    }
}

impl PairProbs for PairTable {
    fn pair_prob(&self, left: TokenId, right: TokenId, distance: u32) -> f64 {
        match self.counts.get(&PairKey::new(left, right, distance)) {
            Some(&c) => c as f64 / self.total_pairs as f64,
            None => self.floor,
        }
    }
}

/// Exact k-gram count tables for k = 1..=order.
///
/// Alongside the raw window counts, each context length keeps the count
/// of windows that have a following token, which is the denominator that
/// makes conditional probabilities sum to one over continuations. The
/// context counts are derived from the gram counts, so only the gram
/// counts need to be persisted.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramTables {
    order: usize,
    /// `grams[k-1]`: count of each k-token window.
    grams: Vec<BTreeMap<Vec<TokenId>, u64>>,
    /// `contexts[c-1]`: for each c-token sequence, the number of
    /// (c+1)-windows it prefixes (its occurrences that have a follower).
    contexts: Vec<BTreeMap<Vec<TokenId>, u64>>,
    token_total: u64,
    floor: f64,
}

impl NGramTables {
    fn empty(order: usize) -> Self {
        NGramTables {
            order,
            grams: (0..order).map(|_| BTreeMap::new()).collect(),
            contexts: (0..order.saturating_sub(1)).map(|_| BTreeMap::new()).collect(),
            token_total: 0,
            floor: 0.0,
        }
    }

    /// Rebuild tables from `(gram, count)` rows; the order is the largest
    /// gram length present and context counts are re-derived. Returns
    /// `None` on an empty gram, a duplicate, or a zero count.
    pub fn from_counts<I>(rows: I) -> Option<Self>
    where
        I: IntoIterator<Item = (Vec<TokenId>, u64)>,
    {
        let mut by_len: BTreeMap<usize, BTreeMap<Vec<TokenId>, u64>> = BTreeMap::new();
        let mut order = 0;
        for (gram, count) in rows {
            if gram.is_empty() || count == 0 {
                return None;
            }
            order = order.max(gram.len());
            if by_len.entry(gram.len()).or_default().insert(gram, count).is_some() {
                return None;
            }
        }
        let mut tables = NGramTables::empty(order);
        for (len, map) in by_len {
            tables.grams[len - 1] = map;
        }
        tables.token_total = tables.grams.first().map_or(0, |m| m.values().sum());
        tables.derive_contexts();
        Some(tables)
    }

    fn derive_contexts(&mut self) {
        for k in 2..=self.order {
            let mut ctx: BTreeMap<Vec<TokenId>, u64> = BTreeMap::new();
            for (gram, &count) in &self.grams[k - 1] {
                *ctx.entry(gram[..k - 1].to_vec()).or_insert(0) += count;
            }
            self.contexts[k - 2] = ctx;
        }
    }

    /// Largest counted window width n.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Total padded tokens counted (sum of unigram counts).
    pub fn token_total(&self) -> u64 {
        self.token_total
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Probability assigned to unseen continuations of a seen context.
    pub fn set_floor(&mut self, floor: f64) {
        assert!((0.0..=1.0).contains(&floor));
        self.floor = floor;
    }

    /// Count of a specific k-gram window.
    pub fn gram_count(&self, gram: &[TokenId]) -> u64 {
        match self.grams.get(gram.len().wrapping_sub(1)) {
            Some(map) => map.get(gram).copied().unwrap_or(0),
            None => 0,
        }
    }

    /// Number of distinct stored k-grams of the given length.
    pub fn distinct(&self, k: usize) -> usize {
        self.grams.get(k.wrapping_sub(1)).map_or(0, BTreeMap::len)
    }

    /// Stored `(gram, count)` rows of length k, in lexicographic id order.
    pub fn iter_k(&self, k: usize) -> impl Iterator<Item = (&[TokenId], u64)> {
        self.grams
            .get(k.wrapping_sub(1))
            .into_iter()
            .flat_map(|m| m.iter().map(|(g, &c)| (g.as_slice(), c)))
    }

    /// Fold another table of the same order into this one by addition.
    pub fn absorb(&mut self, other: NGramTables) {
        assert_eq!(self.order, other.order, "orders must match to merge");
        for (k, map) in other.grams.into_iter().enumerate() {
            for (gram, count) in map {
                *self.grams[k].entry(gram).or_insert(0) += count;
            }
        }
        for (c, map) in other.contexts.into_iter().enumerate() {
            for (ctx, count) in map {
                *self.contexts[c].entry(ctx).or_insert(0) += count;
            }
        }
        self.token_total += other.token_total;
    }

    /// Conditional probability of `w` after `context`.
    ///
    /// An empty context means the unigram probability `count(w) / token_total`.
    /// For a non-empty context the denominator is the number of times the
    /// context was followed by any token, so an occurrence flush against a
    /// sentence end does not count. Unseen continuations of a seen context
    /// get the floor; an unseen context gets 0.
    pub fn cond_prob(&self, context: &[TokenId], w: TokenId) -> f64 {
        let k = context.len() + 1;
        debug_assert!(k <= self.order, "context longer than trained order");
        if k > self.order {
            return 0.0;
        }
        if context.is_empty() {
            if self.token_total == 0 {
                return 0.0;
            }
            return match self.grams[0].get(&alloc::vec![w]) {
                Some(&c) => c as f64 / self.token_total as f64,
                None => self.floor,
            };
        }
        let ctx_count = match self.contexts[context.len() - 1].get(context) {
            Some(&c) => c,
            None => return 0.0,
        };
        let mut gram = Vec::with_capacity(k);
        gram.extend_from_slice(context);
        gram.push(w);
        match self.grams[k - 1].get(&gram) {
            Some(&c) => c as f64 / ctx_count as f64,
            None => self.floor,
        }
    }
}

/// All ordered index pairs of a padded sentence as directed pair keys,
/// in row-major `(i, then j)` order: exactly (m+1)(m+2)/2 keys.
pub fn extract_pairs(padded: &[TokenId]) -> Vec<PairKey> {
    debug_assert!(padded.len() >= 2);
    let mut keys = Vec::with_capacity(padded.len() * (padded.len() - 1) / 2);
    for i in 0..padded.len() {
        for j in i + 1..padded.len() {
            keys.push(PairKey::new(padded[i], padded[j], (j - i) as u32));
        }
    }
    keys
}

/// Train the pair table and the k-gram tables over a corpus.
///
/// Every sentence is padded with boundary markers before counting. Pairs
/// beyond `distance_cap` are dropped when a cap is given; n-gram windows
/// are counted for every k in 1..=order.
pub fn train(
    corpus: &[Sentence],
    order: usize,
    distance_cap: Option<u32>,
) -> (PairTable, NGramTables) {
    assert!(order >= 2, "model order must be at least 2");
    if let Some(cap) = distance_cap {
        assert!(cap >= 1, "distance cap must be at least 1");
    }
    let mut pairs = PairTable::new();
    let mut ngrams = NGramTables::empty(order);
    for sentence in corpus {
        let padded = sentence.pad();
        for key in extract_pairs(&padded) {
            if distance_cap.is_none_or(|cap| key.distance <= cap) {
                pairs.add(key);
            }
        }
        for k in 1..=order {
            if padded.len() < k {
                break;
            }
            for window in padded.windows(k) {
                *ngrams.grams[k - 1].entry(window.to_vec()).or_insert(0) += 1;
            }
        }
        ngrams.token_total += padded.len() as u64;
    }
    ngrams.derive_contexts();
    (pairs, ngrams)
}
