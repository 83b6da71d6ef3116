//! Token interning, sentences, boundary padding, and word bags.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;

/// Surface form of the reserved sentence-boundary marker.
pub const MARKER_SURFACE: &str = "*";

/// Token id of the boundary marker in every [`Vocab`].
pub const MARKER: TokenId = TokenId(0);

/// Interned token identifier. Id 0 is always the boundary marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u32);

impl TokenId {
    /// The id as a usize index.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijection between surface strings and token ids.
///
/// The marker occupies id 0 from construction; corpus words receive ids
/// in order of first appearance. After training the vocabulary is meant
/// to be frozen and shared read-only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocab {
    by_surface: BTreeMap<String, TokenId>,
    surfaces: Vec<String>,
}

impl Vocab {
    pub fn new() -> Self {
        let mut vocab = Vocab {
            by_surface: BTreeMap::new(),
            surfaces: Vec::new(),
        };
        vocab.by_surface.insert(String::from(MARKER_SURFACE), MARKER);
        vocab.surfaces.push(String::from(MARKER_SURFACE));
        vocab
    }

    /// Number of distinct tokens, marker included (the vocabulary size V).
    pub fn size(&self) -> usize {
        self.surfaces.len()
    }

    /// Intern a surface string, assigning the next free id on first sight.
    pub fn intern(&mut self, surface: &str) -> TokenId {
        if let Some(&id) = self.by_surface.get(surface) {
            return id;
        }
        let id = TokenId(self.surfaces.len() as u32);
        self.by_surface.insert(String::from(surface), id);
        self.surfaces.push(String::from(surface));
        id
    }

    /// Look up an already-interned surface string.
    pub fn get(&self, surface: &str) -> Option<TokenId> {
        self.by_surface.get(surface).copied()
    }

    /// Surface string for an id.
    pub fn surface(&self, id: TokenId) -> Option<&str> {
        self.surfaces.get(id.index()).map(String::as_str)
    }

    /// Iterate `(id, surface)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TokenId, &str)> {
        self.surfaces
            .iter()
            .enumerate()
            .map(|(i, s)| (TokenId(i as u32), s.as_str()))
    }

    /// Rebuild a vocabulary from surfaces listed in id order.
    ///
    /// Row 0 must be the marker; later rows must be distinct non-marker
    /// surfaces. Used when loading a persisted vocabulary file.
    pub fn from_surfaces<I, S>(surfaces: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocab {
            by_surface: BTreeMap::new(),
            surfaces: Vec::new(),
        };
        for (i, s) in surfaces.into_iter().enumerate() {
            let s = s.as_ref();
            if (i == 0) != (s == MARKER_SURFACE) {
                return None;
            }
            let id = TokenId(i as u32);
            if vocab.by_surface.insert(String::from(s), id).is_some() {
                return None;
            }
            vocab.surfaces.push(String::from(s));
        }
        if vocab.surfaces.is_empty() {
            return None;
        }
        Some(vocab)
    }
}

/// A marker-free token sequence of `m` words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sentence {
    tokens: Vec<TokenId>,
}

impl Sentence {
    /// Wrap a token sequence. The marker id must not appear in it.
    pub fn new(tokens: Vec<TokenId>) -> Self {
        assert!(
            tokens.iter().all(|&t| t != MARKER),
            "marker id inside a sentence"
        );
        Sentence { tokens }
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    /// Word count m.
    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }

    /// The padded form `[*, w1, .., wm, *]` of length m+2.
    pub fn pad(&self) -> Vec<TokenId> {
        let mut padded = Vec::with_capacity(self.tokens.len() + 2);
        padded.push(MARKER);
        padded.extend_from_slice(&self.tokens);
        padded.push(MARKER);
        padded
    }

    /// The word multiset of this sentence.
    pub fn to_bag(&self) -> Bag {
        let mut bag = Bag::new();
        for &t in &self.tokens {
            bag.insert(t);
        }
        bag
    }
}

/// Multiset of word tokens; never contains the marker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Bag {
    counts: BTreeMap<TokenId, u32>,
    total: u32,
}

impl Bag {
    pub fn new() -> Self {
        Bag::default()
    }

    /// Add one occurrence of a word.
    pub fn insert(&mut self, id: TokenId) {
        assert!(id != MARKER, "marker id inside a bag");
        *self.counts.entry(id).or_insert(0) += 1;
        self.total += 1;
    }

    /// Remove one occurrence; returns false if the word is absent.
    pub fn remove(&mut self, id: TokenId) -> bool {
        match self.counts.get_mut(&id) {
            Some(c) if *c > 1 => {
                *c -= 1;
                self.total -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(&id);
                self.total -= 1;
                true
            }
            None => false,
        }
    }

    pub fn count(&self, id: TokenId) -> u32 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    /// Total word count (with multiplicity).
    pub fn total(&self) -> usize {
        self.total as usize
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Distinct words and their counts, in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TokenId, u32)> + '_ {
        self.counts.iter().map(|(&id, &c)| (id, c))
    }
}

/// Parse pre-tokenized corpus text: one sentence per line, tokens
/// separated by ASCII whitespace, interned in order of first appearance.
///
/// Empty lines are legal zero-word sentences and are retained. A literal
/// `*` token is rejected with its 1-based line number.
pub fn parse_corpus(text: &str, vocab: &mut Vocab) -> Result<Vec<Sentence>, Error> {
    let mut sentences = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut tokens = Vec::new();
        for word in line.split_ascii_whitespace() {
            if word == MARKER_SURFACE {
                return Err(Error::ReservedToken { line: idx + 1 });
            }
            tokens.push(vocab.intern(word));
        }
        sentences.push(Sentence::new(tokens));
    }
    Ok(sentences)
}
