//! Directed word-association language models and bag generation.
//!
//! This crate trains exact n-gram count tables and a table of directed
//! word pairs with distances from a tokenized corpus, scores sentences
//! under both the exact n-gram Markov model and the approximate model
//! that replaces each window probability by the minimum directed-pair
//! probability inside the window, and recovers word order from a bag of
//! words with a level-synchronous dynamic-programming search.
//!
//! The crate is `no_std` (with `alloc`); file formats, the CLI, and
//! parallel evaluation live in the companion `bagorder` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod error;
pub mod eval;
pub mod scoring;
pub mod search;
pub mod tables;

pub use corpus::{Bag, Sentence, TokenId, Vocab, MARKER, MARKER_SURFACE};
pub use error::Error;
pub use eval::{EvalReport, EvalRow, ParamReport};
pub use scoring::{LogScore, Order, Ring};
pub use search::{GenerationResult, Model, SearchConfig};
pub use tables::{NGramTables, PairKey, PairProbs, PairTable};
