//! Error type shared by the core modules.

use core::fmt;

/// Errors raised by corpus parsing, scoring, and search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The reserved boundary marker `*` appeared as a corpus token.
    ReservedToken { line: usize },
    /// A model order below the minimum of 2 was requested.
    OrderTooSmall { order: usize },
    /// The requested exact-model order exceeds the trained table order.
    OrderExceedsTables { requested: usize, trained: usize },
    /// The exact Markov model has no full-sentence-window order.
    ExactFullOrder,
    /// Every search path reached probability zero at the given level.
    NoArrangement { level: usize },
    /// The bag is too large for exhaustive permutation enumeration.
    BagTooLarge { total: usize, cap: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ReservedToken { line } => {
                write!(f, "line {line}: reserved marker token `*` in corpus text")
            }
            Error::OrderTooSmall { order } => {
                write!(f, "model order must be at least 2, got {order}")
            }
            Error::OrderExceedsTables { requested, trained } => {
                write!(
                    f,
                    "requested order {requested} exceeds trained table order {trained}"
                )
            }
            Error::ExactFullOrder => {
                write!(f, "the exact Markov model requires a finite order")
            }
            Error::NoArrangement { level } => {
                write!(f, "all arrangements reached probability zero at level {level}")
            }
            Error::BagTooLarge { total, cap } => {
                write!(
                    f,
                    "bag of {total} words exceeds the brute-force cap of {cap}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
