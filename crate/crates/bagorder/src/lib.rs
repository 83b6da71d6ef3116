//! File formats, reporting, parallel evaluation, and test utilities for
//! the `bagorder-core` models.

pub mod counterexample;
pub mod io;
pub mod parallel;
pub mod report;

pub use bagorder_core as core;
