//! Multiple alignment of symbol patterns driven by information compression.
//!
//! A New pattern is aligned against a grammar of Old patterns; the
//! alignment that encodes the New pattern most economically is its parse.
//! The same machinery yields probabilities over alternative alignments,
//! inferences, production by decoding, and grammar induction by minimum
//! description length.

pub mod alignment;
pub mod cli;
pub mod coding;
pub mod fixtures;
pub mod grammar;
pub mod learning;
pub mod matcher;
pub mod pattern;

pub use grammar::Grammar;
pub use pattern::{Corpus, Pattern, Role, Symbol, SymbolKind};
