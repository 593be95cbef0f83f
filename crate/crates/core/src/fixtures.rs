//! Bundled demonstration inputs.

use crate::grammar::Grammar;
use crate::pattern::{parse_pattern_file, Classifier, Corpus, Pattern, Role};

pub const KITTENS_GRAMMAR: &str = include_str!("../fixtures/kittens.spg");
pub const KITTENS_SENTENCE: &str = include_str!("../fixtures/kittens.sp");
pub const KITTENS_ERROR_SENTENCE: &str = include_str!("../fixtures/kittens_errors.sp");
pub const JOHN_MARY_CORPUS: &str = include_str!("../fixtures/johnmary.sp");
pub const JOHN_MARY_HELD_OUT_CORPUS: &str = include_str!("../fixtures/johnmary_heldout.sp");
pub const JOHN_MARY_TARGET_GRAMMAR: &str = include_str!("../fixtures/johnmary_target.spg");
pub const TRANSFER_GRAMMAR: &str = include_str!("../fixtures/transfer.spg");
pub const TRANSFER_SENTENCE: &str = include_str!("../fixtures/transfer.sp");
pub const TWEETY_GRAMMAR: &str = include_str!("../fixtures/tweety.spg");

/// Marks of the bird knowledge base that act as identifiers.
pub const TWEETY_ID_MARKS: &[&str] = &["Bd", "name", "f", "Default", "P", "O"];

/// Names accepted by [`lookup`].
pub const NAMES: &[&str] = &[
    "kittens",
    "kittens-sentence",
    "kittens-errors",
    "johnmary",
    "johnmary-heldout",
    "johnmary-target",
    "transfer",
    "transfer-sentence",
    "tweety",
];

pub fn lookup(name: &str) -> Option<&'static str> {
    Some(match name {
        "kittens" => KITTENS_GRAMMAR,
        "kittens-sentence" => KITTENS_SENTENCE,
        "kittens-errors" => KITTENS_ERROR_SENTENCE,
        "johnmary" => JOHN_MARY_CORPUS,
        "johnmary-heldout" => JOHN_MARY_HELD_OUT_CORPUS,
        "johnmary-target" => JOHN_MARY_TARGET_GRAMMAR,
        "transfer" => TRANSFER_GRAMMAR,
        "transfer-sentence" => TRANSFER_SENTENCE,
        "tweety" => TWEETY_GRAMMAR,
        _ => return None,
    })
}

pub fn tweety_classifier() -> Classifier {
    Classifier::with_id_marks(TWEETY_ID_MARKS.iter().copied())
}

fn first(text: &str) -> Pattern {
    parse_pattern_file(text, Role::New).expect("bundled fixture parses")[0].clone()
}

fn corpus(text: &str) -> Corpus {
    Corpus::new(parse_pattern_file(text, Role::New).expect("bundled fixture parses"))
}

pub fn kittens_grammar() -> Grammar {
    Grammar::parse(KITTENS_GRAMMAR).expect("bundled fixture parses")
}

pub fn kittens_sentence() -> Pattern {
    first(KITTENS_SENTENCE)
}

pub fn kittens_error_sentence() -> Pattern {
    first(KITTENS_ERROR_SENTENCE)
}

pub fn john_mary_corpus() -> Corpus {
    corpus(JOHN_MARY_CORPUS)
}

pub fn john_mary_held_out_corpus() -> Corpus {
    corpus(JOHN_MARY_HELD_OUT_CORPUS)
}

pub fn john_mary_target_grammar() -> Grammar {
    Grammar::parse(JOHN_MARY_TARGET_GRAMMAR).expect("bundled fixture parses")
}

pub fn transfer_grammar() -> Grammar {
    Grammar::parse(TRANSFER_GRAMMAR).expect("bundled fixture parses")
}

pub fn transfer_sentence() -> Pattern {
    first(TRANSFER_SENTENCE)
}

pub fn tweety_grammar() -> Grammar {
    Grammar::parse_with(TWEETY_GRAMMAR, &tweety_classifier()).expect("bundled fixture parses")
}

pub fn tweety_query(text: &str) -> Pattern {
    crate::pattern::parse_pattern_file_with(text, Role::New, &tweety_classifier())
        .expect("query parses")[0]
        .clone()
}
