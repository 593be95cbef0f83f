//! Collections of Old patterns with stable ids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{
    parse_pattern_file_with, serialize_pattern_file, validate_pattern, Classifier, FormatError,
    Pattern, Role, Violation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrammarError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("pattern {index} is invalid: {violations:?}")]
    Invalid {
        index: usize,
        violations: Vec<Violation>,
    },
    #[error("duplicate pattern id `{0}`")]
    DuplicateId(String),
}

/// An ordered set of Old patterns. Pattern `i` has id `ids[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grammar {
    patterns: Vec<Pattern>,
    ids: Vec<String>,
}

impl Grammar {
    /// Builds a grammar with ids `P1`, `P2`, ... in order.
    pub fn new(patterns: Vec<Pattern>) -> Result<Self, GrammarError> {
        let ids = (1..=patterns.len()).map(|i| format!("P{i}")).collect();
        Grammar::with_ids(patterns, ids)
    }

    pub fn with_ids(patterns: Vec<Pattern>, ids: Vec<String>) -> Result<Self, GrammarError> {
        assert_eq!(patterns.len(), ids.len(), "one id per pattern");
        let mut patterns = patterns;
        for (index, p) in patterns.iter_mut().enumerate() {
            p.role = Role::Old;
            let violations = validate_pattern(p);
            if !violations.is_empty() {
                return Err(GrammarError::Invalid { index, violations });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id) {
                return Err(GrammarError::DuplicateId(id.clone()));
            }
        }
        Ok(Grammar { patterns, ids })
    }

    pub fn empty() -> Self {
        Grammar {
            patterns: Vec::new(),
            ids: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        Grammar::parse_with(text, &Classifier::default())
    }

    pub fn parse_with(text: &str, classifier: &Classifier) -> Result<Self, GrammarError> {
        Grammar::new(parse_pattern_file_with(text, Role::Old, classifier)?)
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn pattern(&self, index: usize) -> &Pattern {
        &self.patterns[index]
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn set_frequency(&mut self, index: usize, frequency: u64) {
        self.patterns[index].frequency = frequency.max(1);
    }

    pub fn to_text(&self) -> String {
        serialize_pattern_file(&self.patterns)
    }
}
