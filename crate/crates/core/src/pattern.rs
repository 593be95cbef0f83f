//! Symbols, patterns, corpora and the line-oriented pattern file format.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Syntactic category of a symbol, derived from its mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    Content,
    Identification,
    Boundary,
}

impl SymbolKind {
    /// True for identification and boundary symbols.
    pub fn is_id(self) -> bool {
        !matches!(self, SymbolKind::Content)
    }
}

/// Maps marks to kinds.
///
/// `<` and `>` are boundaries; marks starting with `%` or `#`, all-digit
/// marks and any mark in `extra_id_marks` are identification; everything
/// else is content.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classifier {
    pub extra_id_marks: BTreeSet<String>,
}

impl Classifier {
    pub fn with_id_marks<I, S>(marks: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Classifier {
            extra_id_marks: marks.into_iter().map(Into::into).collect(),
        }
    }

    pub fn classify(&self, mark: &str) -> SymbolKind {
        if mark == "<" || mark == ">" {
            SymbolKind::Boundary
        } else if mark.starts_with('%')
            || mark.starts_with('#')
            || (!mark.is_empty() && mark.bytes().all(|b| b.is_ascii_digit()))
            || self.extra_id_marks.contains(mark)
        {
            SymbolKind::Identification
        } else {
            SymbolKind::Content
        }
    }
}

/// One atomic mark together with its kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub mark: String,
    pub kind: SymbolKind,
}

impl Symbol {
    /// Builds a symbol using the default classifier.
    pub fn new(mark: impl Into<String>) -> Self {
        let mark = mark.into();
        let kind = Classifier::default().classify(&mark);
        Symbol { mark, kind }
    }

    pub fn with_classifier(mark: impl Into<String>, classifier: &Classifier) -> Self {
        let mark = mark.into();
        let kind = classifier.classify(&mark);
        Symbol { mark, kind }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mark)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    New,
    Old,
}

/// An ordered sequence of symbols with a notional frequency.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pub symbols: Vec<Symbol>,
    pub frequency: u64,
    pub role: Role,
}

impl Pattern {
    pub fn new(symbols: Vec<Symbol>, frequency: u64, role: Role) -> Self {
        Pattern {
            symbols,
            frequency,
            role,
        }
    }

    /// Parses whitespace-separated marks with the default classifier.
    pub fn from_marks(text: &str, role: Role) -> Self {
        let symbols = text.split_whitespace().map(Symbol::new).collect();
        Pattern::new(symbols, 1, role)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn marks(&self) -> Vec<&str> {
        self.symbols.iter().map(|s| s.mark.as_str()).collect()
    }

    /// The marks joined by single spaces.
    pub fn text(&self) -> String {
        self.marks().join(" ")
    }

    pub fn content_len(&self) -> usize {
        self.symbols
            .iter()
            .filter(|s| s.kind == SymbolKind::Content)
            .count()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// An ordered collection of New patterns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    new_patterns: Vec<Pattern>,
}

impl Corpus {
    /// Builds a corpus, forcing every member to role New.
    pub fn new(patterns: Vec<Pattern>) -> Self {
        let new_patterns = patterns
            .into_iter()
            .map(|mut p| {
                p.role = Role::New;
                p
            })
            .collect();
        Corpus { new_patterns }
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.new_patterns
    }

    pub fn len(&self) -> usize {
        self.new_patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_patterns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: empty pattern")]
    EmptyPattern { line: usize },
    #[error("line {line}: frequency must be a positive integer, got `{token}`")]
    BadFrequency { line: usize, token: String },
}

impl FormatError {
    pub fn line(&self) -> usize {
        match self {
            FormatError::EmptyPattern { line } | FormatError::BadFrequency { line, .. } => *line,
        }
    }
}

/// Parses a pattern document with the default classifier.
pub fn parse_pattern_file(text: &str, role: Role) -> Result<Vec<Pattern>, FormatError> {
    parse_pattern_file_with(text, role, &Classifier::default())
}

pub fn parse_pattern_file_with(
    text: &str,
    role: Role,
    classifier: &Classifier,
) -> Result<Vec<Pattern>, FormatError> {
    let mut patterns = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let mut tokens = trimmed.split([' ', '\t']).filter(|t| !t.is_empty()).peekable();
        let mut frequency = 1;
        if let Some(first) = tokens.peek() {
            if let Some(num) = first.strip_prefix('@') {
                frequency = match num.parse::<u64>() {
                    Ok(n) if n > 0 => n,
                    _ => {
                        return Err(FormatError::BadFrequency {
                            line,
                            token: first.to_string(),
                        })
                    }
                };
                tokens.next();
            }
        }
        let symbols: Vec<Symbol> = tokens
            .map(|t| Symbol::with_classifier(t, classifier))
            .collect();
        if symbols.is_empty() {
            return Err(FormatError::EmptyPattern { line });
        }
        patterns.push(Pattern::new(symbols, frequency, role));
    }
    Ok(patterns)
}

pub fn serialize_pattern_file(patterns: &[Pattern]) -> String {
    let mut out = String::new();
    for p in patterns {
        if p.frequency > 1 {
            out.push_str(&format!("@{} ", p.frequency));
        }
        out.push_str(&p.text());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyPattern,
    NonPositiveFrequency,
    EmptyMark { position: usize },
    WhitespaceInMark { position: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyPattern => f.write_str("empty pattern"),
            Violation::NonPositiveFrequency => f.write_str("non-positive frequency"),
            Violation::EmptyMark { position } => write!(f, "empty mark at position {position}"),
            Violation::WhitespaceInMark { position } => {
                write!(f, "whitespace in mark at position {position}")
            }
        }
    }
}

/// Reports every invariant violation of `p`; an empty list means valid.
pub fn validate_pattern(p: &Pattern) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.symbols.is_empty() {
        out.push(Violation::EmptyPattern);
    }
    if p.frequency == 0 {
        out.push(Violation::NonPositiveFrequency);
    }
    for (position, s) in p.symbols.iter().enumerate() {
        if s.mark.is_empty() {
            out.push(Violation::EmptyMark { position });
        } else if s.mark.chars().any(char::is_whitespace) {
            out.push(Violation::WhitespaceInMark { position });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_conventions() {
        let c = Classifier::default();
        assert_eq!(c.classify("<"), SymbolKind::Boundary);
        assert_eq!(c.classify(">"), SymbolKind::Boundary);
        assert_eq!(c.classify("%1"), SymbolKind::Identification);
        assert_eq!(c.classify("#NP"), SymbolKind::Identification);
        assert_eq!(c.classify("42"), SymbolKind::Identification);
        assert_eq!(c.classify("NP"), SymbolKind::Content);
        assert_eq!(c.classify("a1"), SymbolKind::Content);
        let c = Classifier::with_id_marks(["NP"]);
        assert_eq!(c.classify("NP"), SymbolKind::Identification);
    }

    #[test]
    fn parses_sentence() {
        let ps = parse_pattern_file("t w o k i t t e n s p l a y", Role::New).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].len(), 14);
        assert_eq!(ps[0].frequency, 1);
    }

    #[test]
    fn parses_frequency_prefix() {
        let ps = parse_pattern_file("@3 a b", Role::Old).unwrap();
        assert_eq!(ps[0].marks(), vec!["a", "b"]);
        assert_eq!(ps[0].frequency, 3);
    }

    #[test]
    fn skips_comments_and_blanks() {
        let ps = parse_pattern_file("; comment\n\nj o h n r u n s", Role::New).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].len(), 8);
    }

    #[test]
    fn tabs_and_runs_of_spaces_split_tokens() {
        let ps = parse_pattern_file("a\t b   c", Role::New).unwrap();
        assert_eq!(ps[0].marks(), vec!["a", "b", "c"]);
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let err = parse_pattern_file("a b\n@2\n", Role::Old).unwrap_err();
        assert_eq!(err, FormatError::EmptyPattern { line: 2 });
        let err = parse_pattern_file("\n\n@0 a", Role::Old).unwrap_err();
        assert_eq!(err.line(), 3);
        assert!(matches!(err, FormatError::BadFrequency { .. }));
        let err = parse_pattern_file("@-2 a", Role::Old).unwrap_err();
        assert!(matches!(err, FormatError::BadFrequency { line: 1, .. }));
    }

    #[test]
    fn serializes_minimal_form() {
        let p = Pattern::from_marks("a b", Role::Old);
        assert_eq!(serialize_pattern_file(&[p]), "a b\n");
        let mut p = Pattern::from_marks("a", Role::Old);
        p.frequency = 2;
        assert_eq!(serialize_pattern_file(&[p]), "@2 a\n");
    }

    #[test]
    fn validation_reports_each_violation() {
        let ok = Pattern::from_marks("a b", Role::Old);
        assert!(validate_pattern(&ok).is_empty());
        let empty = Pattern::new(vec![], 0, Role::Old);
        let v = validate_pattern(&empty);
        assert_eq!(
            v,
            vec![Violation::EmptyPattern, Violation::NonPositiveFrequency]
        );
        assert_eq!(v[0].to_string(), "empty pattern");
        assert_eq!(v[1].to_string(), "non-positive frequency");
    }

    #[test]
    fn marks_compare_exactly() {
        assert_ne!(Symbol::new("A"), Symbol::new("a"));
        assert_ne!(Symbol::new("é"), Symbol::new("e\u{301}"));
    }
}
