//! Production: recovering a surface pattern from a code pattern.

use thiserror::Error;

use super::build::{build_alignments, BuildConfig, BuildError, Ranking};
use super::score::{derive_code_pattern, CodePattern};
use super::{Alignment, ScoredAlignment};
use crate::grammar::Grammar;
use crate::pattern::{Pattern, Role, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("code pattern is empty")]
    EmptyCode,
    #[error("no alignment accounts for every code symbol")]
    NoAlignment,
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// The best-CD alignment matching every New symbol, with its code pattern.
/// Such an encoding leaves no residue, so decoding it recovers `new`.
pub fn encode_pattern(
    new: &Pattern,
    grammar: &Grammar,
    config: &BuildConfig,
) -> Result<Option<(ScoredAlignment, CodePattern)>, BuildError> {
    let result = build_alignments(new, grammar, config)?;
    let best = result
        .nodes
        .iter()
        .filter(|s| s.score.new_hits == new.len() && s.alignment.old_rows_connected())
        .max_by(|x, y| {
            x.score
                .cd
                .partial_cmp(&y.score.cd)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(y.alignment.id.cmp(&x.alignment.id))
        });
    Ok(best.map(|s| (s.clone(), derive_code_pattern(&s.alignment))))
}

/// True when two Old content symbols share a column, so that one of them
/// would be lost from the output.
fn unifies_content(a: &Alignment) -> bool {
    a.columns
        .iter()
        .any(|col| col.len() > 1 && col[0].0 != 0 && a.symbol(col[0]).kind == SymbolKind::Content)
}

/// Aligns `code` as a New pattern and reads off the unmatched Old content
/// symbols of the best-CD alignment that matches every code symbol and
/// keeps Old content symbols apart. When the beam finds no such alignment
/// the search is repeated with twice, then four times the beam width.
pub fn decode_code_pattern<S: AsRef<str>>(
    code: &[S],
    grammar: &Grammar,
    config: &BuildConfig,
) -> Result<Pattern, DecodeError> {
    if code.is_empty() {
        return Err(DecodeError::EmptyCode);
    }
    let new = Pattern::new(
        code.iter().map(|m| Symbol::new(m.as_ref())).collect(),
        1,
        Role::New,
    );
    for factor in [1, 2, 4] {
        let config = BuildConfig {
            ranking: Ranking::Coverage,
            beam_width: config.beam_width * factor,
            ..config.clone()
        };
        if let Some(p) = decode_once(&new, grammar, &config)? {
            return Ok(p);
        }
    }
    Err(DecodeError::NoAlignment)
}

fn decode_once(new: &Pattern, grammar: &Grammar, config: &BuildConfig) -> Result<Option<Pattern>, BuildError> {
    let result = build_alignments(new, grammar, config)?;
    let best = result
        .nodes
        .iter()
        .filter(|s| s.score.new_hits == new.len() && s.alignment.old_rows_connected())
        .filter(|s| !unifies_content(&s.alignment))
        .max_by(|x, y| {
            x.score
                .cd
                .partial_cmp(&y.score.cd)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(y.alignment.id.cmp(&x.alignment.id))
        });
    let Some(best) = best else {
        return Ok(None);
    };
    let a = &best.alignment;
    let symbols: Vec<Symbol> = a
        .columns
        .iter()
        .filter(|col| col.len() == 1 && col[0].0 != 0)
        .map(|col| a.symbol(col[0]).clone())
        .filter(|s| s.kind == SymbolKind::Content)
        .collect();
    Ok((!symbols.is_empty()).then(|| Pattern::new(symbols, 1, Role::New)))
}
