//! Code patterns and compression scores.

use serde::{Deserialize, Serialize};

use super::Alignment;
use crate::coding::{CodeScheme, CodingError};
use crate::pattern::SymbolKind;

/// The encoding of an alignment plus New symbols left unmatched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodePattern {
    /// Marks of single-symbol Old columns, in column order.
    pub code: Vec<String>,
    /// Positions in New of single-symbol New columns.
    pub residue: Vec<usize>,
}

/// Which unmatched Old symbols enter the code pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CodeRule {
    /// Every Old symbol alone in its column.
    #[default]
    AllUnmatched,
    /// Only boundary and identification symbols alone in their column;
    /// unmatched content symbols are inferences and cost nothing.
    IdentifiersOnly,
}

impl CodeRule {
    fn admits(self, kind: SymbolKind) -> bool {
        match self {
            CodeRule::AllUnmatched => true,
            CodeRule::IdentifiersOnly => kind.is_id(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentScore {
    pub b_n: f64,
    pub b_e: f64,
    pub cd: f64,
    /// `B_N / B_E`, absent when `B_E` is zero.
    pub cr: Option<f64>,
    pub new_hits: usize,
    pub hit_columns: usize,
}

pub fn derive_code_pattern(a: &Alignment) -> CodePattern {
    derive_code_pattern_with(a, CodeRule::AllUnmatched)
}

pub fn derive_code_pattern_with(a: &Alignment, rule: CodeRule) -> CodePattern {
    let mut code = Vec::new();
    let mut residue = Vec::new();
    for col in &a.columns {
        if let [cell] = col.as_slice() {
            if cell.0 == 0 {
                residue.push(cell.1);
            } else if rule.admits(a.symbol(*cell).kind) {
                code.push(a.symbol(*cell).mark.clone());
            }
        }
    }
    CodePattern { code, residue }
}

pub fn score_alignment(a: &Alignment, scheme: &CodeScheme) -> Result<AlignmentScore, CodingError> {
    score_alignment_with(a, scheme, CodeRule::AllUnmatched)
}

pub fn score_alignment_with(
    a: &Alignment,
    scheme: &CodeScheme,
    rule: CodeRule,
) -> Result<AlignmentScore, CodingError> {
    let cost = |mark: &str| {
        scheme
            .code_size(mark)
            .ok_or_else(|| CodingError::UnknownMark(mark.to_string()))
    };
    let mut b_n = 0.0;
    let mut b_e = 0.0;
    let mut new_hits = 0;
    let mut hit_columns = 0;
    for col in &a.columns {
        if col.len() > 1 {
            hit_columns += 1;
            if col[0].0 == 0 {
                new_hits += 1;
                b_n += cost(&a.symbol(col[0]).mark)?;
            }
        } else if col[0].0 != 0 && rule.admits(a.symbol(col[0]).kind) {
            b_e += cost(&a.symbol(col[0]).mark)?;
        }
    }
    Ok(AlignmentScore {
        b_n,
        b_e,
        cd: b_n - b_e,
        cr: (b_e > 0.0).then(|| b_n / b_e),
        new_hits,
        hit_columns,
    })
}
