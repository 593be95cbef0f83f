//! Old symbols that an alignment adds to its New pattern.

use serde::{Deserialize, Serialize};

use super::Alignment;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inference {
    pub mark: String,
    /// Row of the first Old symbol in the column.
    pub row: usize,
    pub column: usize,
}

/// Content symbols of Old rows in columns without a New symbol.
pub fn extract_inferences(a: &Alignment) -> Vec<Inference> {
    extract_inferences_with(a, false)
}

/// As [`extract_inferences`], optionally keeping boundary and
/// identification symbols.
pub fn extract_inferences_with(a: &Alignment, include_id: bool) -> Vec<Inference> {
    a.columns
        .iter()
        .enumerate()
        .filter(|(_, col)| col[0].0 != 0)
        .filter_map(|(column, col)| {
            let sym = a.symbol(col[0]);
            (include_id || !sym.kind.is_id()).then(|| Inference {
                mark: sym.mark.clone(),
                row: col[0].0,
                column,
            })
        })
        .collect()
}
