//! Pattern and symbol-type frequencies over alignment sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alignment::{Alignment, RowSource};

/// Frequencies summed over subsets, each subset contributing the largest
/// count found in any of its alignments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    /// Grammar index to `f_i`.
    pub pattern_freq: BTreeMap<usize, u64>,
    /// Mark of an Old-row symbol to `F_i`.
    pub type_freq: BTreeMap<String, u64>,
    /// Number of subsets, one per New pattern.
    pub subsets: usize,
}

pub fn compute_grammar_frequencies(subsets: &[Vec<&Alignment>]) -> FrequencyTable {
    let mut table = FrequencyTable {
        subsets: subsets.len(),
        ..FrequencyTable::default()
    };
    for subset in subsets {
        let mut best_pattern: BTreeMap<usize, u64> = BTreeMap::new();
        let mut best_type: BTreeMap<&str, u64> = BTreeMap::new();
        for a in subset {
            let mut patterns: BTreeMap<usize, u64> = BTreeMap::new();
            let mut types: BTreeMap<&str, u64> = BTreeMap::new();
            for row in &a.rows {
                if let RowSource::Old(i) = row.source {
                    *patterns.entry(i).or_insert(0) += 1;
                    for s in row.symbols.iter() {
                        *types.entry(s.mark.as_str()).or_insert(0) += 1;
                    }
                }
            }
            for (i, n) in patterns {
                let e = best_pattern.entry(i).or_insert(0);
                *e = (*e).max(n);
            }
            for (m, n) in types {
                let e = best_type.entry(m).or_insert(0);
                *e = (*e).max(n);
            }
        }
        for (i, n) in best_pattern {
            *table.pattern_freq.entry(i).or_insert(0) += n;
        }
        for (m, n) in best_type {
            *table.type_freq.entry(m.to_string()).or_insert(0) += n;
        }
    }
    table
}
