//! Absolute and relative probabilities over a reference set of alignments.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::compose::normalize;
use super::score::{score_alignment_with, CodeRule};
use super::{Alignment, Row, ScoredAlignment};
use crate::coding::{CodeScheme, CodingError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbabilityMember {
    /// Id of the candidate this member was derived from.
    pub id: usize,
    pub b_e: f64,
    pub p_abs: f64,
    pub p_rel: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbabilityReport {
    pub reference: usize,
    /// New positions matched by the reference alignment.
    pub reference_symbols: Vec<usize>,
    /// Members in descending order of `p_rel`.
    pub members: Vec<ProbabilityMember>,
    pub p_a_sum: f64,
    #[serde(skip)]
    pub edited: Vec<Alignment>,
}

fn is_subsequence(short: &[crate::pattern::Symbol], long: &[crate::pattern::Symbol]) -> bool {
    let mut it = long.iter();
    short.iter().all(|s| it.any(|l| l.mark == s.mark))
}

/// Removes Old rows whose marks all appear, in order, in another Old row.
/// Rows matched to New symbols are kept so the encoded New symbols do not
/// change.
pub fn remove_redundant_rows(a: &Alignment) -> Alignment {
    let mut current = a.clone();
    loop {
        let n = current.rows.len();
        let touches_new = |r: usize| {
            current.rows[r]
                .cells
                .iter()
                .any(|&c| current.columns[c][0].0 == 0)
        };
        let redundant = (1..n).filter(|&r| !touches_new(r)).find(|&r| {
            (1..n).any(|o| {
                o != r
                    && is_subsequence(&current.rows[r].symbols, &current.rows[o].symbols)
                    && (current.rows[r].symbols.len() < current.rows[o].symbols.len() || o < r)
            })
        });
        let Some(r) = redundant else {
            return current;
        };
        let mut remap = vec![usize::MAX; current.columns.len()];
        let mut next = 0;
        for (c, col) in current.columns.iter().enumerate() {
            if col.iter().any(|&(row, _)| row != r) {
                remap[c] = next;
                next += 1;
            }
        }
        let rows: Vec<Row> = current
            .rows
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != r)
            .map(|(_, row)| Row {
                source: row.source,
                symbols: row.symbols.clone(),
                cells: row.cells.iter().map(|&c| remap[c]).collect(),
            })
            .collect();
        let mut edited = normalize(rows, next).expect("removing a row keeps columns acyclic");
        edited.id = current.id;
        edited.stage = current.stage;
        edited.parents = current.parents;
        current = edited;
    }
}

/// Relative probabilities over the alignments that encode exactly the same
/// New symbols as the highest-CD candidate. A candidate whose Old patterns
/// include all those of a better member adds only redundant rows and is
/// left out.
pub fn alignment_probabilities(
    candidates: &[ScoredAlignment],
    scheme: &CodeScheme,
) -> Result<Option<ProbabilityReport>, CodingError> {
    alignment_probabilities_with(candidates, scheme, CodeRule::AllUnmatched)
}

pub fn alignment_probabilities_with(
    candidates: &[ScoredAlignment],
    scheme: &CodeScheme,
    rule: CodeRule,
) -> Result<Option<ProbabilityReport>, CodingError> {
    let Some(reference) = candidates.iter().reduce(|best, c| {
        if c.score.cd > best.score.cd {
            c
        } else {
            best
        }
    }) else {
        return Ok(None);
    };
    let reference_symbols = reference.alignment.new_hits();
    let mut order: Vec<&ScoredAlignment> = candidates.iter().collect();
    order.sort_by(|x, y| {
        y.score
            .cd
            .partial_cmp(&x.score.cd)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut used: Vec<BTreeSet<usize>> = Vec::new();
    let mut members = Vec::new();
    let mut edited = Vec::new();
    for c in order {
        if c.alignment.new_hits() != reference_symbols {
            continue;
        }
        let e = remove_redundant_rows(&c.alignment);
        let sources: BTreeSet<usize> = e.old_sources().into_iter().collect();
        if used.iter().any(|u| u.is_subset(&sources)) {
            continue;
        }
        used.push(sources);
        let score = score_alignment_with(&e, scheme, rule)?;
        members.push((c.alignment.id, score.b_e));
        edited.push(e);
    }
    let base = 1.0 / scheme.alphabet_size as f64;
    let log_base = base.log2();
    let min_l = members.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = members
        .iter()
        .map(|m| ((m.1 - min_l) * log_base).exp2())
        .collect();
    let total: f64 = weights.iter().sum();
    let p_a_sum: f64 = members.iter().map(|m| (m.1 * log_base).exp2()).sum();
    let mut out: Vec<(ProbabilityMember, Alignment)> = members
        .iter()
        .zip(weights)
        .zip(edited)
        .map(|((&(id, b_e), w), e)| {
            (
                ProbabilityMember {
                    id,
                    b_e,
                    p_abs: (b_e * log_base).exp2(),
                    p_rel: w / total,
                },
                e,
            )
        })
        .collect();
    out.sort_by(|x, y| {
        y.0.p_rel
            .partial_cmp(&x.0.p_rel)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.0.id.cmp(&y.0.id))
    });
    let (members, edited): (Vec<_>, Vec<_>) = out.into_iter().unzip();
    Ok(Some(ProbabilityReport {
        reference: reference.alignment.id,
        reference_symbols,
        members,
        p_a_sum,
        edited,
    }))
}

impl ProbabilityReport {
    pub fn p_rel_sum(&self) -> f64 {
        self.members.iter().map(|m| m.p_rel).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::{compose_with_pattern, AlignmentScore};
    use crate::coding::CodeOptions;
    use crate::matcher::MatchLimits;
    use crate::pattern::{Pattern, Role};

    fn scored(id: usize, b_e: f64) -> ScoredAlignment {
        let new = Pattern::from_marks("a", Role::New);
        let old = Pattern::from_marks(&format!("a k{id}"), Role::Old);
        let mut alignment = compose_with_pattern(
            &Alignment::from_new(&new),
            id,
            &old.symbols.clone().into(),
            0.5,
            &MatchLimits::default(),
            3,
        )
        .remove(0);
        alignment.id = id;
        ScoredAlignment {
            alignment,
            score: AlignmentScore {
                b_n: 10.0,
                b_e,
                cd: 10.0 - b_e,
                cr: Some(10.0 / b_e),
                new_hits: 1,
                hit_columns: 1,
            },
        }
    }

    #[test]
    fn single_member_is_certain() {
        let s = CodeScheme::from_frequencies(
            [("a".to_string(), 1), ("k0".to_string(), 15)],
            CodeOptions::default(),
        )
        .unwrap();
        let r = alignment_probabilities(&[scored(0, 1.0)], &s).unwrap().unwrap();
        assert_eq!(r.members.len(), 1);
        assert_eq!(r.members[0].p_rel, 1.0);
    }

    #[test]
    fn four_and_six_bits_split_eighty_twenty() {
        // 128 occurrences: k1 has p = 1/8, k2 has p = 1/32
        let s = CodeScheme::from_frequencies(
            [
                ("a".to_string(), 32),
                ("k1".to_string(), 16),
                ("k2".to_string(), 4),
                ("z".to_string(), 76),
            ],
            CodeOptions::default(),
        )
        .unwrap();
        assert_eq!(s.code_size("k1"), Some(4.0));
        assert_eq!(s.code_size("k2"), Some(6.0));
        let r = alignment_probabilities(&[scored(1, 4.0), scored(2, 6.0)], &s)
            .unwrap()
            .unwrap();
        let hand = [2f64.powi(-4) / (2f64.powi(-4) + 2f64.powi(-6)), 2f64.powi(-6) / (2f64.powi(-4) + 2f64.powi(-6))];
        assert!((r.members[0].p_rel - hand[0]).abs() < 1e-12);
        assert!((r.members[1].p_rel - hand[1]).abs() < 1e-12);
        assert!((r.members[0].p_rel - 0.8).abs() < 1e-12);
        assert!((r.p_rel_sum() - 1.0).abs() < 1e-12);
        assert!((r.p_a_sum - (2f64.powi(-4) + 2f64.powi(-6))).abs() < 1e-15);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let new = Pattern::from_marks("a", Role::New);
        let base = compose_with_pattern(
            &Alignment::from_new(&new),
            0,
            &Pattern::from_marks("x a y z", Role::Old).symbols.into(),
            0.5,
            &MatchLimits::default(),
            3,
        )
        .remove(0);
        let both = compose_with_pattern(
            &base,
            1,
            &Pattern::from_marks("x y", Role::Old).symbols.into(),
            0.5,
            &MatchLimits::default(),
            3,
        )
        .remove(0);
        assert_eq!(both.rows.len(), 3);
        let edited = remove_redundant_rows(&both);
        assert_eq!(edited.rows.len(), 2);
        assert!(crate::alignment::validate_alignment(&edited).is_empty());
        assert_eq!(edited.structure_key(), base.structure_key());
    }
}
