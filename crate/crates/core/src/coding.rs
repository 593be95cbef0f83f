//! Symbol-type frequencies, Shannon-Fano-Elias code sizes and bit arithmetic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::Pattern;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodingError {
    #[error("unknown mark `{0}`")]
    UnknownMark(String),
    #[error("grammar is empty")]
    EmptyGrammar,
    #[error("all symbol frequencies are zero")]
    AllZero,
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("probability {0} outside (0, 1]")]
    BadProbability(f64),
    #[error("sequence length must be at least 1")]
    EmptyLength,
    #[error("alphabet size must be at least 2")]
    BadAlphabet,
}

/// How code sizes are derived from type probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CodeMode {
    /// Integer lengths `ceil(log2(1/p)) + 1`.
    #[default]
    Sfe,
    /// Fractional lengths `-log2 p`.
    Ideal,
}

/// A non-negative quantity of information in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct BitCost(pub f64);

impl BitCost {
    pub fn bits(self) -> f64 {
        self.0
    }
}

impl Add for BitCost {
    type Output = BitCost;
    fn add(self, rhs: BitCost) -> BitCost {
        BitCost(self.0 + rhs.0)
    }
}

impl Sum for BitCost {
    fn sum<I: Iterator<Item = BitCost>>(iter: I) -> BitCost {
        BitCost(iter.map(|b| b.0).sum())
    }
}

impl fmt::Display for BitCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeOptions {
    pub mode: CodeMode,
    /// Alphabet size |A| used by the match probability p_1 = 1/|A|.
    pub alphabet_size: u32,
}

impl Default for CodeOptions {
    fn default() -> Self {
        CodeOptions {
            mode: CodeMode::Sfe,
            alphabet_size: 2,
        }
    }
}

/// Where symbol-type frequencies come from.
#[derive(Debug, Clone, Copy)]
pub enum FrequencySource<'a> {
    /// `f_st = sum_i f_i * o_i` over the grammar patterns.
    PerGrammar,
    /// `F = sum_j max over alignments in b_j of occurrences`. Each subset is a
    /// list of alignments, each alignment given as the marks of its Old rows.
    PerAlignmentSet(&'a [Vec<Vec<String>>]),
}

/// Symbol types with frequencies and code sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeScheme {
    freq: BTreeMap<String, u64>,
    size: HashMap<String, f64>,
    pub mode: CodeMode,
    pub alphabet_size: u32,
    /// Marks excluded because their computed frequency was zero.
    pub warnings: Vec<String>,
}

/// Code length for a type of probability `p`.
pub fn code_length(p: f64, mode: CodeMode) -> f64 {
    let info = -p.log2();
    match mode {
        CodeMode::Ideal => info,
        CodeMode::Sfe => (info - 1e-9).ceil().max(0.0) + 1.0,
    }
}

impl CodeScheme {
    /// Builds a scheme directly from type frequencies.
    pub fn from_frequencies(
        freqs: impl IntoIterator<Item = (String, u64)>,
        options: CodeOptions,
    ) -> Result<Self, CodingError> {
        if options.alphabet_size < 2 {
            return Err(CodingError::BadAlphabet);
        }
        let mut freq = BTreeMap::new();
        let mut warnings = Vec::new();
        for (mark, f) in freqs {
            if f == 0 {
                warnings.push(mark);
            } else {
                *freq.entry(mark).or_insert(0) += f;
            }
        }
        if freq.is_empty() {
            return Err(CodingError::AllZero);
        }
        let total: u64 = freq.values().sum();
        let size = freq
            .iter()
            .map(|(m, &f)| (m.clone(), code_length(f as f64 / total as f64, options.mode)))
            .collect();
        Ok(CodeScheme {
            freq,
            size,
            mode: options.mode,
            alphabet_size: options.alphabet_size,
            warnings,
        })
    }

    /// Match probability for one symbol, `1/|A|`.
    pub fn p1(&self) -> f64 {
        1.0 / self.alphabet_size as f64
    }

    pub fn code_size(&self, mark: &str) -> Option<f64> {
        self.size.get(mark).copied()
    }

    pub fn frequency(&self, mark: &str) -> Option<u64> {
        self.freq.get(mark).copied()
    }

    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.freq.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    /// Returns a copy with every code size multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.size.values_mut() {
            *v *= factor;
        }
        out
    }

    pub fn kraft_sum(&self) -> f64 {
        self.size.values().map(|s| (-s.ceil()).exp2()).sum()
    }
}

pub fn build_code_scheme(
    grammar: &[Pattern],
    source: FrequencySource<'_>,
    options: CodeOptions,
) -> Result<CodeScheme, CodingError> {
    if grammar.is_empty() {
        return Err(CodingError::EmptyGrammar);
    }
    let mut freqs: BTreeMap<String, u64> = BTreeMap::new();
    for p in grammar {
        for s in &p.symbols {
            freqs.entry(s.mark.clone()).or_insert(0);
        }
    }
    match source {
        FrequencySource::PerGrammar => {
            for p in grammar {
                for s in &p.symbols {
                    *freqs.get_mut(&s.mark).unwrap() += p.frequency;
                }
            }
        }
        FrequencySource::PerAlignmentSet(subsets) => {
            for subset in subsets {
                let mut best: BTreeMap<&str, u64> = BTreeMap::new();
                for alignment in subset {
                    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
                    for m in alignment {
                        *counts.entry(m.as_str()).or_insert(0) += 1;
                    }
                    for (m, c) in counts {
                        let e = best.entry(m).or_insert(0);
                        *e = (*e).max(c);
                    }
                }
                for (m, c) in best {
                    *freqs.entry(m.to_string()).or_insert(0) += c;
                }
            }
        }
    }
    CodeScheme::from_frequencies(freqs, options)
}

pub fn code_size_of_sequence<S: AsRef<str>>(
    seq: &[S],
    scheme: &CodeScheme,
) -> Result<BitCost, CodingError> {
    let mut total = 0.0;
    for m in seq {
        let m = m.as_ref();
        total += scheme
            .code_size(m)
            .ok_or_else(|| CodingError::UnknownMark(m.to_string()))?;
    }
    Ok(BitCost(total))
}

/// Average information per symbol, `-sum p log2 p`.
pub fn entropy(probabilities: &[f64]) -> Result<f64, CodingError> {
    let mut sum = 0.0;
    for &p in probabilities {
        if !(p > 0.0 && p <= 1.0) {
            return Err(CodingError::BadProbability(p));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CodingError::NotNormalized(sum));
    }
    Ok(-probabilities.iter().map(|p| p * p.log2()).sum::<f64>())
}

/// Redundancy `R = sum (f_i - 1) s_i` over (frequency, size) pairs.
pub fn redundancy(patterns: &[(u64, f64)]) -> f64 {
    patterns
        .iter()
        .map(|&(f, s)| f.saturating_sub(1) as f64 * s)
        .sum()
}

/// Number of subsequences `P = 2^N - 1` and of comparisons `C = P(P-1)/2`.
pub fn search_space_stats(n: u32) -> Result<(BigUint, BigUint), CodingError> {
    if n == 0 {
        return Err(CodingError::EmptyLength);
    }
    let one = BigUint::from(1u32);
    let p = (BigUint::from(1u32) << n as usize) - &one;
    let c = &p * (&p - &one) / BigUint::from(2u32);
    Ok((p, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Role;
    use proptest::prelude::*;

    fn pat(text: &str, f: u64) -> Pattern {
        let mut p = Pattern::from_marks(text, Role::Old);
        p.frequency = f;
        p
    }

    #[test]
    fn per_grammar_frequency_sums() {
        let g = [pat("a b", 2), pat("a", 3)];
        let s = build_code_scheme(&g, FrequencySource::PerGrammar, CodeOptions::default()).unwrap();
        assert_eq!(s.frequency("a"), Some(5));
        assert_eq!(s.frequency("b"), Some(2));
    }

    #[test]
    fn single_type_costs_one_bit() {
        let g = [pat("a a a", 7)];
        let s = build_code_scheme(&g, FrequencySource::PerGrammar, CodeOptions::default()).unwrap();
        assert_eq!(s.code_size("a"), Some(1.0));
    }

    #[test]
    fn per_alignment_set_takes_max_within_subset() {
        let g = [pat("a b c", 1)];
        let subsets = vec![
            vec![
                vec!["a".to_string(), "a".to_string(), "b".to_string()],
                vec!["a".to_string()],
            ],
            vec![vec!["a".to_string()]],
        ];
        let s = build_code_scheme(
            &g,
            FrequencySource::PerAlignmentSet(&subsets),
            CodeOptions::default(),
        )
        .unwrap();
        assert_eq!(s.frequency("a"), Some(3));
        assert_eq!(s.frequency("b"), Some(1));
        assert_eq!(s.frequency("c"), None);
        assert_eq!(s.warnings, vec!["c".to_string()]);
    }

    #[test]
    fn all_zero_is_an_error() {
        let g = [pat("a", 1)];
        let subsets: Vec<Vec<Vec<String>>> = vec![vec![vec![]]];
        let err = build_code_scheme(
            &g,
            FrequencySource::PerAlignmentSet(&subsets),
            CodeOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, CodingError::AllZero);
    }

    #[test]
    fn sequence_costs() {
        let g = [pat("a b b b", 1)];
        let s = build_code_scheme(&g, FrequencySource::PerGrammar, CodeOptions::default()).unwrap();
        // p(a) = 1/4 -> 3 bits, p(b) = 3/4 -> 2 bits
        let empty: [&str; 0] = [];
        assert_eq!(code_size_of_sequence(&empty, &s).unwrap().bits(), 0.0);
        assert_eq!(code_size_of_sequence(&["a"], &s).unwrap().bits(), 3.0);
        assert_eq!(code_size_of_sequence(&["a", "b"], &s).unwrap().bits(), 5.0);
        assert_eq!(
            code_size_of_sequence(&["z"], &s).unwrap_err(),
            CodingError::UnknownMark("z".into())
        );
    }

    #[test]
    fn ideal_mode_uses_fractional_lengths() {
        let opts = CodeOptions {
            mode: CodeMode::Ideal,
            alphabet_size: 2,
        };
        let s = build_code_scheme(&[pat("a b b b", 1)], FrequencySource::PerGrammar, opts).unwrap();
        assert!((s.code_size("b").unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        assert_eq!(s.code_size("a"), Some(2.0));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy(&[1.0]).unwrap(), 0.0);
        assert_eq!(entropy(&[0.25; 4]).unwrap(), 2.0);
        assert!(matches!(
            entropy(&[0.5, 0.4]),
            Err(CodingError::NotNormalized(_))
        ));
        assert!(matches!(
            entropy(&[0.0, 1.0]),
            Err(CodingError::BadProbability(_))
        ));
    }

    #[test]
    fn redundancy_examples() {
        assert_eq!(redundancy(&[(1, 10.0)]), 0.0);
        assert_eq!(redundancy(&[(3, 4.0)]), 8.0);
        assert_eq!(redundancy(&[(2, 5.0), (4, 2.0)]), 11.0);
    }

    #[test]
    fn search_space_examples() {
        let (p, c) = search_space_stats(1).unwrap();
        assert_eq!((p, c), (BigUint::from(1u32), BigUint::from(0u32)));
        let (p, c) = search_space_stats(3).unwrap();
        assert_eq!((p, c), (BigUint::from(7u32), BigUint::from(21u32)));
        assert!(search_space_stats(0).is_err());
    }

    #[test]
    fn search_space_matches_naive_count() {
        for n in 1..=12u32 {
            let p_naive: u64 = (1..(1u64 << n)).count() as u64;
            let mut c_naive = 0u64;
            for i in 0..p_naive {
                c_naive += p_naive - 1 - i;
            }
            let (p, c) = search_space_stats(n).unwrap();
            assert_eq!(p, BigUint::from(p_naive));
            assert_eq!(c, BigUint::from(c_naive));
        }
        let (p, _) = search_space_stats(200).unwrap();
        assert_eq!(p.bits(), 200);
    }

    proptest! {
        #[test]
        fn sfe_lengths_satisfy_kraft_and_monotonicity(freqs in prop::collection::vec(1u64..1000, 1..40)) {
            let table: Vec<(String, u64)> = freqs.iter().enumerate().map(|(i, &f)| (format!("s{i}"), f)).collect();
            let s = CodeScheme::from_frequencies(table.clone(), CodeOptions::default()).unwrap();
            prop_assert!(s.kraft_sum() <= 1.0 + 1e-12);
            for (m1, f1) in &table {
                for (m2, f2) in &table {
                    if f1 >= f2 {
                        prop_assert!(s.code_size(m1).unwrap() <= s.code_size(m2).unwrap());
                    }
                }
            }
        }

        #[test]
        fn sequence_cost_is_additive(u in prop::collection::vec(0usize..5, 0..20), v in prop::collection::vec(0usize..5, 0..20)) {
            let g = [pat("a b c d e a a b", 1)];
            let s = build_code_scheme(&g, FrequencySource::PerGrammar, CodeOptions::default()).unwrap();
            let names = ["a", "b", "c", "d", "e"];
            let u: Vec<&str> = u.iter().map(|&i| names[i]).collect();
            let v: Vec<&str> = v.iter().map(|&i| names[i]).collect();
            let uv: Vec<&str> = u.iter().chain(v.iter()).copied().collect();
            let total = code_size_of_sequence(&uv, &s).unwrap().bits();
            let parts = code_size_of_sequence(&u, &s).unwrap().bits() + code_size_of_sequence(&v, &s).unwrap().bits();
            prop_assert!((total - parts).abs() < 1e-9);
        }

        #[test]
        fn entropy_bounded_by_uniform(weights in prop::collection::vec(1u32..100, 1..20)) {
            let total: u32 = weights.iter().sum();
            let ps: Vec<f64> = weights.iter().map(|&w| w as f64 / total as f64).collect();
            let h = entropy(&ps).unwrap();
            prop_assert!(h <= (ps.len() as f64).log2() + 1e-9);
            prop_assert!(h >= -1e-12);
        }
    }
}
