//! Order-preserving matches ("hit sequences") between two symbol sequences,
//! ranked by the chance probability p_n of the match.
//!
//! A lower p_n means the match is less likely to have arisen by chance, so
//! sequences are reported in ascending order of p_n.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::CodeScheme;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("the first gap must be 0, got {0}")]
    FirstGapNonZero(usize),
    #[error("a hit sequence needs at least one hit")]
    NoHits,
    #[error("p_1 = {0} outside (0, 1]")]
    BadP1(f64),
    #[error("inputs have {total} symbols, above the exhaustive-search bound of {bound}")]
    AboveOracleBound { total: usize, bound: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hit {
    pub pos_a: usize,
    pub pos_b: usize,
    /// Symbols skipped in both sequences since the previous hit.
    pub gap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitSequence {
    pub hits: Vec<Hit>,
    /// log2 of p_n.
    pub log2_p: f64,
}

impl HitSequence {
    pub fn probability(&self) -> f64 {
        self.log2_p.exp2()
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.hits.iter().map(|h| (h.pos_a, h.pos_b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchLimits {
    pub max_results: usize,
    /// Partial sequences whose p_n falls below this are not extended.
    pub min_probability: f64,
    pub max_gap: Option<usize>,
}

impl Default for MatchLimits {
    fn default() -> Self {
        MatchLimits {
            max_results: 12,
            min_probability: 1e-30,
            max_gap: None,
        }
    }
}

/// Default symbol bound for [`brute_force_matches`].
pub const ORACLE_BOUND: usize = 24;

/// log2 of one factor `1 - (1 - p1)^(g + 1)`.
pub fn log2_factor(gap: usize, p1: f64) -> f64 {
    let q = 1.0 - p1;
    (1.0 - q.powi(gap as i32 + 1)).log2()
}

pub fn hit_sequence_probability(gaps: &[usize], p1: f64) -> Result<f64, MatchError> {
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(MatchError::BadP1(p1));
    }
    match gaps.first() {
        None => return Err(MatchError::NoHits),
        Some(&g) if g != 0 => return Err(MatchError::FirstGapNonZero(g)),
        _ => {}
    }
    Ok(gaps
        .iter()
        .map(|&g| 1.0 - (1.0 - p1).powi(g as i32 + 1))
        .product())
}

/// A space of candidate hits between an A side and a B side.
///
/// Points are `(a, b)` pairs whose marks are equal. A hit sequence is held
/// sorted by `b`.
pub(crate) trait MatchSpace {
    fn points(&self) -> &[(usize, usize)];
    /// Whether `next` (with `b` above every prefix hit) can extend `prefix`.
    fn can_follow(&self, prefix: &[(usize, usize)], next: (usize, usize)) -> bool;
    fn gap(&self, prev: (usize, usize), next: (usize, usize)) -> usize;
    /// Whether an arbitrary set of points sorted by `b` is a valid sequence.
    fn is_valid(&self, seq: &[(usize, usize)]) -> bool;
}

struct SequenceSpace {
    points: Vec<(usize, usize)>,
}

impl SequenceSpace {
    fn new<S: AsRef<str>>(a: &[S], b: &[S]) -> Self {
        let mut points = Vec::new();
        for (j, mb) in b.iter().enumerate() {
            for (i, ma) in a.iter().enumerate() {
                if ma.as_ref() == mb.as_ref() {
                    points.push((i, j));
                }
            }
        }
        SequenceSpace { points }
    }
}

impl MatchSpace for SequenceSpace {
    fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    fn can_follow(&self, prefix: &[(usize, usize)], next: (usize, usize)) -> bool {
        match prefix.last() {
            None => true,
            Some(&(a, b)) => next.0 > a && next.1 > b,
        }
    }

    fn gap(&self, prev: (usize, usize), next: (usize, usize)) -> usize {
        (next.0 - prev.0 - 1) + (next.1 - prev.1 - 1)
    }

    fn is_valid(&self, seq: &[(usize, usize)]) -> bool {
        seq.windows(2)
            .all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1)
    }
}

fn compare_sequences(x: &HitSequence, y: &HitSequence) -> Ordering {
    x.log2_p
        .partial_cmp(&y.log2_p)
        .unwrap_or(Ordering::Equal)
        .then_with(|| y.hits.len().cmp(&x.hits.len()))
        .then_with(|| x.pairs().cmp(&y.pairs()))
}

fn to_sequence<S: MatchSpace>(space: &S, pairs: &[(usize, usize)], p1: f64) -> HitSequence {
    let mut hits = Vec::with_capacity(pairs.len());
    let mut log2_p = 0.0;
    for (k, &pt) in pairs.iter().enumerate() {
        let gap = if k == 0 { 0 } else { space.gap(pairs[k - 1], pt) };
        log2_p += log2_factor(gap, p1);
        hits.push(Hit {
            pos_a: pt.0,
            pos_b: pt.1,
            gap,
        });
    }
    HitSequence { hits, log2_p }
}

fn is_maximal<S: MatchSpace>(space: &S, seq: &[(usize, usize)]) -> bool {
    let mut trial = Vec::with_capacity(seq.len() + 1);
    for &pt in space.points() {
        if seq.iter().any(|&(a, b)| a == pt.0 || b == pt.1) {
            continue;
        }
        trial.clear();
        let at = seq.partition_point(|&(_, b)| b < pt.1);
        trial.extend_from_slice(&seq[..at]);
        trial.push(pt);
        trial.extend_from_slice(&seq[at..]);
        if space.is_valid(&trial) {
            return false;
        }
    }
    true
}

#[derive(Clone)]
struct Partial {
    pairs: Vec<(usize, usize)>,
    log2_p: f64,
}

/// Beam dynamic programming over match points: each point keeps the
/// `4 * max_results` lowest-p_n partial sequences ending there.
pub(crate) fn search<S: MatchSpace>(space: &S, p1: f64, limits: &MatchLimits) -> Vec<HitSequence> {
    let points = space.points();
    let beam = limits.max_results.max(1) * 4;
    let floor = limits.min_probability.log2();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&k| (points[k].1, points[k].0));
    let mut table: Vec<Vec<Partial>> = vec![Vec::new(); points.len()];
    for (rank, &k) in order.iter().enumerate() {
        let pt = points[k];
        let mut cands = vec![Partial {
            pairs: vec![pt],
            log2_p: log2_factor(0, p1),
        }];
        for &prev_k in &order[..rank] {
            let prev = points[prev_k];
            if prev.1 >= pt.1 {
                continue;
            }
            for partial in &table[prev_k] {
                if partial.log2_p < floor {
                    continue;
                }
                if !space.can_follow(&partial.pairs, pt) {
                    continue;
                }
                let gap = space.gap(prev, pt);
                if limits.max_gap.is_some_and(|g| gap > g) {
                    continue;
                }
                let mut pairs = partial.pairs.clone();
                pairs.push(pt);
                cands.push(Partial {
                    pairs,
                    log2_p: partial.log2_p + log2_factor(gap, p1),
                });
            }
        }
        cands.sort_by(|x, y| {
            x.log2_p
                .partial_cmp(&y.log2_p)
                .unwrap_or(Ordering::Equal)
                .then_with(|| y.pairs.len().cmp(&x.pairs.len()))
                .then_with(|| x.pairs.cmp(&y.pairs))
        });
        cands.truncate(beam);
        table[k] = cands;
    }
    let mut out: Vec<HitSequence> = table
        .into_iter()
        .flatten()
        .filter(|p| is_maximal(space, &p.pairs))
        .map(|p| to_sequence(space, &p.pairs, p1))
        .collect();
    out.sort_by(compare_sequences);
    out.dedup_by(|x, y| x.pairs() == y.pairs());
    out.truncate(limits.max_results);
    out
}

/// Every maximal valid sequence in the space, best first.
pub(crate) fn exhaustive<S: MatchSpace>(space: &S, p1: f64) -> Vec<HitSequence> {
    let points = space.points();
    let mut order: Vec<(usize, usize)> = points.to_vec();
    order.sort_by_key(|&(a, b)| (b, a));
    let mut out = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    fn walk<S: MatchSpace>(
        space: &S,
        order: &[(usize, usize)],
        from: usize,
        stack: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if !stack.is_empty() && is_maximal(space, stack) {
            out.push(stack.clone());
        }
        for k in from..order.len() {
            let pt = order[k];
            if stack.last().is_some_and(|&(_, b)| pt.1 <= b) {
                continue;
            }
            if space.can_follow(stack, pt) {
                stack.push(pt);
                walk(space, order, k + 1, stack, out);
                stack.pop();
            }
        }
    }
    let mut found = Vec::new();
    walk(space, &order, 0, &mut stack, &mut found);
    for pairs in found {
        out.push(to_sequence(space, &pairs, p1));
    }
    out.sort_by(compare_sequences);
    out
}

/// Up to `limits.max_results` maximal hit sequences between `a` and `b`,
/// best (lowest p_n) first.
pub fn find_matches<S: AsRef<str>>(
    a: &[S],
    b: &[S],
    scheme: &CodeScheme,
    limits: &MatchLimits,
) -> Vec<HitSequence> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    search(&SequenceSpace::new(a, b), scheme.p1(), limits)
}

/// The complete set of maximal hit sequences, for inputs of at most
/// [`ORACLE_BOUND`] symbols in total.
pub fn brute_force_matches<S: AsRef<str>>(
    a: &[S],
    b: &[S],
    scheme: &CodeScheme,
) -> Result<Vec<HitSequence>, MatchError> {
    brute_force_matches_bounded(a, b, scheme.p1(), ORACLE_BOUND)
}

pub fn brute_force_matches_bounded<S: AsRef<str>>(
    a: &[S],
    b: &[S],
    p1: f64,
    bound: usize,
) -> Result<Vec<HitSequence>, MatchError> {
    let total = a.len() + b.len();
    if total > bound {
        return Err(MatchError::AboveOracleBound { total, bound });
    }
    Ok(exhaustive(&SequenceSpace::new(a, b), p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{CodeOptions, CodeScheme};
    use proptest::prelude::*;

    fn scheme() -> CodeScheme {
        CodeScheme::from_frequencies([("x".to_string(), 1)], CodeOptions::default()).unwrap()
    }

    fn marks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn probability_examples() {
        assert_eq!(hit_sequence_probability(&[0], 0.5).unwrap(), 0.5);
        let p = hit_sequence_probability(&[0, 2], 0.25).unwrap();
        assert!((p - 0.25 * (1.0 - 0.75f64.powi(3))).abs() < 1e-15);
        assert!((p - 0.14453125).abs() < 1e-15);
        assert_eq!(hit_sequence_probability(&[0, 5, 9], 1.0).unwrap(), 1.0);
        assert_eq!(
            hit_sequence_probability(&[1], 0.5).unwrap_err(),
            MatchError::FirstGapNonZero(1)
        );
    }

    #[test]
    fn best_match_is_the_eight_hit_sequence() {
        let a = marks("t h a t g i r l r u n s");
        let b = marks("< %1 3 t h a t b o y r u n s >");
        let found = find_matches(&a, &b, &scheme(), &MatchLimits::default());
        let best = &found[0];
        let matched: Vec<&str> = best.hits.iter().map(|h| a[h.pos_a]).collect();
        assert_eq!(matched, marks("t h a t r u n s"));
        assert_eq!(best.hits[4].pos_a, 8);
        for w in found.windows(2) {
            assert!(w[0].log2_p <= w[1].log2_p);
        }
    }

    #[test]
    fn identity_match() {
        let a = marks("a b c d");
        let found = find_matches(&a, &a, &scheme(), &MatchLimits::default());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].len(), 4);
        assert!(found[0].hits.iter().all(|h| h.gap == 0 && h.pos_a == h.pos_b));
    }

    #[test]
    fn crossing_is_forbidden() {
        let found = find_matches(&marks("a b"), &marks("b a"), &scheme(), &MatchLimits::default());
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn brute_force_examples() {
        let s = scheme();
        let all = brute_force_matches(&marks("a b"), &marks("a b"), &s).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].len(), 2);
        assert!(brute_force_matches(&marks("x"), &marks("y"), &s).unwrap().is_empty());
        let long = vec!["a"; 13];
        assert!(matches!(
            brute_force_matches(&long, &long, &s),
            Err(MatchError::AboveOracleBound { total: 26, .. })
        ));
    }

    #[test]
    fn max_gap_limits_extension() {
        let limits = MatchLimits {
            max_gap: Some(0),
            ..MatchLimits::default()
        };
        let found = find_matches(&marks("a x b"), &marks("a b"), &scheme(), &limits);
        assert!(found.iter().all(|s| s.len() == 1));
    }

    fn seq_strategy() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]), 1..7)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn heuristic_agrees_with_oracle(a in seq_strategy(), b in seq_strategy()) {
            let s = scheme();
            let fast = find_matches(&a, &b, &s, &MatchLimits::default());
            let all = brute_force_matches(&a, &b, &s).unwrap();
            prop_assert_eq!(fast.is_empty(), all.is_empty());
            if let (Some(f), Some(o)) = (fast.first(), all.first()) {
                prop_assert!((f.log2_p - o.log2_p).abs() < 1e-9);
            }
            for seq in &fast {
                prop_assert!(all.iter().any(|o| o.pairs() == seq.pairs()));
                for w in seq.hits.windows(2) {
                    prop_assert!(w[1].pos_a > w[0].pos_a && w[1].pos_b > w[0].pos_b);
                }
                prop_assert!(seq.probability() > 0.0 && seq.probability() <= s.p1());
            }
            let again = find_matches(&a, &b, &s, &MatchLimits::default());
            prop_assert_eq!(fast, again);
        }

        #[test]
        fn probability_monotone(gaps in prop::collection::vec(0usize..20, 1..10), p1 in 0.01f64..1.0, k in 0usize..10, extra in 0usize..20) {
            let mut gaps = gaps;
            gaps[0] = 0;
            let p = hit_sequence_probability(&gaps, p1).unwrap();
            let mut longer = gaps.clone();
            longer.push(extra);
            prop_assert!(hit_sequence_probability(&longer, p1).unwrap() <= p);
            if gaps.len() > 1 {
                let i = 1 + k % (gaps.len() - 1);
                let mut wider = gaps.clone();
                wider[i] += 1;
                prop_assert!(hit_sequence_probability(&wider, p1).unwrap() >= p);
            }
        }
    }
}
