//! Composition of an alignment with an Old pattern or with another alignment.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use super::{Alignment, Cell, Column, Row, RowSource};
use crate::matcher::{self, MatchLimits, MatchSpace};
use crate::pattern::Symbol;

struct Bitsets {
    words: usize,
    bits: Vec<u64>,
}

impl Bitsets {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Bitsets {
            words,
            bits: vec![0; n * words],
        }
    }

    fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words + col / 64] |= 1 << (col % 64);
    }

    fn union_into(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            let v = self.bits[src * self.words + w];
            self.bits[dst * self.words + w] |= v;
        }
    }
}

/// `reach.get(x, y)` is true when column `x` precedes column `y` along
/// some chain of row edges.
fn reachability(a: &Alignment) -> Bitsets {
    let n = a.columns.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for row in &a.rows {
        for w in row.cells.windows(2) {
            succ[w[0]].push(w[1]);
        }
    }
    let mut reach = Bitsets::new(n);
    for c in (0..n).rev() {
        for &s in &succ[c] {
            reach.set(c, s);
            reach.union_into(c, s);
        }
    }
    reach
}

/// Hits between alignment columns (side A) and a pattern (side B).
struct ColumnSpace {
    points: Vec<(usize, usize)>,
    reach: Bitsets,
}

impl ColumnSpace {
    fn compatible(&self, earlier: (usize, usize), later: (usize, usize)) -> bool {
        earlier.0 != later.0 && !self.reach.get(later.0, earlier.0)
    }
}

impl MatchSpace for ColumnSpace {
    fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    fn can_follow(&self, prefix: &[(usize, usize)], next: (usize, usize)) -> bool {
        prefix.iter().all(|&p| self.compatible(p, next))
    }

    fn gap(&self, prev: (usize, usize), next: (usize, usize)) -> usize {
        prev.0.abs_diff(next.0).saturating_sub(1) + (next.1 - prev.1 - 1)
    }

    fn is_valid(&self, seq: &[(usize, usize)]) -> bool {
        for (i, &x) in seq.iter().enumerate() {
            for &y in &seq[i + 1..] {
                if y.1 <= x.1 || !self.compatible(x, y) {
                    return false;
                }
            }
        }
        true
    }
}

/// Orders rows canonically, sorts columns topologically and renumbers.
/// `rows[i].cells` hold raw column ids in `0..raw_columns`.
pub(crate) fn normalize(mut rows: Vec<Row>, raw_columns: usize) -> Option<Alignment> {
    let mut raw: Vec<Column> = vec![Column::default(); raw_columns];
    for (r, row) in rows.iter().enumerate() {
        for (p, &c) in row.cells.iter().enumerate() {
            if !raw[c].push((r, p)) {
                return None;
            }
        }
    }
    if raw.iter().any(|c| c.is_empty()) {
        return None;
    }

    let describe = |r: usize| -> Vec<Option<(RowSource, usize)>> {
        rows[r]
            .cells
            .iter()
            .map(|&c| {
                raw[c]
                    .iter()
                    .find(|&&(r2, _)| r2 != r)
                    .map(|&(r2, p2)| (rows[r2].source, p2))
            })
            .collect()
    };
    let mut order: Vec<usize> = (1..rows.len()).collect();
    let descriptions: Vec<_> = (0..rows.len()).map(describe).collect();
    order.sort_by(|&x, &y| {
        rows[x]
            .source
            .cmp(&rows[y].source)
            .then_with(|| descriptions[x].cmp(&descriptions[y]))
            .then(x.cmp(&y))
    });
    order.insert(0, 0);
    let mut new_index = vec![0; rows.len()];
    for (to, &from) in order.iter().enumerate() {
        new_index[from] = to;
    }
    let mut taken: Vec<Option<Row>> = rows.drain(..).map(Some).collect();
    let rows: Vec<Row> = order.iter().map(|&i| taken[i].take().unwrap()).collect();
    for col in raw.iter_mut() {
        for cell in col.iter_mut() {
            cell.0 = new_index[cell.0];
        }
        col.sort();
    }

    let mut indeg = vec![0usize; raw_columns];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); raw_columns];
    for row in &rows {
        for w in row.cells.windows(2) {
            succ[w[0]].push(w[1]);
            indeg[w[1]] += 1;
        }
    }
    let key = |c: usize| -> (bool, Cell, usize) {
        let has_new = raw[c][0].0 == 0;
        (has_new, raw[c][0], c)
    };
    let mut heap: BinaryHeap<Reverse<(bool, Cell, usize)>> = (0..raw_columns)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse(key(c)))
        .collect();
    let mut rank = vec![usize::MAX; raw_columns];
    let mut next = 0;
    while let Some(Reverse((_, _, c))) = heap.pop() {
        rank[c] = next;
        next += 1;
        for &s in &succ[c] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                heap.push(Reverse(key(s)));
            }
        }
    }
    if next != raw_columns {
        return None;
    }
    let mut columns = vec![Column::default(); raw_columns];
    for (c, cells) in raw.into_iter().enumerate() {
        columns[rank[c]] = cells;
    }
    let rows = rows
        .into_iter()
        .map(|mut row| {
            for c in row.cells.iter_mut() {
                *c = rank[*c];
            }
            row
        })
        .collect();
    Some(Alignment {
        id: 0,
        stage: 0,
        parents: None,
        rows,
        columns,
    })
}

fn merge_with_pattern(
    x: &Alignment,
    pattern_index: usize,
    pattern: &Arc<[Symbol]>,
    hits: &[(usize, usize)],
) -> Option<Alignment> {
    let mut rows = x.rows.clone();
    let mut next = x.columns.len();
    let mut cells = Vec::with_capacity(pattern.len());
    let mut h = hits.iter().peekable();
    for j in 0..pattern.len() {
        match h.peek() {
            Some(&&(c, pb)) if pb == j => {
                cells.push(c);
                h.next();
            }
            _ => {
                cells.push(next);
                next += 1;
            }
        }
    }
    rows.push(Row {
        source: RowSource::Old(pattern_index),
        symbols: pattern.clone(),
        cells,
    });
    normalize(rows, next)
}

fn candidate_space(x: &Alignment, pattern_index: usize, pattern: &[Symbol]) -> ColumnSpace {
    let mut by_mark: HashMap<&str, Vec<usize>> = HashMap::new();
    for c in 0..x.columns.len() {
        by_mark.entry(x.column_mark(c)).or_default().push(c);
    }
    let mut points = Vec::new();
    for (j, s) in pattern.iter().enumerate() {
        if let Some(cols) = by_mark.get(s.mark.as_str()) {
            for &c in cols {
                if x.columns[c].len() == 1 && x.rows[x.columns[c][0].0].source != RowSource::Old(pattern_index) {
                    points.push((c, j));
                }
            }
        }
    }
    ColumnSpace {
        points,
        reach: reachability(x),
    }
}

fn compose_from_sequences(
    x: &Alignment,
    pattern_index: usize,
    pattern: &Arc<[Symbol]>,
    sequences: Vec<matcher::HitSequence>,
) -> Vec<Alignment> {
    sequences
        .into_iter()
        .filter(|s| s.hits.iter().all(|h| x.columns[h.pos_a].len() == 1))
        .filter_map(|s| merge_with_pattern(x, pattern_index, pattern, &s.pairs()))
        .collect()
}

/// Aligns grammar pattern `pattern_index` against `x`. Each good hit
/// sequence whose hit columns are not yet matched yields one alignment.
/// A pattern is never matched against another instance of itself.
pub fn compose_with_pattern(
    x: &Alignment,
    pattern_index: usize,
    pattern: &Arc<[Symbol]>,
    p1: f64,
    limits: &MatchLimits,
    instance_cap: usize,
) -> Vec<Alignment> {
    if x.instances_of(pattern_index) >= instance_cap {
        return Vec::new();
    }
    let space = candidate_space(x, pattern_index, pattern);
    let sequences = matcher::search(&space, p1, limits);
    compose_from_sequences(x, pattern_index, pattern, sequences)
}

/// As [`compose_with_pattern`] but from every maximal hit sequence.
pub fn exhaustive_compose_with_pattern(
    x: &Alignment,
    pattern_index: usize,
    pattern: &Arc<[Symbol]>,
    p1: f64,
    instance_cap: usize,
) -> Vec<Alignment> {
    if x.instances_of(pattern_index) >= instance_cap {
        return Vec::new();
    }
    let space = candidate_space(x, pattern_index, pattern);
    let sequences = matcher::exhaustive(&space, p1);
    compose_from_sequences(x, pattern_index, pattern, sequences)
}

/// Unifies two alignments of the same New pattern that match disjoint New
/// symbols.
pub fn compose_alignments(x: &Alignment, y: &Alignment, instance_cap: usize) -> Option<Alignment> {
    if y.rows.len() < 2 || x.rows.len() < 2 || x.rows[0].symbols != y.rows[0].symbols {
        return None;
    }
    let hx = x.new_hits();
    let hy = y.new_hits();
    if hy.is_empty() || hx.iter().any(|p| hy.binary_search(p).is_ok()) {
        return None;
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for i in x.old_sources().into_iter().chain(y.old_sources()) {
        let n = counts.entry(i).or_insert(0);
        *n += 1;
        if *n > instance_cap {
            return None;
        }
    }
    let mut rows = x.rows.clone();
    let mut next = x.columns.len();
    let mut map = vec![usize::MAX; y.columns.len()];
    for (c, col) in y.columns.iter().enumerate() {
        if let Some(&(0, p)) = col.first() {
            map[c] = x.rows[0].cells[p];
        } else {
            map[c] = next;
            next += 1;
        }
    }
    for row in &y.rows[1..] {
        rows.push(Row {
            source: row.source,
            symbols: row.symbols.clone(),
            cells: row.cells.iter().map(|&c| map[c]).collect(),
        });
    }
    normalize(rows, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::validate_alignment;
    use crate::pattern::{Pattern, Role};

    fn syms(text: &str) -> Arc<[Symbol]> {
        Pattern::from_marks(text, Role::Old).symbols.into()
    }

    fn new_alignment(text: &str) -> Alignment {
        Alignment::from_new(&Pattern::from_marks(text, Role::New))
    }

    fn hit_marks(a: &Alignment) -> Vec<String> {
        a.new_hits()
            .iter()
            .map(|&p| a.rows[0].symbols[p].mark.clone())
            .collect()
    }

    #[test]
    fn new_with_determiner_matches_two() {
        let x = new_alignment("t w o k i t t e n s p l a y");
        let out = compose_with_pattern(&x, 2, &syms("D Dp 4 t w o #D"), 0.5, &MatchLimits::default(), 3);
        assert!(!out.is_empty());
        assert_eq!(hit_marks(&out[0]), vec!["t", "w", "o"]);
        assert_eq!(out[0].new_hits(), vec![0, 1, 2]);
        for a in &out {
            assert!(validate_alignment(a).is_empty(), "{:?}", validate_alignment(a));
        }
    }

    #[test]
    fn no_common_mark_gives_nothing() {
        let x = new_alignment("a b");
        assert!(compose_with_pattern(&x, 0, &syms("c d"), 0.5, &MatchLimits::default(), 3).is_empty());
    }

    #[test]
    fn matched_columns_are_not_reused() {
        let x = new_alignment("a b");
        let first = compose_with_pattern(&x, 0, &syms("a b"), 0.5, &MatchLimits::default(), 3);
        assert_eq!(first.len(), 1);
        let second = compose_with_pattern(&first[0], 1, &syms("a b"), 0.5, &MatchLimits::default(), 3);
        assert!(second.is_empty());
    }

    #[test]
    fn instance_cap_applies() {
        let x = new_alignment("a a a a");
        let mut cur = x;
        for _ in 0..3 {
            let next = compose_with_pattern(&cur, 0, &syms("a"), 0.5, &MatchLimits::default(), 3);
            cur = next.into_iter().next().unwrap();
        }
        assert_eq!(cur.instances_of(0), 3);
        assert!(compose_with_pattern(&cur, 0, &syms("a"), 0.5, &MatchLimits::default(), 3).is_empty());
    }

    #[test]
    fn disjoint_alignments_merge() {
        let x = new_alignment("a b c d");
        let l = MatchLimits::default();
        let ab = compose_with_pattern(&x, 0, &syms("< a b >"), 0.5, &l, 3).remove(0);
        let cd = compose_with_pattern(&x, 1, &syms("< c d >"), 0.5, &l, 3).remove(0);
        let both = compose_alignments(&ab, &cd, 3).unwrap();
        assert!(validate_alignment(&both).is_empty());
        assert_eq!(both.new_hits(), vec![0, 1, 2, 3]);
        assert!(!both.old_rows_connected());
        assert!(compose_alignments(&ab, &ab, 3).is_none());
        let merged_other_way = compose_alignments(&cd, &ab, 3).unwrap();
        assert_eq!(both.structure_key(), merged_other_way.structure_key());
    }

    #[test]
    fn reversed_order_against_columns_is_rejected() {
        // row 1 fixes x before y; a pattern "y x" can match only one of them
        let x = new_alignment("x y");
        let l = MatchLimits::default();
        let base = compose_with_pattern(&x, 0, &syms("p x q y"), 0.5, &l, 3).remove(0);
        let out = compose_with_pattern(&base, 1, &syms("q p"), 0.5, &l, 3);
        for a in &out {
            assert!(validate_alignment(a).is_empty());
        }
        assert!(out.iter().all(|a| a.hit_columns() == 3));
    }
}
