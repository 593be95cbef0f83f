//! Assimilation of one New pattern into a candidate grammar.

use std::collections::HashSet;

use super::score::is_exact_parse;
use super::shape::{build_pattern, parse_shape, Item, Shape};
use super::{Assimilation, LearnConfig, LearnError, LearnedGrammar, ProvenanceRecord};
use crate::alignment::{build_alignments, Alignment, RowSource};
use crate::grammar::Grammar;
use crate::pattern::{Pattern, Symbol};

enum Piece {
    Run(Vec<Symbol>),
    Region { old: Vec<Symbol>, new: Vec<Symbol> },
}

/// How the rows of one alignment are rewritten.
struct Plan {
    /// Row of the pattern whose slots the leaves fill. A leaf fills the
    /// slot whose class mark shares its column.
    top: Option<usize>,
    /// Leaf rows in slot order with their pieces in column order.
    leaves: Vec<(usize, Vec<Piece>)>,
}

enum Event {
    Matched { new: usize, leaf: usize, pos: usize },
    NewOnly(usize),
    OldOnly { leaf: usize, pos: usize },
}

enum Segment {
    Run { leaf: usize, new: Vec<usize>, old: Vec<usize> },
    Region { new: Vec<usize>, old: Vec<(usize, usize)> },
}

fn source(a: &Alignment, row: usize) -> usize {
    match a.rows[row].source {
        RowSource::Old(i) => i,
        RowSource::New => unreachable!("row 0 is New"),
    }
}

/// True when `a` matches enough of New and of its Old content to be
/// worth splitting.
fn meets_threshold(a: &Alignment, config: &LearnConfig) -> bool {
    let hits = a.new_hits().len();
    let new_len = a.rows[0].symbols.len();
    let old_len: usize = a.rows[1..]
        .iter()
        .map(|r| r.symbols.iter().filter(|s| !s.kind.is_id()).count())
        .sum();
    hits >= config.min_hits && hits as f64 >= config.min_fraction * new_len.min(old_len) as f64
}

fn plan_split(a: &Alignment, g: &Grammar) -> Option<Plan> {
    let n = a.rows.len();
    let shapes: Vec<Shape> = (1..n)
        .map(|r| parse_shape(g.pattern(source(a, r))))
        .collect::<Option<_>>()?;
    let shape = |r: usize| &shapes[r - 1];
    let tops: Vec<usize> = (1..n).filter(|&r| !shape(r).is_leaf()).collect();
    let leaf_rows: Vec<usize> = match tops.as_slice() {
        [] if n == 2 => vec![1],
        [top] => {
            let s = shape(*top);
            if s.body.iter().any(|i| matches!(i, Item::Literal(_))) {
                return None;
            }
            let cells = &a.rows[*top].cells;
            let mut order = Vec::new();
            for &(lt, _) in &s.spans {
                let leaf = (1..n).find(|&r| r != *top && a.rows[r].cells[1] == cells[lt + 1])?;
                order.push(leaf);
            }
            let distinct: HashSet<usize> = order.iter().copied().collect();
            if distinct.len() != order.len() || order.len() != n - 2 {
                return None;
            }
            order
        }
        _ => return None,
    };
    let slot_of = |r: usize| leaf_rows.iter().position(|&x| x == r);

    let mut events = Vec::new();
    for col in &a.columns {
        let new = col.iter().find(|c| c.0 == 0).map(|c| c.1);
        let leaf = col.iter().find_map(|&(r, p)| {
            let k = slot_of(r)?;
            let (lo, hi) = shape(r).body_range();
            (lo..hi).contains(&p).then_some((k, p))
        });
        match (new, leaf, col.len()) {
            (Some(new), Some((leaf, pos)), 2) => events.push(Event::Matched { new, leaf, pos }),
            (Some(new), None, 1) => events.push(Event::NewOnly(new)),
            (None, Some((leaf, pos)), 1) => events.push(Event::OldOnly { leaf, pos }),
            (None, None, _) => {}
            _ => return None,
        }
    }

    let mut segments: Vec<Segment> = Vec::new();
    for e in events {
        match e {
            Event::Matched { new, leaf, pos } => {
                if let Some(Segment::Run { leaf: l, new: ns, old: os }) = segments.last_mut() {
                    if *l == leaf && ns.last().map(|x| x + 1) == Some(new) && os.last().map(|x| x + 1) == Some(pos) {
                        ns.push(new);
                        os.push(pos);
                        continue;
                    }
                }
                segments.push(Segment::Run { leaf, new: vec![new], old: vec![pos] });
            }
            Event::NewOnly(p) => match segments.last_mut() {
                Some(Segment::Region { new, .. }) => new.push(p),
                _ => segments.push(Segment::Region { new: vec![p], old: Vec::new() }),
            },
            Event::OldOnly { leaf, pos } => match segments.last_mut() {
                Some(Segment::Region { old, .. }) => old.push((leaf, pos)),
                _ => segments.push(Segment::Region { new: Vec::new(), old: vec![(leaf, pos)] }),
            },
        }
    }

    let new_symbols = &a.rows[0].symbols;
    let mut pieces: Vec<Vec<Piece>> = (0..leaf_rows.len()).map(|_| Vec::new()).collect();
    let mut covered: Vec<Vec<usize>> = vec![Vec::new(); leaf_rows.len()];
    for seg in segments {
        match seg {
            Segment::Run { leaf, old, .. } => {
                let row = &a.rows[leaf_rows[leaf]];
                pieces[leaf].push(Piece::Run(old.iter().map(|&p| row.symbols[p].clone()).collect()));
                covered[leaf].extend(old);
            }
            Segment::Region { new, old } => {
                let leaf = old.first()?.0;
                if new.is_empty() || old.iter().any(|&(l, _)| l != leaf) {
                    return None;
                }
                let row = &a.rows[leaf_rows[leaf]];
                pieces[leaf].push(Piece::Region {
                    old: old.iter().map(|&(_, p)| row.symbols[p].clone()).collect(),
                    new: new.iter().map(|&p| new_symbols[p].clone()).collect(),
                });
                covered[leaf].extend(old.iter().map(|&(_, p)| p));
            }
        }
    }
    for (k, &r) in leaf_rows.iter().enumerate() {
        let (lo, hi) = shape(r).body_range();
        if covered[k] != (lo..hi).collect::<Vec<_>>() {
            return None;
        }
    }

    let changes = |p: &[Piece]| !matches!(p, [Piece::Run(_)]);
    if !pieces.iter().any(|p| changes(p)) {
        return None;
    }
    for (k, p) in pieces.iter().enumerate() {
        let s = source(a, leaf_rows[k]);
        if changes(p) && leaf_rows.iter().filter(|&&r| source(a, r) == s).count() > 1 {
            return None;
        }
    }
    Some(Plan {
        top: tops.first().copied(),
        leaves: leaf_rows.into_iter().zip(pieces).collect(),
    })
}

/// A mutable copy of a grammar's patterns and ids.
struct Draft {
    entries: Vec<Option<(String, Pattern)>>,
}

impl Draft {
    fn new(g: &Grammar) -> Self {
        Draft {
            entries: g
                .ids()
                .iter()
                .cloned()
                .zip(g.patterns().iter().cloned())
                .map(Some)
                .collect(),
        }
    }

    fn bump(&mut self, index: usize) {
        if let Some((_, p)) = &mut self.entries[index] {
            p.frequency += 1;
        }
    }

    fn shapes(&self) -> impl Iterator<Item = Shape> + '_ {
        self.entries.iter().flatten().filter_map(|(_, p)| parse_shape(p))
    }

    fn finish(self) -> Grammar {
        let (ids, patterns): (Vec<String>, Vec<Pattern>) = self.entries.into_iter().flatten().unzip();
        Grammar::with_ids(patterns, ids).expect("learned patterns are valid with unique ids")
    }
}

impl LearnedGrammar {
    fn add(&mut self, draft: &mut Draft, record: (usize, Assimilation, &[String]), p: Pattern) -> String {
        let id = self.fresh_id(draft.entries.iter().flatten().map(|(id, _)| id.as_str()));
        self.provenance.push(ProvenanceRecord {
            new_index: record.0,
            case: record.1,
            sources: record.2.to_vec(),
            pattern: Some(id.clone()),
        });
        draft.entries.push(Some((id.clone(), p)));
        id
    }

    fn replace(&mut self, draft: &mut Draft, index: usize, record: (usize, Assimilation, &[String]), p: Pattern) {
        let id = self.fresh_id(draft.entries.iter().flatten().map(|(id, _)| id.as_str()));
        self.provenance.push(ProvenanceRecord {
            new_index: record.0,
            case: record.1,
            sources: record.2.to_vec(),
            pattern: Some(id.clone()),
        });
        draft.entries[index] = Some((id, p));
    }
}

fn wrap(store: &LearnedGrammar, new: &Pattern, new_index: usize) -> LearnedGrammar {
    let mut child = store.clone();
    let mut draft = Draft::new(&store.grammar);
    let class = child.fresh_class();
    let d = child.fresh_discriminator();
    let body: Vec<Item> = new.symbols.iter().cloned().map(Item::Literal).collect();
    child.add(&mut draft, (new_index, Assimilation::Wrapped, &[]), build_pattern(&class, &d, &body, 1));
    child.grammar = draft.finish();
    child.score = None;
    child
}

fn exact(store: &LearnedGrammar, a: &Alignment, new_index: usize) -> LearnedGrammar {
    let mut child = store.clone();
    let mut draft = Draft::new(&store.grammar);
    let mut sources = Vec::new();
    for r in 1..a.rows.len() {
        let i = source(a, r);
        draft.bump(i);
        sources.push(store.grammar.id(i).to_string());
    }
    child.provenance.push(ProvenanceRecord {
        new_index,
        case: Assimilation::Exact,
        sources,
        pattern: None,
    });
    child.grammar = draft.finish();
    child.score = None;
    child
}

fn apply(store: &LearnedGrammar, a: &Alignment, plan: Plan, new_index: usize) -> LearnedGrammar {
    let g = &store.grammar;
    let mut child = store.clone();
    let mut draft = Draft::new(g);
    let mut sources: Vec<String> = Vec::new();
    for r in 1..a.rows.len() {
        let id = g.id(source(a, r)).to_string();
        if !sources.contains(&id) {
            sources.push(id);
        }
    }
    let rec = (new_index, Assimilation::Split, sources.as_slice());
    let mut top_body = Vec::new();
    let mut top_changed = false;

    for (row, pieces) in plan.leaves {
        let index = source(a, row);
        let leaf = parse_shape(g.pattern(index)).expect("planned rows have the learned shape");
        let f = g.pattern(index).frequency;
        match pieces.as_slice() {
            [Piece::Run(_)] => {
                draft.bump(index);
                top_body.push(Item::Ref(leaf.class.clone()));
            }
            [Piece::Region { new, .. }] => {
                let d = child.fresh_discriminator();
                let body: Vec<Item> = new.iter().cloned().map(Item::Literal).collect();
                child.add(&mut draft, rec, build_pattern(&leaf.class, &d, &body, 1));
                top_body.push(Item::Ref(leaf.class.clone()));
            }
            _ => {
                let mut refs = Vec::new();
                for piece in &pieces {
                    let class = child.fresh_class();
                    let literal = |s: &[Symbol]| s.iter().cloned().map(Item::Literal).collect::<Vec<_>>();
                    match piece {
                        Piece::Run(run) => {
                            let d = child.fresh_discriminator();
                            child.add(&mut draft, rec, build_pattern(&class, &d, &literal(run), f + 1));
                        }
                        Piece::Region { old, new } => {
                            let d = child.fresh_discriminator();
                            child.add(&mut draft, rec, build_pattern(&class, &d, &literal(old), f));
                            let d = child.fresh_discriminator();
                            child.add(&mut draft, rec, build_pattern(&class, &d, &literal(new), 1));
                        }
                    }
                    refs.push(Item::Ref(class));
                }
                let members = draft.shapes().filter(|s| s.class == leaf.class).count();
                let uses = draft
                    .shapes()
                    .flat_map(|s| s.refs().map(str::to_string).collect::<Vec<_>>())
                    .filter(|c| *c == leaf.class)
                    .count();
                if plan.top.is_some() && members == 1 && uses == 1 {
                    draft.entries[index] = None;
                    top_body.extend(refs);
                    top_changed = true;
                } else {
                    let p = build_pattern(&leaf.class, &leaf.discriminator, &refs, f + 1);
                    child.replace(&mut draft, index, rec, p);
                    top_body.push(Item::Ref(leaf.class.clone()));
                }
            }
        }
    }

    if let Some(top) = plan.top {
        let index = source(a, top);
        if top_changed {
            let shape = parse_shape(g.pattern(index)).expect("planned rows have the learned shape");
            let f = g.pattern(index).frequency;
            let p = build_pattern(&shape.class, &shape.discriminator, &top_body, f + 1);
            child.replace(&mut draft, index, rec, p);
        } else {
            draft.bump(index);
        }
    }
    child.grammar = draft.finish();
    child.score = None;
    child
}

/// Candidate grammars after assimilating `new`, the `new_index`-th
/// pattern of the corpus.
///
/// An exact parse raises the frequencies of the patterns it uses. Otherwise
/// each sufficiently good partial match is split into matched runs and
/// two-member classes for the mismatched regions, giving one candidate per
/// alignment. When no partial match can be split, `new` is wrapped in
/// fresh identifiers and added.
pub fn assimilate_new_pattern(
    new: &Pattern,
    new_index: usize,
    store: &LearnedGrammar,
    config: &LearnConfig,
) -> Result<Vec<LearnedGrammar>, LearnError> {
    if new.is_empty() {
        return Err(LearnError::EmptyNew);
    }
    if store.grammar.is_empty() {
        return Ok(vec![wrap(store, new, new_index)]);
    }
    let result = build_alignments(new, &store.grammar, &config.score.build)?;
    if let Some(s) = result.ranked().find(|s| is_exact_parse(&s.alignment)) {
        return Ok(vec![exact(store, &s.alignment, new_index)]);
    }
    let mut children = Vec::new();
    let mut seen = HashSet::new();
    for s in result.ranked() {
        if !meets_threshold(&s.alignment, config) {
            continue;
        }
        if let Some(plan) = plan_split(&s.alignment, &store.grammar) {
            let child = apply(store, &s.alignment, plan, new_index);
            if seen.insert(child.grammar.to_text()) {
                children.push(child);
            }
        }
    }
    if children.is_empty() {
        children.push(wrap(store, new, new_index));
    }
    Ok(children)
}
