//! Multiple alignments of one New pattern against rows of Old patterns.
//!
//! Columns are kept in a topological order of the graph whose edges join
//! consecutive symbols of each row, so every row reads left to right.

mod audit;
mod build;
mod compose;
mod decode;
mod inference;
mod probability;
mod render;
mod score;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::pattern::{Pattern, Symbol};

pub use audit::{audit_trail, AuditRecord, AuditTrail};
pub use build::{
    build_alignments, build_alignments_with_scheme, BuildConfig, BuildError, BuildResult, Ranking,
    ScoredAlignment,
};
pub use compose::{compose_alignments, compose_with_pattern, exhaustive_compose_with_pattern};
pub use decode::{decode_code_pattern, encode_pattern, DecodeError};
pub use inference::{extract_inferences, extract_inferences_with, Inference};
pub use probability::{
    alignment_probabilities, alignment_probabilities_with, remove_redundant_rows,
    ProbabilityMember, ProbabilityReport,
};
pub use render::render_alignment;
pub use score::{
    derive_code_pattern, derive_code_pattern_with, score_alignment, score_alignment_with,
    AlignmentScore, CodePattern, CodeRule,
};

/// What a row holds: the New pattern or an instance of grammar pattern `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowSource {
    New,
    Old(usize),
}

/// Composition provenance of an alignment operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRef {
    New,
    Pattern(usize),
    Alignment(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub source: RowSource,
    pub symbols: Arc<[Symbol]>,
    /// Column index of each symbol.
    pub cells: Vec<usize>,
}

/// A cell is `(row, position)`.
pub type Cell = (usize, usize);

/// The cells of one column, sorted by row. A column holds at most two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Column {
    len: u8,
    cells: [Cell; 2],
}

impl Column {
    pub fn one(cell: Cell) -> Self {
        Column {
            len: 1,
            cells: [cell, (0, 0)],
        }
    }

    /// Adds a cell; returns false when the column is already full.
    pub fn push(&mut self, cell: Cell) -> bool {
        if self.len as usize == self.cells.len() {
            return false;
        }
        self.cells[self.len as usize] = cell;
        self.len += 1;
        true
    }

    pub fn as_slice(&self) -> &[Cell] {
        &self.cells[..self.len as usize]
    }
}

impl std::ops::Deref for Column {
    type Target = [Cell];

    fn deref(&self) -> &[Cell] {
        self.as_slice()
    }
}

impl std::ops::DerefMut for Column {
    fn deref_mut(&mut self) -> &mut [Cell] {
        &mut self.cells[..self.len as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub id: usize,
    pub stage: usize,
    pub parents: Option<(NodeRef, NodeRef)>,
    pub rows: Vec<Row>,
    /// Cells of each column, sorted by row.
    pub columns: Vec<Column>,
}

impl Alignment {
    /// The single-row alignment holding only `new`.
    pub fn from_new(new: &Pattern) -> Self {
        let symbols: Arc<[Symbol]> = new.symbols.clone().into();
        let n = symbols.len();
        Alignment {
            id: 0,
            stage: 0,
            parents: None,
            rows: vec![Row {
                source: RowSource::New,
                symbols,
                cells: (0..n).collect(),
            }],
            columns: (0..n).map(|p| Column::one((0, p))).collect(),
        }
    }

    pub fn symbol(&self, cell: Cell) -> &Symbol {
        &self.rows[cell.0].symbols[cell.1]
    }

    pub fn column_mark(&self, column: usize) -> &str {
        &self.symbol(self.columns[column][0]).mark
    }

    pub fn new_row(&self) -> &Row {
        &self.rows[0]
    }

    /// Grammar indices of the Old rows, in row order.
    pub fn old_sources(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter_map(|r| match r.source {
                RowSource::Old(i) => Some(i),
                RowSource::New => None,
            })
            .collect()
    }

    pub fn instances_of(&self, pattern: usize) -> usize {
        self.rows
            .iter()
            .filter(|r| r.source == RowSource::Old(pattern))
            .count()
    }

    /// Positions in New whose column also holds an Old symbol.
    pub fn new_hits(&self) -> Vec<usize> {
        let row = &self.rows[0];
        (0..row.symbols.len())
            .filter(|&p| self.columns[row.cells[p]].len() > 1)
            .collect()
    }

    pub fn hit_columns(&self) -> usize {
        self.columns.iter().filter(|c| c.len() > 1).count()
    }

    /// True when the Old rows form one group under "shares a column".
    pub fn old_rows_connected(&self) -> bool {
        let n = self.rows.len();
        if n <= 2 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for col in &self.columns {
            let olds: Vec<usize> = col.iter().map(|c| c.0).filter(|&r| r != 0).collect();
            for w in olds.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 1);
        (2..n).all(|r| find(&mut parent, r) == root)
    }

    /// A key identifying the alignment's structure.
    pub fn structure_key(&self) -> Vec<u32> {
        let mut key = Vec::new();
        for row in &self.rows {
            key.push(match row.source {
                RowSource::New => u32::MAX,
                RowSource::Old(i) => i as u32,
            });
            key.extend(row.cells.iter().map(|&c| c as u32));
            key.push(u32::MAX - 1);
        }
        key
    }
}

/// Reports every violated alignment invariant; empty means valid.
pub fn validate_alignment(a: &Alignment) -> Vec<String> {
    let mut out = Vec::new();
    if a.rows.first().map(|r| r.source) != Some(RowSource::New) {
        out.push("row 0 is not the New pattern".to_string());
    }
    let mut seen = vec![Vec::new(); a.rows.len()];
    for (r, row) in a.rows.iter().enumerate() {
        seen[r] = vec![0usize; row.symbols.len()];
        if row.cells.len() != row.symbols.len() {
            out.push(format!("row {r} has {} cells for {} symbols", row.cells.len(), row.symbols.len()));
            continue;
        }
        for w in row.cells.windows(2) {
            if w[1] <= w[0] {
                out.push(format!("row {r} is not in column order"));
            }
        }
    }
    for (c, col) in a.columns.iter().enumerate() {
        if col.is_empty() {
            out.push(format!("column {c} is empty"));
            continue;
        }
        let mark = &a.symbol(col[0]).mark;
        for (k, &(r, p)) in col.iter().enumerate() {
            if r >= a.rows.len() || p >= a.rows[r].symbols.len() {
                out.push(format!("column {c} refers to a missing cell"));
                continue;
            }
            seen[r][p] += 1;
            if &a.rows[r].symbols[p].mark != mark {
                out.push(format!("column {c} mixes marks"));
            }
            if a.rows[r].cells.get(p) != Some(&c) {
                out.push(format!("cell ({r},{p}) disagrees about its column"));
            }
            if k > 0 && col[k - 1].0 >= r {
                out.push(format!("column {c} holds two symbols of row {r} or is unsorted"));
            }
        }
    }
    for (r, counts) in seen.iter().enumerate() {
        for (p, &n) in counts.iter().enumerate() {
            if n != 1 {
                out.push(format!("symbol ({r},{p}) appears in {n} columns"));
            }
        }
    }
    out
}
