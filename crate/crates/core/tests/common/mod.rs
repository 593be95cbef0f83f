//! Shared helpers for integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use spcm::alignment::Alignment;
use spcm::{Corpus, Grammar, Pattern, Role};

/// Strips trailing whitespace from every line and trailing blank lines.
pub fn normalize_ws(text: &str) -> String {
    let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
    let end = lines.iter().rposition(|l| !l.is_empty()).map_or(0, |i| i + 1);
    lines[..end].join("\n")
}

/// Columns of a rendered alignment, read from the horizontal position of
/// each symbol. A column is the sorted list of (row marks, index in row).
/// Row 0 is the New pattern.
pub type Layout = BTreeSet<Vec<(String, usize)>>;

pub fn layout_of(render: &str) -> Layout {
    let mut rows: Vec<(String, Vec<(usize, String)>)> = Vec::new();
    for line in render.lines() {
        let tokens = tokens_with_offsets(line);
        let Some(&(_, first)) = tokens.first() else { continue };
        if !first.bytes().all(|b| b.is_ascii_digit()) || tokens.len() < 2 {
            continue;
        }
        let symbols: Vec<(usize, String)> = tokens[1..tokens.len() - 1]
            .iter()
            .filter(|(_, t)| *t != "|")
            .map(|(i, t)| (*i, t.to_string()))
            .collect();
        let marks = symbols.iter().map(|(_, t)| t.as_str()).collect::<Vec<_>>().join(" ");
        let tag = if first == "0" { format!("New: {marks}") } else { marks };
        rows.push((tag, symbols));
    }
    let mut by_x: BTreeMap<usize, Vec<(String, usize)>> = BTreeMap::new();
    for (tag, symbols) in &rows {
        for (k, (x, _)) in symbols.iter().enumerate() {
            by_x.entry(*x).or_default().push((tag.clone(), k));
        }
    }
    by_x
        .into_values()
        .map(|mut c| {
            c.sort();
            c
        })
        .collect()
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens_with_offsets(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Columns of an alignment in the same form as [`layout_of`].
pub fn layout_of_alignment(a: &Alignment) -> Layout {
    let tag = |r: usize| {
        let marks = a.rows[r].symbols.iter().map(|s| s.mark.as_str()).collect::<Vec<_>>().join(" ");
        if r == 0 {
            format!("New: {marks}")
        } else {
            marks
        }
    };
    a.columns
        .iter()
        .map(|col| {
            let mut c: Vec<(String, usize)> = col.iter().map(|&(r, i)| (tag(r), i)).collect();
            c.sort();
            c
        })
        .collect()
}

/// A two-level grammar: one top pattern with `slots` class slots, and
/// `words` leaf patterns per class with distinct random words.
pub struct ToyGrammar {
    pub grammar: Grammar,
    /// Words of each class, as space-separated marks.
    pub classes: Vec<Vec<String>>,
}

fn random_word<R: Rng>(rng: &mut R, letters: &[char], len: usize) -> String {
    (0..len)
        .map(|_| letters.choose(rng).unwrap().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn toy_grammar<R: Rng>(rng: &mut R, slots: usize, words: usize, len: (usize, usize)) -> ToyGrammar {
    let letters: Vec<char> = ('a'..='z').collect();
    let mut used = BTreeSet::new();
    let mut classes = Vec::new();
    for _ in 0..slots {
        let mut class = Vec::new();
        while class.len() < words {
            let n = rng.gen_range(len.0..=len.1);
            let w = random_word(rng, &letters, n);
            if used.insert(w.clone()) {
                class.push(w);
            }
        }
        classes.push(class);
    }
    let mut lines = Vec::new();
    let refs: Vec<String> = (0..slots).map(|c| format!("< %{} >", c + 2)).collect();
    lines.push(format!("< %1 1 {} >", refs.join(" ")));
    let mut d = 1;
    for (c, class) in classes.iter().enumerate() {
        for w in class {
            d += 1;
            lines.push(format!("< %{} {} {} >", c + 2, d, w));
        }
    }
    ToyGrammar {
        grammar: Grammar::parse(&lines.join("\n")).unwrap(),
        classes,
    }
}

impl ToyGrammar {
    /// A sentence with one random word per slot.
    pub fn sentence<R: Rng>(&self, rng: &mut R) -> Pattern {
        let words: Vec<&str> = self
            .classes
            .iter()
            .map(|c| c.choose(rng).unwrap().as_str())
            .collect();
        Pattern::from_marks(&words.join(" "), Role::New)
    }

    /// Up to `n` distinct sentences.
    pub fn corpus<R: Rng>(&self, rng: &mut R, n: usize) -> Corpus {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for _ in 0..n * 20 {
            if out.len() == n {
                break;
            }
            let s = self.sentence(rng);
            if seen.insert(s.text()) {
                out.push(s);
            }
        }
        Corpus::new(out)
    }
}
