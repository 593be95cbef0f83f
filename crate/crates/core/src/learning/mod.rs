//! Unsupervised learning of grammars by minimum description length.
//!
//! New patterns are assimilated one at a time into each grammar of a beam
//! of alternatives; after each pattern the beam keeps the grammars with the
//! smallest `T = G + E` over the patterns seen so far.

mod assimilate;
mod canonical;
mod frequency;
mod score;
mod shape;

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::BuildError;
use crate::coding::CodingError;
use crate::grammar::Grammar;
use crate::pattern::Corpus;

pub use assimilate::assimilate_new_pattern;
pub use canonical::{canonical_text, canonicalize_grammar};
pub use frequency::{compute_grammar_frequencies, FrequencyTable};
pub use score::{
    is_exact_parse, score_grammar, Encoding, FrequencyMode, GrammarReport, GrammarScore,
    ScoreConfig,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("grammar is empty")]
    EmptyGrammar,
    #[error("New pattern is empty")]
    EmptyNew,
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Coding(#[from] CodingError),
}

/// Which assimilation case produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assimilation {
    /// New parsed exactly; the patterns used had their frequencies raised.
    Exact,
    /// New wrapped in fresh identifiers and added.
    Wrapped,
    /// A partial match split into new patterns.
    Split,
}

impl Assimilation {
    pub fn name(self) -> &'static str {
        match self {
            Assimilation::Exact => "exact",
            Assimilation::Wrapped => "wrapped",
            Assimilation::Split => "split",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    /// Position of the New pattern in the corpus.
    pub new_index: usize,
    pub case: Assimilation,
    /// Ids of the grammar patterns in the alignment used.
    pub sources: Vec<String>,
    /// Id of the derived pattern; absent for exact parses.
    pub pattern: Option<String>,
}

/// One line per record: New index, case, sources, derived pattern id.
pub fn provenance_text(records: &[ProvenanceRecord]) -> String {
    let mut out = String::from("# new case sources pattern\n");
    for r in records {
        let sources = if r.sources.is_empty() {
            "-".to_string()
        } else {
            r.sources.join(",")
        };
        let _ = writeln!(
            out,
            "{} {} {} {}",
            r.new_index,
            r.case.name(),
            sources,
            r.pattern.as_deref().unwrap_or("-")
        );
    }
    out
}

/// A candidate grammar with its history and counters for fresh identifiers.
#[derive(Debug, Clone)]
pub struct LearnedGrammar {
    pub grammar: Grammar,
    pub provenance: Vec<ProvenanceRecord>,
    /// Score over the New patterns assimilated so far.
    pub score: Option<GrammarScore>,
    next_class: u64,
    next_discriminator: u64,
    next_id: u64,
}

fn numeric_suffix(mark: &str, prefix: char) -> Option<u64> {
    mark.strip_prefix(prefix)?.parse().ok()
}

impl LearnedGrammar {
    pub fn empty() -> Self {
        LearnedGrammar::from_grammar(Grammar::empty())
    }

    /// Starts from existing patterns; fresh identifiers avoid those in use.
    pub fn from_grammar(grammar: Grammar) -> Self {
        let marks = || grammar.patterns().iter().flat_map(|p| p.symbols.iter());
        let next_class = marks()
            .filter_map(|s| numeric_suffix(&s.mark, '%'))
            .max()
            .map_or(1, |m| m + 1);
        let next_discriminator = marks()
            .filter_map(|s| s.mark.parse::<u64>().ok())
            .max()
            .map_or(1, |m| m + 1);
        LearnedGrammar {
            grammar,
            provenance: Vec::new(),
            score: None,
            next_class,
            next_discriminator,
            next_id: 1,
        }
    }

    fn fresh_class(&mut self) -> String {
        self.next_class += 1;
        format!("%{}", self.next_class - 1)
    }

    fn fresh_discriminator(&mut self) -> String {
        self.next_discriminator += 1;
        (self.next_discriminator - 1).to_string()
    }

    fn fresh_id<'a>(&mut self, taken: impl Iterator<Item = &'a str>) -> String {
        let taken: HashSet<&str> = taken.collect();
        loop {
            let id = format!("L{}", self.next_id);
            self.next_id += 1;
            if !taken.contains(id.as_str()) {
                return id;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    /// Grammars kept after each pruning.
    pub grammar_beam: usize,
    /// Prune after this many New patterns.
    pub prune_period: usize,
    /// A partial match is split only with at least this many matched New
    /// symbols ...
    pub min_hits: usize,
    /// ... and at least this fraction of the shorter of New and the Old
    /// content.
    pub min_fraction: f64,
    pub score: ScoreConfig,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            grammar_beam: 20,
            prune_period: 1,
            min_hits: 2,
            min_fraction: 0.25,
            score: ScoreConfig::default(),
        }
    }
}

/// Learns grammars for `corpus` from nothing. Best first.
pub fn learn_grammars(corpus: &Corpus, config: &LearnConfig) -> Result<Vec<LearnedGrammar>, LearnError> {
    learn_grammars_from(&Grammar::empty(), corpus, config)
}

/// Learns grammars for `corpus` starting from `initial`. Best first, each
/// scored over the whole corpus.
pub fn learn_grammars_from(
    initial: &Grammar,
    corpus: &Corpus,
    config: &LearnConfig,
) -> Result<Vec<LearnedGrammar>, LearnError> {
    if corpus.is_empty() {
        return Err(LearnError::EmptyCorpus);
    }
    let period = config.prune_period.max(1);
    let mut beam = vec![LearnedGrammar::from_grammar(initial.clone())];
    for (i, new) in corpus.patterns().iter().enumerate() {
        let children: Vec<Vec<LearnedGrammar>> = beam
            .par_iter()
            .map(|g| assimilate_new_pattern(new, i, g, config))
            .collect::<Result<_, _>>()?;
        let mut seen = HashSet::new();
        let mut next: Vec<(String, LearnedGrammar)> = children
            .into_iter()
            .flatten()
            .map(|g| (canonical_text(&g.grammar), g))
            .filter(|(key, _)| seen.insert(key.clone()))
            .collect();
        let last = i + 1 == corpus.len();
        if (i + 1) % period == 0 || last {
            let seen_so_far = Corpus::new(corpus.patterns()[..=i].to_vec());
            let scores: Vec<GrammarScore> = next
                .par_iter()
                .map(|(_, g)| score_grammar(&g.grammar, &seen_so_far, &config.score).map(|r| r.score))
                .collect::<Result<_, _>>()?;
            for ((_, g), s) in next.iter_mut().zip(scores) {
                g.score = Some(s);
            }
            next.sort_by(|(ka, a), (kb, b)| {
                let (ta, tb) = (a.score.unwrap().t, b.score.unwrap().t);
                ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal).then_with(|| ka.cmp(kb))
            });
            next.truncate(config.grammar_beam.max(1));
        }
        beam = next.into_iter().map(|(_, g)| g).collect();
    }
    Ok(beam)
}

/// Each New pattern wrapped in its own identifiers, in corpus order.
pub fn verbatim_grammar(corpus: &Corpus) -> Grammar {
    let patterns = corpus
        .patterns()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let body: Vec<shape::Item> = p.symbols.iter().cloned().map(shape::Item::Literal).collect();
            shape::build_pattern(&format!("%{}", i + 1), &(i + 1).to_string(), &body, 1)
        })
        .collect();
    Grammar::new(patterns).expect("wrapped patterns are valid")
}
