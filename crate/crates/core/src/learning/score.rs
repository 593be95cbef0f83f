//! Description length of a grammar plus the corpus encoded with it.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frequency::{compute_grammar_frequencies, FrequencyTable};
use super::LearnError;
use crate::alignment::{
    build_alignments, derive_code_pattern, Alignment, BuildConfig, BuildError, ScoredAlignment,
};
use crate::coding::{code_length, CodeScheme};
use crate::grammar::Grammar;
use crate::pattern::{Corpus, SymbolKind};

/// `T = G + E`, all in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrammarScore {
    pub g: f64,
    pub e: f64,
    pub t: f64,
}

/// How the code sizes used for `G` and `E` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FrequencyMode {
    /// From the grammar's own pattern frequencies.
    PerGrammar,
    /// From the alignments chosen to encode the corpus.
    #[default]
    PerAlignmentSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub build: BuildConfig,
    pub mode: FrequencyMode,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            build: BuildConfig {
                beam_width: 50,
                max_stages: 8,
                max_results: 50,
                ..BuildConfig::default()
            },
            mode: FrequencyMode::default(),
        }
    }
}

/// How one New pattern is encoded.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub new_index: usize,
    /// The code pattern, or the raw New marks when uncovered.
    pub code: Vec<String>,
    pub bits: f64,
    /// False when no alignment parses the pattern exactly; `bits` is then
    /// its cost under a uniform code.
    pub covered: bool,
    pub alignment: Option<Alignment>,
}

#[derive(Debug, Clone)]
pub struct GrammarReport {
    pub score: GrammarScore,
    pub encodings: Vec<Encoding>,
    pub frequencies: FrequencyTable,
    pub scheme: CodeScheme,
}

/// True when every New symbol and every Old content symbol is matched.
pub fn is_exact_parse(a: &Alignment) -> bool {
    a.columns.iter().all(|col| {
        col.len() > 1 || (col[0].0 != 0 && a.symbol(col[0]).kind != SymbolKind::Content)
    })
}

/// The best exact parse of `new` under `grammar`, if any.
pub(crate) fn best_exact_parse(
    new: &crate::pattern::Pattern,
    grammar: &Grammar,
    build: &BuildConfig,
) -> Result<Option<ScoredAlignment>, BuildError> {
    let result = build_alignments(new, grammar, build)?;
    let best = result.ranked().find(|s| is_exact_parse(&s.alignment)).cloned();
    Ok(best)
}

pub fn score_grammar(
    grammar: &Grammar,
    corpus: &Corpus,
    config: &ScoreConfig,
) -> Result<GrammarReport, LearnError> {
    if grammar.is_empty() {
        return Err(LearnError::EmptyGrammar);
    }
    let parses: Vec<Option<ScoredAlignment>> = corpus
        .patterns()
        .par_iter()
        .map(|new| best_exact_parse(new, grammar, &config.build))
        .collect::<Result<_, _>>()?;

    let subsets: Vec<Vec<&Alignment>> = parses
        .iter()
        .map(|p| p.iter().map(|s| &s.alignment).collect())
        .collect();
    let frequencies = compute_grammar_frequencies(&subsets);
    let scheme = match config.mode {
        FrequencyMode::PerGrammar => crate::coding::build_code_scheme(
            grammar.patterns(),
            crate::coding::FrequencySource::PerGrammar,
            config.build.code,
        )?,
        FrequencyMode::PerAlignmentSet => {
            let mut freqs = frequencies.type_freq.clone();
            for p in grammar.patterns() {
                for s in &p.symbols {
                    let f = freqs.entry(s.mark.clone()).or_insert(1);
                    *f = (*f).max(1);
                }
            }
            CodeScheme::from_frequencies(freqs, config.build.code)?
        }
    };
    let cost = |mark: &str| scheme.code_size(mark).expect("grammar marks are in the scheme");

    let g: f64 = grammar
        .patterns()
        .iter()
        .flat_map(|p| p.symbols.iter())
        .map(|s| cost(&s.mark))
        .sum();

    let mut types: BTreeSet<&str> = scheme.types().collect();
    for p in corpus.patterns() {
        types.extend(p.symbols.iter().map(|s| s.mark.as_str()));
    }
    let uniform = code_length(1.0 / types.len() as f64, config.build.code.mode);

    let encodings: Vec<Encoding> = parses
        .into_iter()
        .enumerate()
        .map(|(new_index, parse)| match parse {
            Some(s) => {
                let code = derive_code_pattern(&s.alignment).code;
                let bits = code.iter().map(|m| cost(m)).sum();
                Encoding {
                    new_index,
                    code,
                    bits,
                    covered: true,
                    alignment: Some(s.alignment),
                }
            }
            None => {
                let new = &corpus.patterns()[new_index];
                Encoding {
                    new_index,
                    code: new.marks().into_iter().map(str::to_string).collect(),
                    bits: uniform * new.len() as f64,
                    covered: false,
                    alignment: None,
                }
            }
        })
        .collect();
    let e: f64 = encodings.iter().map(|x| x.bits).sum();
    Ok(GrammarReport {
        score: GrammarScore { g, e, t: g + e },
        encodings,
        frequencies,
        scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{Pattern, Role};

    #[test]
    fn wrapped_pattern_costs_only_its_identifiers() {
        let g = Grammar::parse("< %1 1 a b >").unwrap();
        let corpus = Corpus::new(vec![Pattern::from_marks("a b", Role::New)]);
        let r = score_grammar(&g, &corpus, &ScoreConfig::default()).unwrap();
        assert!(r.encodings[0].covered);
        assert_eq!(r.encodings[0].code, vec!["<", "%1", "1", ">"]);
        let ids: f64 = ["<", "%1", "1", ">"]
            .iter()
            .map(|m| r.scheme.code_size(m).unwrap())
            .sum();
        assert_eq!(r.score.e, ids);
        assert_eq!(r.score.t, r.score.g + r.score.e);
    }

    #[test]
    fn uncovered_patterns_pay_the_uniform_cost() {
        let g = Grammar::parse("< %1 1 a b >").unwrap();
        let corpus = Corpus::new(vec![Pattern::from_marks("x y z", Role::New)]);
        let r = score_grammar(&g, &corpus, &ScoreConfig::default()).unwrap();
        assert!(!r.encodings[0].covered);
        // types: < > %1 1 a b x y z -> ceil(log2 9) + 1 = 5 bits each
        assert_eq!(r.score.e, 15.0);
    }

    #[test]
    fn empty_grammar_is_an_error() {
        let corpus = Corpus::new(vec![Pattern::from_marks("a", Role::New)]);
        assert!(matches!(
            score_grammar(&Grammar::empty(), &corpus, &ScoreConfig::default()),
            Err(LearnError::EmptyGrammar)
        ));
    }

    #[test]
    fn exact_parse_needs_all_content_matched() {
        let g = Grammar::parse("< %1 1 a b c >").unwrap();
        let corpus = Corpus::new(vec![Pattern::from_marks("a b", Role::New)]);
        let r = score_grammar(&g, &corpus, &ScoreConfig::default()).unwrap();
        assert!(!r.encodings[0].covered);
    }
}
