//! Staged beam search over alignments.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::compose::{compose_alignments, compose_with_pattern};
use super::score::{score_alignment_with, AlignmentScore, CodeRule};
use super::{Alignment, NodeRef};
use crate::coding::{build_code_scheme, CodeOptions, CodeScheme, CodingError, FrequencySource};
use crate::grammar::Grammar;
use crate::matcher::MatchLimits;
use crate::pattern::{Pattern, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("grammar is empty")]
    EmptyGrammar,
    #[error("New pattern is empty")]
    EmptyNew,
    #[error(transparent)]
    Coding(#[from] CodingError),
}

/// Ordering used for pruning and for the returned results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Ranking {
    /// Compression difference first.
    #[default]
    Compression,
    /// Number of matched New symbols first, then compression difference.
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub beam_width: usize,
    pub max_stages: usize,
    pub max_results: usize,
    pub instance_cap: usize,
    /// Stop after this many consecutive stages without a better best CD.
    pub patience: usize,
    pub limits: MatchLimits,
    pub ranking: Ranking,
    pub code: CodeOptions,
    pub code_rule: CodeRule,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            beam_width: 200,
            max_stages: 12,
            max_results: 10,
            instance_cap: 3,
            patience: 3,
            limits: MatchLimits::default(),
            ranking: Ranking::Compression,
            code: CodeOptions::default(),
            code_rule: CodeRule::AllUnmatched,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAlignment {
    pub alignment: Alignment,
    pub score: AlignmentScore,
}

#[derive(Debug, Clone)]
pub struct BuildResult {
    /// Every alignment retained at the end of some stage; `nodes[i].alignment.id == i`.
    pub nodes: Vec<ScoredAlignment>,
    /// Ids of the returned alignments, best first.
    pub results: Vec<usize>,
    pub scheme: CodeScheme,
    pub new: Pattern,
    pub grammar_ids: Vec<String>,
    pub stages: usize,
}

impl BuildResult {
    pub fn best(&self) -> Option<&ScoredAlignment> {
        self.results.first().map(|&i| &self.nodes[i])
    }

    pub fn ranked(&self) -> impl Iterator<Item = &ScoredAlignment> {
        self.results.iter().map(|&i| &self.nodes[i])
    }

    pub fn node_name(&self, r: NodeRef) -> String {
        match r {
            NodeRef::New => "New".to_string(),
            NodeRef::Pattern(i) => self.grammar_ids[i].clone(),
            NodeRef::Alignment(i) => format!("A{i}"),
        }
    }
}

/// Everything [`compare`] looks at, computed once per alignment.
struct RankKey {
    new_hits: usize,
    cd: f64,
    hit_columns: usize,
    sources: Vec<usize>,
    structure: Vec<u32>,
    parents: Option<(NodeRef, NodeRef)>,
}

impl RankKey {
    fn of(x: &ScoredAlignment) -> Self {
        let mut sources = x.alignment.old_sources();
        sources.sort();
        RankKey {
            new_hits: x.score.new_hits,
            cd: x.score.cd,
            hit_columns: x.score.hit_columns,
            sources,
            structure: x.alignment.structure_key(),
            parents: x.alignment.parents,
        }
    }
}

fn compare(x: &RankKey, y: &RankKey, ranking: Ranking) -> Ordering {
    let by_cd = || y.cd.partial_cmp(&x.cd).unwrap_or(Ordering::Equal);
    let first = match ranking {
        Ranking::Compression => by_cd(),
        Ranking::Coverage => y.new_hits.cmp(&x.new_hits).then_with(by_cd),
    };
    first
        .then_with(|| y.hit_columns.cmp(&x.hit_columns))
        .then_with(|| x.sources.cmp(&y.sources))
        .then_with(|| x.structure.cmp(&y.structure))
        .then_with(|| x.parents.cmp(&y.parents))
}

/// Builds alignments of `new` against `grammar` with a per-grammar code.
pub fn build_alignments(
    new: &Pattern,
    grammar: &Grammar,
    config: &BuildConfig,
) -> Result<BuildResult, BuildError> {
    if grammar.is_empty() {
        return Err(BuildError::EmptyGrammar);
    }
    let scheme = build_code_scheme(grammar.patterns(), FrequencySource::PerGrammar, config.code)?;
    build_alignments_with_scheme(new, grammar, &scheme, config)
}

pub fn build_alignments_with_scheme(
    new: &Pattern,
    grammar: &Grammar,
    scheme: &CodeScheme,
    config: &BuildConfig,
) -> Result<BuildResult, BuildError> {
    if grammar.is_empty() {
        return Err(BuildError::EmptyGrammar);
    }
    if new.is_empty() {
        return Err(BuildError::EmptyNew);
    }
    let patterns: Vec<Arc<[Symbol]>> = grammar
        .patterns()
        .iter()
        .map(|p| p.symbols.clone().into())
        .collect();
    let p1 = scheme.p1();
    let root = Alignment::from_new(new);
    let mut nodes: Vec<ScoredAlignment> = Vec::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();

    let score_all = |cands: Vec<Alignment>| -> Result<Vec<ScoredAlignment>, CodingError> {
        cands
            .into_par_iter()
            .map(|alignment| {
                let score = score_alignment_with(&alignment, scheme, config.code_rule)?;
                Ok(ScoredAlignment { alignment, score })
            })
            .collect()
    };

    let stage_one: Vec<Alignment> = (0..patterns.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            compose_with_pattern(&root, i, &patterns[i], p1, &config.limits, config.instance_cap)
                .into_iter()
                .map(move |mut a| {
                    a.parents = Some((NodeRef::New, NodeRef::Pattern(i)));
                    a
                })
        })
        .collect();
    let mut retained: Vec<usize> = Vec::new();
    let mut fresh = admit(
        score_all(stage_one)?,
        &mut seen,
        &mut nodes,
        &mut retained,
        1,
        config,
    );
    let mut best = best_cd(&nodes, &retained);
    let mut stale = 0;
    let mut stage = 1;

    while stage < config.max_stages && !fresh.is_empty() {
        stage += 1;
        let fresh_set: HashSet<usize> = fresh.iter().copied().collect();
        let mut jobs: Vec<(usize, Option<usize>, Option<usize>)> = Vec::new();
        for &a in &fresh {
            for p in 0..patterns.len() {
                jobs.push((a, Some(p), None));
            }
            for &b in &retained {
                if b != a && (!fresh_set.contains(&b) || b > a) {
                    jobs.push((a, None, Some(b)));
                }
            }
        }
        let nodes_ref = &nodes;
        let cands: Vec<Alignment> = jobs
            .into_par_iter()
            .flat_map_iter(|(a, p, b)| {
                let x = &nodes_ref[a].alignment;
                let out: Vec<Alignment> = match (p, b) {
                    (Some(p), _) => compose_with_pattern(
                        x,
                        p,
                        &patterns[p],
                        p1,
                        &config.limits,
                        config.instance_cap,
                    )
                    .into_iter()
                    .map(|mut c| {
                        c.parents = Some((NodeRef::Alignment(a), NodeRef::Pattern(p)));
                        c
                    })
                    .collect(),
                    (None, Some(b)) => compose_alignments(x, &nodes_ref[b].alignment, config.instance_cap)
                        .map(|mut c| {
                            c.parents = Some((NodeRef::Alignment(a), NodeRef::Alignment(b)));
                            c
                        })
                        .into_iter()
                        .collect(),
                    _ => Vec::new(),
                };
                out
            })
            .collect();
        fresh = admit(
            score_all(cands)?,
            &mut seen,
            &mut nodes,
            &mut retained,
            stage,
            config,
        );
        let now = best_cd(&nodes, &retained);
        if now > best + 1e-9 {
            best = now;
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    let mut finals: Vec<(RankKey, usize)> = (0..nodes.len())
        .filter(|&i| nodes[i].score.new_hits > 0 && nodes[i].alignment.old_rows_connected())
        .map(|i| (RankKey::of(&nodes[i]), i))
        .collect();
    finals.sort_by(|x, y| compare(&x.0, &y.0, config.ranking));
    finals.truncate(config.max_results);
    let finals = finals.into_iter().map(|(_, i)| i).collect();
    Ok(BuildResult {
        nodes,
        results: finals,
        scheme: scheme.clone(),
        new: new.clone(),
        grammar_ids: grammar.ids().to_vec(),
        stages: stage,
    })
}

fn best_cd(nodes: &[ScoredAlignment], retained: &[usize]) -> f64 {
    retained
        .iter()
        .map(|&i| nodes[i].score.cd)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Deduplicates candidates, merges them into the beam and records the
/// newcomers that survive pruning. Returns their ids.
fn admit(
    cands: Vec<ScoredAlignment>,
    seen: &mut HashSet<Vec<u32>>,
    nodes: &mut Vec<ScoredAlignment>,
    retained: &mut Vec<usize>,
    stage: usize,
    config: &BuildConfig,
) -> Vec<usize> {
    let mut keyed: Vec<(RankKey, ScoredAlignment)> = cands
        .into_par_iter()
        .filter(|c| c.score.new_hits > 0)
        .map(|c| (RankKey::of(&c), c))
        .collect();
    keyed.par_sort_by(|x, y| compare(&x.0, &y.0, config.ranking));
    keyed.retain(|(k, _)| seen.insert(k.structure.clone()));
    let mut pool: Vec<(RankKey, Result<usize, ScoredAlignment>)> = retained
        .iter()
        .map(|&i| (RankKey::of(&nodes[i]), Ok(i)))
        .collect();
    pool.extend(keyed.into_iter().map(|(k, c)| (k, Err(c))));
    pool.sort_by(|x, y| compare(&x.0, &y.0, config.ranking));
    pool.truncate(config.beam_width);
    let mut keep = Vec::new();
    let mut fresh = Vec::new();
    for (_, entry) in pool {
        match entry {
            Ok(i) => keep.push(i),
            Err(mut c) => {
                let id = nodes.len();
                c.alignment.id = id;
                c.alignment.stage = stage;
                nodes.push(c);
                fresh.push(id);
            }
        }
    }
    keep.extend(fresh.iter().copied());
    *retained = keep;
    fresh
}
