//! Command-line front end: align, learn, reason and score.
//!
//! Exit codes: 0 success, 1 input error, 2 empty result.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::alignment::{
    alignment_probabilities_with, audit_trail, build_alignments, derive_code_pattern_with,
    extract_inferences, render_alignment, BuildConfig, BuildResult, CodeRule, ScoredAlignment,
};
use crate::coding::{entropy, redundancy, search_space_stats, CodeMode, CodeOptions};
use crate::fixtures;
use crate::grammar::Grammar;
use crate::learning::{
    canonical_text, learn_grammars_from, provenance_text, score_grammar, verbatim_grammar,
    LearnConfig, ScoreConfig,
};
use crate::pattern::{parse_pattern_file_with, Classifier, Corpus, Pattern, Role};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Empty(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Empty(_) => EXIT_EMPTY,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "spcm", version, about = "Multiple alignment and grammar induction by information compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Align a New pattern against a grammar and print the best alignments.
    Align(AlignArgs),
    /// Learn grammars from a corpus of New patterns.
    Learn(LearnArgs),
    /// Print alternative alignments with relative probabilities and inferences.
    Reason(AlignArgs),
    /// Print coding quantities.
    Score(ScoreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Sfe,
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    /// Every unmatched Old symbol enters the code.
    All,
    /// Only unmatched identifiers enter the code.
    Id,
}

#[derive(Debug, Args)]
struct CodeArgs {
    #[arg(long, value_enum, default_value = "sfe")]
    code_mode: ModeArg,
    /// Alphabet size used for match probabilities.
    #[arg(long, default_value_t = 2)]
    alphabet_size: u32,
    /// Accepted for reproducible invocations; every command is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra marks to treat as identifiers, comma separated.
    #[arg(long, value_delimiter = ',')]
    id_marks: Vec<String>,
}

#[derive(Debug, Args)]
struct AlignArgs {
    /// Grammar file, or `fixture:NAME`.
    #[arg(long)]
    grammar: String,
    /// File of New patterns, or `fixture:NAME`.
    #[arg(long, conflicts_with = "pattern", required_unless_present = "pattern")]
    new: Option<String>,
    /// Inline New pattern, marks separated by spaces.
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long, default_value_t = 200)]
    beam: usize,
    #[arg(long, default_value_t = 10)]
    results: usize,
    #[arg(long, value_enum)]
    code_rule: Option<RuleArg>,
    /// Write the audit trail here; `.json` gives the nested form.
    #[arg(long)]
    audit: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
}

#[derive(Debug, Args)]
struct LearnArgs {
    /// File of New patterns, or `fixture:NAME`.
    #[arg(long)]
    corpus: String,
    /// Starting grammar; empty when absent.
    #[arg(long)]
    grammar: Option<String>,
    /// Alignment beam width used while learning.
    #[arg(long, default_value_t = 50)]
    beam: usize,
    #[arg(long, default_value_t = 20)]
    grammar_beam: usize,
    /// Number of grammars written.
    #[arg(long, default_value_t = 1)]
    results: usize,
    #[arg(long, value_enum, default_value = "all")]
    code_rule: RuleArg,
    /// Directory for grammar files and provenance sidecars.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Entropy of a probability distribution, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    entropy: Option<Vec<f64>>,
    /// Subsequence and comparison counts for a sequence of this length.
    #[arg(long)]
    search_space: Option<u32>,
    /// Redundancy of `frequency:size` pairs, comma separated.
    #[arg(long, value_delimiter = ',')]
    redundancy: Option<Vec<String>>,
    /// G, E and T of `--grammar` over `--corpus`, next to the verbatim grammar.
    #[arg(long = "grammar-T")]
    grammar_t: bool,
    #[arg(long)]
    grammar: Option<String>,
    #[arg(long)]
    corpus: Option<String>,
    #[arg(long, default_value_t = 50)]
    beam: usize,
    #[command(flatten)]
    code: CodeArgs,
}

/// Everything a command needs once arguments are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub build: BuildConfig,
    pub grammar_beam: usize,
    pub seed: u64,
    pub classifier: Classifier,
    pub audit: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn new(beam: usize, results: usize, code: &CodeArgs, rule: CodeRule) -> Result<Self, CliError> {
        if beam == 0 || results == 0 {
            return Err(input("beam width and result count must be positive"));
        }
        if code.alphabet_size < 2 {
            return Err(input("alphabet size must be at least 2"));
        }
        let mode = match code.code_mode {
            ModeArg::Sfe => CodeMode::Sfe,
            ModeArg::Ideal => CodeMode::Ideal,
        };
        Ok(RunConfig {
            build: BuildConfig {
                beam_width: beam,
                max_results: results,
                code: CodeOptions {
                    mode,
                    alphabet_size: code.alphabet_size,
                },
                code_rule: rule,
                ..BuildConfig::default()
            },
            grammar_beam: 1,
            seed: code.seed,
            classifier: Classifier::with_id_marks(code.id_marks.iter().cloned()),
            audit: None,
            out: None,
        })
    }
}

fn rule(arg: RuleArg) -> CodeRule {
    match arg {
        RuleArg::All => CodeRule::AllUnmatched,
        RuleArg::Id => CodeRule::IdentifiersOnly,
    }
}

/// Reads a file, or a bundled fixture named `fixture:NAME`.
fn read_source(source: &str) -> Result<String, CliError> {
    if let Some(name) = source.strip_prefix("fixture:") {
        return fixtures::lookup(name).map(str::to_string).ok_or_else(|| {
            input(format!(
                "unknown fixture `{name}`; available: {}",
                fixtures::NAMES.join(", ")
            ))
        });
    }
    fs::read_to_string(source).map_err(|e| input(format!("{source}: {e}")))
}

/// Classifier for a run: the bundled bird knowledge base brings its own
/// identifier marks.
fn classifier_for(grammar: &str, config: &RunConfig) -> Classifier {
    let mut c = config.classifier.clone();
    if grammar == "fixture:tweety" {
        c.extra_id_marks
            .extend(fixtures::TWEETY_ID_MARKS.iter().map(|m| m.to_string()));
    }
    c
}

fn load_grammar(source: &str, classifier: &Classifier) -> Result<Grammar, CliError> {
    Grammar::parse_with(&read_source(source)?, classifier).map_err(|e| input(format!("{source}: {e}")))
}

fn load_patterns(source: &str, classifier: &Classifier) -> Result<Vec<Pattern>, CliError> {
    parse_pattern_file_with(&read_source(source)?, Role::New, classifier)
        .map_err(|e| input(format!("{source}: {e}")))
}

fn new_patterns(args: &AlignArgs, classifier: &Classifier) -> Result<Vec<Pattern>, CliError> {
    let patterns = match (&args.pattern, &args.new) {
        (Some(text), _) => parse_pattern_file_with(text, Role::New, classifier)
            .map_err(|e| input(format!("--pattern: {e}")))?,
        (None, Some(source)) => load_patterns(source, classifier)?,
        (None, None) => return Err(input("one of --new or --pattern is required")),
    };
    if patterns.is_empty() {
        return Err(input("no New pattern given"));
    }
    Ok(patterns)
}

fn write_audit(path: &Path, results: &[BuildResult]) -> Result<(), CliError> {
    let json = path.extension().is_some_and(|e| e == "json");
    let text = if json {
        let trees: Vec<_> = results.iter().map(|r| audit_trail(r).to_tree_json()).collect();
        serde_json::to_string_pretty(&trees).map_err(input)?
    } else {
        results.iter().map(|r| audit_trail(r).to_text()).collect::<Vec<_>>().join("\n")
    };
    fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn format_cr(cr: Option<f64>) -> String {
    cr.map_or_else(|| "inf".to_string(), |v| format!("{v:.4}"))
}

fn cmd_align(args: &AlignArgs, out: &mut String) -> Result<(), CliError> {
    let rule = rule(args.code_rule.unwrap_or(RuleArg::All));
    let mut config = RunConfig::new(args.beam, args.results, &args.code, rule)?;
    config.audit = args.audit.clone();
    let classifier = classifier_for(&args.grammar, &config);
    let grammar = load_grammar(&args.grammar, &classifier)?;
    let news = new_patterns(args, &classifier)?;

    let mut total = 0;
    let mut builds = Vec::new();
    for (n, new) in news.iter().enumerate() {
        let result = build_alignments(new, &grammar, &config.build).map_err(input)?;
        let ranked: Vec<ScoredAlignment> = result.ranked().cloned().collect();
        let report = alignment_probabilities_with(&ranked, &result.scheme, rule).map_err(input)?;
        let _ = writeln!(out, "# New {n}: {}", new.text());
        for s in &ranked {
            let p_rel = report
                .as_ref()
                .and_then(|r| r.members.iter().find(|m| m.id == s.alignment.id))
                .map_or_else(|| "-".to_string(), |m| format!("{:.4}", m.p_rel));
            let code = derive_code_pattern_with(&s.alignment, rule);
            let residue: Vec<&str> = code.residue.iter().map(|&i| new.symbols[i].mark.as_str()).collect();
            let _ = writeln!(
                out,
                "A{} CD={:.4} CR={} B_N={:.4} B_E={:.4} p_REL={}",
                s.alignment.id,
                s.score.cd,
                format_cr(s.score.cr),
                s.score.b_n,
                s.score.b_e,
                p_rel
            );
            out.push_str(&render_alignment(&s.alignment));
            let _ = writeln!(out, "code: {}", code.code.join(" "));
            let _ = writeln!(out, "residue: {}", residue.join(" "));
            out.push('\n');
        }
        total += ranked.len();
        builds.push(result);
    }
    if let Some(path) = &config.audit {
        write_audit(path, &builds)?;
    }
    if total == 0 {
        return Err(CliError::Empty("no alignment matches any New symbol".into()));
    }
    Ok(())
}

fn cmd_reason(args: &AlignArgs, out: &mut String) -> Result<(), CliError> {
    let rule = rule(args.code_rule.unwrap_or(RuleArg::Id));
    let mut config = RunConfig::new(args.beam, args.results, &args.code, rule)?;
    config.audit = args.audit.clone();
    let classifier = classifier_for(&args.grammar, &config);
    let grammar = load_grammar(&args.grammar, &classifier)?;
    let news = new_patterns(args, &classifier)?;

    let mut total = 0;
    let mut builds = Vec::new();
    for (n, new) in news.iter().enumerate() {
        let result = build_alignments(new, &grammar, &config.build).map_err(input)?;
        let ranked: Vec<ScoredAlignment> = result.ranked().cloned().collect();
        let _ = writeln!(out, "# New {n}: {}", new.text());
        if let Some(report) = alignment_probabilities_with(&ranked, &result.scheme, rule).map_err(input)? {
            for (m, a) in report.members.iter().zip(&report.edited) {
                let inferred: Vec<String> = extract_inferences(a).into_iter().map(|i| i.mark).collect();
                let _ = writeln!(out, "A{} p_REL={:.4} p_ABS={:.6e} B_E={:.4}", m.id, m.p_rel, m.p_abs, m.b_e);
                out.push_str(&render_alignment(a));
                let _ = writeln!(out, "inferences: {}", inferred.join(" "));
                out.push('\n');
            }
            let _ = writeln!(out, "sum p_REL={:.6}", report.p_rel_sum());
            total += report.members.len();
        }
        builds.push(result);
    }
    if let Some(path) = &config.audit {
        write_audit(path, &builds)?;
    }
    if total == 0 {
        return Err(CliError::Empty("no alignment matches any New symbol".into()));
    }
    Ok(())
}

fn cmd_learn(args: &LearnArgs, out: &mut String) -> Result<(), CliError> {
    let mut config = RunConfig::new(args.beam, args.results, &args.code, rule(args.code_rule))?;
    if args.grammar_beam == 0 {
        return Err(input("grammar beam width must be positive"));
    }
    config.grammar_beam = args.grammar_beam;
    config.out = args.out.clone();
    let classifier = config.classifier.clone();
    let corpus = Corpus::new(load_patterns(&args.corpus, &classifier)?);
    if corpus.is_empty() {
        return Err(input(format!("{}: corpus is empty", args.corpus)));
    }
    let initial = match &args.grammar {
        Some(source) => load_grammar(source, &classifier)?,
        None => Grammar::empty(),
    };
    let defaults = ScoreConfig::default();
    let learn = LearnConfig {
        grammar_beam: config.grammar_beam,
        score: ScoreConfig {
            build: BuildConfig {
                beam_width: config.build.beam_width,
                code: config.build.code,
                code_rule: config.build.code_rule,
                ..defaults.build
            },
            ..defaults
        },
        ..LearnConfig::default()
    };
    let learned = learn_grammars_from(&initial, &corpus, &learn).map_err(input)?;
    if learned.is_empty() {
        return Err(CliError::Empty("no grammar learned".into()));
    }
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
    }
    let mut table = String::from("# rank G E T\n");
    for (k, g) in learned.iter().take(args.results).enumerate() {
        let score = g.score.expect("learned grammars are scored");
        let _ = writeln!(table, "{} {:.4} {:.4} {:.4}", k + 1, score.g, score.e, score.t);
        let text = g.grammar.to_text();
        let _ = writeln!(out, "# grammar {}", k + 1);
        out.push_str(&text);
        out.push('\n');
        if let Some(dir) = &config.out {
            let write = |name: String, body: &str| {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| input(format!("{}: {e}", path.display())))
            };
            write(format!("grammar-{}.spg", k + 1), &text)?;
            write(format!("grammar-{}.prov", k + 1), &provenance_text(&g.provenance))?;
        }
    }
    out.push_str(&table);
    if let Some(dir) = &config.out {
        let path = dir.join("scores.txt");
        fs::write(&path, &table).map_err(|e| input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_score(args: &ScoreArgs, out: &mut String) -> Result<(), CliError> {
    let mut any = false;
    if let Some(ps) = &args.entropy {
        any = true;
        let h = entropy(ps).map_err(input)?;
        let _ = writeln!(out, "entropy={h:.6}");
    }
    if let Some(n) = args.search_space {
        any = true;
        let (p, c) = search_space_stats(n).map_err(input)?;
        let _ = writeln!(out, "P={p} C={c}");
    }
    if let Some(pairs) = &args.redundancy {
        any = true;
        let parsed = pairs
            .iter()
            .map(|s| {
                let (f, size) = s
                    .split_once(':')
                    .ok_or_else(|| input(format!("redundancy entry `{s}` is not frequency:size")))?;
                let f: u64 = f.trim().parse().map_err(|_| input(format!("bad frequency in `{s}`")))?;
                let size: f64 = size.trim().parse().map_err(|_| input(format!("bad size in `{s}`")))?;
                Ok((f, size))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let _ = writeln!(out, "redundancy={:.6}", redundancy(&parsed));
    }
    if args.grammar_t {
        any = true;
        let (Some(g), Some(c)) = (&args.grammar, &args.corpus) else {
            return Err(input("--grammar-T needs --grammar and --corpus"));
        };
        let config = RunConfig::new(args.beam, 1, &args.code, CodeRule::AllUnmatched)?;
        let classifier = config.classifier.clone();
        let grammar = load_grammar(g, &classifier)?;
        let corpus = Corpus::new(load_patterns(c, &classifier)?);
        if corpus.is_empty() {
            return Err(input(format!("{c}: corpus is empty")));
        }
        let defaults = ScoreConfig::default();
        let score = ScoreConfig {
            build: BuildConfig {
                beam_width: config.build.beam_width,
                code: config.build.code,
                ..defaults.build
            },
            ..defaults
        };
        let report = score_grammar(&grammar, &corpus, &score).map_err(input)?;
        let verbatim = score_grammar(&verbatim_grammar(&corpus), &corpus, &score).map_err(input)?;
        let covered = report.encodings.iter().filter(|e| e.covered).count();
        let _ = writeln!(
            out,
            "G={:.4} E={:.4} T={:.4} covered={}/{}",
            report.score.g,
            report.score.e,
            report.score.t,
            covered,
            corpus.len()
        );
        let _ = writeln!(
            out,
            "verbatim G={:.4} E={:.4} T={:.4}",
            verbatim.score.g, verbatim.score.e, verbatim.score.t
        );
        let _ = writeln!(out, "canonical:\n{}", canonical_text(&grammar));
    }
    if !any {
        return Err(input(
            "nothing to score; use --entropy, --search-space, --redundancy or --grammar-T",
        ));
    }
    Ok(())
}

/// Runs the command line `args` (program name first), writing results to
/// `stdout` and messages to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let mut out = String::new();
    let status = match &cli.command {
        Command::Align(a) => cmd_align(a, &mut out),
        Command::Reason(a) => cmd_reason(a, &mut out),
        Command::Learn(a) => cmd_learn(a, &mut out),
        Command::Score(a) => cmd_score(a, &mut out),
    };
    let _ = stdout.write_all(out.as_bytes());
    match status {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "spcm: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("spcm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn entropy_of_a_fair_coin() {
        let (code, out, _) = run_str(&["score", "--entropy", "0.5,0.5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "entropy=1.000000\n");
    }

    #[test]
    fn search_space_counts() {
        let (code, out, _) = run_str(&["score", "--search-space", "10"]);
        assert_eq!(code, 0);
        assert_eq!(out, "P=1023 C=522753\n");
    }

    #[test]
    fn bad_arguments_are_input_errors() {
        assert_eq!(run_str(&["align"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["score"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["score", "--entropy", "0.3,0.3"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["align", "--grammar", "fixture:nope", "--pattern", "a"]).0, EXIT_INPUT);
        assert_eq!(
            run_str(&["align", "--grammar", "fixture:kittens", "--pattern", "a", "--alphabet-size", "1"]).0,
            EXIT_INPUT
        );
    }

    #[test]
    fn unmatchable_input_is_empty() {
        let (code, _, err) = run_str(&["align", "--grammar", "fixture:kittens", "--pattern", "q q q"]);
        assert_eq!(code, EXIT_EMPTY, "{err}");
    }

    #[test]
    fn help_succeeds() {
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }
}
