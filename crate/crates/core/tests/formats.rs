//! File formats: rendered alignments, pattern and grammar text, audit trails.

mod common;

use common::normalize_ws;
use spcm::alignment::{audit_trail, build_alignments, render_alignment, BuildConfig};
use spcm::pattern::{parse_pattern_file, serialize_pattern_file};
use spcm::{fixtures, Grammar, Role};

const KITTENS_RENDER: &str = include_str!("golden/kittens_render.txt");

#[test]
fn kittens_render_matches_golden() {
    let r = build_alignments(&fixtures::kittens_sentence(), &fixtures::kittens_grammar(), &BuildConfig::default()).unwrap();
    let best = r.best().unwrap();
    assert_eq!(normalize_ws(&render_alignment(&best.alignment)), normalize_ws(KITTENS_RENDER));
}

#[test]
fn render_ignores_trailing_whitespace_only() {
    let padded: String = KITTENS_RENDER.lines().map(|l| format!("{l}   \n")).collect::<String>() + "\n\n";
    assert_eq!(normalize_ws(&padded), normalize_ws(KITTENS_RENDER));
}

#[test]
fn pattern_file_round_trips() {
    let text = "; comment\nt w o k i t t e n s\n\n< %1 1 a b >\n";
    let patterns = parse_pattern_file(text, Role::New).unwrap();
    assert_eq!(patterns.len(), 2);
    let again = parse_pattern_file(&serialize_pattern_file(&patterns), Role::New).unwrap();
    assert_eq!(again, patterns);
}

#[test]
fn grammar_text_round_trips() {
    for text in [fixtures::KITTENS_GRAMMAR, fixtures::JOHN_MARY_TARGET_GRAMMAR, fixtures::TRANSFER_GRAMMAR] {
        let g = Grammar::parse(text).unwrap();
        let again = Grammar::parse(&g.to_text()).unwrap();
        assert_eq!(again.to_text(), g.to_text());
        assert_eq!(again.ids(), g.ids());
    }
}

#[test]
fn audit_text_has_one_line_per_node() {
    let r = build_alignments(&fixtures::kittens_sentence(), &fixtures::kittens_grammar(), &BuildConfig::default()).unwrap();
    let trail = audit_trail(&r);
    let text = trail.to_text();
    let records: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(records.len(), r.nodes.len());
    let best = format!("A{}", r.best().unwrap().alignment.id);
    let line = records.iter().find(|l| l.split_whitespace().next() == Some(best.as_str())).unwrap();
    let cd: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert_eq!(cd, 53.0);
}

#[test]
fn audit_json_nests_parents_under_roots() {
    let r = build_alignments(&fixtures::kittens_sentence(), &fixtures::kittens_grammar(), &BuildConfig::default()).unwrap();
    let trail = audit_trail(&r);
    let json = trail.to_tree_json();
    let text = serde_json::to_string(&json).unwrap();
    assert!(text.contains(&trail.roots[0]));
    let back: spcm::alignment::AuditTrail = serde_json::from_str(&serde_json::to_string(&trail).unwrap()).unwrap();
    assert_eq!(back, trail);
}
