//! Canonical renaming of class marks and discriminators.

use std::collections::BTreeMap;

use super::shape::{build_pattern, parse_shape, Item, Shape};
use crate::grammar::Grammar;
use crate::pattern::{Pattern, Role, Symbol};

fn render(body: &[Item], name: &dyn Fn(&str) -> String) -> String {
    body.iter()
        .map(|i| match i {
            Item::Literal(s) => s.mark.clone(),
            Item::Ref(c) => format!("<{}>", name(c)),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renames class marks and discriminators so that two grammars with the
/// same structure get the same text. Frequencies are reset to 1.
///
/// Classes are ordered by the sorted content of their members, refined
/// through the classes they refer to; discriminators are numbered in that
/// class order, by member content within a class. Patterns without the
/// learned shape follow, sorted by text.
pub fn canonicalize_grammar(g: &Grammar) -> Grammar {
    let shapes: Vec<Option<Shape>> = g.patterns().iter().map(parse_shape).collect();
    let mut members: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in shapes.iter().enumerate() {
        if let Some(s) = s {
            members.entry(s.class.clone()).or_default().push(i);
            for r in s.refs() {
                members.entry(r.to_string()).or_default();
            }
        }
    }

    let mut label: BTreeMap<String, usize> = members.keys().map(|c| (c.clone(), 0)).collect();
    let mut distinct = 1;
    loop {
        let keys: BTreeMap<&String, (usize, Vec<String>)> = members
            .iter()
            .map(|(c, ms)| {
                let name = |r: &str| label[r].to_string();
                let mut sig: Vec<String> = ms
                    .iter()
                    .map(|&i| render(&shapes[i].as_ref().unwrap().body, &name))
                    .collect();
                sig.sort();
                (c, (label[c], sig))
            })
            .collect();
        let mut ranked: Vec<&(usize, Vec<String>)> = keys.values().collect();
        ranked.sort();
        ranked.dedup();
        let next: BTreeMap<String, usize> = keys
            .iter()
            .map(|(c, k)| ((*c).clone(), ranked.binary_search(&k).unwrap()))
            .collect();
        let now = ranked.len();
        label = next;
        if now == distinct {
            break;
        }
        distinct = now;
    }

    let mut order: Vec<&String> = members.keys().collect();
    order.sort_by_key(|c| (label[*c], (*c).clone()));
    let names: BTreeMap<&str, String> = order
        .iter()
        .enumerate()
        .map(|(k, c)| (c.as_str(), format!("%{}", k + 1)))
        .collect();
    let rename = |c: &str| names.get(c).cloned().unwrap_or_else(|| c.to_string());
    let rename_body = |body: &[Item]| -> Vec<Item> {
        body.iter()
            .map(|i| match i {
                Item::Ref(c) => Item::Ref(rename(c)),
                other => other.clone(),
            })
            .collect()
    };

    let mut out = Vec::new();
    let mut discriminator = 0;
    for c in &order {
        let mut bodies: Vec<Vec<Item>> = members[*c]
            .iter()
            .map(|&i| rename_body(&shapes[i].as_ref().unwrap().body))
            .collect();
        bodies.sort_by_cached_key(|b| render(b, &|r: &str| r.to_string()));
        for body in bodies {
            discriminator += 1;
            out.push(build_pattern(&rename(c), &discriminator.to_string(), &body, 1));
        }
    }
    let mut others: Vec<Pattern> = g
        .patterns()
        .iter()
        .zip(&shapes)
        .filter(|(_, s)| s.is_none())
        .map(|(p, _)| {
            let symbols = p
                .symbols
                .iter()
                .map(|s| match names.get(s.mark.as_str()) {
                    Some(n) => Symbol::new(n.as_str()),
                    None => s.clone(),
                })
                .collect();
            Pattern::new(symbols, 1, Role::Old)
        })
        .collect();
    others.sort_by_key(Pattern::text);
    out.extend(others);
    Grammar::new(out).expect("renaming keeps patterns valid")
}

/// The text of the canonical form, suitable for equality tests.
pub fn canonical_text(g: &Grammar) -> String {
    canonicalize_grammar(g).to_text()
}
