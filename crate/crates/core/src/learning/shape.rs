//! The `< %class discriminator body >` shape of learned patterns.

use crate::pattern::{Pattern, Role, Symbol, SymbolKind};

/// One element of a pattern body.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Item {
    Literal(Symbol),
    /// `< %class >`, a slot for any member of the class.
    Ref(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Shape {
    pub class: String,
    pub discriminator: String,
    pub body: Vec<Item>,
    /// Pattern positions spanned by each body item.
    pub spans: Vec<(usize, usize)>,
}

impl Shape {
    pub fn is_leaf(&self) -> bool {
        self.body.iter().all(|i| matches!(i, Item::Literal(_)))
    }

    pub fn refs(&self) -> impl Iterator<Item = &str> {
        self.body.iter().filter_map(|i| match i {
            Item::Ref(c) => Some(c.as_str()),
            Item::Literal(_) => None,
        })
    }

    /// Pattern positions of the body, first and one past last.
    pub fn body_range(&self) -> (usize, usize) {
        (3, self.spans.last().map_or(3, |s| s.1 + 1))
    }
}

pub(crate) fn is_class_mark(mark: &str) -> bool {
    mark.len() > 1 && mark.starts_with('%')
}

/// Reads the shape of `p`, or `None` when it does not have one.
pub(crate) fn parse_shape(p: &Pattern) -> Option<Shape> {
    let s = &p.symbols;
    if s.len() < 5 || s[0].mark != "<" || s[s.len() - 1].mark != ">" {
        return None;
    }
    if !is_class_mark(&s[1].mark) {
        return None;
    }
    let d = &s[2];
    if d.kind != SymbolKind::Identification || is_class_mark(&d.mark) {
        return None;
    }
    let inner = &s[3..s.len() - 1];
    let mut body = Vec::new();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < inner.len() {
        let m = &inner[i].mark;
        if m == "<" {
            if i + 2 < inner.len() && is_class_mark(&inner[i + 1].mark) && inner[i + 2].mark == ">" {
                body.push(Item::Ref(inner[i + 1].mark.clone()));
                spans.push((i + 3, i + 5));
                i += 3;
                continue;
            }
            return None;
        }
        if m == ">" {
            return None;
        }
        body.push(Item::Literal(inner[i].clone()));
        spans.push((i + 3, i + 3));
        i += 1;
    }
    if body.is_empty() {
        return None;
    }
    Some(Shape {
        class: s[1].mark.clone(),
        discriminator: d.mark.clone(),
        body,
        spans,
    })
}

pub(crate) fn build_pattern(class: &str, discriminator: &str, body: &[Item], frequency: u64) -> Pattern {
    let mut symbols = vec![Symbol::new("<"), Symbol::new(class), Symbol::new(discriminator)];
    for item in body {
        match item {
            Item::Literal(s) => symbols.push(s.clone()),
            Item::Ref(c) => {
                symbols.push(Symbol::new("<"));
                symbols.push(Symbol::new(c.as_str()));
                symbols.push(Symbol::new(">"));
            }
        }
    }
    symbols.push(Symbol::new(">"));
    Pattern::new(symbols, frequency.max(1), Role::Old)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_leaf_and_abstract_shapes() {
        let leaf = parse_shape(&Pattern::from_marks("< %3 2 m a r y >", Role::Old)).unwrap();
        assert_eq!(leaf.class, "%3");
        assert_eq!(leaf.discriminator, "2");
        assert!(leaf.is_leaf());
        assert_eq!(leaf.body_range(), (3, 7));
        let top = parse_shape(&Pattern::from_marks("< %4 6 < %3 > x < %1 > >", Role::Old)).unwrap();
        assert_eq!(top.refs().collect::<Vec<_>>(), vec!["%3", "%1"]);
        assert_eq!(top.spans, vec![(3, 5), (6, 6), (7, 9)]);
        assert_eq!(top.body_range(), (3, 10));
        let rebuilt = build_pattern(&top.class, &top.discriminator, &top.body, 1);
        assert_eq!(rebuilt.text(), "< %4 6 < %3 > x < %1 > >");
    }

    #[test]
    fn rejects_other_shapes() {
        for text in ["a b c", "< %1 >", "< %1 2 >", "< x 1 a >", "< %1 %2 a >", "< %1 2 < a > >"] {
            assert!(parse_shape(&Pattern::from_marks(text, Role::Old)).is_none(), "{text}");
        }
    }
}
