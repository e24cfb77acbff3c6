use crate::corpus::{NeSpan, NeType};

/// Exact-match entity list, for building annotated fixtures.
///
/// Matching is case-sensitive, longest-first, and only at word boundaries.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<(Vec<char>, NeType)>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, surface: &str, ne_type: NeType) -> &mut Self {
        self.entries.push((surface.chars().collect(), ne_type));
        self.entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        self
    }

    pub fn annotate(&self, text: &str) -> Vec<NeSpan> {
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let at_boundary = i == 0 || !chars[i - 1].is_alphanumeric();
            let hit = at_boundary
                .then(|| {
                    self.entries.iter().find(|(s, _)| {
                        chars[i..].starts_with(s)
                            && chars.get(i + s.len()).is_none_or(|c| !c.is_alphanumeric())
                    })
                })
                .flatten();
            match hit {
                Some((s, t)) if !s.is_empty() => {
                    spans.push(NeSpan::new(i, i + s.len(), *t));
                    i += s.len();
                }
                _ => i += 1,
            }
        }
        spans
    }
}
