//! Span-level NER scoring: a predicted entity counts only if its start, end
//! and type all equal a gold entity in the same document.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_spans, Corpus, NeSpan, NeType};
use crate::{Error, Result};

/// Entity spans per document id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpanSet {
    docs: BTreeMap<String, BTreeSet<NeSpan>>,
}

#[derive(Deserialize)]
struct SpanRecord {
    id: String,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    ne_spans: Vec<NeSpan>,
}

impl SpanSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a document; an empty span list still enrolls it in the universe.
    pub fn insert(&mut self, doc: impl Into<String>, spans: impl IntoIterator<Item = NeSpan>) {
        self.docs.entry(doc.into()).or_default().extend(spans);
    }

    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut set = Self::new();
        for d in corpus.documents() {
            set.insert(d.id.clone(), d.ne_spans.iter().flatten().copied());
        }
        set
    }

    /// Reads the corpus JSONL span schema. `text` is optional; when present,
    /// spans are bounds-checked against it.
    pub fn from_jsonl_str(input: &str) -> Result<Self> {
        let mut set = Self::new();
        for (lineno, line) in input.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: SpanRecord = serde_json::from_str(line)
                .map_err(|e| Error::Format(format!("span line {}: {e}", lineno + 1)))?;
            if set.docs.contains_key(&rec.id) {
                return Err(Error::DuplicateId(rec.id));
            }
            if let Some(text) = &rec.text {
                normalize_spans(&rec.id, text.chars().count(), &rec.ne_spans)?;
            } else if let Some(s) = rec.ne_spans.iter().find(|s| s.start >= s.end) {
                return Err(Error::InvalidSpan {
                    doc: rec.id,
                    detail: format!("empty span [{}, {})", s.start, s.end),
                });
            }
            set.insert(rec.id, rec.ne_spans);
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_jsonl_str(&text)
    }

    pub fn total(&self) -> usize {
        self.docs.values().map(BTreeSet::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NerScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matches: usize,
    pub n_pred: usize,
    pub n_gold: usize,
}

impl NerScores {
    /// Precision is 0 with no predictions, recall 0 with no gold entities,
    /// and F1 is 0 when both are 0.
    pub fn from_counts(matches: usize, n_pred: usize, n_gold: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(matches, n_pred);
        let recall = ratio(matches, n_gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
            matches,
            n_pred,
            n_gold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerReport {
    pub overall: NerScores,
    pub per_type: BTreeMap<String, NerScores>,
}

pub fn score_ner(gold: &SpanSet, pred: &SpanSet) -> Result<NerReport> {
    if let Some(doc) = pred.docs.keys().find(|d| !gold.docs.contains_key(*d)) {
        return Err(Error::UnknownDocument(doc.clone()));
    }
    let empty = BTreeSet::new();
    let mut counts: BTreeMap<Option<NeType>, [usize; 3]> = BTreeMap::new();
    for (doc, g) in &gold.docs {
        let p = pred.docs.get(doc).unwrap_or(&empty);
        for s in g {
            let hit = usize::from(p.contains(s));
            for key in [None, Some(s.ne_type)] {
                let c = counts.entry(key).or_default();
                c[0] += hit;
                c[2] += 1;
            }
        }
        for s in p {
            for key in [None, Some(s.ne_type)] {
                counts.entry(key).or_default()[1] += 1;
            }
        }
    }
    let scores = |k: Option<NeType>| {
        let [m, p, g] = counts.get(&k).copied().unwrap_or_default();
        NerScores::from_counts(m, p, g)
    };
    Ok(NerReport {
        overall: scores(None),
        per_type: NeType::ALL
            .iter()
            .filter(|t| counts.contains_key(&Some(**t)))
            .map(|&t| (t.to_string(), scores(Some(t))))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(s: usize, e: usize, t: NeType) -> NeSpan {
        NeSpan::new(s, e, t)
    }

    fn gold() -> SpanSet {
        let mut g = SpanSet::new();
        g.insert("a", [span(0, 4, NeType::Per), span(10, 16, NeType::Loc)]);
        g.insert("b", [span(0, 3, NeType::Org), span(5, 9, NeType::Loc)]);
        g
    }

    #[test]
    fn identity_scores_one() {
        let r = score_ner(&gold(), &gold()).unwrap();
        assert_eq!((r.overall.precision, r.overall.recall, r.overall.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn two_of_three_against_four() {
        let mut p = SpanSet::new();
        // Right span, wrong type: no credit.
        p.insert("a", [span(0, 4, NeType::Per), span(10, 16, NeType::Org)]);
        p.insert("b", [span(5, 9, NeType::Loc)]);
        let r = score_ner(&gold(), &p).unwrap().overall;
        assert_eq!((r.matches, r.n_pred, r.n_gold), (2, 3, 4));
        assert!((r.precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.recall, 0.5);
        assert!((r.f1 - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn empty_prediction_and_unknown_doc() {
        let r = score_ner(&gold(), &SpanSet::new()).unwrap().overall;
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
        let mut p = SpanSet::new();
        p.insert("zzz", []);
        assert!(matches!(score_ner(&gold(), &p), Err(Error::UnknownDocument(_))));
    }

    #[test]
    fn jsonl_loading_checks_bounds() {
        let ok = SpanSet::from_jsonl_str(
            r#"{"id":"a","text":"John","ne_spans":[{"start":0,"end":4,"type":"PER"}]}"#,
        )
        .unwrap();
        assert_eq!(ok.total(), 1);
        assert!(SpanSet::from_jsonl_str(
            r#"{"id":"a","text":"Jo","ne_spans":[{"start":0,"end":4,"type":"PER"}]}"#
        )
        .is_err());
    }
}
