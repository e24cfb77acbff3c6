//! Per-token attributions for the linear classifier.
//!
//! For a linear score `s_c(x) = w_c · x + b_c` and an all-zero baseline, the
//! integrated-gradients attribution of feature `f` is exactly `w_c[f] · x[f]`,
//! so no path integration is needed. Each feature's attribution is shared
//! equally among its occurrences, and each occurrence's share is split equally
//! among the tokens that form it (one for a unigram, two for a bigram).
//! Summing over tokens and adding the bias recovers the decision score.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::LinearModel;
use crate::corpus::{Corpus, Document};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenAttribution {
    pub position: usize,
    pub token: String,
    pub score: f64,
}

pub fn attribute_tokens(model: &LinearModel, tokens: &[String], class: usize) -> Vec<TokenAttribution> {
    let occurrences = model.features.occurrences(tokens);
    let x: BTreeMap<usize, f64> = model.features.vectorize(tokens).into_iter().collect();
    let mut per_feature: BTreeMap<usize, usize> = BTreeMap::new();
    for occ in &occurrences {
        *per_feature.entry(occ.feature).or_insert(0) += 1;
    }
    let mut scores = vec![0.0; tokens.len()];
    for occ in &occurrences {
        let contribution = model.weights[class][occ.feature] * x[&occ.feature];
        let share = contribution / per_feature[&occ.feature] as f64 / occ.positions.len() as f64;
        for &p in &occ.positions {
            scores[p] += share;
        }
    }
    tokens
        .iter()
        .zip(scores)
        .enumerate()
        .map(|(position, (token, score))| TokenAttribution {
            position,
            token: token.clone(),
            score,
        })
        .collect()
}

/// Attributions of `doc`'s tokens toward class `target`.
pub fn attribute_document(model: &LinearModel, doc: &Document, target: &str) -> Result<Vec<TokenAttribution>> {
    let class = model.label_index(target)?;
    Ok(attribute_tokens(model, &doc.tokens, class))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedToken {
    pub token: String,
    /// Mean attribution per occurrence.
    pub score: f64,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAttributions {
    pub label: String,
    pub n_docs: usize,
    pub rows: Vec<RankedToken>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionReport {
    pub k: usize,
    pub classes: Vec<ClassAttributions>,
}

impl AttributionReport {
    pub fn class(&self, label: &str) -> Option<&ClassAttributions> {
        self.classes.iter().find(|c| c.label == label)
    }

    /// `rank,<label>_token,<label>_aas,...` with one column pair per class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank");
        for c in &self.classes {
            out.push_str(&format!(",{0}_token,{0}_aas", csv_field(&c.label)));
        }
        out.push('\n');
        let rows = self.classes.iter().map(|c| c.rows.len()).max().unwrap_or(0);
        for r in 0..rows {
            out.push_str(&(r + 1).to_string());
            for c in &self.classes {
                match c.rows.get(r) {
                    Some(t) => out.push_str(&format!(",{},{}", csv_field(&t.token), t.score)),
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Top-`k` tokens per class by mean attribution toward that class, averaged
/// over test documents whose gold label is the class.
pub fn top_attributions(model: &LinearModel, test: &Corpus, k: usize) -> Result<AttributionReport> {
    let mut classes = Vec::with_capacity(model.labels.len());
    for (ci, label) in model.labels.iter().enumerate() {
        let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
        let mut n_docs = 0;
        for d in test.documents().iter().filter(|d| &d.label == label) {
            n_docs += 1;
            for (a, tok) in attribute_tokens(model, &d.tokens, ci).into_iter().zip(&d.tokens) {
                let e = sums.entry(tok.as_str()).or_insert((0.0, 0));
                e.0 += a.score;
                e.1 += 1;
            }
        }
        let mut rows: Vec<RankedToken> = sums
            .into_iter()
            .map(|(token, (sum, n))| RankedToken {
                token: token.to_string(),
                score: sum / n as f64,
                occurrences: n,
            })
            .collect();
        rows.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.token.cmp(&b.token)));
        rows.truncate(k);
        classes.push(ClassAttributions {
            label: label.clone(),
            n_docs,
            rows,
        });
    }
    for d in test.documents() {
        model.label_index(&d.label)?;
    }
    Ok(AttributionReport { k, classes })
}
