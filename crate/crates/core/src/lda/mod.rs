//! LDA topic modeling by collapsed Gibbs sampling, and topic assignments
//! (fitted or imported) that label each document with one topic.

mod import;
mod sampler;

pub use import::{import_assignment, parse_assignment, AssignmentFormat};
pub use sampler::GibbsSampler;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::{Error, Result};

/// Sampler settings. `alpha = None` means the symmetric `50 / n_topics` prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaConfig {
    pub n_topics: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub sample_lag: usize,
    pub seed: u64,
    pub min_doc_freq: usize,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            n_topics: 10,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            sample_lag: 10,
            seed: 0,
            min_doc_freq: 5,
        }
    }
}

impl LdaConfig {
    pub fn with_topics(&self, n_topics: usize) -> Self {
        Self {
            n_topics,
            ..self.clone()
        }
    }

    pub fn effective_alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.n_topics as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("lda: {m}")));
        if self.n_topics == 0 {
            return bad("n_topics must be at least 1");
        }
        if self.n_topics > u32::MAX as usize {
            return bad("n_topics too large");
        }
        let alpha = self.effective_alpha();
        if !(alpha.is_finite() && alpha > 0.0) || !(self.beta.is_finite() && self.beta > 0.0) {
            return bad("alpha and beta must be positive and finite");
        }
        if self.burn_in >= self.iterations {
            return bad("burn_in must be smaller than iterations");
        }
        if self.sample_lag == 0 {
            return bad("sample_lag must be at least 1");
        }
        Ok(())
    }

    /// True if the state after `sweep` (1-based) is averaged into the result.
    fn is_sample_sweep(&self, sweep: usize) -> bool {
        sweep > self.burn_in && (sweep - self.burn_in).is_multiple_of(self.sample_lag)
    }
}

/// Pruned vocabulary, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(words: Vec<String>) -> Self {
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        Self { words, index }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.words
    }
}

impl Vocabulary {
    /// Keeps words occurring in at least `min_doc_freq` documents.
    pub fn build(corpus: &Corpus, min_doc_freq: usize) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for d in corpus.documents() {
            let mut seen: Vec<&str> = d.tokens.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for w in seen {
                *df.entry(w).or_insert(0) += 1;
            }
        }
        df.into_iter()
            .filter(|&(_, n)| n >= min_doc_freq)
            .map(|(w, _)| w.to_string())
            .collect::<Vec<_>>()
            .into()
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A fitted model. `doc_topic_dist` is the mean of the smoothed document-topic
/// proportions over the lagged post-burn-in samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub config: LdaConfig,
    pub alpha: f64,
    pub vocab: Vocabulary,
    pub doc_ids: Vec<String>,
    pub doc_lengths: Vec<usize>,
    pub doc_topic_counts: Vec<Vec<u32>>,
    pub topic_word_counts: Vec<Vec<u32>>,
    pub topic_totals: Vec<u64>,
    pub doc_topic_dist: Vec<Vec<f64>>,
    pub samples: usize,
}

impl LdaModel {
    pub fn n_topics(&self) -> usize {
        self.config.n_topics
    }

    /// Checks the count identities that hold for any valid sampler state.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let pruned: usize = self.doc_lengths.iter().sum();
        if self.topic_totals.iter().sum::<u64>() != pruned as u64 {
            return Err("topic totals do not sum to the pruned token count".into());
        }
        for (d, (row, &len)) in self.doc_topic_counts.iter().zip(&self.doc_lengths).enumerate() {
            if row.iter().map(|&c| c as usize).sum::<usize>() != len {
                return Err(format!("doc {d}: topic counts do not sum to its length"));
            }
        }
        for (t, (row, &total)) in self.topic_word_counts.iter().zip(&self.topic_totals).enumerate() {
            if row.iter().map(|&c| c as u64).sum::<u64>() != total {
                return Err(format!("topic {t}: word counts do not sum to its total"));
            }
        }
        for (d, row) in self.doc_topic_dist.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 || row.iter().any(|&p| !(p >= 0.0)) {
                return Err(format!("doc {d}: topic distribution sums to {s}"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

pub fn fit_lda(corpus: &Corpus, cfg: &LdaConfig) -> Result<LdaModel> {
    fit_lda_observed(corpus, cfg, |_| {})
}

/// Fits LDA, calling `observe` after every sweep.
///
/// In debug builds every sweep also re-derives all counts from the token
/// assignments and panics on any mismatch.
pub fn fit_lda_observed<F>(corpus: &Corpus, cfg: &LdaConfig, mut observe: F) -> Result<LdaModel>
where
    F: FnMut(&GibbsSampler),
{
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::Config("cannot fit LDA on an empty corpus".into()));
    }
    let vocab = Vocabulary::build(corpus, cfg.min_doc_freq);
    if vocab.is_empty() {
        return Err(Error::EmptyVocab);
    }
    let docs: Vec<Vec<u32>> = corpus
        .documents()
        .iter()
        .map(|d| d.tokens.iter().filter_map(|w| vocab.get(w)).collect())
        .collect();
    let doc_lengths: Vec<usize> = docs.iter().map(Vec::len).collect();
    let k = cfg.n_topics;
    let alpha = cfg.effective_alpha();
    let mut sampler = GibbsSampler::new(docs, vocab.len(), k, alpha, cfg.beta, cfg.seed);

    let mut acc = vec![vec![0.0f64; k]; corpus.len()];
    let mut samples = 0usize;
    let accumulate = |s: &GibbsSampler, acc: &mut Vec<Vec<f64>>| {
        for (d, row) in acc.iter_mut().enumerate() {
            for (a, p) in row.iter_mut().zip(s.theta(d)) {
                *a += p;
            }
        }
    };
    for sweep in 1..=cfg.iterations {
        sampler.sweep();
        if cfg!(debug_assertions) {
            if let Err(e) = sampler.check_invariants() {
                panic!("sampler invariant violated after sweep {sweep}: {e}");
            }
        }
        observe(&sampler);
        if cfg.is_sample_sweep(sweep) {
            accumulate(&sampler, &mut acc);
            samples += 1;
        }
    }
    if samples == 0 {
        accumulate(&sampler, &mut acc);
        samples = 1;
    }
    let doc_topic_dist = acc
        .into_iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            row.into_iter().map(|v| v / total).collect()
        })
        .collect();

    Ok(LdaModel {
        config: cfg.clone(),
        alpha,
        doc_ids: corpus.ids().map(String::from).collect(),
        doc_lengths,
        doc_topic_counts: sampler.doc_topic_counts(),
        topic_word_counts: sampler.topic_word_counts(),
        topic_totals: sampler.topic_totals().to_vec(),
        doc_topic_dist,
        samples,
        vocab,
    })
}

/// Each document labeled with one topic id in `0..n_topics`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicAssignment {
    pub doc_ids: Vec<String>,
    pub topics: Vec<usize>,
    pub n_topics: usize,
    /// Topic that collects imported outliers (`-1`), if any were present.
    pub outlier_topic: Option<usize>,
}

impl TopicAssignment {
    pub fn topic_of(&self, doc_id: &str) -> Option<usize> {
        self.doc_ids.iter().position(|d| d == doc_id).map(|i| self.topics[i])
    }

    /// Relabels `corpus` so that each document's class is `topic_<id>`.
    pub fn relabel(&self, corpus: &Corpus) -> Result<Corpus> {
        let by_id: HashMap<&str, usize> = self
            .doc_ids
            .iter()
            .map(String::as_str)
            .zip(self.topics.iter().copied())
            .collect();
        corpus.relabel(|d| {
            by_id
                .get(d.id.as_str())
                .map(|t| format!("topic_{t}"))
                .ok_or_else(|| Error::IncompleteAssignment(d.id.clone()))
        })
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(dist: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in dist.iter().enumerate().skip(1) {
        if p > dist[best] {
            best = i;
        }
    }
    best
}

pub fn assign_topics(model: &LdaModel) -> TopicAssignment {
    TopicAssignment {
        doc_ids: model.doc_ids.clone(),
        topics: model.doc_topic_dist.iter().map(|row| argmax(row)).collect(),
        n_topics: model.n_topics(),
        outlier_topic: None,
    }
}
