use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Binary,
    Count,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSpec {
    /// Any non-empty subset of `{1, 2}`.
    pub ngram_orders: Vec<usize>,
    /// Features seen fewer times than this in training are dropped.
    pub min_count: usize,
    pub weighting: Weighting,
    /// Scale each document vector to unit L2 norm.
    pub normalize: bool,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            ngram_orders: vec![1, 2],
            min_count: 1,
            weighting: Weighting::Count,
            normalize: true,
        }
    }
}

impl FeatureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ngram_orders.is_empty() || self.ngram_orders.iter().any(|&n| n != 1 && n != 2) {
            return Err(Error::Config(format!(
                "ngram_orders must be a non-empty subset of {{1, 2}}, got {:?}",
                self.ngram_orders
            )));
        }
        Ok(())
    }

    fn has(&self, order: usize) -> bool {
        self.ngram_orders.contains(&order)
    }
}

/// One feature occurrence and the token positions that produce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub feature: usize,
    pub positions: Vec<usize>,
}

/// Sparse vector, sorted by feature index.
pub type SparseVec = Vec<(usize, f64)>;

/// Feature vocabulary learned from a training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FeatureMapRepr", into = "FeatureMapRepr")]
pub struct FeatureMap {
    spec: FeatureSpec,
    features: Vec<String>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct FeatureMapRepr {
    spec: FeatureSpec,
    features: Vec<String>,
}

impl From<FeatureMapRepr> for FeatureMap {
    fn from(r: FeatureMapRepr) -> Self {
        let index = r.features.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        Self {
            spec: r.spec,
            features: r.features,
            index,
        }
    }
}

impl From<FeatureMap> for FeatureMapRepr {
    fn from(m: FeatureMap) -> Self {
        Self {
            spec: m.spec,
            features: m.features,
        }
    }
}

fn ngrams<'a>(spec: &FeatureSpec, tokens: &'a [String]) -> impl Iterator<Item = (String, Vec<usize>)> + 'a {
    let uni = spec.has(1);
    let bi = spec.has(2);
    let unigrams = tokens
        .iter()
        .enumerate()
        .filter(move |_| uni)
        .map(|(i, t)| (t.clone(), vec![i]));
    let bigrams = tokens
        .windows(2)
        .enumerate()
        .filter(move |_| bi)
        .map(|(i, w)| (format!("{} {}", w[0], w[1]), vec![i, i + 1]));
    unigrams.chain(bigrams)
}

impl FeatureMap {
    /// Collects n-grams from `corpus` that occur at least `min_count` times.
    pub fn build(corpus: &Corpus, spec: &FeatureSpec) -> Result<Self> {
        spec.validate()?;
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for d in corpus.documents() {
            for (f, _) in ngrams(spec, &d.tokens) {
                *counts.entry(f).or_insert(0) += 1;
            }
        }
        let features: Vec<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= spec.min_count)
            .map(|(f, _)| f)
            .collect();
        Ok(FeatureMapRepr {
            spec: spec.clone(),
            features,
        }
        .into())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn name(&self, feature: usize) -> &str {
        &self.features[feature]
    }

    pub fn get(&self, feature: &str) -> Option<usize> {
        self.index.get(feature).copied()
    }

    pub fn spec(&self) -> &FeatureSpec {
        &self.spec
    }

    /// Known feature occurrences in `tokens`, in token order.
    pub fn occurrences(&self, tokens: &[String]) -> Vec<Occurrence> {
        ngrams(&self.spec, tokens)
            .filter_map(|(f, positions)| {
                self.get(&f).map(|feature| Occurrence { feature, positions })
            })
            .collect()
    }

    pub fn vectorize(&self, tokens: &[String]) -> SparseVec {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for occ in self.occurrences(tokens) {
            *counts.entry(occ.feature).or_insert(0.0) += 1.0;
        }
        let mut v: SparseVec = counts
            .into_iter()
            .map(|(f, c)| match self.spec.weighting {
                Weighting::Binary => (f, 1.0),
                Weighting::Count => (f, c),
            })
            .collect();
        if self.spec.normalize {
            let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, x) in &mut v {
                    *x /= norm;
                }
            }
        }
        v
    }
}
