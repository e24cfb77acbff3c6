//! Multinomial logistic regression over bag-of-n-gram features, with
//! bootstrap confidence intervals and the masked/unmasked evaluation matrix.

mod bootstrap;
mod features;

pub use bootstrap::{bootstrap_ci, quantile_sorted, BootstrapConfig};
pub use features::{FeatureMap, FeatureSpec, Occurrence, SparseVec, Weighting};

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::corpus::{split_corpus, Corpus, SplitSpec};
use crate::lda::TopicAssignment;
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainHyper {
    pub l2: f64,
    pub epochs: usize,
    /// Step size as a multiple of `1 / L`, where `L` bounds the curvature of
    /// the loss on the training set. Values in `(0, 1]` guarantee the loss
    /// never increases.
    pub lr: f64,
    /// Recorded for provenance. Full-batch descent from zero weights does not
    /// consume randomness.
    pub seed: u64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 300,
            lr: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub labels: Vec<String>,
    pub features: FeatureMap,
    /// `weights[class][feature]`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub hyper: TrainHyper,
    pub loss_history: Vec<f64>,
}

impl LinearModel {
    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::LabelMismatch(label.to_string()))
    }

    pub fn scores(&self, x: &SparseVec) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| x.iter().map(|&(f, v)| w[f] * v).sum::<f64>() + b)
            .collect()
    }

    pub fn decision_score(&self, tokens: &[String], class: usize) -> f64 {
        let x = self.features.vectorize(tokens);
        x.iter().map(|&(f, v)| self.weights[class][f] * v).sum::<f64>() + self.bias[class]
    }

    /// Highest-scoring class, lowest index on ties.
    pub fn predict(&self, tokens: &[String]) -> usize {
        let s = self.scores(&self.features.vectorize(tokens));
        let mut best = 0;
        for (i, &v) in s.iter().enumerate().skip(1) {
            if v > s[best] {
                best = i;
            }
        }
        best
    }

    /// Feature weights keyed by feature string, per class.
    pub fn weight_table(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        self.labels
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| {
                let row = w
                    .iter()
                    .enumerate()
                    .map(|(f, &v)| (self.features.name(f).to_string(), v))
                    .collect();
                (l.clone(), row)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(format!("model: {e}")))
    }
}

fn softmax_in_place(s: &mut [f64]) {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for v in s.iter_mut() {
        *v = (*v - max).exp();
        z += *v;
    }
    for v in s.iter_mut() {
        *v /= z;
    }
}

fn log_sum_exp(s: &[f64]) -> f64 {
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + s.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn train(corpus: &Corpus, spec: &FeatureSpec, hyper: &TrainHyper) -> Result<LinearModel> {
    train_with_labels(corpus, corpus.labels(), spec, hyper)
}

/// Trains over an explicit label set, which may include labels with no
/// training documents (they simply never win).
pub fn train_with_labels(
    corpus: &Corpus,
    labels: &[String],
    spec: &FeatureSpec,
    hyper: &TrainHyper,
) -> Result<LinearModel> {
    let present = corpus.labels().len();
    if present < 2 {
        return Err(Error::DegenerateTraining(present));
    }
    if !(hyper.lr > 0.0 && hyper.lr < 2.0) || !(hyper.l2 >= 0.0) {
        return Err(Error::Config(format!(
            "need 0 < lr < 2 and l2 >= 0, got lr={} l2={}",
            hyper.lr, hyper.l2
        )));
    }
    let mut labels: Vec<String> = labels.to_vec();
    labels.sort();
    labels.dedup();
    let features = FeatureMap::build(corpus, spec)?;
    let class_of: HashMap<&str, usize> =
        labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let xs: Vec<SparseVec> = corpus.documents().iter().map(|d| features.vectorize(&d.tokens)).collect();
    let ys: Vec<usize> = corpus
        .documents()
        .iter()
        .map(|d| {
            class_of
                .get(d.label.as_str())
                .copied()
                .ok_or_else(|| Error::LabelMismatch(d.label.clone()))
        })
        .collect::<Result<_>>()?;

    let n = xs.len() as f64;
    let c = labels.len();
    let f = features.len();
    // Curvature bound: the softmax Hessian is at most 1/2 in operator norm,
    // and the bias adds a constant 1 to every squared feature norm.
    let max_sq = xs
        .iter()
        .map(|x| x.iter().map(|(_, v)| v * v).sum::<f64>() + 1.0)
        .fold(0.0, f64::max);
    let step = hyper.lr / (0.5 * max_sq + hyper.l2);

    let mut weights = vec![vec![0.0; f]; c];
    let mut bias = vec![0.0; c];
    let mut grad_w = vec![vec![0.0; f]; c];
    let mut grad_b = vec![0.0; c];
    let mut probs = vec![0.0; c];
    let mut loss_history = Vec::with_capacity(hyper.epochs + 1);

    let objective = |weights: &[Vec<f64>], bias: &[f64], probs: &mut Vec<f64>| -> f64 {
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(&ys) {
            for k in 0..c {
                probs[k] = x.iter().map(|&(j, v)| weights[k][j] * v).sum::<f64>() + bias[k];
            }
            loss += log_sum_exp(probs) - probs[y];
        }
        let reg: f64 = weights.iter().flatten().map(|w| w * w).sum();
        loss / n + 0.5 * hyper.l2 * reg
    };

    loss_history.push(objective(&weights, &bias, &mut probs));
    for epoch in 1..=hyper.epochs {
        for g in grad_w.iter_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        grad_b.iter_mut().for_each(|v| *v = 0.0);
        for (x, &y) in xs.iter().zip(&ys) {
            for k in 0..c {
                probs[k] = x.iter().map(|&(j, v)| weights[k][j] * v).sum::<f64>() + bias[k];
            }
            softmax_in_place(&mut probs);
            for k in 0..c {
                let r = probs[k] - f64::from(u8::from(k == y));
                grad_b[k] += r;
                for &(j, v) in x {
                    grad_w[k][j] += r * v;
                }
            }
        }
        for k in 0..c {
            for j in 0..f {
                let g = grad_w[k][j] / n + hyper.l2 * weights[k][j];
                weights[k][j] -= step * g;
            }
            bias[k] -= step * grad_b[k] / n;
        }
        let loss = objective(&weights, &bias, &mut probs);
        let previous = *loss_history.last().expect("initial loss recorded");
        if loss > previous + 1e-12 * previous.abs().max(1.0) {
            return Err(Error::LossIncreased {
                epoch,
                previous,
                current: loss,
            });
        }
        loss_history.push(loss);
    }

    Ok(LinearModel {
        labels,
        features,
        weights,
        bias,
        hyper: hyper.clone(),
        loss_history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub config_name: String,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_test: usize,
}

impl EvalResult {
    pub fn overlaps(&self, other: &EvalResult) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Per-item correctness of `model` on `test`.
pub fn predictions_correct(model: &LinearModel, test: &Corpus) -> Result<Vec<bool>> {
    test.documents()
        .iter()
        .map(|d| {
            let gold = model.label_index(&d.label)?;
            Ok(model.predict(&d.tokens) == gold)
        })
        .collect()
}

pub fn evaluate(
    model: &LinearModel,
    test: &Corpus,
    bootstrap: &BootstrapConfig,
    config_name: &str,
) -> Result<EvalResult> {
    if test.is_empty() {
        return Err(Error::Config("cannot evaluate on an empty test set".into()));
    }
    let correct = predictions_correct(model, test)?;
    let accuracy = correct.iter().filter(|&&c| c).count() as f64 / correct.len() as f64;
    let (ci_low, ci_high) = bootstrap_ci(&correct, bootstrap)?;
    Ok(EvalResult {
        config_name: config_name.to_string(),
        accuracy,
        ci_low,
        ci_high,
        n_test: correct.len(),
    })
}

/// Largest label share, exactly.
pub fn majority_baseline_exact(c: &Corpus) -> Ratio<u64> {
    let max = c.label_counts().values().copied().max().unwrap_or(0);
    Ratio::new(max as u64, c.len().max(1) as u64)
}

/// Accuracy of always predicting the most frequent label.
pub fn majority_baseline(c: &Corpus) -> f64 {
    let max = c.label_counts().values().copied().max().unwrap_or(0);
    max as f64 / c.len().max(1) as f64
}

/// Accuracy on `test` of always predicting the most frequent label of
/// `train` (lexicographically first on ties).
pub fn majority_transfer_baseline(train: &Corpus, test: &Corpus) -> f64 {
    let counts = train.label_counts();
    let max = counts.values().copied().max().unwrap_or(0);
    let Some(label) = counts.iter().find(|(_, &c)| c == max).map(|(l, _)| *l) else {
        return 0.0;
    };
    let hits = test.documents().iter().filter(|d| d.label == label).count();
    hits as f64 / test.len().max(1) as f64
}

pub const MATRIX_CONFIGS: [&str; 4] = ["u-u", "u-m", "m-u", "m-m"];

/// Four train-test configurations plus the masking delta `u-u − m-m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub results: Vec<EvalResult>,
    pub masking_delta: f64,
    /// Configurations whose CI does not overlap the u-u CI.
    pub non_overlapping_with_uu: Vec<String>,
}

impl MatrixReport {
    pub fn get(&self, name: &str) -> Option<&EvalResult> {
        self.results.iter().find(|r| r.config_name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("config,accuracy,ci_low,ci_high,n_test\n");
        for r in &self.results {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.config_name, r.accuracy, r.ci_low, r.ci_high, r.n_test
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub report: MatrixReport,
    pub unmasked_model: LinearModel,
    pub masked_model: LinearModel,
}

fn same_split(a: &Corpus, b: &Corpus, what: &str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::SplitMismatch(format!("{what}: {} vs {} documents", a.len(), b.len())));
    }
    for (x, y) in a.documents().iter().zip(b.documents()) {
        if x.id != y.id || x.label != y.label {
            return Err(Error::SplitMismatch(format!(
                "{what}: document {:?} vs {:?}",
                x.id, y.id
            )));
        }
    }
    Ok(())
}

/// Trains on unmasked and masked training data and evaluates each model on
/// both test variants. Bootstrap seeds are derived per configuration.
pub fn run_matrix(
    train_u: &Corpus,
    train_m: &Corpus,
    test_u: &Corpus,
    test_m: &Corpus,
    spec: &FeatureSpec,
    hyper: &TrainHyper,
    bootstrap: &BootstrapConfig,
) -> Result<MatrixOutcome> {
    same_split(train_u, train_m, "train")?;
    same_split(test_u, test_m, "test")?;
    let (mu, mm) = rayon::join(|| train(train_u, spec, hyper), || train(train_m, spec, hyper));
    let (mu, mm) = (mu?, mm?);
    let cases = [(&mu, test_u), (&mu, test_m), (&mm, test_u), (&mm, test_m)];
    let results = cases
        .iter()
        .zip(MATRIX_CONFIGS)
        .map(|((model, test), name)| {
            let b = BootstrapConfig {
                seed: seed::derive_seed(bootstrap.seed, &format!("bootstrap/{name}")),
                ..bootstrap.clone()
            };
            evaluate(model, test, &b, name)
        })
        .collect::<Result<Vec<_>>>()?;
    let masking_delta = results[0].accuracy - results[3].accuracy;
    let non_overlapping_with_uu = results[1..]
        .iter()
        .filter(|r| !r.overlaps(&results[0]))
        .map(|r| r.config_name.clone())
        .collect();
    Ok(MatrixOutcome {
        report: MatrixReport {
            results,
            masking_delta,
            non_overlapping_with_uu,
        },
        unmasked_model: mu,
        masked_model: mm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicClassification {
    pub n_topics: usize,
    pub result: EvalResult,
    /// Largest topic share in the test split.
    pub majority_baseline: f64,
    /// Test accuracy of always predicting the largest training topic.
    pub train_majority_baseline: f64,
}

/// Predicts topic ids instead of class labels: relabels by `assignment`,
/// splits, trains and evaluates with the same pipeline.
pub fn topic_classification(
    corpus: &Corpus,
    assignment: &TopicAssignment,
    split: &SplitSpec,
    spec: &FeatureSpec,
    hyper: &TrainHyper,
    bootstrap: &BootstrapConfig,
) -> Result<TopicClassification> {
    let relabeled = assignment.relabel(corpus)?;
    let (train_c, _dev, test_c) = split_corpus(&relabeled, split)?;
    let model = train_with_labels(&train_c, relabeled.labels(), spec, hyper)?;
    let result = evaluate(&model, &test_c, bootstrap, "topic")?;
    Ok(TopicClassification {
        n_topics: relabeled.labels().len(),
        result,
        majority_baseline: majority_baseline(&test_c),
        train_majority_baseline: majority_transfer_baseline(&train_c, &test_c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, TokenizerConfig};

    fn corpus(rows: &[(&str, &str)]) -> Corpus {
        let tok = TokenizerConfig::default();
        Corpus::new(
            rows.iter()
                .enumerate()
                .map(|(i, (t, l))| Document::new(format!("d{i}"), *t, *l, &tok))
                .collect(),
            tok,
        )
        .unwrap()
    }

    #[test]
    fn single_label_is_degenerate() {
        let c = corpus(&[("a", "O"), ("b", "O")]);
        assert!(matches!(
            train(&c, &FeatureSpec::default(), &TrainHyper::default()),
            Err(Error::DegenerateTraining(1))
        ));
    }

    #[test]
    fn loss_never_increases_and_training_is_repeatable() {
        let c = corpus(&[("a b", "O"), ("a c", "O"), ("d b", "T"), ("d e", "T"), ("a d", "T")]);
        let m = train(&c, &FeatureSpec::default(), &TrainHyper::default()).unwrap();
        assert!(m.loss_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(m, train(&c, &FeatureSpec::default(), &TrainHyper::default()).unwrap());
        assert_eq!(m.labels, ["O", "T"]);
    }

    #[test]
    fn identical_texts_fall_back_to_majority() {
        let rows: Vec<(&str, &str)> = (0..10).map(|i| ("same text", if i < 6 { "O" } else { "T" })).collect();
        let c = corpus(&rows);
        let m = train(&c, &FeatureSpec::default(), &TrainHyper::default()).unwrap();
        let r = evaluate(&m, &c, &BootstrapConfig::default(), "x").unwrap();
        assert_eq!(r.accuracy, majority_baseline(&c));
    }

    #[test]
    fn unseen_label_is_mismatch() {
        let c = corpus(&[("a", "O"), ("b", "T")]);
        let m = train(&c, &FeatureSpec::default(), &TrainHyper::default()).unwrap();
        let other = corpus(&[("a", "X")]);
        assert!(matches!(
            evaluate(&m, &other, &BootstrapConfig::default(), "x"),
            Err(Error::LabelMismatch(_))
        ));
    }

    #[test]
    fn baselines() {
        let balanced = corpus(&[("a", "O"), ("b", "T")]);
        assert_eq!(majority_baseline(&balanced), 0.5);
        let rows: Vec<(&str, &str)> = (0..10).map(|i| ("x", if i < 9 { "O" } else { "T" })).collect();
        assert_eq!(majority_baseline(&corpus(&rows)), 0.9);
        assert_eq!(majority_baseline_exact(&corpus(&rows)), Ratio::new(9, 10));
        assert_eq!(majority_transfer_baseline(&corpus(&rows), &balanced), 0.5);
    }

    #[test]
    fn mismatched_splits_rejected() {
        let a = corpus(&[("a", "O"), ("b", "T")]);
        let b = corpus(&[("a", "O"), ("b", "O")]);
        let err = run_matrix(
            &a,
            &b,
            &a,
            &a,
            &FeatureSpec::default(),
            &TrainHyper::default(),
            &BootstrapConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SplitMismatch(_)));
    }

    #[test]
    fn model_json_round_trip() {
        let c = corpus(&[("a b", "O"), ("c d", "T")]);
        let m = train(&c, &FeatureSpec::default(), &TrainHyper { epochs: 5, ..Default::default() }).unwrap();
        assert_eq!(LinearModel::from_json(&m.to_json()).unwrap(), m);
    }
}
