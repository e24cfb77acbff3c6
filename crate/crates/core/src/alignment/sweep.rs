use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{avg_align, to_f64, AlignmentReport, Partition};
use crate::corpus::Corpus;
use crate::lda::{assign_topics, fit_lda, LdaConfig, TopicAssignment};
use crate::{Error, Result};

/// Topic counts explored by default, roughly doubling from 2 to 500.
pub const DEFAULT_SWEEP: [usize; 11] = [2, 5, 10, 20, 30, 50, 100, 200, 300, 400, 500];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub ns: Vec<usize>,
    /// One LDA chain per seed and n; the curve reports the mean over seeds.
    pub seeds: Vec<u64>,
    pub template: LdaConfig,
    /// Worker threads for independent fits; 1 runs sequentially.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ns: DEFAULT_SWEEP.to_vec(),
            seeds: vec![0],
            template: LdaConfig::default(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub seed: u64,
    pub avg_align: f64,
    pub report: AlignmentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanPoint {
    /// Curve label: `lda` for the sweep, or the name of an imported model.
    pub source: String,
    pub n: usize,
    pub avg_align: f64,
    pub min: f64,
    pub max: f64,
    pub runs: usize,
}

/// Sweep outcome. The floor is the highest mean alignment on the curve,
/// smallest n on ties; imported assignments compete on equal terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicFloor {
    pub per_seed: Vec<CurvePoint>,
    pub curve: Vec<MeanPoint>,
    pub external: Vec<(MeanPoint, AlignmentReport)>,
    pub floor: MeanPoint,
    /// Largest-class share: what a single topic scores.
    pub majority_baseline: f64,
    /// `floor - majority_baseline`.
    pub delta: f64,
}

impl TopicFloor {
    /// Adds an imported assignment (e.g. BERTopic) as an extra curve point.
    pub fn add_external(&mut self, name: &str, corpus: &Corpus, a: &TopicAssignment) -> Result<()> {
        let report = score_assignment(corpus, a)?;
        let v = report.value();
        self.external.push((
            MeanPoint {
                source: name.to_string(),
                n: report.n_topics,
                avg_align: v,
                min: v,
                max: v,
                runs: 1,
            },
            report,
        ));
        self.refresh_floor();
        Ok(())
    }

    fn refresh_floor(&mut self) {
        let best = self
            .curve
            .iter()
            .chain(self.external.iter().map(|(p, _)| p))
            .fold(None::<&MeanPoint>, |best, p| match best {
                Some(b) if b.avg_align > p.avg_align => Some(b),
                Some(b) if b.avg_align == p.avg_align && b.n <= p.n => Some(b),
                _ => Some(p),
            })
            .expect("curve is non-empty");
        self.floor = best.clone();
        self.delta = self.floor.avg_align - self.majority_baseline;
    }

    /// `source,n,seed,avg_align` rows; seed is empty for mean and external rows.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("source,n,seed,avg_align\n");
        for p in &self.per_seed {
            out.push_str(&format!("lda,{},{},{}\n", p.n, p.seed, p.avg_align));
        }
        for p in self.curve.iter().chain(self.external.iter().map(|(p, _)| p)) {
            let source = if p.source == "lda" { "lda_mean" } else { p.source.as_str() };
            out.push_str(&format!("{},{},,{}\n", source, p.n, p.avg_align));
        }
        out
    }
}

/// Scores a topic assignment against the corpus labels.
pub fn score_assignment(corpus: &Corpus, a: &TopicAssignment) -> Result<AlignmentReport> {
    let by_id: HashMap<&str, usize> = a
        .doc_ids
        .iter()
        .map(String::as_str)
        .zip(a.topics.iter().copied())
        .collect();
    let topics = corpus
        .ids()
        .map(|id| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| Error::IncompleteAssignment(id.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<&str> = corpus.documents().iter().map(|d| d.label.as_str()).collect();
    Ok(avg_align(&Partition::from_labels(&topics, &labels)?))
}

/// Fits LDA at every n and seed over the whole corpus and scores each fit.
pub fn topic_floor_sweep(corpus: &Corpus, cfg: &SweepConfig) -> Result<TopicFloor> {
    if cfg.ns.is_empty() || cfg.ns.contains(&0) {
        return Err(Error::Config("sweep needs at least one n, each >= 1".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::Config("sweep needs at least one seed".into()));
    }
    if corpus.is_empty() {
        return Err(Error::Config("cannot sweep an empty corpus".into()));
    }
    let runs: Vec<(usize, u64)> = cfg
        .ns
        .iter()
        .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let fit_one = |&(n, seed): &(usize, u64)| -> Result<CurvePoint> {
        let lda = LdaConfig {
            n_topics: n,
            seed,
            ..cfg.template.clone()
        };
        let model = fit_lda(corpus, &lda)?;
        let report = score_assignment(corpus, &assign_topics(&model))?;
        Ok(CurvePoint {
            n,
            seed,
            avg_align: report.value(),
            report,
        })
    };
    let per_seed: Vec<CurvePoint> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| runs.par_iter().map(fit_one).collect::<Result<Vec<_>>>())?
    } else {
        runs.iter().map(fit_one).collect::<Result<Vec<_>>>()?
    };

    let curve: Vec<MeanPoint> = cfg
        .ns
        .iter()
        .map(|&n| {
            let vals: Vec<f64> = per_seed.iter().filter(|p| p.n == n).map(|p| p.avg_align).collect();
            MeanPoint {
                source: "lda".into(),
                n,
                avg_align: vals.iter().sum::<f64>() / vals.len() as f64,
                min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                runs: vals.len(),
            }
        })
        .collect();

    let labels: Vec<&str> = corpus.documents().iter().map(|d| d.label.as_str()).collect();
    let single = Partition::from_labels(&vec![0; corpus.len()], &labels)?;
    let majority_baseline = to_f64(avg_align(&single).avg_align);

    let mut out = TopicFloor {
        per_seed,
        floor: curve[0].clone(),
        curve,
        external: Vec::new(),
        majority_baseline,
        delta: 0.0,
    };
    out.refresh_floor();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, TokenizerConfig};

    fn corpus() -> Corpus {
        let tok = TokenizerConfig::default();
        let docs = (0..12)
            .map(|i| {
                let text = if i % 2 == 0 { "red green blue red" } else { "one two three one" };
                let label = if i < 9 { "O" } else { "T" };
                Document::new(format!("d{i}"), text, label, &tok)
            })
            .collect();
        Corpus::new(docs, tok).unwrap()
    }

    fn cfg(ns: Vec<usize>) -> SweepConfig {
        SweepConfig {
            ns,
            seeds: vec![1, 2],
            template: LdaConfig {
                iterations: 30,
                burn_in: 10,
                sample_lag: 5,
                min_doc_freq: 1,
                ..LdaConfig::default()
            },
            jobs: 1,
        }
    }

    #[test]
    fn one_topic_scores_the_majority_share() {
        let r = topic_floor_sweep(&corpus(), &cfg(vec![1])).unwrap();
        assert_eq!(r.curve[0].avg_align, 0.75);
        assert_eq!(r.majority_baseline, 0.75);
        assert_eq!(r.delta, 0.0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = corpus();
        let seq = topic_floor_sweep(&c, &cfg(vec![1, 2, 3])).unwrap();
        let par = topic_floor_sweep(&c, &SweepConfig { jobs: 3, ..cfg(vec![1, 2, 3]) }).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.per_seed.len(), 6);
        assert!(seq.curve_csv().starts_with("source,n,seed,avg_align\nlda,1,1,0.75\n"));
    }

    #[test]
    fn bad_sweeps_rejected() {
        assert!(topic_floor_sweep(&corpus(), &cfg(vec![])).is_err());
        assert!(topic_floor_sweep(&corpus(), &cfg(vec![0])).is_err());
    }

    #[test]
    fn external_assignment_can_set_the_floor() {
        let c = corpus();
        let mut r = topic_floor_sweep(&c, &cfg(vec![1])).unwrap();
        let a = TopicAssignment {
            doc_ids: c.ids().map(String::from).collect(),
            topics: (0..12).map(|i| usize::from(i >= 9)).collect(),
            n_topics: 2,
            outlier_topic: None,
        };
        r.add_external("bertopic", &c, &a).unwrap();
        assert_eq!(r.floor.source, "bertopic");
        assert_eq!(r.floor.avg_align, 1.0);
        assert_eq!(r.delta, 0.25);
    }
}
