use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::seed;

/// Collapsed Gibbs sampler state for one chain.
///
/// Counts are kept word-major (`word_topic[w * k + t]`) for locality in the
/// inner loop; [`GibbsSampler::topic_word_counts`] returns the topic-major view.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    n_topics: usize,
    vocab_size: usize,
    alpha: f64,
    beta: f64,
    docs: Vec<Vec<u32>>,
    assignments: Vec<Vec<u32>>,
    doc_topic: Vec<u32>,
    word_topic: Vec<u32>,
    topic_totals: Vec<u64>,
    inv_denominator: Vec<f64>,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
    sweeps: usize,
}

impl GibbsSampler {
    /// Seeds the chain with uniformly random topic assignments.
    pub fn new(
        docs: Vec<Vec<u32>>,
        vocab_size: usize,
        n_topics: usize,
        alpha: f64,
        beta: f64,
        seed: u64,
    ) -> Self {
        let mut rng = seed::rng(seed);
        let k = n_topics;
        let mut doc_topic = vec![0u32; docs.len() * k];
        let mut word_topic = vec![0u32; vocab_size * k];
        let mut topic_totals = vec![0u64; k];
        let assignments = docs
            .iter()
            .enumerate()
            .map(|(d, words)| {
                words
                    .iter()
                    .map(|&w| {
                        let t = rng.gen_range(0..k);
                        doc_topic[d * k + t] += 1;
                        word_topic[w as usize * k + t] += 1;
                        topic_totals[t] += 1;
                        t as u32
                    })
                    .collect()
            })
            .collect();
        let vbeta = vocab_size as f64 * beta;
        let inv_denominator = topic_totals.iter().map(|&n| 1.0 / (n as f64 + vbeta)).collect();
        Self {
            n_topics,
            vocab_size,
            alpha,
            beta,
            docs,
            assignments,
            doc_topic,
            word_topic,
            topic_totals,
            inv_denominator,
            weights: vec![0.0; k],
            rng,
            sweeps: 0,
        }
    }

    /// Resamples every token once, documents and tokens in order.
    pub fn sweep(&mut self) {
        let k = self.n_topics;
        let vbeta = self.vocab_size as f64 * self.beta;
        for d in 0..self.docs.len() {
            let dt = d * k;
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i] as usize;
                let wt = w * k;
                let old = self.assignments[d][i] as usize;
                self.doc_topic[dt + old] -= 1;
                self.word_topic[wt + old] -= 1;
                self.topic_totals[old] -= 1;
                self.inv_denominator[old] = 1.0 / (self.topic_totals[old] as f64 + vbeta);

                let mut total = 0.0;
                for t in 0..k {
                    let p = (self.doc_topic[dt + t] as f64 + self.alpha)
                        * (self.word_topic[wt + t] as f64 + self.beta)
                        * self.inv_denominator[t];
                    total += p;
                    self.weights[t] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.assignments[d][i] = new as u32;
                self.doc_topic[dt + new] += 1;
                self.word_topic[wt + new] += 1;
                self.topic_totals[new] += 1;
                self.inv_denominator[new] = 1.0 / (self.topic_totals[new] as f64 + vbeta);
            }
        }
        self.sweeps += 1;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    /// Smoothed per-document topic proportions for the current state.
    pub fn theta(&self, doc: usize) -> impl Iterator<Item = f64> + '_ {
        let k = self.n_topics;
        let denom = self.docs[doc].len() as f64 + k as f64 * self.alpha;
        self.doc_topic[doc * k..(doc + 1) * k]
            .iter()
            .map(move |&c| (c as f64 + self.alpha) / denom)
    }

    pub fn doc_topic_counts(&self) -> Vec<Vec<u32>> {
        self.doc_topic.chunks(self.n_topics).map(<[u32]>::to_vec).collect()
    }

    pub fn topic_word_counts(&self) -> Vec<Vec<u32>> {
        (0..self.n_topics)
            .map(|t| {
                (0..self.vocab_size)
                    .map(|w| self.word_topic[w * self.n_topics + t])
                    .collect()
            })
            .collect()
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_totals
    }

    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.assignments
    }

    /// Recomputes every count from the token assignments and compares.
    pub fn check_invariants(&self) -> Result<(), String> {
        let k = self.n_topics;
        let mut doc_topic = vec![0u32; self.doc_topic.len()];
        let mut word_topic = vec![0u32; self.word_topic.len()];
        let mut totals = vec![0u64; k];
        for (d, (words, zs)) in self.docs.iter().zip(&self.assignments).enumerate() {
            if words.len() != zs.len() {
                return Err(format!("doc {d}: {} tokens but {} assignments", words.len(), zs.len()));
            }
            for (&w, &z) in words.iter().zip(zs) {
                let z = z as usize;
                if z >= k {
                    return Err(format!("doc {d}: topic {z} out of range"));
                }
                doc_topic[d * k + z] += 1;
                word_topic[w as usize * k + z] += 1;
                totals[z] += 1;
            }
        }
        if doc_topic != self.doc_topic {
            return Err("doc-topic counts drifted from assignments".into());
        }
        if word_topic != self.word_topic {
            return Err("topic-word counts drifted from assignments".into());
        }
        if totals != self.topic_totals {
            return Err("topic totals drifted from assignments".into());
        }
        let tokens: usize = self.docs.iter().map(Vec::len).sum();
        if totals.iter().sum::<u64>() != tokens as u64 {
            return Err("topic totals do not sum to the token count".into());
        }
        Ok(())
    }
}
