//! Synthetic corpora with known structure, for tests and demonstrations.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::{Corpus, Document, NeSpan, NeType, TokenizerConfig};
use crate::seed;

/// Documents drawn from `n_groups` disjoint vocabularies.
#[derive(Debug, Clone)]
pub struct DisjointTopics {
    pub docs_per_group: usize,
    pub n_groups: usize,
    pub words_per_group: usize,
    pub doc_len: usize,
    /// Share of each group's documents that carry the group's majority class.
    /// Even groups lean `O`, odd groups lean `T`.
    pub class_purity: f64,
    pub seed: u64,
}

impl DisjointTopics {
    /// Returns the corpus and the generating group of every document.
    pub fn generate(&self) -> (Corpus, Vec<usize>) {
        let mut rng = seed::rng(self.seed);
        let tok = TokenizerConfig::default();
        let majority = (self.class_purity * self.docs_per_group as f64).round() as usize;
        let mut docs = Vec::new();
        let mut groups = Vec::new();
        for g in 0..self.n_groups {
            let (major, minor) = if g % 2 == 0 { ("O", "T") } else { ("T", "O") };
            let mut labels: Vec<&str> = (0..self.docs_per_group)
                .map(|i| if i < majority { major } else { minor })
                .collect();
            labels.shuffle(&mut rng);
            for (i, label) in labels.into_iter().enumerate() {
                let words: Vec<String> = (0..self.doc_len)
                    .map(|_| format!("g{g}w{}", rng.gen_range(0..self.words_per_group)))
                    .collect();
                docs.push(Document::new(format!("g{g}d{i}"), words.join(" "), label, &tok));
                groups.push(g);
            }
        }
        (Corpus::new(docs, tok).expect("synthetic corpus is valid"), groups)
    }
}

/// Where the class signal of an [`ne_corpus`] lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalSite {
    /// Entity names are drawn from class-specific pools; the rest is noise.
    Entities,
    /// Entities are class-independent; one filler word is class-specific.
    OutsideEntities,
}

const O_ENTITIES: [(&str, NeType); 6] = [
    ("Berlin", NeType::Loc),
    ("Hamburg", NeType::Loc),
    ("Dresden", NeType::Loc),
    ("Merkel", NeType::Per),
    ("Siemens", NeType::Org),
    ("Bundestag", NeType::Org),
];
const T_ENTITIES: [(&str, NeType); 6] = [
    ("Paris", NeType::Loc),
    ("Madrid", NeType::Loc),
    ("Lisbon", NeType::Loc),
    ("Macron", NeType::Per),
    ("Renault", NeType::Org),
    ("Cortes", NeType::Org),
];

/// Balanced O/T corpus with gold NE spans and a controlled signal site.
pub fn ne_corpus(n_docs: usize, site: SignalSite, seed: u64) -> Corpus {
    let mut rng = seed::rng(seed);
    let tok = TokenizerConfig::default();
    let filler: Vec<String> = (0..60).map(|i| format!("wort{i}")).collect();
    let docs = (0..n_docs)
        .map(|i| {
            let label = if i % 2 == 0 { "O" } else { "T" };
            let pool = match site {
                SignalSite::Entities if label == "O" => &O_ENTITIES,
                SignalSite::Entities => &T_ENTITIES,
                SignalSite::OutsideEntities if rng.gen_bool(0.5) => &O_ENTITIES,
                SignalSite::OutsideEntities => &T_ENTITIES,
            };
            let mut pieces: Vec<(String, Option<NeType>)> = (0..12)
                .map(|_| (filler.choose(&mut rng).expect("non-empty").clone(), None))
                .collect();
            for _ in 0..2 {
                let (name, t) = pool.choose(&mut rng).expect("non-empty");
                let at = rng.gen_range(0..=pieces.len());
                pieces.insert(at, (name.to_string(), Some(*t)));
            }
            if site == SignalSite::OutsideEntities {
                let marker = if label == "O" { "heimisch" } else { "fremd" };
                let at = rng.gen_range(0..=pieces.len());
                pieces.insert(at, (marker.to_string(), None));
            }
            let mut text = String::new();
            let mut spans = Vec::new();
            for (word, t) in pieces {
                if !text.is_empty() {
                    text.push(' ');
                }
                let start = text.chars().count();
                text.push_str(&word);
                if let Some(t) = t {
                    spans.push(NeSpan::new(start, start + word.chars().count(), t));
                }
            }
            text.push_str(" .");
            Document::new(format!("n{i}"), text, label, &tok)
                .with_spans(spans)
                .expect("spans are built from the text")
        })
        .collect();
    Corpus::new(docs, tok).expect("synthetic corpus is valid")
}

/// Noise documents where `token` appears exactly in the `T` documents.
pub fn planted_token_corpus(n_docs: usize, token: &str, seed: u64) -> Corpus {
    let mut rng = seed::rng(seed);
    let tok = TokenizerConfig::default();
    let docs = (0..n_docs)
        .map(|i| {
            let label = if i % 2 == 0 { "O" } else { "T" };
            let mut words: Vec<String> = (0..10).map(|_| format!("n{}", rng.gen_range(0..50))).collect();
            if label == "T" {
                let at = rng.gen_range(0..=words.len());
                words.insert(at, token.to_string());
            }
            Document::new(format!("p{i}"), words.join(" "), label, &tok)
        })
        .collect();
    Corpus::new(docs, tok).expect("synthetic corpus is valid")
}
