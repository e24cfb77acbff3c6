//! Labeled corpora with optional standoff NE spans and token-aligned POS tags.

mod split;
mod tokenize;

pub use split::{split_corpus, SplitSpec};
pub use tokenize::{is_tag_token, Token, TokenizerConfig};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::masking::{MaskKind, MaskRecipe};
use crate::{Error, Result};

/// Coarse named-entity type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NeType {
    #[serde(rename = "LOC")]
    Loc,
    #[serde(rename = "PER")]
    Per,
    #[serde(rename = "ORG")]
    Org,
}

impl NeType {
    pub fn as_str(self) -> &'static str {
        match self {
            NeType::Loc => "LOC",
            NeType::Per => "PER",
            NeType::Org => "ORG",
        }
    }

    /// The atomic mask token, e.g. `[LOC]`.
    pub fn tag(self) -> String {
        format!("[{}]", self.as_str())
    }

    pub const ALL: [NeType; 3] = [NeType::Loc, NeType::Per, NeType::Org];
}

impl fmt::Display for NeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NeType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LOC" => Ok(NeType::Loc),
            "PER" => Ok(NeType::Per),
            "ORG" => Ok(NeType::Org),
            other => Err(Error::Format(format!("unknown NE type {other:?}"))),
        }
    }
}

/// Standoff NE annotation in character offsets, `end` exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NeSpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub ne_type: NeType,
}

impl NeSpan {
    pub fn new(start: usize, end: usize, ne_type: NeType) -> Self {
        Self { start, end, ne_type }
    }

    fn len(&self) -> usize {
        self.end - self.start
    }

    fn overlaps(&self, other: &NeSpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Checks bounds and resolves overlaps: the longest span wins, ties go to the
/// earliest start. Output is sorted by start offset.
pub fn normalize_spans(doc: &str, text_len: usize, spans: &[NeSpan]) -> Result<Vec<NeSpan>> {
    for s in spans {
        if s.start >= s.end || s.end > text_len {
            return Err(Error::InvalidSpan {
                doc: doc.to_string(),
                detail: format!("[{}, {}) against text length {text_len}", s.start, s.end),
            });
        }
    }
    let mut by_priority: Vec<NeSpan> = spans.to_vec();
    by_priority.sort_by(|a, b| b.len().cmp(&a.len()).then(a.start.cmp(&b.start)).then(a.cmp(b)));
    let mut kept: Vec<NeSpan> = Vec::new();
    for s in by_priority {
        if !kept.iter().any(|k| k.overlaps(&s)) {
            kept.push(s);
        }
    }
    kept.sort();
    Ok(kept)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub label: String,
    pub ne_spans: Option<Vec<NeSpan>>,
    pub pos_tags: Option<Vec<String>>,
}

impl Document {
    /// Builds a document, tokenizing `text` and validating annotations.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        label: impl Into<String>,
        tokenizer: &TokenizerConfig,
    ) -> Self {
        let text = text.into();
        Self {
            id: id.into(),
            tokens: tokenizer.tokenize(&text),
            text,
            label: label.into(),
            ne_spans: None,
            pos_tags: None,
        }
    }

    pub fn with_spans(mut self, spans: Vec<NeSpan>) -> Result<Self> {
        let len = self.text.chars().count();
        self.ne_spans = Some(normalize_spans(&self.id, len, &spans)?);
        Ok(self)
    }

    pub fn with_pos_tags(mut self, tags: Vec<String>) -> Result<Self> {
        check_pos_alignment(&self.id, &self.tokens, &tags)?;
        self.pos_tags = Some(tags);
        Ok(self)
    }
}

fn check_pos_alignment(doc: &str, tokens: &[String], tags: &[String]) -> Result<()> {
    if tags.len() != tokens.len() {
        return Err(Error::Alignment {
            doc: doc.to_string(),
            detail: format!("{} POS tags for {} tokens", tags.len(), tokens.len()),
        });
    }
    Ok(())
}

/// On-disk formats for corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::Format(format!("unknown corpus format {other:?}"))),
        }
    }
}

impl CorpusFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        path.extension()
            .and_then(|e| e.to_str())
            .ok_or_else(|| Error::Format(format!("cannot infer format of {}", path.display())))?
            .parse()
    }
}

/// One JSONL line. `tokens` and `mask` only appear on masked corpora, whose
/// tokens are not a tokenization of any raw text.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Record {
    id: String,
    text: String,
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ne_spans: Option<Vec<NeSpan>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pos_tags: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mask: Option<MaskKind>,
}

/// An immutable, validated set of documents with a closed label set.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    labels: Vec<String>,
    tokenizer: TokenizerConfig,
    mask: Option<MaskRecipe>,
}

impl Corpus {
    /// Validates id uniqueness, span bounds and POS alignment.
    pub fn new(documents: Vec<Document>, tokenizer: TokenizerConfig) -> Result<Self> {
        Self::with_mask(documents, tokenizer, None)
    }

    pub(crate) fn with_mask(
        documents: Vec<Document>,
        tokenizer: TokenizerConfig,
        mask: Option<MaskRecipe>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        let mut labels = BTreeSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateId(d.id.clone()));
            }
            if let Some(spans) = &d.ne_spans {
                let normalized = normalize_spans(&d.id, d.text.chars().count(), spans)?;
                if &normalized != spans {
                    return Err(Error::InvalidSpan {
                        doc: d.id.clone(),
                        detail: "spans overlap or are unsorted".into(),
                    });
                }
            }
            if let Some(tags) = &d.pos_tags {
                check_pos_alignment(&d.id, &d.tokens, tags)?;
            }
            labels.insert(d.label.clone());
        }
        Ok(Self {
            documents,
            labels: labels.into_iter().collect(),
            tokenizer,
            mask,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Sorted label set.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tokenizer(&self) -> &TokenizerConfig {
        &self.tokenizer
    }

    pub fn mask(&self) -> Option<&MaskRecipe> {
        self.mask.as_ref()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.id.as_str())
    }

    pub fn label_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for d in &self.documents {
            *counts.entry(d.label.as_str()).or_insert(0) += 1;
        }
        counts
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Returns a corpus with the same documents but new labels.
    pub fn relabel<F>(&self, mut label_of: F) -> Result<Corpus>
    where
        F: FnMut(&Document) -> Result<String>,
    {
        let docs = self
            .documents
            .iter()
            .map(|d| {
                let mut d = d.clone();
                d.label = label_of(&d)?;
                Ok(d)
            })
            .collect::<Result<Vec<_>>>()?;
        Corpus::with_mask(docs, self.tokenizer, self.mask.clone())
    }

    pub(crate) fn subset(&self, keep: &[bool]) -> Corpus {
        let docs = self
            .documents
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(d, _)| d.clone())
            .collect();
        Corpus::with_mask(docs, self.tokenizer, self.mask.clone())
            .expect("subset of a valid corpus is valid")
    }

    /// Parses JSONL text. Records carrying explicit `tokens` are taken verbatim.
    pub fn from_jsonl_str(input: &str, tokenizer: TokenizerConfig) -> Result<Self> {
        Self::from_jsonl_reader(input.as_bytes(), tokenizer)
    }

    fn from_jsonl_reader<R: BufRead>(reader: R, tokenizer: TokenizerConfig) -> Result<Self> {
        let mut docs = Vec::new();
        let mut mask_kind: Option<MaskKind> = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(&line)
                .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
            if let Some(kind) = rec.mask {
                if mask_kind.is_some_and(|k| k != kind) {
                    return Err(Error::Format(format!(
                        "line {}: mixed mask provenance",
                        lineno + 1
                    )));
                }
                mask_kind = Some(kind);
            }
            let mut doc = match rec.tokens {
                Some(tokens) => Document {
                    id: rec.id,
                    text: rec.text,
                    tokens,
                    label: rec.label,
                    ne_spans: None,
                    pos_tags: None,
                },
                None => Document::new(rec.id, rec.text, rec.label, &tokenizer),
            };
            if let Some(spans) = rec.ne_spans {
                doc = doc.with_spans(spans)?;
            }
            if let Some(tags) = rec.pos_tags {
                doc = doc.with_pos_tags(tags)?;
            }
            docs.push(doc);
        }
        let recipe = mask_kind.map(|k| MaskRecipe::observed(k, &docs));
        Corpus::with_mask(docs, tokenizer, recipe)
    }

    /// Parses `id \t label \t text` lines.
    pub fn from_tsv_str(input: &str, tokenizer: TokenizerConfig) -> Result<Self> {
        let mut docs = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let (Some(id), Some(label), Some(text)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::Format(format!(
                    "line {}: expected id<TAB>label<TAB>text",
                    lineno + 1
                )));
            };
            docs.push(Document::new(id, text, label, &tokenizer));
        }
        Corpus::new(docs, tokenizer)
    }

    /// Serializes to JSONL, one record per document in corpus order.
    pub fn to_jsonl_string(&self) -> String {
        let mut out = String::new();
        let kind = self.mask.as_ref().map(|m| m.kind);
        for d in &self.documents {
            let rec = Record {
                id: d.id.clone(),
                text: d.text.clone(),
                label: d.label.clone(),
                ne_spans: d.ne_spans.clone(),
                pos_tags: d.pos_tags.clone(),
                tokens: kind.map(|_| d.tokens.clone()),
                mask: kind,
            };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_jsonl_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// Reads and validates a corpus file.
pub fn load_corpus(path: &Path, format: CorpusFormat, tokenizer: TokenizerConfig) -> Result<Corpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::Jsonl => Corpus::from_jsonl_reader(BufReader::new(file), tokenizer),
        CorpusFormat::Tsv => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Corpus::from_tsv_str(&text, tokenizer)
        }
    }
}
